//! Histogram CSV reader: structural validation over untrusted text must
//! never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = kravchuk::io::read_histogram_csv(text);
});
