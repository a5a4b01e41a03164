//! Sequence CSV parser: must never panic, and anything it accepts must
//! survive a write/re-read round trip bit for bit.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(seq) = kravchuk::io::read_sequence(text) else { return };
    let again = kravchuk::io::read_sequence(&kravchuk::io::write_sequence(&seq))
        .expect("writer output must parse");
    assert_eq!(seq.len(), again.len());
    for (a, b) in seq.iter().zip(&again) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
});
