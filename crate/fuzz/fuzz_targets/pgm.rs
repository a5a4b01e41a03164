//! Binary PGM decoder: arbitrary bytes must never panic it, and any image
//! it accepts must re-encode and decode to the same geometry.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(img) = kravchuk::imaging::read_pgm(data) else { return };
    let bytes = kravchuk::imaging::write_pgm(&img, 65535).expect("decoded images encode");
    let again = kravchuk::imaging::read_pgm(&bytes).expect("own output must decode");
    assert_eq!((img.width(), img.height()), (again.width(), again.height()));
});
