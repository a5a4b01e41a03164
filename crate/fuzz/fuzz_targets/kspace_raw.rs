//! Raw k-space container: header parsing and payload decoding must never
//! panic, and accepted fields must round trip exactly (f32 payloads widen
//! to f64 losslessly).

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(k) = kravchuk::imaging::read_kspace_raw(data) else { return };
    let bytes = kravchuk::imaging::write_kspace_raw(&k).expect("decoded fields encode");
    let again = kravchuk::imaging::read_kspace_raw(&bytes).expect("own output must decode");
    assert_eq!((k.width(), k.height()), (again.width(), again.height()));
    for (a, b) in k.data().iter().zip(again.data()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
});
