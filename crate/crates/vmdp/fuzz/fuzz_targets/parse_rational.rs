#![no_main]

use libfuzzer_sys::fuzz_target;
use vmdp::Rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(value) = text.parse::<Rational>() else { return };
    // display form must re-parse to the same value
    let round_tripped: Rational = value.to_string().parse().expect("display form must parse");
    assert_eq!(round_tripped, value);
});
