#![no_main]

use libfuzzer_sys::fuzz_target;
use vmdp::fronts::{parse_front_csv, render_front_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(front) = parse_front_csv(text) else { return };
    // re-rendering the parsed vectors must parse back to the same list
    let vectors = front.exact_vectors();
    if vectors.is_empty() {
        return;
    }
    let rendered = render_front_csv(&vectors, 2, None);
    let reparsed = parse_front_csv(&rendered).expect("rendered front must parse");
    assert_eq!(reparsed.exact_vectors(), vectors);
});
