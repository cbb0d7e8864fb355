#![no_main]

use libfuzzer_sys::fuzz_target;
use vmdp::VmdpModel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = VmdpModel::from_json_str(text) else { return };
    // whatever loads must survive validation and analysis without
    // panicking, and canonical serialization must be a fixed point
    let _ = model.validate();
    let _ = model.analyze();
    let canonical = model.to_json_string();
    let reloaded = VmdpModel::from_json_str(&canonical)
        .expect("canonical form of a loadable model must load");
    assert_eq!(reloaded.to_json_string(), canonical);
});
