#![no_main]

use libfuzzer_sys::fuzz_target;
use nabla::TimeValue;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(t) = TimeValue::parse_literal(text) {
        assert_eq!(TimeValue::parse_literal(&t.to_string()), Some(t));
    }
});
