#![no_main]

use libfuzzer_sys::fuzz_target;
use nabla::parse_formula;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_formula(text) {
        let printed = f.to_string();
        let back = parse_formula(&printed).expect("printed formula parses");
        assert_eq!(back.to_string(), printed);
        assert_eq!(back.desugar(), f.desugar());
    }
});
