#![no_main]

use libfuzzer_sys::fuzz_target;
use nabla::io::{parse_system, print_system};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sys) = parse_system(text) {
        let printed = print_system(&sys);
        let back = parse_system(&printed).expect("printed system parses");
        assert_eq!(back, sys);
        assert!(sys.validate_action(2).is_empty());
    }
});
