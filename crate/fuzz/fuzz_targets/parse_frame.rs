#![no_main]

use libfuzzer_sys::fuzz_target;
use nabla::io::{parse_frame, print_frame};
use nabla::synthesis::classify_frame;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(fr) = parse_frame(text) {
        let printed = print_frame(&fr);
        assert_eq!(parse_frame(&printed).expect("printed frame parses"), fr);
        let _ = classify_frame(&fr);
    }
});
