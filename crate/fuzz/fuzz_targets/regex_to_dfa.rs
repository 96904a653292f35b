#![no_main]

use libfuzzer_sys::fuzz_target;
use nabla::{regex_to_dfa, Regex};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if text.len() > 64 {
        return;
    }
    let Ok(re) = Regex::parse(text) else { return };
    let alphabet: Vec<String> = re.literals().iter().map(|c| c.to_string()).collect();
    let dfa = regex_to_dfa(text, &alphabet).expect("literals cover the alphabet");
    let printed = re.to_string();
    assert_eq!(Regex::parse(&printed).expect("printed regex parses"), re);
    assert_eq!(regex_to_dfa(&printed, &alphabet).unwrap(), dfa);
    assert_eq!(dfa.minimize(), dfa);
});
