#![no_main]

use duopoly_core::RationingRule;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(rule) = text.parse::<RationingRule>() else { return };
    assert_eq!(rule.as_str().parse::<RationingRule>().ok(), Some(rule));
});
