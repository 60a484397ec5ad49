#![no_main]

use duopoly_cli::config::{parse_config, Overrides};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(entries) = parse_config(text) else { return };
    let mut keys: Vec<&str> = entries.iter().map(|(k, _)| k.as_str()).collect();
    keys.sort_unstable();
    keys.dedup();
    assert_eq!(keys.len(), entries.len(), "duplicate key accepted");
    if let Ok(overrides) = Overrides::from_entries(&entries) {
        let _ = overrides.resolve();
    }
});
