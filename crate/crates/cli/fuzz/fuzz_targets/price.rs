#![no_main]

use duopoly_core::Price;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(price) = text.parse::<Price>() else { return };
    if let Price::At(p) = price {
        assert!(p.is_finite() && p >= 0.0);
    }
    assert_eq!(price.to_string().parse::<Price>().ok(), Some(price));
});
