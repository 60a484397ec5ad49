#![no_main]

use duopoly_cli::axis::AxisSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(axis) = text.parse::<AxisSpec>() else { return };
    assert_eq!(axis.to_string().parse::<AxisSpec>(), Ok(axis));
    let values = axis.values();
    assert_eq!(values.len(), axis.points);
    assert_eq!(values[0], axis.min);
    assert_eq!(values[axis.points - 1], axis.max);
    assert!(values.iter().all(|v| v.is_finite()));
});
