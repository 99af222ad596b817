#![no_main]

use libfuzzer_sys::fuzz_target;
use sensikit::config::{parse_f64_list, parse_grid, parse_usize_list, MAX_LIST_LEN};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_f64_list(text) {
        assert!(v.iter().all(|x| x.is_finite()));
    }
    if let Ok(v) = parse_usize_list(text) {
        assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
    }
    if let Ok(v) = parse_grid(text) {
        assert!(!v.is_empty() && v.len() <= MAX_LIST_LEN);
        assert!(v.iter().all(|x| x.is_finite()));
    }
});
