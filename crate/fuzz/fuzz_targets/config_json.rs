#![no_main]

use libfuzzer_sys::fuzz_target;
use sensikit::config::{parse_config, CONFIG_KEYS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_config(text) {
        assert!(doc.values.keys().all(|k| CONFIG_KEYS.contains(&k.as_str())));
    }
});
