#![no_main]

use libfuzzer_sys::fuzz_target;
use sensikit::data::parse_data_csv;
use sensikit::rank::{rank_cvm_all, rank_sobol_all};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_data_csv(text) {
        assert!(d.n() >= 2 && d.dim() >= 1);
        assert!(d.y().iter().all(|v| v.is_finite()));
        // Parsed designs must be safe to feed to the estimators.
        let _ = rank_sobol_all(&d);
        let _ = rank_cvm_all(&d);
    }
});
