use proptest::prelude::*;

use sensikit::data::parse_data_csv;
use sensikit::models::{gfunction_model, GFunctionParams};
use sensikit::pickfreeze::{sobol_sn_values, sobol_tn_values};
use sensikit::rank::{
    chatterjee_xi, compute_ranks, neighbor_map, rank_cvm_all, rank_sobol, rank_sobol_all,
    NeighborKind,
};
use sensikit::sampling::{sample_iid, RngStream};

fn sample(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = RngStream::new(seed, 0).rng();
    let v: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
    let y = v
        .iter()
        .map(|&a| (5.0 * a).cos() + 0.7 * rng.uniform())
        .collect();
    (v, y)
}

fn transform(kind: u8, s: f64, x: f64) -> f64 {
    match kind % 4 {
        0 => s * x - 3.0,
        1 => x.powi(3) + s * x,
        2 => (s * x).exp(),
        _ => (x + 0.5).ln() * s,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_estimators_ignore_increasing_input_maps(
        seed in any::<u64>(), n in 2usize..300, kind in any::<u8>(), s in 0.1f64..5.0,
    ) {
        let (v, y) = sample(seed, n);
        let tv: Vec<f64> = v.iter().map(|&a| transform(kind, s, a)).collect();
        prop_assert_eq!(rank_sobol(&v, &y).unwrap().to_bits(), rank_sobol(&tv, &y).unwrap().to_bits());
        prop_assert_eq!(chatterjee_xi(&v, &y).unwrap().to_bits(), chatterjee_xi(&tv, &y).unwrap().to_bits());
    }

    #[test]
    fn xi_ignores_increasing_output_maps(
        seed in any::<u64>(), n in 2usize..300, kind in any::<u8>(), s in 0.1f64..5.0,
    ) {
        let (v, y) = sample(seed, n);
        let ty: Vec<f64> = y.iter().map(|&a| transform(kind, s, a + 1.0)).collect();
        prop_assert_eq!(chatterjee_xi(&v, &y).unwrap().to_bits(), chatterjee_xi(&v, &ty).unwrap().to_bits());
    }

    #[test]
    fn rank_estimators_ignore_row_order(seed in any::<u64>(), n in 2usize..200, shift in any::<u64>()) {
        let model = gfunction_model(&GFunctionParams::sequential(3).unwrap());
        let d = sample_iid(&model, n, RngStream::new(seed, 1)).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = RngStream::new(shift, 2).rng();
        for k in (1..n).rev() {
            order.swap(k, (rng.next_u64() % (k as u64 + 1)) as usize);
        }
        let p = d.permuted(&order);
        prop_assert_eq!(rank_sobol_all(&d).unwrap(), rank_sobol_all(&p).unwrap());
        prop_assert_eq!(rank_cvm_all(&d).unwrap(), rank_cvm_all(&p).unwrap());
    }

    #[test]
    fn pooled_estimator_is_swap_symmetric_and_bounded(
        y in prop::collection::vec(-1e3f64..1e3, 2..100),
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::new(seed, 3).rng();
        let yu: Vec<f64> = y.iter().map(|a| a * rng.uniform() + rng.uniform()).collect();
        if let Ok(t) = sobol_tn_values(&y, &yu) {
            prop_assert_eq!(t.to_bits(), sobol_tn_values(&yu, &y).unwrap().to_bits());
            prop_assert!(t.abs() <= 1.0 + 1e-12);
        }
        if let Ok(s) = sobol_sn_values(&y, &yu) {
            prop_assert!(s.is_finite());
        }
    }

    #[test]
    fn rank_sobol_is_bounded(seed in any::<u64>(), n in 2usize..300) {
        let (v, y) = sample(seed, n);
        let s = rank_sobol(&v, &y).unwrap();
        prop_assert!(s.abs() <= 1.0 + 1e-12, "{}", s);
    }

    #[test]
    fn cyclic_map_is_one_cycle(seed in any::<u64>(), n in 2usize..500) {
        let (v, _) = sample(seed, n);
        let map = neighbor_map(&compute_ranks(&v).unwrap(), NeighborKind::Cyclic).map;
        let mut j = 0;
        for step in 1..=n {
            j = map[j];
            prop_assert!(j != 0 || step == n);
        }
        prop_assert_eq!(j, 0);
    }

    #[test]
    fn prime_map_fixes_only_the_maximum(seed in any::<u64>(), n in 2usize..300) {
        let (v, _) = sample(seed, n);
        let r = compute_ranks(&v).unwrap();
        let map = neighbor_map(&r, NeighborKind::Prime).map;
        let fixed: Vec<usize> = (0..n).filter(|&j| map[j] == j).collect();
        prop_assert_eq!(fixed, vec![r.pi_inv()[n - 1]]);
    }

    #[test]
    fn data_csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e9f64..1e9, 3), 2..40)) {
        let mut text = String::from("x1,x2,y\n");
        for r in &rows {
            text.push_str(&format!("{:e},{:e},{:e}\n", r[0], r[1], r[2]));
        }
        let d = parse_data_csv(&text).unwrap();
        prop_assert_eq!(d.n(), rows.len());
        for (j, r) in rows.iter().enumerate() {
            prop_assert_eq!(d.row(j), &r[..2]);
            prop_assert_eq!(d.y()[j], r[2]);
        }
    }

    #[test]
    fn streams_are_reproducible(seed in any::<u64>(), id in any::<u64>()) {
        let model = gfunction_model(&GFunctionParams::sequential(2).unwrap());
        let a = sample_iid(&model, 16, RngStream::new(seed, id)).unwrap();
        let b = sample_iid(&model, 16, RngStream::new(seed, id)).unwrap();
        let c = sample_iid(&model, 16, RngStream::new(seed, id).substream(1)).unwrap();
        prop_assert_eq!(a.y(), b.y());
        prop_assert_ne!(a.y(), c.y());
    }
}
