//! Acceptance suite. Runs every criterion at full size and prints one
//! PASS/FAIL line each; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use sensikit::asymptotics::{linear_sigma_components, linear_moments, sigma_plugin, v_eff, v_pf, v_rank};
use sensikit::experiments::{
    run_clt, run_convergence, run_dimension, run_mse, ExperimentConfig, Method, Study,
};
use sensikit::models::{linear_model, LinearModelParams, ModelDescriptor};
use sensikit::pickfreeze::{pf_identity_check, sobol_sn_values, sobol_tn_values};
use sensikit::rank::{
    chatterjee_xi_with, compute_ranks, neighbor_map, rank_sobol, xi_denominator, NeighborKind,
};
use sensikit::sampling::{sample_pickfreeze, RngStream, UniformSource};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn gfunction6() -> ModelDescriptor {
    ModelDescriptor::Gfunction {
        a: (1..=6).map(f64::from).collect(),
    }
}

fn mse_config(budget: usize, reps: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(Study::Mse, gfunction6());
    c.budget = Some(budget);
    c.replications = reps;
    c.seed = SEED;
    c
}

fn table1() -> Outcome {
    let r = run_mse(&mse_config(700, 500)).expect("mse study");
    let pf = Method::PfTn;
    let rank1 = r.mean(Method::RankSobol, 1).unwrap();
    let pf1 = r.mean(pf, 1).unwrap();
    let ordered = (1..=6).all(|i| r.mean(Method::RankSobol, i).unwrap() < r.mean(pf, i).unwrap());
    let pass = (0.0005..=0.002).contains(&rank1) && (0.005..=0.02).contains(&pf1) && ordered;
    outcome(
        pass,
        format!("rank MSE(S1) {rank1:.6}, PF MSE(S1) {pf1:.6}, rank < PF on all six: {ordered}"),
    )
}

fn table2() -> Outcome {
    let r = run_mse(&mse_config(70, 500)).expect("mse study");
    let rank1 = r.mean(Method::RankSobol, 1).unwrap();
    let pf1 = r.mean(Method::PfTn, 1).unwrap();
    let within = |v: f64, target: f64| v >= target / 2.0 && v <= target * 2.0;
    outcome(
        within(pf1, 0.1129) && within(rank1, 0.0117),
        format!("PF MSE(S1) {pf1:.5} (target 0.1129 x/ 2), rank MSE(S1) {rank1:.5} (target 0.0117 x/ 2)"),
    )
}

fn convergence() -> Outcome {
    let mut c = ExperimentConfig::new(Study::Convergence, gfunction6());
    c.sizes = vec![100, 500, 1000];
    c.seed = SEED;
    let r = run_convergence(&c).expect("convergence study");
    let small = r.max_error(Method::RankSobol, 7 * 100).unwrap();
    let large = r.max_error(Method::RankSobol, 7 * 1000).unwrap();
    outcome(
        large <= 0.05 && large < small,
        format!("max |error| at N=100: {small:.4}, at N=1000: {large:.4}"),
    )
}

fn dimension() -> Outcome {
    let mut c = ExperimentConfig::new(Study::Dimension, gfunction6());
    c.budget = Some(200);
    c.dims = vec![6, 10, 15, 20];
    c.replications = 200;
    c.seed = SEED;
    let per_p = run_dimension(&c).expect("dimension study");
    let mut worst = f64::INFINITY;
    let mut pass = per_p.len() == 4;
    for (p, r) in &per_p {
        for i in 1..=*p {
            let (rank, pf) = (r.mean(Method::RankSobol, i).unwrap(), r.mean(Method::PfTn, i).unwrap());
            pass &= rank <= pf;
            worst = worst.min(pf / rank);
        }
    }
    outcome(
        pass,
        format!("{} dimensions, smallest PF/rank MSE ratio {worst:.2}", per_p.len()),
    )
}

fn variance_formula() -> Outcome {
    let model = linear_model(&LinearModelParams::new(2.0, 3).unwrap());
    let closed = linear_sigma_components(2.0, 3, 0).unwrap();
    let plug = sigma_plugin(&model, 0, 1_000_000, RngStream::new(SEED, 5), false).unwrap();
    let (a, b) = (closed.numerator_variance(), plug.numerator_variance());
    // The closed form also equals the rank variance without its (p+1) weight.
    let from_v_rank = v_rank(2.0, 3).unwrap()[0];
    let rel = (b - a).abs() / a;
    outcome(
        rel <= 0.02,
        format!("closed {a:.5}, plug-in {b:.5}, relative gap {:.3}% (v_rank entry 1: {from_v_rank:.5})", 100.0 * rel),
    )
}

fn clt() -> Outcome {
    let r = run_clt(2.0, 3, 5000, 1000, 0.95, SEED).unwrap();
    let rel = (r.scaled_variance - r.sigma2).abs() / r.sigma2;
    let pass = rel <= 0.15 && (0.92..=0.98).contains(&r.coverage);
    outcome(
        pass,
        format!(
            "n Var {:.4} vs sigma^2 {:.4} ({:.1}% off), coverage {:.3}, skewness {:.3}",
            r.scaled_variance,
            r.sigma2,
            100.0 * rel,
            r.coverage,
            r.skewness
        ),
    )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn uniforms(rng: &mut UniformSource, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.uniform()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = RngStream::new(SEED, 7).rng();
    let monotone: [fn(f64) -> f64; 4] = [|x| 3.0 * x - 1.0, |x| x * x * x, f64::exp, |x| (x + 1.0).ln()];

    let mut rank_checks = 0;
    for _ in 0..100 {
        let n = 50 + (rng.next_u64() % 150) as usize;
        let v = uniforms(&mut rng, n);
        let y: Vec<f64> = v
            .iter()
            .zip(uniforms(&mut rng, n))
            .map(|(a, w)| (6.0 * a).sin() + w)
            .collect();
        let s = rank_sobol(&v, &y).unwrap();
        let xi_p = chatterjee_xi_with(&v, &y, NeighborKind::Prime).unwrap();
        let xi_c = chatterjee_xi_with(&v, &y, NeighborKind::Cyclic).unwrap();
        for t in monotone {
            let tv: Vec<f64> = v.iter().map(|&a| t(a)).collect();
            let ty: Vec<f64> = y.iter().map(|&a| t(a + 2.0)).collect();
            rank_checks += 1;
            if !close(rank_sobol(&tv, &y).unwrap(), s)
                || !close(chatterjee_xi_with(&tv, &y, NeighborKind::Prime).unwrap(), xi_p)
                || !close(chatterjee_xi_with(&tv, &y, NeighborKind::Cyclic).unwrap(), xi_c)
                || !close(chatterjee_xi_with(&tv, &ty, NeighborKind::Prime).unwrap(), xi_p)
            {
                failures.push("monotone invariance");
            }
        }
    }

    let model = linear_model(&LinearModelParams::new(1.5, 3).unwrap());
    for k in 0..50 {
        let d = sample_pickfreeze(&model, &[0], 500, RngStream::new(SEED, 100 + k)).unwrap();
        let t = sobol_tn_values(&d.y, &d.y_u).unwrap();
        if t.to_bits() != sobol_tn_values(&d.y_u, &d.y).unwrap().to_bits() {
            failures.push("T_n swap symmetry");
        }
        let s = sobol_sn_values(&d.y, &d.y_u).unwrap();
        let v = uniforms(&mut rng, d.y.len());
        let xs = rank_sobol(&v, &d.y).unwrap();
        for (a, b) in [(2.5, 1.0), (-0.75, 40.0), (1e3, -7.0)] {
            let f = |w: &[f64]| -> Vec<f64> { w.iter().map(|x| a * x + b).collect() };
            let (fy, fu) = (f(&d.y), f(&d.y_u));
            if !close(sobol_sn_values(&fy, &fu).unwrap(), s)
                || !close(sobol_tn_values(&fy, &fu).unwrap(), t)
                || !close(rank_sobol(&v, &fy).unwrap(), xs)
            {
                failures.push("affine output invariance");
            }
        }
    }

    for n in 2..=50usize {
        let y = uniforms(&mut rng, n);
        let nf = n as f64;
        if !close(xi_denominator(&y).unwrap(), (nf * nf - 1.0) / (6.0 * nf * nf)) {
            failures.push("xi denominator");
        }
    }

    let mut perms = 0usize;
    for n in 2..=8usize {
        for perm in permutations(n) {
            perms += 1;
            let v: Vec<f64> = perm.iter().map(|&r| r as f64).collect();
            let map = neighbor_map(&compute_ranks(&v).unwrap(), NeighborKind::Cyclic).map;
            let mut seen = vec![false; n];
            let mut ok = true;
            for (j, &m) in map.iter().enumerate() {
                ok &= m != j && !seen[m];
                seen[m] = true;
            }
            // Following the map from any point visits all n points.
            let (mut j, mut steps) = (0, 0);
            loop {
                j = map[j];
                steps += 1;
                if j == 0 {
                    break;
                }
            }
            if !ok || steps != n {
                failures.push("cyclic neighbor map");
            }
        }
    }

    failures.dedup();
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{rank_checks} monotone checks, 150 affine checks, n=2..50 denominators, {perms} permutations")
        } else {
            format!("violated: {}", failures.join(", "))
        },
    )
}

fn pf_identity() -> Outcome {
    let model = linear_model(&LinearModelParams::new(1.0, 2).unwrap());
    let (cov, oracle) = pf_identity_check(&model, &[0], 1_000_000, RngStream::new(SEED, 8)).unwrap();
    let exact = 1.0 / 12.0;
    let (r1, r2) = ((cov - exact).abs() / exact, (cov - oracle).abs() / oracle);
    outcome(
        r1 <= 0.01 && r2 <= 0.015,
        format!("Cov {cov:.6} vs 1/12 ({:.2}% off), nested oracle {oracle:.6} ({:.2}% off)", 100.0 * r1, 100.0 * r2),
    )
}

fn orderings() -> Outcome {
    let grid: Vec<f64> = (1..=40).map(|k| k as f64 / 10.0).collect();
    let (mut ordered, mut worst_gap) = (true, 0.0f64);
    for p in 2..=7 {
        for &alpha in &grid {
            let (pf, rank, eff) = (v_pf(alpha, p).unwrap(), v_rank(alpha, p).unwrap(), v_eff(alpha, p).unwrap());
            let m = linear_moments(alpha, p).unwrap();
            for i in 0..p {
                ordered &= rank[i] <= pf[i];
                let v = if i == 0 { m.vp } else { m.vpa };
                worst_gap = worst_gap.max((rank[i] - eff[i] - v * v).abs());
            }
        }
    }
    outcome(
        ordered && worst_gap <= 1e-10,
        format!("V_Rank <= V_PF on 240 (alpha, p) points: {ordered}; max |V_Rank - V_Eff - v^2| {worst_gap:.2e}"),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("fixed-budget MSE, budget 700", Duration::from_secs(300), table1),
        ("small-sample MSE, budget 70", Duration::from_secs(60), table2),
        ("convergence, N = 100..1000", Duration::from_secs(60), convergence),
        ("dimension study, n = 200", Duration::from_secs(180), dimension),
        ("plug-in vs closed-form variance", Duration::from_secs(60), variance_formula),
        ("limiting law and coverage", Duration::from_secs(300), clt),
        ("exact invariants", Duration::from_secs(10), invariants),
        ("Pick-Freeze covariance identity", Duration::from_secs(30), pf_identity),
        ("variance orderings", Duration::from_secs(1), orderings),
    ];
    let mut failed = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} criterion {}: {name}: {} [{:.2}s of {}s]{}",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { " (too slow)" }
        );
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
