//! Pick-Freeze estimators of Sobol' and Cramér-von-Mises indices.

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::rank::VARIANCE_GUARD;
use crate::sampling::{check_subset, Evaluator, PickFreezeDesign, RngStream, TripleDesign};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    /// Sample size.
    pub n: usize,
    /// Model calls behind the estimate.
    pub evaluations: u64,
    /// Estimated asymptotic standard deviation of `sqrt(n) (value - S)`.
    pub sigma_hat: Option<f64>,
    /// Confidence interval and its level.
    pub ci: Option<(f64, f64)>,
    pub level: Option<f64>,
}

impl EstimateResult {
    pub fn new(value: f64, n: usize, evaluations: u64) -> Self {
        EstimateResult {
            value,
            n,
            evaluations,
            sigma_hat: None,
            ci: None,
            level: None,
        }
    }

    /// Attaches a symmetric normal interval `value ± z sigma / sqrt(n)`.
    pub fn with_interval(mut self, sigma_hat: f64, z: f64, level: f64) -> Self {
        let half = z * sigma_hat / (self.n as f64).sqrt();
        self.sigma_hat = Some(sigma_hat);
        self.ci = Some((self.value - half, self.value + half));
        self.level = Some(level);
        self
    }
}

fn check_outputs(y: &[f64], y_u: &[f64]) -> Result<()> {
    if y.len() != y_u.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: y_u.len(),
        });
    }
    if y.len() < 2 {
        return Err(Error::invalid("Pick-Freeze estimators need n >= 2"));
    }
    if y.iter().chain(y_u).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("non-finite model output".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Estimator centering both samples at their own empirical means.
pub fn sobol_sn_values(y: &[f64], y_u: &[f64]) -> Result<f64> {
    check_outputs(y, y_u)?;
    let n = y.len() as f64;
    let (my, mu) = (mean(y), mean(y_u));
    let sq = y.iter().map(|a| a * a).sum::<f64>() / n;
    let cross = y.iter().zip(y_u).map(|(a, b)| (a - my) * (b - mu)).sum::<f64>() / n;
    let var = y.iter().map(|a| (a - my) * (a - my)).sum::<f64>() / n;
    if var <= VARIANCE_GUARD * sq {
        return Err(Error::degenerate("output variance is zero"));
    }
    Ok(cross / var)
}

/// Estimator pooling the two samples; symmetric in `y` and `y_u`.
pub fn sobol_tn_values(y: &[f64], y_u: &[f64]) -> Result<f64> {
    check_outputs(y, y_u)?;
    let n = y.len() as f64;
    let mut half_sum = 0.0;
    let mut half_sq = 0.0;
    for (&a, &b) in y.iter().zip(y_u) {
        half_sum += (a + b) / 2.0;
        half_sq += (a * a + b * b) / 2.0;
    }
    let (m, sq) = (half_sum / n, half_sq / n);
    // Every term is symmetric in (a, b), so swapping the samples is exact.
    let mut cross = 0.0;
    let mut var = 0.0;
    for (&a, &b) in y.iter().zip(y_u) {
        let (ca, cb) = (a - m, b - m);
        cross += ca * cb;
        var += (ca * ca + cb * cb) / 2.0;
    }
    let (cross, var) = (cross / n, var / n);
    if var <= VARIANCE_GUARD * sq {
        return Err(Error::degenerate("output variance is zero"));
    }
    Ok(cross / var)
}

pub fn sobol_sn(d: &PickFreezeDesign) -> Result<EstimateResult> {
    let v = sobol_sn_values(&d.y, &d.y_u)?;
    Ok(EstimateResult::new(v, d.n(), d.evaluations))
}

pub fn sobol_tn(d: &PickFreezeDesign) -> Result<EstimateResult> {
    let v = sobol_tn_values(&d.y, &d.y_u)?;
    Ok(EstimateResult::new(v, d.n(), d.evaluations))
}

fn sorted(v: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut s: Vec<f64> = v.collect();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Triple-sample Cramér-von-Mises estimator using `W` as integration nodes.
///
/// Runs in `O(n log n)`: both indicators hold at node `w` exactly when
/// `max(Y_j, Y^u_j) <= w`.
pub fn cvm_pickfreeze(d: &TripleDesign) -> Result<EstimateResult> {
    check_outputs(&d.y, &d.y_u)?;
    check_outputs(&d.y, &d.w)?;
    let n = d.n() as f64;
    let sy = sorted(d.y.iter().copied());
    let su = sorted(d.y_u.iter().copied());
    let sm = sorted(d.y.iter().zip(&d.y_u).map(|(a, b)| a.max(*b)));
    let frac = |s: &[f64], w: f64| s.partition_point(|&a| a <= w) as f64 / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &w in &d.w {
        let a = frac(&sy, w);
        let b = frac(&su, w);
        let c = frac(&sm, w);
        num += c - a * b;
        den += a - a * a;
    }
    if den <= 0.0 {
        return Err(Error::degenerate(
            "Cramér-von-Mises denominator is zero; output is constant over the W nodes",
        ));
    }
    Ok(EstimateResult::new(num / den, d.n(), d.evaluations))
}

/// Inner draws per outer point in the nested conditional-variance oracle.
pub const NESTED_INNER: usize = 4;

/// Diagnostic for the identity `Cov(Y, Y^u) = Var(E[Y | X_u])`.
///
/// Returns the empirical covariance from an `n`-row Pick-Freeze sample and
/// an independent nested Monte-Carlo estimate: `n` outer draws of `X_u`,
/// `NESTED_INNER` inner draws of the rest, with the usual `s^2 / K`
/// correction for inner noise.
pub fn pf_identity_check(
    model: &ModelSpec,
    u: &[usize],
    n: usize,
    stream: RngStream,
) -> Result<(f64, f64)> {
    if n < 100 {
        return Err(Error::invalid(format!(
            "identity check needs n >= 100, got {n}"
        )));
    }
    check_subset(u, model.dim())?;
    let d = crate::sampling::sample_pickfreeze(model, u, n, stream.substream(0))?;
    let nf = n as f64;
    let (my, mu) = (mean(&d.y), mean(&d.y_u));
    let cov = d
        .y
        .iter()
        .zip(&d.y_u)
        .map(|(a, b)| (a - my) * (b - mu))
        .sum::<f64>()
        / nf;

    let p = model.dim();
    let inputs = model.inputs();
    let k = NESTED_INNER as f64;
    let mut rng = stream.substream(1).rng();
    let mut eval = Evaluator::new(model);
    let mut x = vec![0.0; p];
    let mut means = Vec::with_capacity(n);
    let mut noise = 0.0;
    for _ in 0..n {
        for &i in u {
            x[i] = inputs[i].quantile(rng.uniform());
        }
        let mut inner = [0.0; NESTED_INNER];
        for slot in inner.iter_mut() {
            for i in (0..p).filter(|i| !u.contains(i)) {
                x[i] = inputs[i].quantile(rng.uniform());
            }
            *slot = eval.call(&x);
        }
        let m = inner.iter().sum::<f64>() / k;
        noise += inner.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (k - 1.0);
        means.push(m);
    }
    let mm = mean(&means);
    let var_means = means.iter().map(|m| (m - mm) * (m - mm)).sum::<f64>() / (nf - 1.0);
    let var_cond = var_means - noise / nf / k;
    Ok((cov, var_cond))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::models::{linear_model, LinearModelParams};
    use crate::rank::chatterjee_xi;
    use crate::sampling::{sample_iid, sample_pickfreeze, sample_triple};

    fn lin(alpha: f64, p: usize) -> ModelSpec {
        linear_model(&LinearModelParams::new(alpha, p).unwrap())
    }

    fn identity_model(p: usize) -> ModelSpec {
        ModelSpec::new("x1", p, Arc::new(|x: &[f64]| x[0])).unwrap()
    }

    #[test]
    fn full_freeze_gives_one() {
        let d = sample_pickfreeze(&lin(1.5, 3), &[0, 1, 2], 1000, RngStream::new(1, 0)).unwrap();
        assert_eq!(sobol_sn(&d).unwrap().value, 1.0);
        assert_eq!(sobol_tn(&d).unwrap().value, 1.0);
    }

    #[test]
    fn independent_outputs_give_zero() {
        let a = sample_iid(&lin(1.0, 2), 100_000, RngStream::new(2, 0)).unwrap();
        let b = sample_iid(&lin(1.0, 2), 100_000, RngStream::new(2, 1)).unwrap();
        assert!(sobol_sn_values(a.y(), b.y()).unwrap().abs() <= 0.02);
        assert!(sobol_tn_values(a.y(), b.y()).unwrap().abs() <= 0.02);
    }

    #[test]
    fn linear_first_index() {
        let d = sample_pickfreeze(&lin(2.0, 3), &[0], 100_000, RngStream::new(3, 0)).unwrap();
        let sn = sobol_sn(&d).unwrap();
        let tn = sobol_tn(&d).unwrap();
        assert_eq!(sn.evaluations, 200_000);
        assert!((sn.value - 2.0 / 3.0).abs() <= 0.02);
        assert!((tn.value - 2.0 / 3.0).abs() <= 0.02);
    }

    #[test]
    fn tn_swap_symmetry_and_guard() {
        let d = sample_pickfreeze(&lin(0.7, 4), &[2], 999, RngStream::new(4, 0)).unwrap();
        let a = sobol_tn(&d).unwrap().value;
        let b = sobol_tn(&d.swapped()).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
        let c = PickFreezeDesign::from_outputs(vec![0], vec![3.0; 10], vec![3.0; 10]).unwrap();
        assert!(matches!(sobol_sn(&c), Err(Error::Degenerate(_))));
        assert!(matches!(sobol_tn(&c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cvm_contracts() {
        let m = lin(1.0, 3);
        let t = sample_triple(&m, &[0, 1, 2], 500, RngStream::new(5, 0)).unwrap();
        assert_eq!(cvm_pickfreeze(&t).unwrap().value, 1.0);
        let a = sample_iid(&m, 10_000, RngStream::new(5, 1)).unwrap();
        let b = sample_iid(&m, 10_000, RngStream::new(5, 2)).unwrap();
        let w = sample_iid(&m, 10_000, RngStream::new(5, 3)).unwrap();
        let ind = TripleDesign::from_outputs(vec![0], a.y().to_vec(), b.y().to_vec(), w.y().to_vec())
            .unwrap();
        assert!(cvm_pickfreeze(&ind).unwrap().value.abs() <= 0.05);
        let c = TripleDesign::from_outputs(vec![0], vec![1.0; 5], vec![1.0; 5], vec![1.0; 5]).unwrap();
        assert!(matches!(cvm_pickfreeze(&c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cvm_matches_brute_force() {
        let t = sample_triple(&lin(1.3, 3), &[1], 80, RngStream::new(6, 0)).unwrap();
        let n = 80.0;
        let (mut num, mut den) = (0.0, 0.0);
        for &w in &t.w {
            let a = t.y.iter().filter(|&&y| y <= w).count() as f64 / n;
            let b = t.y_u.iter().filter(|&&y| y <= w).count() as f64 / n;
            let c = t.y.iter().zip(&t.y_u).filter(|(y, z)| **y <= w && **z <= w).count() as f64 / n;
            num += c - a * b;
            den += a - a * a;
        }
        assert!((cvm_pickfreeze(&t).unwrap().value - num / den).abs() < 1e-12);
    }

    #[test]
    fn cvm_agrees_with_xi_on_identity_model() {
        let m = identity_model(2);
        let t = sample_triple(&m, &[0], 10_000, RngStream::new(7, 0)).unwrap();
        let cvm = cvm_pickfreeze(&t).unwrap().value;
        assert!((cvm - 1.0).abs() <= 0.02);
        let d = sample_iid(&m, 10_000, RngStream::new(7, 1)).unwrap();
        let xi = chatterjee_xi(&d.column(0), d.y()).unwrap();
        assert!((cvm - xi).abs() <= 0.05);
    }

    #[test]
    fn cvm_leakage_bound() {
        for &n in &[100usize, 1000] {
            for rep in 0..50 {
                let t = sample_triple(&lin(1.0, 2), &[0], n, RngStream::new(8, rep)).unwrap();
                let v = cvm_pickfreeze(&t).unwrap().value;
                let eps = 2.0 / n as f64;
                assert!(v >= -eps && v <= 1.0 + eps, "{v}");
            }
        }
    }

    #[test]
    fn identity_check_linear() {
        let (cov, var) = pf_identity_check(&lin(1.0, 2), &[0], 1_000_000, RngStream::new(9, 0)).unwrap();
        let exact = 1.0 / 12.0;
        assert!((cov - exact).abs() < 0.01 * exact);
        assert!((var - exact).abs() < 0.01 * exact, "{var}");
        assert!((cov - var).abs() < 0.015 * exact);
    }

    #[test]
    fn identity_check_edge_cases() {
        let c = ModelSpec::new("c", 2, Arc::new(|_: &[f64]| 4.0)).unwrap();
        let (cov, var) = pf_identity_check(&c, &[0], 200, RngStream::new(1, 1)).unwrap();
        assert_eq!((cov, var), (0.0, 0.0));
        let m = lin(1.0, 2);
        let (cov, var) = pf_identity_check(&m, &[0, 1], 50_000, RngStream::new(1, 2)).unwrap();
        assert!((cov - 1.0 / 6.0).abs() < 0.005);
        assert!((var - 1.0 / 6.0).abs() < 0.005);
        assert!(pf_identity_check(&m, &[0], 99, RngStream::new(1, 3)).is_err());
    }

    #[test]
    fn interval_brackets_value() {
        let r = EstimateResult::new(0.4, 100, 200).with_interval(0.5, 1.96, 0.95);
        let (lo, hi) = r.ci.unwrap();
        assert!(lo <= 0.4 && 0.4 <= hi);
        assert!((hi - lo - 2.0 * 1.96 * 0.05).abs() < 1e-12);
    }
}
