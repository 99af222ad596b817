//! Limiting variances of the Sobol' estimators and confidence intervals.
//!
//! The rank estimator of a first-order index satisfies
//! `sqrt(n) (xi_n - S) -> N(0, sigma^2)` with `sigma^2 = g' (Sigma_B + Sigma_C) g`,
//! where `g` is the gradient of `Psi(x, y, z) = (x - y^2) / (z - y^2)` at
//! `m_B = (E[Y Y'], E[Y], E[Y^2])`. Writing `mu(x) = E[Y | X_i = x]`:
//!
//! * `Sigma_B` collects conditional (co)variances of `Y Y'`, `Y` and `Y^2`
//!   given `X_i`, where `Y'` is a second output sharing `X_i`.
//! * `Sigma_C` is the covariance of the vector `(mu^2, mu, E[Y^2 | X_i])`,
//!   evaluated through its Brownian-bridge representation
//!   `int int m_k(s) m_l(t) (min(s, t) - s t) ds dt` in rank space.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::pickfreeze::EstimateResult;
use crate::rank::{compute_ranks, VARIANCE_GUARD};
use crate::sampling::RngStream;

/// Moments of the linear model's nuisance sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    /// First two moments and variance of `X_2 + ... + X_p`.
    pub m1p: f64,
    pub m2p: f64,
    pub vp: f64,
    /// First two moments and variance of `alpha X_1 + X_3 + ... + X_p`.
    pub m1pa: f64,
    pub m2pa: f64,
    pub vpa: f64,
}

// The closed forms are polynomials in alpha, so alpha = 0 (input 1 drops
// out) is accepted here even though the model itself needs alpha > 0.
fn check_linear(alpha: f64, p: usize) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
    }
    if p < 2 {
        return Err(Error::invalid(format!("p must be >= 2, got {p}")));
    }
    Ok(())
}

pub fn linear_moments(alpha: f64, p: usize) -> Result<MomentSet> {
    check_linear(alpha, p)?;
    let pf = p as f64;
    let m1p = (pf - 1.0) / 2.0;
    let m2p = (pf - 1.0) * (3.0 * pf - 2.0) / 12.0;
    let m1pa = (alpha + pf - 2.0) / 2.0;
    let m2pa = alpha * alpha / 3.0 + (pf - 2.0) * alpha / 2.0 + (pf - 2.0) * (3.0 * pf - 5.0) / 12.0;
    Ok(MomentSet {
        m1p,
        m2p,
        vp: m2p - m1p * m1p,
        m1pa,
        m2pa,
        vpa: m2pa - m1pa * m1pa,
    })
}

#[derive(Clone, Copy)]
enum Kind {
    PickFreeze,
    Rank,
    Efficient,
}

/// The shared quartic in the target coefficient `c`, nuisance mean `m` and
/// nuisance variance `v`.
fn quartic(kind: Kind, c: f64, m: f64, v: f64) -> f64 {
    let w = match kind {
        Kind::PickFreeze => 2.0,
        _ => 4.0,
    };
    let last = match kind {
        Kind::PickFreeze => v * (v + 2.0 * m * m),
        Kind::Rank => v * (v + 4.0 * m * m),
        Kind::Efficient => 4.0 * v * m * m,
    };
    let c2 = c * c;
    4.0 / 45.0 * c2 * c2 + m / 3.0 * c2 * c + (w * v + m * m) / 3.0 * c2 + w * m * v * c + last
}

fn per_index(kind: Kind, alpha: f64, p: usize) -> Result<Vec<f64>> {
    let ms = linear_moments(alpha, p)?;
    let mut out = Vec::with_capacity(p);
    out.push(quartic(kind, alpha, ms.m1p, ms.vp));
    let rest = quartic(kind, 1.0, ms.m1pa, ms.vpa);
    out.extend(std::iter::repeat_n(rest, p - 1));
    Ok(out)
}

/// Budget-weighted Pick-Freeze variances `(p + 1) Var(Y Y^i)` for the
/// linear model `alpha X_1 + X_2 + ... + X_p`.
pub fn v_pf(alpha: f64, p: usize) -> Result<Vec<f64>> {
    let w = (p + 1) as f64;
    Ok(per_index(Kind::PickFreeze, alpha, p)?
        .into_iter()
        .map(|v| w * v)
        .collect())
}

/// Limiting variances of the rank estimators of `E[E[Y | X_i]^2]`.
pub fn v_rank(alpha: f64, p: usize) -> Result<Vec<f64>> {
    per_index(Kind::Rank, alpha, p)
}

/// Efficiency bounds for estimating `E[E[Y | X_i]^2]`.
pub fn v_eff(alpha: f64, p: usize) -> Result<Vec<f64>> {
    per_index(Kind::Efficient, alpha, p)
}

/// `Cov(Y Y^1, Y Y^i)` for `i >= 2` in the linear model.
///
/// Exact expansion with `m` and `v` the mean and variance of a sum of
/// `p - 2` standard uniforms. Accepts `alpha = 0`.
pub fn cov_yy1_yyi(alpha: f64, p: usize) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
    }
    if p < 2 {
        return Err(Error::invalid(format!("p must be >= 2, got {p}")));
    }
    let m = (p as f64 - 2.0) / 2.0;
    let v = (p as f64 - 2.0) / 12.0;
    let h = m + 0.5;
    let a = alpha;
    Ok(a.powi(4) / 24.0
        + (2.0 * m + 1.0) * a.powi(3) / 12.0
        + (7.0 / 144.0 + v / 4.0 + h * h / 6.0) * a * a
        + (1.0 / 12.0 + m / 6.0 + v / 2.0 + m * v) * a
        + (v + 1.0 / 6.0) * h * h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaComponents {
    pub sigma_b: Matrix3<f64>,
    pub sigma_c: Matrix3<f64>,
    /// `(E[Y Y'], E[Y], E[Y^2])`.
    pub m_b: Vector3<f64>,
    pub g: Vector3<f64>,
    pub sigma2: f64,
    /// Smallest eigenvalue of `Sigma_B + Sigma_C`.
    pub min_eigenvalue: f64,
}

impl SigmaComponents {
    fn assemble(sigma_b: Matrix3<f64>, sigma_c: Matrix3<f64>, m_b: Vector3<f64>) -> Result<Self> {
        let (exy, ey, ey2) = (m_b[0], m_b[1], m_b[2]);
        let var = ey2 - ey * ey;
        // Negated so that a NaN variance is also rejected.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(var > VARIANCE_GUARD * ey2.abs()) {
            return Err(Error::degenerate(
                "Var(Y) = 0; the index and its limiting variance are undefined",
            ));
        }
        let s = (exy - ey * ey) / var;
        let g = Vector3::new(1.0, 2.0 * ey * (s - 1.0), -s) / var;
        let total = sigma_b + sigma_c;
        let min_eigenvalue = total
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let sigma2 = (g.transpose() * total * g)[0];
        Ok(SigmaComponents {
            sigma_b,
            sigma_c,
            m_b,
            g,
            sigma2: sigma2.max(0.0),
            min_eigenvalue,
        })
    }

    /// The index `Psi(m_B)`.
    pub fn index(&self) -> f64 {
        let (exy, ey, ey2) = (self.m_b[0], self.m_b[1], self.m_b[2]);
        (exy - ey * ey) / (ey2 - ey * ey)
    }

    /// `Sigma_B + Sigma_C` is positive semidefinite up to `1e-8` of its trace.
    pub fn is_psd(&self) -> bool {
        let trace = (self.sigma_b + self.sigma_c).trace();
        self.min_eigenvalue >= -1e-8 * trace.abs()
    }

    /// Limiting variance of the rank estimator of `E[E[Y | X_i]^2]`.
    pub fn numerator_variance(&self) -> f64 {
        self.sigma_b[(0, 0)] + self.sigma_c[(0, 0)]
    }
}

fn symmetric(e: [[f64; 3]; 3]) -> Matrix3<f64> {
    let m = Matrix3::from_fn(|i, j| e[i.min(j)][i.max(j)]);
    (m + m.transpose()) / 2.0
}

/// Closed-form components for the rank estimator of index `index` (0-based)
/// in the linear model with uniform inputs.
pub fn linear_sigma_components(alpha: f64, p: usize, index: usize) -> Result<SigmaComponents> {
    check_linear(alpha, p)?;
    if index >= p {
        return Err(Error::invalid(format!("index {} out of range 1..={p}", index + 1)));
    }
    // Target coefficient and the coefficients of the nuisance sum.
    let mut coeffs = vec![1.0; p];
    coeffs[0] = alpha;
    let c = coeffs[index];
    let rest: Vec<f64> = (0..p).filter(|&k| k != index).map(|k| coeffs[k]).collect();
    let m: f64 = rest.iter().sum::<f64>() / 2.0;
    let v: f64 = rest.iter().map(|a| a * a).sum::<f64>() / 12.0;
    // Uniform fourth cumulant is -1/120; cumulants add over independent terms.
    let kappa4: f64 = -rest.iter().map(|a| a.powi(4)).sum::<f64>() / 120.0;
    let mu4 = kappa4 + 3.0 * v * v;
    // Moments of mu(X) = c X + m.
    let e_mu = c / 2.0 + m;
    let e_mu2 = c * c / 3.0 + c * m + m * m;
    let b = [
        [4.0 * v * e_mu2 + v * v, 2.0 * v * e_mu, 4.0 * v * e_mu2],
        [0.0, v, 2.0 * v * e_mu],
        [0.0, 0.0, 4.0 * v * e_mu2 + mu4 - v * v],
    ];
    let q = c * c / 45.0 + c * m / 12.0 + m * m / 12.0;
    let l = c / 24.0 + m / 12.0;
    let c2 = c * c;
    let cm = [
        [4.0 * c2 * q, 2.0 * c2 * l, 4.0 * c2 * q],
        [0.0, c2 / 12.0, 2.0 * c2 * l],
        [0.0, 0.0, 4.0 * c2 * q],
    ];
    let m_b = Vector3::new(e_mu2, e_mu, e_mu2 + v);
    SigmaComponents::assemble(symmetric(b), symmetric(cm), m_b)
}

/// Number of independent substreams in the Monte-Carlo plug-in. Fixed so
/// results do not depend on the worker count.
pub const PLUGIN_PARTITIONS: usize = 64;

/// Conditional moment sums shared by the Monte-Carlo and single-sample
/// plug-ins. Each entry averages a product over distinct copies of `Y`
/// sharing `X_i`; the exponents name the pattern.
#[derive(Debug, Clone, Copy, Default)]
struct CopySums {
    e22: f64,
    e1111: f64,
    e121: f64,
    e21: f64,
    e111: f64,
    e31: f64,
    e112: f64,
    e2: f64,
    e11: f64,
    e3: f64,
    e12: f64,
    e4: f64,
    e1: f64,
}

const COPY_SUMS: usize = 13;

impl CopySums {
    fn to_array(self) -> [f64; COPY_SUMS] {
        [
            self.e22, self.e1111, self.e121, self.e21, self.e111, self.e31, self.e112, self.e2,
            self.e11, self.e3, self.e12, self.e4, self.e1,
        ]
    }

    fn from_array(a: &[f64]) -> Self {
        CopySums {
            e22: a[0],
            e1111: a[1],
            e121: a[2],
            e21: a[3],
            e111: a[4],
            e31: a[5],
            e112: a[6],
            e2: a[7],
            e11: a[8],
            e3: a[9],
            e12: a[10],
            e4: a[11],
            e1: a[12],
        }
    }

    /// Symmetrized estimates from four conditionally i.i.d. copies.
    fn from_copies(y: &[f64; 4]) -> Self {
        let pat = |exps: &[i32]| -> f64 {
            let mut total = 0.0;
            let mut count = 0usize;
            for_each_injection(exps.len(), &mut |slots: &[usize]| {
                total += slots
                    .iter()
                    .zip(exps)
                    .map(|(&k, &e)| y[k].powi(e))
                    .product::<f64>();
                count += 1;
            });
            total / count as f64
        };
        CopySums {
            e22: pat(&[2, 2]),
            e1111: pat(&[1, 1, 1, 1]),
            e121: pat(&[1, 2, 1]),
            e21: pat(&[2, 1]),
            e111: pat(&[1, 1, 1]),
            e31: pat(&[3, 1]),
            e112: pat(&[1, 1, 2]),
            e2: pat(&[2]),
            e11: pat(&[1, 1]),
            e3: pat(&[3]),
            e12: pat(&[1, 2]),
            e4: pat(&[4]),
            e1: pat(&[1]),
        }
    }

    fn m_b(&self) -> Vector3<f64> {
        Vector3::new(self.e11, self.e1, self.e2)
    }

    fn sigma_b(&self) -> Matrix3<f64> {
        symmetric([
            [
                self.e22 - self.e1111 + 2.0 * (self.e121 - self.e1111),
                2.0 * (self.e21 - self.e111),
                2.0 * (self.e31 - self.e112),
            ],
            [0.0, self.e2 - self.e11, self.e3 - self.e12],
            [0.0, 0.0, self.e4 - self.e22],
        ])
    }

    /// `Cov(mu^2, mu, nu)` with `mu = E[Y | X]` and `nu = E[Y^2 | X]`.
    fn conditional_cov(&self) -> Matrix3<f64> {
        let (e_mu2, e_mu, e_nu) = (self.e11, self.e1, self.e2);
        symmetric([
            [self.e1111 - e_mu2 * e_mu2, self.e111 - e_mu2 * e_mu, self.e112 - e_mu2 * e_nu],
            [0.0, self.e11 - e_mu * e_mu, self.e12 - e_mu * e_nu],
            [0.0, 0.0, self.e22 - e_nu * e_nu],
        ])
    }
}

/// Calls `f` with every injective map from `len` slots into 4 copies.
fn for_each_injection(len: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(slots: &mut Vec<usize>, len: usize, f: &mut dyn FnMut(&[usize])) {
        if slots.len() == len {
            f(slots);
            return;
        }
        for k in 0..4 {
            if !slots.contains(&k) {
                slots.push(k);
                rec(slots, len, f);
                slots.pop();
            }
        }
    }
    rec(&mut Vec::with_capacity(len), len, f);
}

/// Pairwise sum of per-partition vectors in partition order.
fn tree_reduce(mut parts: Vec<Vec<f64>>) -> Vec<f64> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop().unwrap_or_default()
}

/// Sums over one partition: copy sums, then the Brownian-bridge terms
/// `a_k a~_l min(u, u~)` (9) and `a_k u` (3).
const PLUGIN_SUMS: usize = COPY_SUMS + 12;

fn plugin_partition(
    model: &ModelSpec,
    coord: usize,
    rows: usize,
    stream: RngStream,
    allow_fd: bool,
) -> Result<Vec<f64>> {
    let p = model.dim();
    let inputs = model.inputs();
    let mut rng = stream.rng();
    let mut sums = vec![0.0; PLUGIN_SUMS];
    let mut a_vals = Vec::with_capacity(rows);
    let mut u_vals = Vec::with_capacity(rows);
    let mut x = vec![0.0; p];
    for _ in 0..rows {
        let u = rng.uniform();
        x[coord] = inputs[coord].quantile(u);
        let mut y = [0.0; 4];
        let mut d0 = 0.0;
        for (k, yk) in y.iter_mut().enumerate() {
            for i in (0..p).filter(|&i| i != coord) {
                x[i] = inputs[i].quantile(rng.uniform());
            }
            *yk = model.eval(&x);
            if k == 0 {
                d0 = model.partial(coord, &x, allow_fd)? * inputs[coord].quantile_slope(u);
            }
        }
        if y.iter().any(|v| !v.is_finite()) || !d0.is_finite() {
            return Err(Error::NonFinite("model output or derivative is not finite".into()));
        }
        for (s, v) in sums.iter_mut().zip(CopySums::from_copies(&y).to_array()) {
            *s += v;
        }
        let other = (y[1] + y[2] + y[3]) / 3.0;
        let a = [2.0 * d0 * other, d0, 2.0 * d0 * y[0]];
        for k in 0..3 {
            sums[COPY_SUMS + 9 + k] += a[k] * u;
        }
        a_vals.push(a);
        u_vals.push(u);
    }
    // Pair each draw with the next one in the partition; the two are independent.
    for j in 0..rows {
        let t = (j + 1) % rows;
        let w = u_vals[j].min(u_vals[t]);
        for k in 0..3 {
            for l in 0..3 {
                sums[COPY_SUMS + 3 * k + l] += a_vals[j][k] * a_vals[t][l] * w;
            }
        }
    }
    Ok(sums)
}

/// Monte-Carlo estimate of the limiting-variance components of the rank
/// estimator of the first-order index of coordinate `coord` (0-based).
///
/// Each of the `n_mc` outer draws fixes `X_coord` through a uniform `u` and
/// draws four independent completions of the other inputs. `Sigma_C` uses
/// the derivative of `u -> f(q(u), w)`, with `q` the quantile function of
/// `X_coord`, so non-uniform inputs are handled in rank space. Assumes the
/// usual regularity: `f` bounded and twice differentiable in `X_coord`.
pub fn sigma_plugin(
    model: &ModelSpec,
    coord: usize,
    n_mc: usize,
    stream: RngStream,
    allow_fd: bool,
) -> Result<SigmaComponents> {
    if n_mc < 1000 {
        return Err(Error::invalid(format!("n_mc must be >= 1000, got {n_mc}")));
    }
    if coord >= model.dim() {
        return Err(Error::invalid(format!(
            "coordinate {} out of range 1..={}",
            coord + 1,
            model.dim()
        )));
    }
    if !allow_fd && !(coord == 0 && model.has_deriv1()) {
        return Err(Error::invalid(
            "model has no analytic derivative and finite differences are disabled",
        ));
    }
    let parts: Vec<Vec<f64>> = (0..PLUGIN_PARTITIONS)
        .into_par_iter()
        .map(|k| {
            let rows = n_mc / PLUGIN_PARTITIONS + usize::from(k < n_mc % PLUGIN_PARTITIONS);
            plugin_partition(model, coord, rows, stream.substream(k as u64), allow_fd)
        })
        .collect::<Result<_>>()?;
    let total: Vec<f64> = tree_reduce(parts).iter().map(|s| s / n_mc as f64).collect();
    let copies = CopySums::from_array(&total[..COPY_SUMS]);
    let cross = &total[COPY_SUMS..];
    let sigma_c = Matrix3::from_fn(|k, l| cross[3 * k + l] - cross[9 + k] * cross[9 + l]);
    let sigma_c = (sigma_c + sigma_c.transpose()) / 2.0;
    SigmaComponents::assemble(copies.sigma_b(), sigma_c, copies.m_b())
}

/// Derivative-free Monte-Carlo estimate of `Sigma_C` as
/// `Cov(mu^2, mu, nu)`, for cross-checking [`sigma_plugin`].
pub fn sigma_c_by_covariance(
    model: &ModelSpec,
    coord: usize,
    n_mc: usize,
    stream: RngStream,
) -> Result<Matrix3<f64>> {
    if n_mc < 1000 {
        return Err(Error::invalid(format!("n_mc must be >= 1000, got {n_mc}")));
    }
    let p = model.dim();
    let inputs = model.inputs();
    let parts: Vec<Vec<f64>> = (0..PLUGIN_PARTITIONS)
        .into_par_iter()
        .map(|k| {
            let rows = n_mc / PLUGIN_PARTITIONS + usize::from(k < n_mc % PLUGIN_PARTITIONS);
            let mut rng = stream.substream(k as u64).rng();
            let mut x = vec![0.0; p];
            let mut sums = vec![0.0; COPY_SUMS];
            for _ in 0..rows {
                x[coord] = inputs[coord].quantile(rng.uniform());
                let mut y = [0.0; 4];
                for yk in y.iter_mut() {
                    for i in (0..p).filter(|&i| i != coord) {
                        x[i] = inputs[i].quantile(rng.uniform());
                    }
                    *yk = model.eval(&x);
                }
                for (s, v) in sums.iter_mut().zip(CopySums::from_copies(&y).to_array()) {
                    *s += v;
                }
            }
            sums
        })
        .collect();
    let total: Vec<f64> = tree_reduce(parts).iter().map(|s| s / n_mc as f64).collect();
    Ok(CopySums::from_array(&total).conditional_cov())
}

/// Approximate components from one observed sample, without model access.
///
/// Outputs of four consecutive observations in increasing order of `v`
/// stand in for four conditionally independent copies sharing `V`.
/// `Sigma_C` is taken as `Cov(mu^2, mu, nu)` from the same sums, so no
/// derivative is needed. Only validated empirically.
pub fn sigma_approx(v: &[f64], y: &[f64]) -> Result<SigmaComponents> {
    if v.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: y.len(),
        });
    }
    if y.len() < 4 {
        return Err(Error::invalid("approximate variance needs n >= 4"));
    }
    if y.iter().any(|a| !a.is_finite()) {
        return Err(Error::NonFinite("output is not finite".into()));
    }
    let ranks = compute_ranks(v)?;
    let n = y.len();
    let ordered: Vec<f64> = ranks.pi_inv().iter().map(|&j| y[j]).collect();
    let mut sums = [0.0; COPY_SUMS];
    for r in 0..n {
        let w = [
            ordered[r],
            ordered[(r + 1) % n],
            ordered[(r + 2) % n],
            ordered[(r + 3) % n],
        ];
        for (s, v) in sums.iter_mut().zip(CopySums::from_copies(&w).to_array()) {
            *s += v;
        }
    }
    let mean: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let copies = CopySums::from_array(&mean);
    SigmaComponents::assemble(copies.sigma_b(), copies.conditional_cov(), copies.m_b())
}

/// Standard normal quantile (Wichura's AS241, about 1e-16 relative error).
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, &k| acc * x + k);
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        const A: [f64; 8] = [
            3.387_132_872_796_366_6,
            133.141_667_891_784_38,
            1_971.590_950_306_551_4,
            13_731.693_765_509_461,
            45_921.953_931_549_87,
            67_265.770_927_008_7,
            33_430.575_583_588_13,
            2_509.080_928_730_122_7,
        ];
        const B: [f64; 8] = [
            1.0,
            42.313_330_701_600_91,
            687.187_007_492_057_9,
            5_394.196_021_424_751,
            21_213.794_301_586_597,
            39_307.895_800_092_71,
            28_729.085_735_721_943,
            5_226.495_278_852_546,
        ];
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        const C: [f64; 8] = [
            1.423_437_110_749_683_5,
            4.630_337_846_156_545,
            5.769_497_221_460_691,
            3.647_848_324_763_204_5,
            1.270_458_252_452_368_4,
            0.241_780_725_177_450_6,
            0.022_723_844_989_269_184,
            7.745_450_142_783_414e-4,
        ];
        const D: [f64; 8] = [
            1.0,
            2.053_191_626_637_758_8,
            1.676_384_830_183_803_8,
            0.689_767_334_985_100_0,
            0.148_103_976_427_480_08,
            0.015_198_666_563_616_457,
            5.475_938_084_995_345e-4,
            1.050_750_071_644_416_8e-9,
        ];
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        const E: [f64; 8] = [
            6.657_904_643_501_103,
            5.463_784_911_164_114,
            1.784_826_539_917_291_3,
            0.296_560_571_828_504_9,
            0.026_532_189_526_576_124,
            0.001_242_660_947_388_078_4,
            2.711_555_568_743_487_6e-5,
            2.010_334_399_292_288_1e-7,
        ];
        const F: [f64; 8] = [
            1.0,
            0.599_832_206_555_887_9,
            0.136_929_880_922_735_8,
            0.014_875_361_290_850_615,
            7.868_691_311_456_133e-4,
            1.846_318_317_510_054_8e-5,
            1.421_511_758_316_446e-7,
            2.044_263_103_389_939_8e-15,
        ];
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Two-sided normal interval `value ± z sqrt(sigma2 / n)`.
pub fn confidence_interval(est: &EstimateResult, sigma2: f64, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("level must lie in (0, 1), got {level}")));
    }
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(Error::invalid(format!("sigma2 must be finite and >= 0, got {sigma2}")));
    }
    if est.n < 2 {
        return Err(Error::invalid("confidence interval needs n >= 2"));
    }
    let z = normal_quantile((1.0 + level) / 2.0);
    let half = z * (sigma2 / est.n as f64).sqrt();
    Ok((est.value - half, est.value + half))
}
