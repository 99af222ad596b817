//! Rank statistics and single-sample estimators.
//!
//! Ranks are 0-based in this module: `pi[j] = r` means `v[j]` is the
//! `(r + 1)`-th smallest value. Every sum over the sample is accumulated in
//! increasing order of `v`, so results are bit-identical under any row
//! permutation of tie-free data and under strictly increasing maps of `v`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sampling::IidDesign;

/// Ratio below which an empirical variance counts as zero, relative to the
/// mean square of the data.
pub const VARIANCE_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankData {
    pi: Vec<usize>,
    pi_inv: Vec<usize>,
    tie_flag: bool,
}

impl RankData {
    pub fn n(&self) -> usize {
        self.pi.len()
    }

    /// `pi()[j]` is the 0-based rank of observation `j`.
    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    /// `pi_inv()[r]` is the observation holding rank `r`.
    pub fn pi_inv(&self) -> &[usize] {
        &self.pi_inv
    }

    /// True when the ranked vector contains equal values.
    pub fn tie_flag(&self) -> bool {
        self.tie_flag
    }
}

fn check_sample(v: &[f64], what: &str) -> Result<()> {
    if v.len() < 2 {
        return Err(Error::invalid(format!(
            "{what} needs at least 2 observations, got {}",
            v.len()
        )));
    }
    if let Some(j) = v.iter().position(|x| x.is_nan()) {
        return Err(Error::NonFinite(format!("{what} has NaN at row {}", j + 1)));
    }
    Ok(())
}

#[inline]
fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Ranks `v`. Equal values are ranked by input position.
pub fn compute_ranks(v: &[f64]) -> Result<RankData> {
    check_sample(v, "ranked vector")?;
    let n = v.len();
    let mut pi_inv: Vec<usize> = (0..n).collect();
    // sort_by is stable, so equal values keep index order.
    pi_inv.sort_by(|&a, &b| cmp_f64(v[a], v[b]));
    let mut pi = vec![0; n];
    for (r, &j) in pi_inv.iter().enumerate() {
        pi[j] = r;
    }
    let tie_flag = pi_inv.windows(2).any(|w| v[w[0]] == v[w[1]]);
    Ok(RankData {
        pi,
        pi_inv,
        tie_flag,
    })
}

/// True when `v` contains two equal values.
pub fn has_ties(v: &[f64]) -> bool {
    let mut s = v.to_vec();
    s.sort_by(|a, b| cmp_f64(*a, *b));
    s.windows(2).any(|w| w[0] == w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborKind {
    /// Next rank up; the maximum maps to itself.
    Prime,
    /// Next rank up; the maximum wraps to the minimum.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborMap {
    pub kind: NeighborKind,
    pub map: Vec<usize>,
}

pub fn neighbor_map(r: &RankData, kind: NeighborKind) -> NeighborMap {
    let n = r.n();
    let map = (0..n)
        .map(|j| {
            let rank = r.pi[j];
            if rank + 1 < n {
                r.pi_inv[rank + 1]
            } else {
                match kind {
                    NeighborKind::Prime => j,
                    NeighborKind::Cyclic => r.pi_inv[0],
                }
            }
        })
        .collect();
    NeighborMap { kind, map }
}

fn check_pair(v: &[f64], y: &[f64]) -> Result<()> {
    if v.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: y.len(),
        });
    }
    check_sample(v, "input column")?;
    check_sample(y, "output")
}

/// Sorted copy of `y` answering `#{k : y_k <= t}` and `#{k : y_k >= t}`.
struct SortedSample(Vec<f64>);

impl SortedSample {
    fn new(y: &[f64]) -> Self {
        let mut s = y.to_vec();
        s.sort_by(|a, b| cmp_f64(*a, *b));
        SortedSample(s)
    }

    fn count_le(&self, t: f64) -> usize {
        self.0.partition_point(|&a| a <= t)
    }

    fn count_ge(&self, t: f64) -> usize {
        self.0.len() - self.0.partition_point(|&a| a < t)
    }
}

fn denominator(sorted: &SortedSample) -> f64 {
    let nf = sorted.0.len() as f64;
    sorted
        .0
        .iter()
        .map(|&t| {
            let f = sorted.count_le(t) as f64 / nf;
            f * (1.0 - f)
        })
        .sum::<f64>()
        / nf
}

/// Denominator of Chatterjee's coefficient, `(1/n) sum F_n(Y_j) (1 - F_n(Y_j))`.
/// Equals `(n^2 - 1) / (6 n^2)` when `y` has no ties.
pub fn xi_denominator(y: &[f64]) -> Result<f64> {
    check_sample(y, "output")?;
    Ok(denominator(&SortedSample::new(y)))
}

/// Chatterjee's rank correlation of `y` on `v` with the prime neighbor map.
pub fn chatterjee_xi(v: &[f64], y: &[f64]) -> Result<f64> {
    chatterjee_xi_with(v, y, NeighborKind::Prime)
}

/// Chatterjee's coefficient with a chosen neighbor map.
///
/// The numerator averages `F_n(min(Y_j, Y_tau(j))) - G_n(Y_j)^2` where
/// `F_n(t) = #{Y_k <= t} / n` and `G_n(t) = #{Y_k >= t} / n`; the
/// denominator averages `F_n(Y_j) (1 - F_n(Y_j))`.
pub fn chatterjee_xi_with(v: &[f64], y: &[f64], kind: NeighborKind) -> Result<f64> {
    check_pair(v, y)?;
    let nf = y.len() as f64;
    let sorted = SortedSample::new(y);
    let den = denominator(&sorted);
    if den <= 0.0 {
        return Err(Error::degenerate("output is constant; xi is undefined"));
    }
    let ranks = compute_ranks(v)?;
    let tau = neighbor_map(&ranks, kind).map;
    let num = ranks
        .pi_inv
        .iter()
        .map(|&j| {
            let lo = if cmp_f64(y[j], y[tau[j]]) == Ordering::Greater {
                y[tau[j]]
            } else {
                y[j]
            };
            let f = sorted.count_le(lo) as f64 / nf;
            let g = sorted.count_ge(y[j]) as f64 / nf;
            f - g * g
        })
        .sum::<f64>()
        / nf;
    Ok(num / den)
}

/// `(1/n) sum_j g(Y_j) h(Y_tau(j))`, optionally clamping `g` and `h` to
/// `[-clip, clip]`.
pub fn chi_general(
    v: &[f64],
    y: &[f64],
    g: &dyn Fn(f64) -> f64,
    h: &dyn Fn(f64) -> f64,
    kind: NeighborKind,
    clip: Option<f64>,
) -> Result<f64> {
    check_pair(v, y)?;
    if let Some(m) = clip {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::invalid(format!("clip must be positive and finite, got {m}")));
        }
    }
    let clamp = |x: f64| match clip {
        Some(m) => x.clamp(-m, m),
        None => x,
    };
    let ranks = compute_ranks(v)?;
    let tau = neighbor_map(&ranks, kind).map;
    let mut acc = 0.0;
    for &j in &ranks.pi_inv {
        let a = g(y[j]);
        let b = h(y[tau[j]]);
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite(format!(
                "g or h is not finite at row {}",
                j + 1
            )));
        }
        acc += clamp(a) * clamp(b);
    }
    Ok(acc / y.len() as f64)
}

/// Empirical moments behind the rank Sobol' estimator, summed in rank
/// order of `v`. Cross moment and variance are taken about the sample mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankMoments {
    /// `(1/n) sum (Y_j - mean) (Y_N(j) - mean)` with the cyclic map.
    pub cross: f64,
    /// `(1/n) sum (Y_j - mean)^2`.
    pub variance: f64,
    pub mean: f64,
    pub mean_sq: f64,
    pub n: usize,
}

impl RankMoments {
    pub fn index(&self) -> Result<f64> {
        if self.variance <= VARIANCE_GUARD * self.mean_sq {
            return Err(Error::degenerate("output variance is zero"));
        }
        Ok(self.cross / self.variance)
    }
}

pub fn rank_moments(v: &[f64], y: &[f64]) -> Result<RankMoments> {
    check_pair(v, y)?;
    let ranks = compute_ranks(v)?;
    let n = y.len();
    let nf = n as f64;
    let ordered: Vec<f64> = ranks.pi_inv.iter().map(|&j| y[j]).collect();
    let mean = ordered.iter().sum::<f64>() / nf;
    let mean_sq = ordered.iter().map(|a| a * a).sum::<f64>() / nf;
    // Centering first keeps the estimate stable under large output shifts.
    let c: Vec<f64> = ordered.iter().map(|a| a - mean).collect();
    let mut cross = 0.0;
    let mut var = 0.0;
    for r in 0..n {
        cross += c[r] * c[(r + 1) % n];
        var += c[r] * c[r];
    }
    Ok(RankMoments {
        cross: cross / nf,
        variance: var / nf,
        mean,
        mean_sq,
        n,
    })
}

/// Rank-based first-order Sobol' index of `y` with respect to `v`.
pub fn rank_sobol(v: &[f64], y: &[f64]) -> Result<f64> {
    rank_moments(v, y)?.index()
}

/// Rank Sobol' estimates for every input column of one sample.
pub fn rank_sobol_all(design: &IidDesign) -> Result<Vec<f64>> {
    per_column(design, rank_sobol)
}

/// Chatterjee estimates for every input column of one sample.
pub fn rank_cvm_all(design: &IidDesign) -> Result<Vec<f64>> {
    per_column(design, chatterjee_xi)
}

fn per_column(design: &IidDesign, f: fn(&[f64], &[f64]) -> Result<f64>) -> Result<Vec<f64>> {
    (0..design.dim())
        .into_par_iter()
        .map(|i| f(&design.column(i), design.y()))
        .collect()
}
