//! Replication studies comparing the rank and Pick-Freeze estimators.
//!
//! Replicate `r` of a study draws from `RngStream::for_replication(seed, tag, r)`
//! where `tag` identifies the study and the grid point. Replicates run in
//! parallel and are collected in index order, so every statistic is
//! bit-identical for a given seed whatever the worker count.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{confidence_interval, linear_sigma_components, sigma_approx, v_eff, v_pf, v_rank};
use crate::error::{Error, Result};
use crate::models::{gfunction_model, linear_model, GFunctionParams, LinearModelParams, ModelDescriptor, ModelSpec};
use crate::pickfreeze::{cvm_pickfreeze, sobol_sn_values, sobol_tn_values, EstimateResult};
use crate::rank::{rank_cvm_all, rank_sobol, rank_sobol_all};
use crate::sampling::{mix_ids, sample_iid, sample_pickfreeze_family, sample_triple, BudgetSplit, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    Convergence,
    Mse,
    Dimension,
    VarianceCompare,
}

impl Study {
    pub fn label(self) -> &'static str {
        match self {
            Study::Convergence => "convergence",
            Study::Mse => "mse",
            Study::Dimension => "dimension",
            Study::VarianceCompare => "variance_compare",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Study::Convergence => 1,
            Study::Mse => 2,
            Study::Dimension => 3,
            Study::VarianceCompare => 4,
        }
    }
}

/// Estimators exposed to studies and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    RankSobol,
    RankCvm,
    PfSn,
    PfTn,
    PfCvm,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::RankSobol,
        Method::RankCvm,
        Method::PfSn,
        Method::PfTn,
        Method::PfCvm,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::RankSobol => "rank-sobol",
            Method::RankCvm => "rank-cvm",
            Method::PfSn => "pf-sn",
            Method::PfTn => "pf-tn",
            Method::PfCvm => "pf-cvm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.label()).collect();
                Error::invalid(format!("unknown method '{s}' (known: {})", known.join(", ")))
            })
    }

    pub fn is_rank(self) -> bool {
        matches!(self, Method::RankSobol | Method::RankCvm)
    }

    /// Model calls needed to estimate all `p` first-order indices from
    /// samples of size `n`.
    pub fn evaluations(self, n: usize, p: usize) -> u64 {
        let (n, p) = (n as u64, p as u64);
        match self {
            Method::RankSobol | Method::RankCvm => n,
            Method::PfSn | Method::PfTn => (p + 1) * n,
            Method::PfCvm => 3 * n * p,
        }
    }
}

/// Estimates every first-order index of `model` with `method`, using
/// samples of size `n` drawn from `stream`.
pub fn estimate_all(
    model: &ModelSpec,
    method: Method,
    n: usize,
    stream: RngStream,
) -> Result<Vec<EstimateResult>> {
    let p = model.dim();
    match method {
        Method::RankSobol | Method::RankCvm => {
            let d = sample_iid(model, n, stream)?;
            let values = if method == Method::RankSobol {
                rank_sobol_all(&d)?
            } else {
                rank_cvm_all(&d)?
            };
            Ok(values
                .into_iter()
                .map(|v| EstimateResult::new(v, n, d.evaluations()))
                .collect())
        }
        Method::PfSn | Method::PfTn => {
            let fam = sample_pickfreeze_family(model, n, stream)?;
            let f = if method == Method::PfSn {
                sobol_sn_values
            } else {
                sobol_tn_values
            };
            fam.frozen
                .iter()
                .map(|yu| Ok(EstimateResult::new(f(&fam.y, yu)?, n, fam.evaluations)))
                .collect()
        }
        Method::PfCvm => (0..p)
            .map(|i| cvm_pickfreeze(&sample_triple(model, &[i], n, stream.substream(i as u64))?))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub study: Study,
    pub model: ModelDescriptor,
    /// Pick-Freeze sample sizes `N` for convergence studies.
    pub sizes: Vec<usize>,
    pub replications: usize,
    /// Total model-call budget for MSE and dimension studies.
    pub budget: Option<usize>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Input dimensions for the dimension and variance-comparison studies.
    pub dims: Vec<usize>,
    /// `alpha` grid for the variance comparison.
    pub alphas: Vec<f64>,
    /// Pick-Freeze estimator used against the rank estimator.
    pub pf_method: Method,
}

impl ExperimentConfig {
    pub fn new(study: Study, model: ModelDescriptor) -> Self {
        ExperimentConfig {
            study,
            model,
            sizes: Vec::new(),
            replications: 1,
            budget: None,
            seed: 0,
            output_dir: PathBuf::from("."),
            dims: Vec::new(),
            alphas: Vec::new(),
            pf_method: Method::PfTn,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::invalid("replications must be >= 1"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sizes must be strictly increasing"));
        }
        if !matches!(self.pf_method, Method::PfSn | Method::PfTn) {
            return Err(Error::invalid("Pick-Freeze method must be pf-sn or pf-tn"));
        }
        Ok(())
    }

    fn budget(&self) -> Result<usize> {
        self.budget
            .ok_or_else(|| Error::invalid("this study needs a budget"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub study: String,
    pub model: String,
    pub method: String,
    /// 1-based input index.
    pub index: usize,
    /// `N` for Pick-Freeze rows, `n = (p + 1) N` for rank rows.
    pub n_or_n: usize,
    pub estimate: f64,
    pub exact: f64,
    pub abs_error: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Largest absolute error of `method` at sample size `n_or_n`.
    pub fn max_error(&self, method: Method, n_or_n: usize) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.method == method.label() && r.n_or_n == n_or_n)
            .map(|r| r.abs_error)
            .reduce(f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub study: String,
    pub model: String,
    pub method: String,
    pub index: usize,
    pub budget: usize,
    pub replications: usize,
    pub mse_mean: f64,
    pub mse_median: f64,
    pub mse_stdev: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MseReport {
    pub rows: Vec<MseRow>,
    /// Squared errors behind each row, in replication order.
    pub samples: Vec<Vec<f64>>,
}

impl MseReport {
    pub fn mean(&self, method: Method, index: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method.label() && r.index == index)
            .map(|r| r.mse_mean)
    }

    pub fn extend(&mut self, other: MseReport) {
        self.rows.extend(other.rows);
        self.samples.extend(other.samples);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub alpha: f64,
    pub p: usize,
    pub index: usize,
    pub v_pf: f64,
    pub v_rank: f64,
    pub v_eff: f64,
    pub seed: u64,
}

impl VarianceRow {
    pub fn pf_minus_rank(&self) -> f64 {
        self.v_pf - self.v_rank
    }

    pub fn rank_minus_eff(&self) -> f64 {
        self.v_rank - self.v_eff
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarianceReport {
    pub rows: Vec<VarianceRow>,
}

/// Rejects models whose output does not vary.
fn check_not_constant(model: &ModelSpec, seed: u64) -> Result<()> {
    let d = sample_iid(model, 64, RngStream::new(seed, u64::MAX))?;
    let y = d.y();
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::degenerate(format!(
            "model '{}' returned a constant output; Var(Y) = 0",
            model.name()
        )));
    }
    Ok(())
}

fn exact_indices(model: &ModelSpec) -> Result<Vec<f64>> {
    model
        .exact_sobol()
        .map(<[f64]>::to_vec)
        .ok_or_else(|| Error::invalid(format!("model '{}' has no exact reference indices", model.name())))
}

pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    if config.sizes.is_empty() {
        return Err(Error::invalid("convergence study needs at least one size"));
    }
    let model = config.model.build()?;
    check_not_constant(&model, config.seed)?;
    let exact = exact_indices(&model)?;
    let p = model.dim();
    let label = config.model.label();
    let mut rows = Vec::new();
    for (k, &big_n) in config.sizes.iter().enumerate() {
        let tag = mix_ids(Study::Convergence.tag(), k as u64);
        let per_rep: Vec<(Vec<f64>, Vec<f64>)> = (0..config.replications as u64)
            .into_par_iter()
            .map(|r| {
                let s = RngStream::for_replication(config.seed, tag, r);
                let rank = estimate_all(&model, Method::RankSobol, (p + 1) * big_n, s.substream(0))?;
                let pf = estimate_all(&model, config.pf_method, big_n, s.substream(1))?;
                debug_assert_eq!(rank[0].evaluations, pf[0].evaluations);
                Ok((
                    rank.iter().map(|e| e.value).collect(),
                    pf.iter().map(|e| e.value).collect(),
                ))
            })
            .collect::<Result<_>>()?;
        let reps = config.replications as f64;
        for (method, size, pick) in [
            (config.pf_method, big_n, 1usize),
            (Method::RankSobol, (p + 1) * big_n, 0),
        ] {
            for i in 0..p {
                let est = per_rep
                    .iter()
                    .map(|(a, b)| if pick == 0 { a[i] } else { b[i] })
                    .sum::<f64>()
                    / reps;
                rows.push(ConvergenceRow {
                    study: Study::Convergence.label().into(),
                    model: label.clone(),
                    method: method.label().into(),
                    index: i + 1,
                    n_or_n: size,
                    estimate: est,
                    exact: exact[i],
                    abs_error: (est - exact[i]).abs(),
                    seed: config.seed,
                });
            }
        }
    }
    Ok(ConvergenceReport { rows })
}

fn summarize(errors: &[f64]) -> (f64, f64, f64) {
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    let stdev = if errors.len() > 1 {
        (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, median, stdev)
}

fn mse_for_model(
    model: &ModelSpec,
    label: &str,
    config: &ExperimentConfig,
    budget: usize,
    study: Study,
    tag: u64,
) -> Result<MseReport> {
    let p = model.dim();
    let split = BudgetSplit::new(budget, p);
    if split.pickfreeze_n < 2 {
        return Err(Error::invalid(format!(
            "budget {budget} leaves N = {} < 2 Pick-Freeze rows for p = {p}",
            split.pickfreeze_n
        )));
    }
    let exact = exact_indices(model)?;
    let per_rep: Vec<[Vec<f64>; 2]> = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| {
            let s = RngStream::for_replication(config.seed, tag, r);
            let rank = estimate_all(model, Method::RankSobol, split.rank_n, s.substream(0))?;
            let pf = estimate_all(model, config.pf_method, split.pickfreeze_n, s.substream(1))?;
            let sq = |v: &[EstimateResult]| -> Vec<f64> {
                v.iter().zip(&exact).map(|(e, x)| (e.value - x).powi(2)).collect()
            };
            Ok([sq(&rank), sq(&pf)])
        })
        .collect::<Result<_>>()?;
    let mut report = MseReport::default();
    for (slot, method) in [(0usize, Method::RankSobol), (1, config.pf_method)] {
        for i in 0..p {
            let errors: Vec<f64> = per_rep.iter().map(|r| r[slot][i]).collect();
            let (mse_mean, mse_median, mse_stdev) = summarize(&errors);
            report.rows.push(MseRow {
                study: study.label().into(),
                model: label.into(),
                method: method.label().into(),
                index: i + 1,
                budget,
                replications: config.replications,
                mse_mean,
                mse_median,
                mse_stdev,
                seed: config.seed,
            });
            report.samples.push(errors);
        }
    }
    Ok(report)
}

/// Fixed-budget mean squared errors: the rank estimator gets `budget`
/// rows, Pick-Freeze gets `budget / (p + 1)` rows per sample.
pub fn run_mse(config: &ExperimentConfig) -> Result<MseReport> {
    config.validate()?;
    let budget = config.budget()?;
    let model = config.model.build()?;
    check_not_constant(&model, config.seed)?;
    mse_for_model(&model, &config.model.label(), config, budget, Study::Mse, Study::Mse.tag())
}

/// Budget-matched MSEs on the g-function with `a_i = i` over a grid of
/// dimensions. Dimensions leaving fewer than two Pick-Freeze rows are
/// skipped with a warning.
pub fn run_dimension(config: &ExperimentConfig) -> Result<Vec<(usize, MseReport)>> {
    config.validate()?;
    let budget = config.budget()?;
    if config.dims.is_empty() {
        return Err(Error::invalid("dimension study needs at least one p"));
    }
    let mut out = Vec::new();
    for &p in &config.dims {
        if BudgetSplit::new(budget, p).pickfreeze_n < 2 {
            log::warn!("skipping p = {p}: budget {budget} leaves fewer than 2 Pick-Freeze rows");
            continue;
        }
        let model = gfunction_model(&GFunctionParams::sequential(p)?);
        let tag = mix_ids(Study::Dimension.tag(), p as u64);
        let label = format!("gfunction-p{p}");
        out.push((p, mse_for_model(&model, &label, config, budget, Study::Dimension, tag)?));
    }
    Ok(out)
}

/// Closed-form limiting variances for input 1 and input 2 of the linear
/// model over `config.alphas` and `config.dims`.
pub fn run_variance_compare(config: &ExperimentConfig) -> Result<VarianceReport> {
    config.validate()?;
    if !matches!(config.model, ModelDescriptor::Linear { .. }) {
        return Err(Error::invalid("variance comparison is only available for the linear model"));
    }
    let mut rows = Vec::new();
    for &p in &config.dims {
        for &alpha in &config.alphas {
            let (pf, rank, eff) = (v_pf(alpha, p)?, v_rank(alpha, p)?, v_eff(alpha, p)?);
            for i in 0..2 {
                rows.push(VarianceRow {
                    alpha,
                    p,
                    index: i + 1,
                    v_pf: pf[i],
                    v_rank: rank[i],
                    v_eff: eff[i],
                    seed: config.seed,
                });
            }
        }
    }
    Ok(VarianceReport { rows })
}

/// Dispatches on `config.study` and writes the CSV (and optional SVG) into
/// `config.output_dir`. Returns the written paths.
pub fn run_and_emit(config: &ExperimentConfig, svg: bool) -> Result<Vec<PathBuf>> {
    use crate::report::{emit_csv, emit_svg};
    std::fs::create_dir_all(&config.output_dir).map_err(|e| Error::io(&config.output_dir, e))?;
    let stem = config.output_dir.join(config.study.label());
    let csv = stem.with_extension("csv");
    let svg_path = stem.with_extension("svg");
    let mut written = vec![csv.clone()];
    match config.study {
        Study::Convergence => {
            let r = run_convergence(config)?;
            emit_csv(&r, &csv)?;
            if svg {
                emit_svg(&r, &svg_path, true)?;
            }
        }
        Study::Mse => {
            let r = run_mse(config)?;
            emit_csv(&r, &csv)?;
            if svg {
                emit_svg(&r, &svg_path, false)?;
            }
        }
        Study::Dimension => {
            let per_p = run_dimension(config)?;
            let mut all = MseReport::default();
            for (_, r) in &per_p {
                all.extend(r.clone());
            }
            emit_csv(&all, &csv)?;
            if svg {
                emit_svg(&crate::report::DimensionPlot(&per_p), &svg_path, false)?;
            }
        }
        Study::VarianceCompare => {
            let r = run_variance_compare(config)?;
            emit_csv(&r, &csv)?;
            if svg {
                emit_svg(&r, &svg_path, false)?;
            }
        }
    }
    if svg {
        written.push(svg_path);
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltReport {
    pub n: usize,
    pub replications: usize,
    /// Closed-form limiting variance.
    pub sigma2: f64,
    pub exact: f64,
    pub mean: f64,
    /// Empirical variance of `sqrt(n) (xi_n - S)`.
    pub scaled_variance: f64,
    pub skewness: f64,
    /// Share of intervals built from the closed-form variance containing `S`.
    pub coverage: f64,
    /// Share of intervals built from the single-sample variance estimate
    /// containing `S`.
    pub coverage_approx: f64,
}

/// Replicates the rank estimator of the first index of the linear model
/// and compares its spread and interval coverage with the limiting law.
pub fn run_clt(
    alpha: f64,
    p: usize,
    n: usize,
    replications: usize,
    level: f64,
    seed: u64,
) -> Result<CltReport> {
    if replications < 2 {
        return Err(Error::invalid("CLT study needs at least 2 replications"));
    }
    let params = LinearModelParams::new(alpha, p)?;
    let model = linear_model(&params);
    let closed = linear_sigma_components(alpha, p, 0)?;
    let exact = closed.index();
    let tag = mix_ids(0xc17, p as u64);
    let per_rep: Vec<(f64, bool, bool)> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let d = sample_iid(&model, n, RngStream::for_replication(seed, tag, r))?;
            let x1 = d.column(0);
            let value = rank_sobol(&x1, d.y())?;
            let est = EstimateResult::new(value, n, d.evaluations());
            let (lo, hi) = confidence_interval(&est, closed.sigma2, level)?;
            let approx = sigma_approx(&x1, d.y())?;
            let (alo, ahi) = confidence_interval(&est, approx.sigma2, level)?;
            Ok((value, lo <= exact && exact <= hi, alo <= exact && exact <= ahi))
        })
        .collect::<Result<_>>()?;
    let reps = replications as f64;
    let scaled: Vec<f64> = per_rep.iter().map(|r| (n as f64).sqrt() * (r.0 - exact)).collect();
    let m = scaled.iter().sum::<f64>() / reps;
    let var = scaled.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (reps - 1.0);
    let m3 = scaled.iter().map(|s| (s - m).powi(3)).sum::<f64>() / reps;
    let count = |f: fn(&(f64, bool, bool)) -> bool| per_rep.iter().filter(|r| f(r)).count() as f64 / reps;
    Ok(CltReport {
        n,
        replications,
        sigma2: closed.sigma2,
        exact,
        mean: per_rep.iter().map(|r| r.0).sum::<f64>() / reps,
        scaled_variance: var,
        skewness: m3 / var.powf(1.5),
        coverage: count(|r| r.1),
        coverage_approx: count(|r| r.2),
    })
}
