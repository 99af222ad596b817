//! Subcommand implementations. Each returns the text for stdout.

use std::fmt::Write as _;
use std::path::PathBuf;

use sensikit::asymptotics::{confidence_interval, sigma_approx, sigma_plugin, v_eff, v_pf, v_rank};
use sensikit::config::{parse_f64_list, parse_grid, parse_usize_list, ConfigDoc};
use sensikit::data::read_data_csv;
use sensikit::experiments::{estimate_all, run_and_emit, ExperimentConfig, Method, Study};
use sensikit::models::{ModelDescriptor, ModelSpec};
use sensikit::pickfreeze::EstimateResult;
use sensikit::rank::{has_ties, rank_cvm_all, rank_sobol, rank_sobol_all};
use sensikit::sampling::{sample_iid, IidDesign, RngStream};
use sensikit::Error;

use crate::settings::Settings;
use crate::ModelArgs;

type Result<T> = std::result::Result<T, Error>;

const DEFAULT_N_MC: usize = 100_000;

fn single_p(s: &Settings, m: &ModelArgs) -> Result<Option<usize>> {
    match s.text(&m.p, "p") {
        None => Ok(None),
        Some(t) => match parse_usize_list(&t)?.as_slice() {
            [p] => Ok(Some(*p)),
            _ => Err(Error::InvalidArgument(format!("--p must be a single value here, got '{t}'"))),
        },
    }
}

fn model_descriptor(s: &Settings, m: &ModelArgs, default: Option<&str>) -> Result<ModelDescriptor> {
    let name = match s.text(&m.model, "model") {
        Some(n) => n,
        None => default
            .ok_or_else(|| Error::InvalidArgument("--model or --data is required".into()))?
            .to_string(),
    };
    let p = single_p(s, m)?;
    match name.as_str() {
        "gfunction" => {
            let a = match (s.text(&m.a, "a"), p) {
                (Some(t), _) => parse_f64_list(&t)?,
                (None, Some(p)) => (1..=p).map(|i| i as f64).collect(),
                (None, None) => {
                    return Err(Error::InvalidArgument("gfunction needs --a or --p".into()))
                }
            };
            if let Some(p) = p {
                if p != a.len() {
                    return Err(Error::InvalidArgument(format!(
                        "--p {p} disagrees with {} coefficients in --a",
                        a.len()
                    )));
                }
            }
            Ok(ModelDescriptor::Gfunction { a })
        }
        "linear" => Ok(ModelDescriptor::Linear {
            alpha: s
                .parsed(&m.alpha, "alpha")?
                .ok_or_else(|| Error::InvalidArgument("linear model needs --alpha".into()))?,
            p: p.ok_or_else(|| Error::InvalidArgument("linear model needs --p".into()))?,
        }),
        other => Ok(ModelDescriptor::Custom {
            name: other.to_string(),
            p: p.unwrap_or(if other == "ishigami" { 3 } else { 1 }),
        }),
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.10}")
}

fn warn_ties(d: &IidDesign, check_y: bool) {
    for i in 0..d.dim() {
        if has_ties(&d.column(i)) {
            log::warn!("column x{} has ties; equal values are ranked by row order", i + 1);
        }
    }
    if check_y && has_ties(d.y()) {
        log::warn!("column y has ties");
    }
}

/// Adds spread and tie diagnostics of `y` to a degenerate-data error.
fn diagnose(e: Error, y: &[f64]) -> Error {
    match e {
        Error::Degenerate(msg) => {
            let n = y.len() as f64;
            let mean = y.iter().sum::<f64>() / n;
            let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let mut sorted = y.to_vec();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            Error::Degenerate(format!(
                "{msg} (y: {} rows, {} distinct values, variance {var:e})",
                y.len(),
                sorted.len()
            ))
        }
        other => other,
    }
}

fn clipped(d: IidDesign, clip: Option<f64>) -> Result<IidDesign> {
    let Some(m) = clip else { return Ok(d) };
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidArgument(format!("--clip must be positive, got {m}")));
    }
    let rows = (0..d.n()).map(|j| d.row(j).to_vec()).collect();
    let y = d.y().iter().map(|v| v.clamp(-m, m)).collect();
    IidDesign::from_rows(rows, y)
}

pub fn estimate(
    doc: &ConfigDoc,
    model: &ModelArgs,
    data: Option<PathBuf>,
    method: Option<String>,
    n: Option<String>,
    seed: Option<String>,
    clip: Option<String>,
) -> Result<String> {
    let s = Settings::new(doc);
    let method = Method::parse(&s.text(&method, "method").unwrap_or_else(|| "rank-sobol".into()))?;
    let clip: Option<f64> = s.parsed(&clip, "clip")?;
    let data = data.or_else(|| s.text(&None, "data").map(PathBuf::from));
    let mut out = String::new();
    let (estimates, exact, source): (Vec<EstimateResult>, Option<Vec<f64>>, String) = match data {
        Some(path) => {
            if !method.is_rank() {
                return Err(Error::InvalidArgument(format!(
                    "{} needs a model; data files support rank-sobol and rank-cvm",
                    method.label()
                )));
            }
            let d = clipped(read_data_csv(&path)?, clip)?;
            warn_ties(&d, method == Method::RankCvm);
            let values = if method == Method::RankSobol {
                rank_sobol_all(&d)
            } else {
                rank_cvm_all(&d)
            }
            .map_err(|e| diagnose(e, d.y()))?;
            let est = values
                .into_iter()
                .map(|v| EstimateResult::new(v, d.n(), d.evaluations()))
                .collect();
            (est, None, format!("data {}", path.display()))
        }
        None => {
            let desc = model_descriptor(&s, model, None)?;
            let spec = desc.build()?;
            let n: usize = s
                .parsed(&n, "n")?
                .ok_or_else(|| Error::InvalidArgument("--n is required with --model".into()))?;
            let seed: u64 = s.parsed_or(&seed, "seed", 0)?;
            let est = if clip.is_some() {
                if !method.is_rank() {
                    return Err(Error::InvalidArgument("--clip applies to rank methods only".into()));
                }
                let d = clipped(sample_iid(&spec, n, RngStream::new(seed, 0))?, clip)?;
                let values = if method == Method::RankSobol {
                    rank_sobol_all(&d)
                } else {
                    rank_cvm_all(&d)
                }
                .map_err(|e| diagnose(e, d.y()))?;
                values
                    .into_iter()
                    .map(|v| EstimateResult::new(v, n, d.evaluations()))
                    .collect()
            } else {
                estimate_all(&spec, method, n, RngStream::new(seed, 0))?
            };
            // Exact references are Sobol' indices, so only shown for Sobol' methods.
            let exact = match method {
                Method::RankCvm | Method::PfCvm => None,
                _ => spec.exact_sobol().map(<[f64]>::to_vec),
            };
            (est, exact, format!("model {} seed {seed}", desc.label()))
        }
    };
    let _ = writeln!(out, "# {source}");
    let _ = writeln!(
        out,
        "# method {} n {} evaluations {}",
        method.label(),
        estimates[0].n,
        estimates.iter().map(|e| e.evaluations).max().unwrap_or(0)
    );
    let _ = writeln!(out, "index\testimate\texact");
    for (i, e) in estimates.iter().enumerate() {
        let ex = exact
            .as_ref()
            .and_then(|x| x.get(i))
            .map_or_else(|| "NA".to_string(), |v| fmt(*v));
        let _ = writeln!(out, "{}\t{}\t{}", i + 1, fmt(e.value), ex);
    }
    Ok(out)
}

pub struct StudyFlags {
    pub kind: Option<String>,
    pub model: ModelArgs,
    pub budget: Option<String>,
    pub reps: Option<String>,
    pub seed: Option<String>,
    pub sizes: Option<String>,
    pub alpha_grid: Option<String>,
    pub pf_method: Option<String>,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

fn parse_study(s: &str) -> Result<Study> {
    match s {
        "convergence" => Ok(Study::Convergence),
        "mse" => Ok(Study::Mse),
        "dimension" => Ok(Study::Dimension),
        "variance-compare" | "variance_compare" => Ok(Study::VarianceCompare),
        other => Err(Error::InvalidArgument(format!(
            "unknown study '{other}' (expected convergence, mse, dimension or variance-compare)"
        ))),
    }
}

pub fn study(doc: &ConfigDoc, f: StudyFlags) -> Result<String> {
    let s = Settings::new(doc);
    let study = parse_study(
        &s.text(&f.kind, "study")
            .ok_or_else(|| Error::InvalidArgument("study kind is required".into()))?,
    )?;
    let dims = |default: &str| -> Result<Vec<usize>> {
        parse_usize_list(&s.text(&f.model.p, "p").unwrap_or_else(|| default.to_string()))
    };
    let (model, dims) = match study {
        Study::Dimension => (ModelDescriptor::Gfunction { a: vec![1.0] }, dims("6,10,15,20")?),
        Study::VarianceCompare => {
            let dims = dims("2..7")?;
            let p = *dims.first().ok_or_else(|| Error::InvalidArgument("--p is empty".into()))?;
            let alpha = s.parsed_or(&f.model.alpha, "alpha", 1.0)?;
            (ModelDescriptor::Linear { alpha, p }, dims)
        }
        _ => (model_descriptor(&s, &f.model, Some("gfunction"))?, Vec::new()),
    };
    let mut config = ExperimentConfig::new(study, model);
    config.dims = dims;
    config.budget = s.parsed(&f.budget, "budget")?;
    config.replications = s.parsed_or(&f.reps, "reps", 100)?;
    config.seed = s.parsed_or(&f.seed, "seed", 0)?;
    config.output_dir = f
        .out
        .or_else(|| s.text(&None, "out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    if let Some(t) = s.text(&f.sizes, "sizes") {
        config.sizes = parse_usize_list(&t)?;
    }
    config.alphas = parse_grid(&s.text(&f.alpha_grid, "alpha-grid").unwrap_or_else(|| "0.1:4:0.1".into()))?;
    if let Some(m) = s.text(&f.pf_method, "pf-method") {
        config.pf_method = Method::parse(&m)?;
    }
    let svg = s.switch(f.svg, "svg")?;
    let written = run_and_emit(&config, svg)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# study {} model {} seed {} replications {}",
        study.label(),
        config.model.label(),
        config.seed,
        config.replications
    );
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(out)
}

pub struct CiFlags {
    pub model: ModelArgs,
    pub data: Option<PathBuf>,
    pub index: Option<String>,
    pub n: Option<String>,
    pub seed: Option<String>,
    pub level: Option<String>,
    pub approx: bool,
    pub n_mc: Option<String>,
}

pub fn ci(doc: &ConfigDoc, f: CiFlags) -> Result<String> {
    let s = Settings::new(doc);
    let level: f64 = s.parsed_or(&f.level, "level", 0.95)?;
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("--level must lie in (0, 1), got {level}")));
    }
    let index: usize = s.parsed_or(&f.index, "index", 1)?;
    let approx = s.switch(f.approx, "approx")?;
    let seed: u64 = s.parsed_or(&f.seed, "seed", 0)?;
    let data = f.data.or_else(|| s.text(&None, "data").map(PathBuf::from));
    let (design, spec): (IidDesign, Option<ModelSpec>) = match data {
        Some(path) => (read_data_csv(&path)?, None),
        None => {
            let spec = model_descriptor(&s, &f.model, None)?.build()?;
            let n: usize = s
                .parsed(&f.n, "n")?
                .ok_or_else(|| Error::InvalidArgument("--n is required with --model".into()))?;
            (sample_iid(&spec, n, RngStream::new(seed, 0))?, Some(spec))
        }
    };
    if index == 0 || index > design.dim() {
        return Err(Error::InvalidArgument(format!(
            "--index must lie in 1..={}, got {index}",
            design.dim()
        )));
    }
    warn_ties(&design, false);
    let v = design.column(index - 1);
    let value = rank_sobol(&v, design.y()).map_err(|e| diagnose(e, design.y()))?;
    let est = EstimateResult::new(value, design.n(), design.evaluations());
    let components = match (&spec, approx) {
        (_, true) => sigma_approx(&v, design.y())?,
        (Some(m), false) => {
            let n_mc = s.parsed_or(&f.n_mc, "n-mc", DEFAULT_N_MC)?;
            sigma_plugin(m, index - 1, n_mc, RngStream::new(seed, 1), true)?
        }
        (None, false) => {
            return Err(Error::Degenerate(
                "the limiting variance needs model access; pass --approx to estimate it from the data".into(),
            ))
        }
    };
    let (lo, hi) = confidence_interval(&est, components.sigma2, level)?;
    let mut out = String::new();
    let _ = writeln!(out, "index\t{index}");
    let _ = writeln!(out, "n\t{}", design.n());
    let _ = writeln!(out, "estimate\t{}", fmt(value));
    let _ = writeln!(out, "sigma_hat\t{}", fmt(components.sigma2.sqrt()));
    let _ = writeln!(out, "variance\t{}", if approx { "approx" } else { "plugin" });
    let _ = writeln!(out, "level\t{level}");
    let _ = writeln!(out, "ci_low\t{}", fmt(lo));
    let _ = writeln!(out, "ci_high\t{}", fmt(hi));
    Ok(out)
}

pub fn asympt_var(doc: &ConfigDoc, alpha: Option<String>, p: Option<String>) -> Result<String> {
    let s = Settings::new(doc);
    let alpha: f64 = s
        .parsed(&alpha, "alpha")?
        .ok_or_else(|| Error::InvalidArgument("--alpha is required".into()))?;
    let p: usize = s
        .parsed(&p, "p")?
        .ok_or_else(|| Error::InvalidArgument("--p is required".into()))?;
    let (pf, rank, eff) = (v_pf(alpha, p)?, v_rank(alpha, p)?, v_eff(alpha, p)?);
    let mut out = String::from("index\tv_pf\tv_rank\tv_eff\n");
    for i in 0..p {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", i + 1, fmt(pf[i]), fmt(rank[i]), fmt(eff[i]));
    }
    Ok(out)
}
