//! CSV and SVG output for study reports.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ConvergenceReport, MseReport, VarianceReport};

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A report that can be written as CSV.
pub trait CsvReport {
    fn header(&self) -> &'static [&'static str];
    fn records(&self) -> Vec<Vec<String>>;
}

impl CsvReport for ConvergenceReport {
    fn header(&self) -> &'static [&'static str] {
        &["study", "model", "method", "index", "n_or_N", "estimate", "exact", "abs_error", "seed"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.study.clone(),
                    r.model.clone(),
                    r.method.clone(),
                    r.index.to_string(),
                    r.n_or_n.to_string(),
                    fmt_f64(r.estimate),
                    fmt_f64(r.exact),
                    fmt_f64(r.abs_error),
                    r.seed.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvReport for MseReport {
    fn header(&self) -> &'static [&'static str] {
        &[
            "study",
            "model",
            "method",
            "index",
            "budget",
            "replications",
            "mse_mean",
            "mse_median",
            "mse_stdev",
            "seed",
        ]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.study.clone(),
                    r.model.clone(),
                    r.method.clone(),
                    r.index.to_string(),
                    r.budget.to_string(),
                    r.replications.to_string(),
                    fmt_f64(r.mse_mean),
                    fmt_f64(r.mse_median),
                    fmt_f64(r.mse_stdev),
                    r.seed.to_string(),
                ]
            })
            .collect()
    }
}

impl CsvReport for VarianceReport {
    fn header(&self) -> &'static [&'static str] {
        &["alpha", "p", "index", "v_pf", "v_rank", "v_eff", "seed"]
    }

    fn records(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.alpha),
                    r.p.to_string(),
                    r.index.to_string(),
                    fmt_f64(r.v_pf),
                    fmt_f64(r.v_rank),
                    fmt_f64(r.v_eff),
                    r.seed.to_string(),
                ]
            })
            .collect()
    }
}

/// Renders `report` as CSV text with LF line endings.
pub fn csv_string(report: &dyn CsvReport) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(report.header()).map_err(to_err)?;
    for rec in report.records() {
        w.write_record(&rec).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes `report` to `path`. An empty report gives a header-only file.
pub fn emit_csv(report: &dyn CsvReport, path: &Path) -> Result<()> {
    let text = csv_string(report)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// A line plot, box plot, or both.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub boxes: Vec<BoxSeries>,
    /// Horizontal reference lines.
    pub references: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSeries {
    pub name: String,
    pub values: Vec<f64>,
}

impl Plot {
    fn is_empty(&self) -> bool {
        self.series.iter().all(|s| s.points.is_empty()) && self.boxes.iter().all(|b| b.values.is_empty())
    }
}

pub trait Plottable {
    fn plot(&self) -> Plot;
}

impl Plottable for Plot {
    fn plot(&self) -> Plot {
        self.clone()
    }
}

impl Plottable for ConvergenceReport {
    fn plot(&self) -> Plot {
        let mut plot = Plot {
            title: "Convergence of first-order estimates".into(),
            x_label: "sample size".into(),
            y_label: "estimate".into(),
            ..Plot::default()
        };
        for r in &self.rows {
            let name = format!("{} S{}", r.method, r.index);
            match plot.series.iter_mut().find(|s| s.name == name) {
                Some(s) => s.points.push((r.n_or_n as f64, r.estimate)),
                None => plot.series.push(Series {
                    name,
                    points: vec![(r.n_or_n as f64, r.estimate)],
                }),
            }
            let exact = format!("exact S{}", r.index);
            if !plot.references.iter().any(|(n, _)| *n == exact) {
                plot.references.push((exact, r.exact));
            }
        }
        plot
    }
}

impl Plottable for MseReport {
    fn plot(&self) -> Plot {
        Plot {
            title: "Squared errors at fixed budget".into(),
            x_label: "method and index".into(),
            y_label: "squared error".into(),
            boxes: self
                .rows
                .iter()
                .zip(&self.samples)
                .map(|(r, v)| BoxSeries {
                    name: format!("{} S{}", r.method, r.index),
                    values: v.clone(),
                })
                .collect(),
            ..Plot::default()
        }
    }
}

/// Mean squared error against input dimension, one curve per method and
/// index (first six indices).
pub struct DimensionPlot<'a>(pub &'a [(usize, MseReport)]);

impl Plottable for DimensionPlot<'_> {
    fn plot(&self) -> Plot {
        let mut plot = Plot {
            title: "Mean squared error against dimension".into(),
            x_label: "p".into(),
            y_label: "mean squared error".into(),
            ..Plot::default()
        };
        for (p, report) in self.0 {
            for r in report.rows.iter().filter(|r| r.index <= 6) {
                let name = format!("{} S{}", r.method, r.index);
                match plot.series.iter_mut().find(|s| s.name == name) {
                    Some(s) => s.points.push((*p as f64, r.mse_mean)),
                    None => plot.series.push(Series {
                        name,
                        points: vec![(*p as f64, r.mse_mean)],
                    }),
                }
            }
        }
        plot
    }
}

impl Plottable for VarianceReport {
    fn plot(&self) -> Plot {
        let mut plot = Plot {
            title: "Limiting variances".into(),
            x_label: "alpha".into(),
            y_label: "variance".into(),
            ..Plot::default()
        };
        for r in &self.rows {
            for (kind, v) in [("pf", r.v_pf), ("rank", r.v_rank), ("eff", r.v_eff)] {
                let name = format!("{kind} p={} i={}", r.p, r.index);
                match plot.series.iter_mut().find(|s| s.name == name) {
                    Some(s) => s.points.push((r.alpha, v)),
                    None => plot.series.push(Series {
                        name,
                        points: vec![(r.alpha, v)],
                    }),
                }
            }
        }
        plot
    }
}

/// Quartiles by linear interpolation between order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Box-plot summary with whiskers at the most extreme points within
/// 1.5 IQR of the quartiles.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let (q1, median, q3) = (
        quantile_sorted(&s, 0.25),
        quantile_sorted(&s, 0.5),
        quantile_sorted(&s, 0.75),
    );
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = s.iter().copied().filter(|v| (lo_fence..=hi_fence).contains(v)).collect();
    Some(BoxStats {
        q1,
        median,
        q3,
        whisker_lo: inside.first().copied().unwrap_or(q1),
        whisker_hi: inside.last().copied().unwrap_or(q3),
        outliers: s.into_iter().filter(|v| !(lo_fence..=hi_fence).contains(v)).collect(),
    })
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn short(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e5) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let t = if log { v.log10() } else { v };
            lo = lo.min(t);
            hi = hi.max(t);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        let pad = 0.05 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    /// Position in `[0, 1]`; `None` for values a log axis cannot show.
    fn frac(&self, v: f64) -> Option<f64> {
        if self.log && v <= 0.0 {
            return None;
        }
        let t = if self.log { v.log10() } else { v };
        Some((t - self.lo) / (self.hi - self.lo))
    }
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
}

/// Renders `plot` as a standalone SVG 1.1 document. With `log_x` the x
/// coordinates are placed on a log10 scale; tick labels keep data units.
pub fn render_svg(plot: &Plot, log_x: bool) -> Result<String> {
    if plot.is_empty() {
        return Err(Error::invalid("cannot plot an empty report"));
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&plot.title)
    );

    let y_values = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .chain(plot.boxes.iter().flat_map(|b| b.values.iter().copied()))
        .chain(plot.references.iter().map(|r| r.1));
    let y_axis = Axis::new(y_values, false);
    let px = |f: f64| LEFT + f * pw;
    let py = |v: f64| TOP + (1.0 - (v - y_axis.lo) / (y_axis.hi - y_axis.lo)) * ph;

    let _ = writeln!(
        w,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>"##
    );
    for t in linear_ticks(y_axis.lo, y_axis.hi) {
        let y = py(t);
        let _ = writeln!(
            w,
            r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000000"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            short(t)
        );
    }

    let mut legend = Vec::new();
    if !plot.boxes.is_empty() {
        let slot = pw / plot.boxes.len() as f64;
        for (k, b) in plot.boxes.iter().enumerate() {
            let Some(st) = box_stats(&b.values) else { continue };
            let color = PALETTE[k % PALETTE.len()];
            let cx = LEFT + slot * (k as f64 + 0.5);
            let half = (slot * 0.3).min(20.0);
            let _ = writeln!(
                w,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/>"#,
                py(st.whisker_lo),
                py(st.whisker_hi)
            );
            let _ = writeln!(
                w,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="white" stroke="{color}"/>"#,
                cx - half,
                py(st.q3),
                2.0 * half,
                (py(st.q1) - py(st.q3)).max(0.0)
            );
            let _ = writeln!(
                w,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                cx - half,
                py(st.median),
                cx + half,
                py(st.median)
            );
            for o in &st.outliers {
                let _ = writeln!(
                    w,
                    r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" fill="none" stroke="{color}"/>"#,
                    py(*o)
                );
            }
            let _ = writeln!(
                w,
                r#"<text x="{cx:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end" transform="rotate(-45 {cx:.2} {:.2})">{}</text>"#,
                TOP + ph + 14.0,
                TOP + ph + 14.0,
                escape(&b.name)
            );
        }
    } else {
        let x_axis = Axis::new(plot.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), log_x);
        let mut xs: Vec<f64> = plot
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .filter(|v| v.is_finite() && (!log_x || *v > 0.0))
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if xs.len() > 10 {
            let step = xs.len().div_ceil(10);
            xs = xs.into_iter().step_by(step).collect();
        }
        for t in xs {
            if let Some(f) = x_axis.frac(t) {
                let x = px(f);
                let _ = writeln!(
                    w,
                    r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#000000"/><text x="{x:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"##,
                    TOP + ph,
                    TOP + ph + 5.0,
                    TOP + ph + 18.0,
                    short(t)
                );
            }
        }
        for (k, s) in plot.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter_map(|&(x, y)| x_axis.frac(x).map(|f| format!("{:.2},{:.2}", px(f), py(y))))
                .collect();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
            legend.push((s.name.clone(), color));
        }
    }
    for (name, v) in &plot.references {
        let y = py(*v);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#000000" stroke-dasharray="4 3"><title>{}</title></line>"##,
            LEFT + pw,
            escape(name)
        );
    }
    for (k, (name, color)) in legend.iter().enumerate() {
        let y = TOP + 12.0 * k as f64;
        if y > HEIGHT - 10.0 {
            break;
        }
        let _ = writeln!(
            w,
            r#"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="{color}" stroke-width="2"/><text x="{}" y="{:.2}" font-family="sans-serif" font-size="10">{}</text>"#,
            WIDTH - RIGHT + 10.0,
            WIDTH - RIGHT + 30.0,
            WIDTH - RIGHT + 35.0,
            y + 3.0,
            escape(name)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 8.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(report: &dyn Plottable, path: &Path, log_x: bool) -> Result<()> {
    let text = render_svg(&report.plot(), log_x)?;
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
