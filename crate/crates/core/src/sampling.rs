//! Seedable designs of experiments.
//!
//! Every random quantity in the crate is drawn from an [`RngStream`], a
//! `(root_seed, stream_id)` pair backed by ChaCha8 with the stream id as the
//! ChaCha stream selector. Streams are plain values; two workers holding
//! the same pair produce the same sequence regardless of scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::ModelSpec;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of two words.
pub fn mix_ids(a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(a) ^ b.rotate_left(17) ^ 0x5851_f42d_4c95_7f2d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub root_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_id: u64) -> Self {
        RngStream {
            root_seed,
            stream_id,
        }
    }

    /// Stream of replicate `rep` in study `study`.
    pub fn for_replication(root_seed: u64, study: u64, rep: u64) -> Self {
        RngStream::new(root_seed, mix_ids(study, rep))
    }

    /// A child stream, independent of `self` and of its other children.
    pub fn substream(&self, k: u64) -> Self {
        RngStream::new(self.root_seed, mix_ids(self.stream_id, k))
    }

    pub fn rng(&self) -> UniformSource {
        let mut inner = ChaCha8Rng::seed_from_u64(self.root_seed);
        inner.set_stream(self.stream_id);
        UniformSource { inner }
    }
}

/// Uniform variates from one stream.
pub struct UniformSource {
    inner: ChaCha8Rng,
}

impl UniformSource {
    /// A uniform on the open interval `(0, 1)` with 53 random mantissa bits.
    /// Values lie on the grid `(k + 1/2) 2^-53`, so 0 and 1 never occur.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Fills `x` with one draw from the product of the model's input laws.
    pub fn fill_point(&mut self, model: &ModelSpec, x: &mut [f64]) {
        for (xi, d) in x.iter_mut().zip(model.inputs()) {
            *xi = d.quantile(self.uniform());
        }
    }
}

/// Model wrapper that counts evaluations.
pub(crate) struct Evaluator<'a> {
    model: &'a ModelSpec,
    calls: u64,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(model: &'a ModelSpec) -> Self {
        Evaluator { model, calls: 0 }
    }

    #[inline]
    pub(crate) fn call(&mut self, x: &[f64]) -> f64 {
        self.calls += 1;
        self.model.eval(x)
    }

    pub(crate) fn calls(&self) -> u64 {
        self.calls
    }
}

/// An i.i.d. input/output sample, inputs stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IidDesign {
    p: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    evaluations: u64,
}

impl IidDesign {
    /// Wraps observed data (for example a CSV file). `rows` must all have
    /// the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                got: rows.len(),
            });
        }
        let p = rows.first().map_or(0, Vec::len);
        if p == 0 {
            return Err(Error::invalid("design needs at least one input column"));
        }
        let mut x = Vec::with_capacity(rows.len() * p);
        for row in &rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            x.extend_from_slice(row);
        }
        let evaluations = y.len() as u64;
        Ok(IidDesign {
            p,
            x,
            y,
            evaluations,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.x[j * self.p..(j + 1) * self.p]
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        self.x.iter().skip(i).step_by(self.p).copied().collect()
    }

    /// Model evaluations consumed to build the design.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// The same sample with its rows reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut x = Vec::with_capacity(self.x.len());
        for &j in order {
            x.extend_from_slice(self.row(j));
        }
        IidDesign {
            p: self.p,
            x,
            y: order.iter().map(|&j| self.y[j]).collect(),
            evaluations: self.evaluations,
        }
    }
}

/// Paired outputs `(Y_j, Y^u_j)` sharing the coordinates in `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PickFreezeDesign {
    pub u: Vec<usize>,
    pub y: Vec<f64>,
    pub y_u: Vec<f64>,
    pub evaluations: u64,
}

impl PickFreezeDesign {
    /// Wraps externally produced paired outputs.
    pub fn from_outputs(u: Vec<usize>, y: Vec<f64>, y_u: Vec<f64>) -> Result<Self> {
        if y.len() != y_u.len() {
            return Err(Error::DimensionMismatch {
                expected: y.len(),
                got: y_u.len(),
            });
        }
        let evaluations = 2 * y.len() as u64;
        Ok(PickFreezeDesign {
            u,
            y,
            y_u,
            evaluations,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn swapped(&self) -> Self {
        PickFreezeDesign {
            u: self.u.clone(),
            y: self.y_u.clone(),
            y_u: self.y.clone(),
            evaluations: self.evaluations,
        }
    }
}

/// Pick-Freeze pair plus an independent output sample `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleDesign {
    pub u: Vec<usize>,
    pub y: Vec<f64>,
    pub y_u: Vec<f64>,
    pub w: Vec<f64>,
    pub evaluations: u64,
}

impl TripleDesign {
    pub fn from_outputs(u: Vec<usize>, y: Vec<f64>, y_u: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if y.len() != y_u.len() || y.len() != w.len() {
            return Err(Error::invalid("triple design samples must share one length"));
        }
        let evaluations = 3 * y.len() as u64;
        Ok(TripleDesign {
            u,
            y,
            y_u,
            w,
            evaluations,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

/// One shared output sample and one frozen sample per input coordinate:
/// the `(p + 1) N` design estimating all first-order indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PickFreezeFamily {
    pub y: Vec<f64>,
    pub frozen: Vec<Vec<f64>>,
    pub evaluations: u64,
}

impl PickFreezeFamily {
    pub fn design(&self, i: usize) -> PickFreezeDesign {
        PickFreezeDesign {
            u: vec![i],
            y: self.y.clone(),
            y_u: self.frozen[i].clone(),
            evaluations: 2 * self.y.len() as u64,
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("sample size must be >= 2, got {n}")));
    }
    Ok(())
}

/// Validates a 0-based index subset against dimension `p`.
pub fn check_subset(u: &[usize], p: usize) -> Result<()> {
    if u.is_empty() {
        return Err(Error::invalid("index subset u must be non-empty"));
    }
    for (k, &i) in u.iter().enumerate() {
        if i >= p {
            return Err(Error::invalid(format!(
                "index {} out of range 1..={p}",
                i + 1
            )));
        }
        if u[..k].contains(&i) {
            return Err(Error::invalid(format!("index {} repeated in u", i + 1)));
        }
    }
    Ok(())
}

pub fn sample_iid(model: &ModelSpec, n: usize, stream: RngStream) -> Result<IidDesign> {
    check_n(n)?;
    let p = model.dim();
    let mut rng = stream.rng();
    let mut eval = Evaluator::new(model);
    let mut x = vec![0.0; n * p];
    let mut y = Vec::with_capacity(n);
    for row in x.chunks_exact_mut(p) {
        rng.fill_point(model, row);
        y.push(eval.call(row));
    }
    Ok(IidDesign {
        p,
        x,
        y,
        evaluations: eval.calls(),
    })
}

/// Draws `(X, X^u)` pairs: coordinates in `u` are shared, the others are
/// redrawn independently for the second evaluation.
pub fn sample_pickfreeze(
    model: &ModelSpec,
    u: &[usize],
    n: usize,
    stream: RngStream,
) -> Result<PickFreezeDesign> {
    check_n(n)?;
    check_subset(u, model.dim())?;
    let mut rng = stream.rng();
    let mut eval = Evaluator::new(model);
    let (y, y_u) = pickfreeze_pairs(model, u, n, &mut rng, &mut eval);
    Ok(PickFreezeDesign {
        u: u.to_vec(),
        y,
        y_u,
        evaluations: eval.calls(),
    })
}

fn pickfreeze_pairs(
    model: &ModelSpec,
    u: &[usize],
    n: usize,
    rng: &mut UniformSource,
    eval: &mut Evaluator<'_>,
) -> (Vec<f64>, Vec<f64>) {
    let p = model.dim();
    let inputs = model.inputs();
    let mut x = vec![0.0; p];
    let mut x_u = vec![0.0; p];
    let mut y = Vec::with_capacity(n);
    let mut y_u = Vec::with_capacity(n);
    for _ in 0..n {
        rng.fill_point(model, &mut x);
        for i in 0..p {
            x_u[i] = if u.contains(&i) {
                x[i]
            } else {
                inputs[i].quantile(rng.uniform())
            };
        }
        y.push(eval.call(&x));
        y_u.push(eval.call(&x_u));
    }
    (y, y_u)
}

pub fn sample_triple(
    model: &ModelSpec,
    u: &[usize],
    n: usize,
    stream: RngStream,
) -> Result<TripleDesign> {
    check_n(n)?;
    check_subset(u, model.dim())?;
    let mut rng = stream.rng();
    let mut eval = Evaluator::new(model);
    let (y, y_u) = pickfreeze_pairs(model, u, n, &mut rng, &mut eval);
    let mut x = vec![0.0; model.dim()];
    let w = (0..n)
        .map(|_| {
            rng.fill_point(model, &mut x);
            eval.call(&x)
        })
        .collect();
    Ok(TripleDesign {
        u: u.to_vec(),
        y,
        y_u,
        w,
        evaluations: eval.calls(),
    })
}

/// Shared sample of size `n` plus one frozen sample per coordinate.
pub fn sample_pickfreeze_family(
    model: &ModelSpec,
    n: usize,
    stream: RngStream,
) -> Result<PickFreezeFamily> {
    check_n(n)?;
    let p = model.dim();
    let inputs = model.inputs();
    let mut rng = stream.rng();
    let mut eval = Evaluator::new(model);
    let mut base = vec![0.0; n * p];
    let mut y = Vec::with_capacity(n);
    for row in base.chunks_exact_mut(p) {
        rng.fill_point(model, row);
        y.push(eval.call(row));
    }
    let mut x_u = vec![0.0; p];
    let mut frozen = Vec::with_capacity(p);
    for i in 0..p {
        let mut col = Vec::with_capacity(n);
        for row in base.chunks_exact(p) {
            for (k, slot) in x_u.iter_mut().enumerate() {
                *slot = if k == i {
                    row[k]
                } else {
                    inputs[k].quantile(rng.uniform())
                };
            }
            col.push(eval.call(&x_u));
        }
        frozen.push(col);
    }
    Ok(PickFreezeFamily {
        y,
        frozen,
        evaluations: eval.calls(),
    })
}

/// Sample sizes giving both methods the same number of model calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetSplit {
    /// Single-sample size for the rank estimators.
    pub rank_n: usize,
    /// Per-sample size for Pick-Freeze, `budget / (p + 1)` rounded down.
    pub pickfreeze_n: usize,
}

impl BudgetSplit {
    pub fn new(budget: usize, p: usize) -> Self {
        BudgetSplit {
            rank_n: budget,
            pickfreeze_n: budget / (p + 1),
        }
    }
}
