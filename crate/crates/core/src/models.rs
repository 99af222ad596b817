//! Test models, input distributions and exact reference indices.
//!
//! A [`ModelSpec`] bundles a deterministic map `f: R^p -> R`, an optional
//! analytic partial derivative in the first coordinate, and one
//! [`DistributionSpec`] per input. Models are immutable and cheap to clone
//! (closures are reference counted), so they can be shared across worker
//! threads.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar map on a point of the input space.
pub type PointMap = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Quantile function `u -> F^{-1}(u)` on `(0, 1)`.
pub type QuantileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Step of the central-difference derivative fallback.
pub const FD_STEP: f64 = 1e-5;

/// Law of one input coordinate, expressed through its quantile function.
#[derive(Clone)]
pub enum DistributionSpec {
    Uniform01,
    Uniform { a: f64, b: f64 },
    InverseCdf(QuantileFn),
}

impl fmt::Debug for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Uniform01 => write!(f, "Uniform01"),
            DistributionSpec::Uniform { a, b } => write!(f, "Uniform({a}, {b})"),
            DistributionSpec::InverseCdf(_) => write!(f, "InverseCdf(..)"),
        }
    }
}

impl DistributionSpec {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("uniform({a}, {b}) requires a < b")));
        }
        Ok(DistributionSpec::Uniform { a, b })
    }

    /// Wraps a quantile function. The map is probed on a 999-point grid of
    /// `(0, 1)` and rejected if it is non-monotone or returns NaN there.
    pub fn via_inverse_cdf(quantile: QuantileFn) -> Result<Self> {
        let mut prev = f64::NEG_INFINITY;
        for k in 1..1000 {
            let q = quantile(k as f64 / 1000.0);
            if q.is_nan() {
                return Err(Error::invalid("quantile function returned NaN"));
            }
            if q < prev {
                return Err(Error::invalid("quantile function is not non-decreasing"));
            }
            prev = q;
        }
        Ok(DistributionSpec::InverseCdf(quantile))
    }

    /// Closed support of the law when it is bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            DistributionSpec::Uniform01 => Some((0.0, 1.0)),
            DistributionSpec::Uniform { a, b } => Some((*a, *b)),
            DistributionSpec::InverseCdf(_) => None,
        }
    }

    /// `transform_input` without the range check, for callers that already
    /// hold a variate in `(0, 1)`.
    pub(crate) fn quantile(&self, u: f64) -> f64 {
        match self {
            DistributionSpec::Uniform01 => u,
            DistributionSpec::Uniform { a, b } => a + (b - a) * u,
            DistributionSpec::InverseCdf(q) => q(u),
        }
    }

    /// Derivative of the quantile function at `u`.
    pub(crate) fn quantile_slope(&self, u: f64) -> f64 {
        match self {
            DistributionSpec::Uniform01 => 1.0,
            DistributionSpec::Uniform { a, b } => b - a,
            DistributionSpec::InverseCdf(q) => {
                let lo = (u - FD_STEP).max(f64::EPSILON);
                let hi = (u + FD_STEP).min(1.0 - f64::EPSILON);
                (q(hi) - q(lo)) / (hi - lo)
            }
        }
    }
}

/// Maps a variate `u` in `(0, 1)` through the quantile function of `d`.
pub fn transform_input(d: &DistributionSpec, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::invalid(format!("variate {u} outside (0, 1)")));
    }
    Ok(d.quantile(u))
}

/// An evaluatable model `Y = f(X_1, ..., X_p)`.
#[derive(Clone)]
pub struct ModelSpec {
    name: String,
    p: usize,
    eval: PointMap,
    deriv1: Option<PointMap>,
    inputs: Vec<DistributionSpec>,
    exact_sobol: Option<Vec<f64>>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("name", &self.name)
            .field("p", &self.p)
            .field("deriv1", &self.deriv1.is_some())
            .field("inputs", &self.inputs)
            .field("exact_sobol", &self.exact_sobol)
            .finish()
    }
}

impl ModelSpec {
    /// A model with `p` inputs, all uniform on `[0, 1]`.
    pub fn new(name: impl Into<String>, p: usize, eval: PointMap) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("model dimension must be positive"));
        }
        Ok(ModelSpec {
            name: name.into(),
            p,
            eval,
            deriv1: None,
            inputs: vec![DistributionSpec::Uniform01; p],
            exact_sobol: None,
        })
    }

    pub fn with_deriv1(mut self, deriv1: PointMap) -> Self {
        self.deriv1 = Some(deriv1);
        self
    }

    pub fn with_inputs(mut self, inputs: Vec<DistributionSpec>) -> Result<Self> {
        if inputs.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: inputs.len(),
            });
        }
        self.inputs = inputs;
        Ok(self)
    }

    pub fn with_exact_sobol(mut self, exact: Vec<f64>) -> Result<Self> {
        if exact.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: exact.len(),
            });
        }
        self.exact_sobol = Some(exact);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn inputs(&self) -> &[DistributionSpec] {
        &self.inputs
    }

    pub fn has_deriv1(&self) -> bool {
        self.deriv1.is_some()
    }

    /// Exact first-order Sobol' indices, when known analytically.
    pub fn exact_sobol(&self) -> Option<&[f64]> {
        self.exact_sobol.as_deref()
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Partial derivative of `f` in coordinate `coord` at `x`.
    ///
    /// Uses the analytic `deriv1` for coordinate 0 when present and a
    /// central difference otherwise. The difference points are clamped to
    /// the support of the coordinate's law.
    pub fn partial(&self, coord: usize, x: &[f64], allow_fd: bool) -> Result<f64> {
        if coord == 0 {
            if let Some(d) = &self.deriv1 {
                return Ok(d(x));
            }
        }
        if !allow_fd {
            return Err(Error::invalid(format!(
                "no analytic derivative for coordinate {} and finite differences disabled",
                coord + 1
            )));
        }
        let centre = x[coord];
        let (mut lo, mut hi) = (centre - FD_STEP, centre + FD_STEP);
        if let Some((a, b)) = self.inputs[coord].support() {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        let mut probe = x.to_vec();
        probe[coord] = hi;
        let f_hi = self.eval(&probe);
        probe[coord] = lo;
        let f_lo = self.eval(&probe);
        Ok((f_hi - f_lo) / (hi - lo))
    }
}

/// Coefficients of the Sobol' g-function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFunctionParams {
    a: Vec<f64>,
}

impl GFunctionParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::invalid("g-function needs at least one coefficient"));
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(format!(
                "g-function coefficients must be finite and >= 0, got {bad}"
            )));
        }
        Ok(GFunctionParams { a })
    }

    /// `a_i = i` for `i = 1..=p`.
    pub fn sequential(p: usize) -> Result<Self> {
        Self::new((1..=p).map(|i| i as f64).collect())
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }
}

/// `prod_i (|4 x_i - 2| + a_i) / (1 + a_i)`.
pub fn gfunction_eval(params: &GFunctionParams, x: &[f64]) -> Result<f64> {
    if x.len() != params.a.len() {
        return Err(Error::DimensionMismatch {
            expected: params.a.len(),
            got: x.len(),
        });
    }
    Ok(gfunction_unchecked(&params.a, x))
}

#[inline]
fn gfunction_unchecked(a: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .zip(x)
        .map(|(&ai, &xi)| ((4.0 * xi - 2.0).abs() + ai) / (1.0 + ai))
        .product()
}

/// Exact first-order indices of the g-function.
///
/// Each factor has partial variance `V_i = 1 / (3 (1 + a_i)^2)` and the
/// total variance is `prod (1 + V_j) - 1`.
pub fn gfunction_exact_sobol(params: &GFunctionParams) -> Vec<f64> {
    let partial: Vec<f64> = params
        .a
        .iter()
        .map(|&ai| 1.0 / (3.0 * (1.0 + ai) * (1.0 + ai)))
        .collect();
    let total = partial.iter().map(|v| 1.0 + v).product::<f64>() - 1.0;
    partial.iter().map(|v| v / total).collect()
}

/// Parameters of `Y = alpha X_1 + X_2 + ... + X_p` with uniform inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearModelParams {
    alpha: f64,
    p: usize,
}

impl LinearModelParams {
    pub fn new(alpha: f64, p: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be > 0, got {alpha}")));
        }
        if p < 2 {
            return Err(Error::invalid(format!("linear model needs p >= 2, got {p}")));
        }
        Ok(LinearModelParams { alpha, p })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.p
    }
}

pub fn linear_exact_sobol(params: &LinearModelParams) -> Vec<f64> {
    let a2 = params.alpha * params.alpha;
    let total = a2 + (params.p - 1) as f64;
    let mut out = vec![1.0 / total; params.p];
    out[0] = a2 / total;
    out
}

/// The g-function as a [`ModelSpec`], with its derivative in `x_1` and
/// exact indices attached.
pub fn gfunction_model(params: &GFunctionParams) -> ModelSpec {
    let a = Arc::new(params.a.clone());
    let a_eval = Arc::clone(&a);
    let a_deriv = Arc::clone(&a);
    let p = params.dim();
    ModelSpec::new(
        "gfunction",
        p,
        Arc::new(move |x: &[f64]| gfunction_unchecked(&a_eval, x)),
    )
    .expect("p >= 1 checked by GFunctionParams")
    .with_deriv1(Arc::new(move |x: &[f64]| {
        let slope = 4.0 * (4.0 * x[0] - 2.0).signum() / (1.0 + a_deriv[0]);
        slope * gfunction_unchecked(&a_deriv[1..], &x[1..])
    }))
    .with_exact_sobol(gfunction_exact_sobol(params))
    .expect("exact index vector has length p")
}

pub fn linear_model(params: &LinearModelParams) -> ModelSpec {
    let alpha = params.alpha;
    ModelSpec::new(
        "linear",
        params.p,
        Arc::new(move |x: &[f64]| alpha * x[0] + x[1..].iter().sum::<f64>()),
    )
    .expect("p >= 2 checked by LinearModelParams")
    .with_deriv1(Arc::new(move |_: &[f64]| alpha))
    .with_exact_sobol(linear_exact_sobol(params))
    .expect("exact index vector has length p")
}

const ISHIGAMI_A: f64 = 7.0;
const ISHIGAMI_B: f64 = 0.1;

fn ishigami_model() -> ModelSpec {
    let (a, b) = (ISHIGAMI_A, ISHIGAMI_B);
    let pi4 = PI.powi(4);
    let d1 = b * pi4 / 5.0 + b * b * pi4 * pi4 / 50.0 + 0.5;
    let d2 = a * a / 8.0;
    let total = a * a / 8.0 + b * pi4 / 5.0 + b * b * pi4 * pi4 / 18.0 + 0.5;
    let inputs = vec![DistributionSpec::Uniform { a: -PI, b: PI }; 3];
    ModelSpec::new(
        "ishigami",
        3,
        Arc::new(move |x: &[f64]| {
            x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
        }),
    )
    .expect("p = 3")
    .with_deriv1(Arc::new(move |x: &[f64]| {
        x[0].cos() * (1.0 + b * x[2].powi(4))
    }))
    .with_inputs(inputs)
    .and_then(|m| m.with_exact_sobol(vec![d1 / total, d2 / total, 0.0]))
    .expect("three inputs")
}

/// Names accepted by the `custom` model registry.
pub const CUSTOM_MODELS: &[&str] = &["constant", "identity", "ishigami"];

/// Looks up a compiled-in model by name. `p` is ignored by fixed-dimension
/// models.
pub fn custom_model(name: &str, p: usize) -> Result<ModelSpec> {
    match name {
        "constant" => ModelSpec::new("constant", p, Arc::new(|_: &[f64]| 1.0))
            .map(|m| m.with_deriv1(Arc::new(|_: &[f64]| 0.0))),
        "identity" => {
            let mut exact = vec![0.0; p.max(1)];
            exact[0] = 1.0;
            ModelSpec::new("identity", p, Arc::new(|x: &[f64]| x[0]))?
                .with_deriv1(Arc::new(|_: &[f64]| 1.0))
                .with_exact_sobol(exact)
        }
        "ishigami" => Ok(ishigami_model()),
        other => Err(Error::invalid(format!(
            "unknown custom model '{other}' (known: {})",
            CUSTOM_MODELS.join(", ")
        ))),
    }
}

/// Serializable model selector used by the configuration layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelDescriptor {
    Gfunction { a: Vec<f64> },
    Linear { alpha: f64, p: usize },
    Custom { name: String, p: usize },
}

impl ModelDescriptor {
    pub fn build(&self) -> Result<ModelSpec> {
        match self {
            ModelDescriptor::Gfunction { a } => {
                Ok(gfunction_model(&GFunctionParams::new(a.clone())?))
            }
            ModelDescriptor::Linear { alpha, p } => {
                Ok(linear_model(&LinearModelParams::new(*alpha, *p)?))
            }
            ModelDescriptor::Custom { name, p } => custom_model(name, *p),
        }
    }

    /// Short label used in report rows.
    pub fn label(&self) -> String {
        match self {
            ModelDescriptor::Gfunction { .. } => "gfunction".to_string(),
            ModelDescriptor::Linear { .. } => "linear".to_string(),
            ModelDescriptor::Custom { name, .. } => name.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gfunction_at_centre() {
        let g = GFunctionParams::new(vec![1.0, 2.0]).unwrap();
        let v = gfunction_eval(&g, &[0.5, 0.5]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gfunction_at_origin() {
        let a = vec![0.0, 1.0, 2.5, 9.0];
        let g = GFunctionParams::new(a.clone()).unwrap();
        let expected: f64 = a.iter().map(|ai| (2.0 + ai) / (1.0 + ai)).product();
        assert_eq!(gfunction_eval(&g, &[0.0; 4]).unwrap(), expected);
    }

    #[test]
    fn gfunction_hand_value() {
        // |0.4 - 2| = 1.6 in every factor: prod_{i=1..6} (1.6 + i) / (1 + i).
        let g = GFunctionParams::sequential(6).unwrap();
        let v = gfunction_eval(&g, &[0.1; 6]).unwrap();
        let hand = (2.6 / 2.0) * (3.6 / 3.0) * (4.6 / 4.0) * (5.6 / 5.0) * (6.6 / 6.0) * (7.6 / 7.0);
        assert!((v - hand).abs() < 1e-14);
        assert!((v - 2.399_654_4).abs() < 1e-12);
    }

    #[test]
    fn gfunction_dimension_mismatch() {
        let g = GFunctionParams::sequential(3).unwrap();
        assert!(matches!(
            gfunction_eval(&g, &[0.1, 0.2]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn gfunction_rejects_negative_coefficients() {
        assert!(GFunctionParams::new(vec![1.0, -0.5]).is_err());
        assert!(GFunctionParams::new(vec![]).is_err());
    }

    /// Tensor-grid quadrature of Var(E[Y | X_i]) / Var(Y), independent of
    /// the closed form. Midpoint rule on a 2k-point grid is exact for the
    /// piecewise-linear factors |4x - 2| when the kink sits on a cell edge.
    fn gfunction_quadrature_oracle(a: &[f64], cells: usize) -> Vec<f64> {
        let nodes: Vec<f64> = (0..cells).map(|k| (k as f64 + 0.5) / cells as f64).collect();
        let factor = |ai: f64, x: f64| ((4.0 * x - 2.0).abs() + ai) / (1.0 + ai);
        // E[factor] = 1 and the factors are independent, so
        // Var(Y) = prod E[factor^2] - 1 and Var(E[Y|X_i]) = Var(factor_i).
        let second: Vec<f64> = a
            .iter()
            .map(|&ai| nodes.iter().map(|&x| factor(ai, x).powi(2)).sum::<f64>() / cells as f64)
            .collect();
        let means: Vec<f64> = a
            .iter()
            .map(|&ai| nodes.iter().map(|&x| factor(ai, x)).sum::<f64>() / cells as f64)
            .collect();
        let total = second.iter().product::<f64>() - means.iter().map(|m| m * m).product::<f64>();
        second
            .iter()
            .zip(&means)
            .map(|(s, m)| (s - m * m) * means.iter().map(|m| m * m).product::<f64>() / (m * m) / total)
            .collect()
    }

    #[test]
    fn gfunction_exact_matches_quadrature() {
        let g = GFunctionParams::sequential(6).unwrap();
        let exact = gfunction_exact_sobol(&g);
        let oracle = gfunction_quadrature_oracle(g.a(), 20_000);
        for (e, o) in exact.iter().zip(&oracle) {
            assert!((e - o).abs() < 1e-6, "{e} vs {o}");
        }
        let frozen = [0.4607, 0.2048, 0.1152, 0.0737, 0.0512, 0.0376];
        for (e, f) in exact.iter().zip(frozen) {
            assert!((e - f).abs() < 1e-4, "{e} vs {f}");
        }
    }

    #[test]
    fn gfunction_exact_edge_cases() {
        let one = gfunction_exact_sobol(&GFunctionParams::new(vec![3.0]).unwrap());
        assert!((one[0] - 1.0).abs() < 1e-14);
        let sym = gfunction_exact_sobol(&GFunctionParams::new(vec![2.0, 2.0]).unwrap());
        assert_eq!(sym[0], sym[1]);
        let six = gfunction_exact_sobol(&GFunctionParams::sequential(6).unwrap());
        assert!(six.iter().sum::<f64>() < 1.0);
        assert!(six.windows(2).all(|w| w[0] > w[1]));
        assert!(six.iter().all(|s| *s > 0.0 && *s < 1.0));
    }

    #[test]
    fn linear_exact_values() {
        let s = linear_exact_sobol(&LinearModelParams::new(1.0, 2).unwrap());
        assert_eq!(s, vec![0.5, 0.5]);
        let s = linear_exact_sobol(&LinearModelParams::new(2.0, 3).unwrap());
        assert!((s[0] - 4.0 / 6.0).abs() < 1e-15);
        let s = linear_exact_sobol(&LinearModelParams::new(1e-6, 4).unwrap());
        assert!(s[0] < 1e-12);
        assert!(LinearModelParams::new(0.0, 3).is_err());
        assert!(LinearModelParams::new(1.0, 1).is_err());
    }

    #[test]
    fn transform_examples() {
        assert_eq!(transform_input(&DistributionSpec::Uniform01, 0.3).unwrap(), 0.3);
        let d = DistributionSpec::uniform(-1.0, 1.0).unwrap();
        assert_eq!(transform_input(&d, 0.5).unwrap(), 0.0);
        let expo = DistributionSpec::via_inverse_cdf(Arc::new(|u: f64| -(1.0 - u).ln())).unwrap();
        let u = 1.0 - (-2.0f64).exp();
        assert!((transform_input(&expo, u).unwrap() - 2.0).abs() < 1e-12);
        assert!(transform_input(&expo, 0.0).is_err());
        assert!(transform_input(&expo, 1.0).is_err());
        assert!(transform_input(&expo, f64::NAN).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(DistributionSpec::uniform(1.0, 1.0).is_err());
        assert!(DistributionSpec::uniform(2.0, 1.0).is_err());
        assert!(DistributionSpec::via_inverse_cdf(Arc::new(|u: f64| -u)).is_err());
    }

    #[test]
    fn finite_difference_clamps_to_support() {
        let m = ModelSpec::new("sq", 2, Arc::new(|x: &[f64]| x[0] * x[0] + 3.0 * x[1])).unwrap();
        assert!((m.partial(0, &[0.25, 0.5], true).unwrap() - 0.5).abs() < 1e-9);
        // At the boundary a one-sided difference stays inside [0, 1].
        assert!((m.partial(0, &[1.0, 0.5], true).unwrap() - 2.0).abs() < 1e-4);
        assert!((m.partial(1, &[0.0, 0.0], true).unwrap() - 3.0).abs() < 1e-9);
        assert!(m.partial(0, &[0.2, 0.2], false).is_err());
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let models = [
            gfunction_model(&GFunctionParams::sequential(4).unwrap()),
            linear_model(&LinearModelParams::new(2.5, 3).unwrap()),
            custom_model("ishigami", 3).unwrap(),
        ];
        for m in &models {
            let x: Vec<f64> = (0..m.dim()).map(|i| 0.13 + 0.21 * i as f64).collect();
            let analytic = m.partial(0, &x, false).unwrap();
            let stripped = ModelSpec::new("fd", m.dim(), m.eval.clone())
                .unwrap()
                .with_inputs(m.inputs().to_vec())
                .unwrap();
            let fd = stripped.partial(0, &x, true).unwrap();
            assert!((analytic - fd).abs() < 1e-6 * (1.0 + analytic.abs()), "{}", m.name());
        }
    }

    #[test]
    fn ishigami_exact_indices() {
        let m = custom_model("ishigami", 0).unwrap();
        let s = m.exact_sobol().unwrap();
        assert!((s[0] - 0.3139).abs() < 1e-4);
        assert!((s[1] - 0.4424).abs() < 1e-4);
        assert_eq!(s[2], 0.0);
    }

    #[test]
    fn descriptor_round_trip() {
        let d: ModelDescriptor = serde_json::from_str(r#"{"model":"linear","alpha":2.0,"p":3}"#).unwrap();
        assert_eq!(d, ModelDescriptor::Linear { alpha: 2.0, p: 3 });
        assert_eq!(d.build().unwrap().dim(), 3);
        assert!(custom_model("nope", 2).is_err());
    }

    proptest! {
        #[test]
        fn gfunction_reflection_symmetry(
            x in prop::collection::vec(0.0..=1.0f64, 5),
            coord in 0usize..5,
        ) {
            let g = GFunctionParams::sequential(5).unwrap();
            let mut y = x.clone();
            y[coord] = 1.0 - y[coord];
            let a = gfunction_eval(&g, &x).unwrap();
            let b = gfunction_eval(&g, &y).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            prop_assert!(a > 0.0);
        }

        #[test]
        fn linear_indices_sum_to_one(alpha in 0.01..50.0f64, p in 2usize..40) {
            let s = linear_exact_sobol(&LinearModelParams::new(alpha, p).unwrap());
            prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn transform_is_monotone(u1 in 1e-9..1.0f64, u2 in 1e-9..1.0f64, a in -5.0..5.0f64, w in 0.1..10.0f64) {
            let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
            prop_assume!(hi < 1.0);
            let dists = [
                DistributionSpec::Uniform01,
                DistributionSpec::uniform(a, a + w).unwrap(),
                DistributionSpec::via_inverse_cdf(Arc::new(|u: f64| -(1.0 - u).ln())).unwrap(),
            ];
            for d in &dists {
                prop_assert!(transform_input(d, lo).unwrap() <= transform_input(d, hi).unwrap());
            }
        }
    }
}
