//! Global sensitivity analysis from a single sample.
//!
//! First-order Sobol' and Cramér-von-Mises indices are estimated either
//! from one i.i.d. input/output sample, through rank statistics of each
//! input ([`rank`]), or from dedicated Pick-Freeze designs
//! ([`pickfreeze`]). [`asymptotics`] gives limiting variances and
//! confidence intervals, and [`experiments`] runs seeded replication
//! studies comparing both approaches at equal model-call budgets.
//!
//! ```
//! use sensikit::models::{gfunction_model, GFunctionParams};
//! use sensikit::rank::rank_sobol_all;
//! use sensikit::sampling::{sample_iid, RngStream};
//!
//! let model = gfunction_model(&GFunctionParams::sequential(3).unwrap());
//! let design = sample_iid(&model, 5000, RngStream::new(42, 0)).unwrap();
//! let s = rank_sobol_all(&design).unwrap();
//! assert!((s[0] - 0.567).abs() < 0.05);
//! ```

pub mod asymptotics;
pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod models;
pub mod pickfreeze;
pub mod rank;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
