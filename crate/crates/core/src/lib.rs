//! Highest density regions of univariate distributions, computed by
//! minimising region width over quantile-parametrised candidates, plus
//! shortest confidence intervals built on the same machinery.
//!
//! ```
//! use hdr_core::{hdr_for_family, params, OptimizerConfig};
//!
//! let r = hdr_for_family("chisq", &params([("df", 30.0)]), 0.98, &OptimizerConfig::default())
//!     .unwrap();
//! let part = r.region.parts()[0];
//! assert!((part.lower() - 13.9324865197342).abs() < 1e-9);
//! ```

// `!(x > y)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod confint;
pub mod distributions;
pub mod error;
pub mod format;
pub mod hdr;
pub mod interval;
pub mod metrics;
pub mod optimize;
pub mod oracle;

pub use confint::{
    equal_tailed_variance_ci, inverse_gamma, second_order_check, shortest_ci, variance_ci,
    variance_pivot, CiResult, Direction, PivotSpec, SecondOrderCheck, VariancePivot,
};
pub use distributions::{
    classify_shape, eval_u, make_family, mode_point, normal_mixture, params, DiscretePmf, Family,
    Params, ProbabilityBundle, Shape,
};
pub use error::{HdrError, Result};
pub use hdr::{
    hdr_bimodal, hdr_discrete, hdr_for_family, hdr_mixed, hdr_monotone, hdr_multimodal,
    hdr_uniform, hdr_unimodal, hdr_with_shape, intensity, level_set, DiscreteHdr, HdrResult,
};
pub use interval::{Interval, IntervalSet};
pub use metrics::{density_disparity, disparities, outside_support, prob_disparity, Disparities};
pub use optimize::{
    minimize_scalar, numeric_gradient, Objective, OptCode, OptResult, OptimizerConfig,
    ScalarObjective,
};
pub use oracle::{discrete_brute_force, hdr_updown_grid, BruteForceHdr, GridSpec};
