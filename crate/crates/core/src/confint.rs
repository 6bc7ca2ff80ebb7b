//! Shortest confidence intervals from pivotal quantities.
//!
//! For a pivot `h(X, psi)` with known distribution and inverse transform `g`,
//! any probability interval `[L, U]` of the pivot maps to a confidence
//! interval for `psi` with endpoints `g(L)` and `g(U)`. The shortest such
//! interval minimises `|g(U) - g(L)|` subject to `F(U) - F(L) = level`, which
//! is the same one-variable problem as a unimodal HDR with `g` in front.

use std::cell::Cell;
use std::sync::Arc;

use statrs::function::gamma::gamma_ur;

use crate::distributions::{eval_u, make_family, params, Evaluator, ProbabilityBundle};
use crate::error::{HdrError, Result};
use crate::hdr::{checked_cover, DEGENERATE_COVER};
use crate::interval::Interval;
use crate::optimize::{minimize_scalar, numeric_gradient, Objective, OptCode, OptimizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Decreasing,
    Increasing,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Decreasing => 1.0,
            Direction::Increasing => -1.0,
        }
    }
}

/// A pivot distribution together with the map back to parameter space.
#[derive(Clone)]
pub struct PivotSpec {
    pub pivot: ProbabilityBundle,
    pub g: Evaluator,
    pub g_prime: Evaluator,
    /// `g'' / g'`, if known.
    pub m: Option<Evaluator>,
    pub direction: Direction,
    /// Multiplier for separable pivots.
    pub data_factor: Option<f64>,
}

impl std::fmt::Debug for PivotSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PivotSpec")
            .field("pivot", &self.pivot)
            .field("m", &self.m.is_some())
            .field("direction", &self.direction)
            .field("data_factor", &self.data_factor)
            .finish()
    }
}

impl PivotSpec {
    pub fn new<G, D>(pivot: ProbabilityBundle, g: G, g_prime: D, direction: Direction) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            pivot,
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
            m: None,
            direction,
            data_factor: None,
        }
    }

    /// Identity transform: the interval is a probability interval of the pivot.
    pub fn identity(pivot: ProbabilityBundle) -> Self {
        Self::new(pivot, |y| y, |_| 1.0, Direction::Increasing).with_m(|_| 0.0)
    }

    pub fn with_m<M>(mut self, m: M) -> Self
    where
        M: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.m = Some(Arc::new(m));
        self
    }

    pub fn with_data_factor(mut self, k: f64) -> Self {
        self.data_factor = Some(k);
        self
    }

    fn m_at(&self, y: f64) -> f64 {
        match &self.m {
            Some(m) => m(y),
            None => {
                let gp = &self.g_prime;
                numeric_gradient(|t| gp(t), y).unwrap_or(f64::NAN) / gp(y)
            }
        }
    }

    /// Width in parameter space of the pivot interval `[l, u]`, before scaling.
    fn width(&self, l: f64, u: f64) -> f64 {
        self.direction.sign() * ((self.g)(l) - (self.g)(u))
    }

    fn endpoints(&self, l: f64, u: f64) -> (f64, f64) {
        let (gl, gu) = ((self.g)(l), (self.g)(u));
        let (a, b) = match self.direction {
            Direction::Decreasing => (gu, gl),
            Direction::Increasing => (gl, gu),
        };
        let k = self.data_factor.unwrap_or(1.0);
        (k * a, k * b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiResult {
    pub interval: Interval,
    pub level: f64,
    /// Optimised lower tail probability of the pivot interval.
    pub theta: f64,
    pub pivot_lower: f64,
    pub pivot_upper: f64,
    pub iterations: usize,
    pub code: Option<OptCode>,
    pub method: String,
}

/// Local-minimum diagnostics at a pivot interval `[L, U]`.
///
/// `lhs = (m(L) - u(L)) / f(L)` and `rhs = (m(U) - u(U)) / f(U)`. At a
/// stationary point `g'(L)/f(L) = g'(U)/f(U) = slope`, and the width has
/// positive curvature exactly when `slope * (lhs - rhs)` has the sign of the
/// direction (positive for decreasing `g`). For decreasing `g` the slope is
/// negative, so the condition reads `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slope_lower: f64,
    pub slope_upper: f64,
    pub curvature: f64,
}

impl SecondOrderCheck {
    pub fn holds(&self) -> bool {
        self.curvature > 0.0
    }

    pub fn stationarity_residual(&self) -> f64 {
        (self.slope_lower - self.slope_upper).abs()
    }
}

pub fn second_order_check(spec: &PivotSpec, l: f64, u: f64) -> Result<SecondOrderCheck> {
    let f = |x: f64| spec.pivot.density(x).ok_or(HdrError::MissingDensity);
    let (fl, fu) = (f(l)?, f(u)?);
    let (ul, uu) = (eval_u(&spec.pivot, l)?, eval_u(&spec.pivot, u)?);
    let lhs = (spec.m_at(l) - ul) / fl;
    let rhs = (spec.m_at(u) - uu) / fu;
    let slope_lower = (spec.g_prime)(l) / fl;
    let slope_upper = (spec.g_prime)(u) / fu;
    let curvature = spec.direction.sign() * (slope_lower * lhs - slope_upper * rhs);
    Ok(SecondOrderCheck {
        lhs,
        rhs,
        slope_lower,
        slope_upper,
        curvature,
    })
}

struct CiObjective<'a> {
    spec: &'a PivotSpec,
    alpha: f64,
    level: f64,
    cache: Cell<Option<(f64, f64, f64)>>,
}

impl CiObjective<'_> {
    fn bounds(&self, phi: f64) -> (f64, f64) {
        if let Some((p, l, u)) = self.cache.get() {
            if p.to_bits() == phi.to_bits() {
                return (l, u);
            }
        }
        let theta = self.alpha * crate::hdr::logistic(phi);
        let l = self.spec.pivot.quantile(theta);
        let u = self.spec.pivot.quantile(theta + self.level);
        self.cache.set(Some((phi, l, u)));
        (l, u)
    }

    fn theta_derivatives(&self, phi: f64) -> (f64, f64) {
        let s = crate::hdr::logistic(phi);
        let d1 = self.alpha * s * (1.0 - s);
        (d1, d1 * (1.0 - 2.0 * s))
    }

    fn d_theta(&self, l: f64, u: f64) -> Option<f64> {
        let fl = self.spec.pivot.density(l)?;
        let fu = self.spec.pivot.density(u)?;
        let gp = &self.spec.g_prime;
        Some(self.spec.direction.sign() * (gp(l) / fl - gp(u) / fu))
    }
}

impl Objective for CiObjective<'_> {
    fn value(&self, phi: f64) -> f64 {
        let (l, u) = self.bounds(phi);
        self.spec.width(l, u)
    }

    fn gradient(&self, phi: f64) -> Option<f64> {
        let (l, u) = self.bounds(phi);
        Some(self.theta_derivatives(phi).0 * self.d_theta(l, u)?)
    }

    fn hessian(&self, phi: f64) -> Option<f64> {
        self.spec.m.as_ref()?;
        let (l, u) = self.bounds(phi);
        let (d1, d2) = self.theta_derivatives(phi);
        let check = second_order_check(self.spec, l, u).ok()?;
        Some(d2 * self.d_theta(l, u)? + d1 * d1 * check.curvature)
    }
}

fn check_monotone(spec: &PivotSpec) -> Result<()> {
    let values: Vec<f64> = (0..64)
        .map(|i| (spec.g)(spec.pivot.quantile((i as f64 + 0.5) / 64.0)))
        .collect();
    let ok = values.windows(2).all(|w| match spec.direction {
        Direction::Decreasing => w[1] < w[0],
        Direction::Increasing => w[1] > w[0],
    });
    if ok {
        Ok(())
    } else {
        Err(HdrError::InvalidTransform(format!(
            "g is not strictly {} over the pivot quantiles",
            match spec.direction {
                Direction::Decreasing => "decreasing",
                Direction::Increasing => "increasing",
            }
        )))
    }
}

/// Shortest confidence interval at confidence `level` for the given pivot.
pub fn shortest_ci(level: f64, spec: &PivotSpec, cfg: &OptimizerConfig) -> Result<CiResult> {
    let level = checked_cover(level)?;
    if level < DEGENERATE_COVER {
        return Err(HdrError::CoverDomain(level));
    }
    check_monotone(spec)?;
    let (lo, hi) = spec.pivot.support();
    if level == 1.0 {
        let (a, b) = spec.endpoints(lo, hi);
        return Ok(CiResult {
            interval: Interval::new(a, b)?,
            level,
            theta: 0.0,
            pivot_lower: lo,
            pivot_upper: hi,
            iterations: 0,
            code: None,
            method: "Full pivot range (degenerate level)".to_string(),
        });
    }
    let obj = CiObjective {
        spec,
        alpha: 1.0 - level,
        level,
        cache: Cell::new(None),
    };
    let opt = minimize_scalar(&obj, 0.0, cfg)?;
    let (l, u) = obj.bounds(opt.argmin);
    let (a, b) = spec.endpoints(l, u);
    Ok(CiResult {
        interval: Interval::new(a.min(b), b.max(a))?,
        level,
        theta: obj.alpha * crate::hdr::logistic(opt.argmin),
        pivot_lower: l,
        pivot_upper: u,
        iterations: opt.iterations,
        code: Some(opt.code),
        method: crate::hdr::newton_text(opt.iterations, opt.code),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariancePivot {
    /// `S / sigma^2 ~ chi-squared(n - 1)` with `g(y) = S / y`.
    ChisqPivot,
    /// `sigma^2 / S ~ InvGamma((n - 1) / 2, 1 / 2)` with `g` the identity.
    InvGammaPivot,
}

/// Inverse-gamma distribution with scale `beta`, expressed through the
/// reciprocal chi-squared variable so both pivots share one backend.
pub fn inverse_gamma(shape: f64, scale: f64) -> Result<ProbabilityBundle> {
    for (name, v) in [("shape", shape), ("scale", scale)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(HdrError::ParameterDomain {
                name: name.into(),
                value: v,
                reason: "must be positive and finite",
            });
        }
    }
    // 1/X ~ Gamma(shape, rate = scale), i.e. scale parameter 1/scale
    let base = make_family("gamma", &params([("shape", shape), ("scale", 1.0 / scale)]))?;
    let (b1, b2) = (base.clone(), base);
    Ok(ProbabilityBundle::new(
        move |x| {
            if x <= 0.0 {
                0.0
            } else {
                gamma_ur(shape, scale / x)
            }
        },
        move |p| 1.0 / b1.quantile(1.0 - p),
        format!("inverse-gamma distribution with shape = {shape} and scale = {scale}"),
    )
    .with_support(0.0, f64::INFINITY)
    .with_density(move |x| {
        if x <= 0.0 {
            0.0
        } else {
            b2.density(1.0 / x).unwrap_or(0.0) / (x * x)
        }
    })
    .with_log_density_slope(move |x| -(shape + 1.0) / x + scale / (x * x)))
}

fn check_sample(n: usize, sum_sq: f64) -> Result<()> {
    if n < 2 {
        return Err(HdrError::ParameterDomain {
            name: "n".into(),
            value: n as f64,
            reason: "need at least two observations",
        });
    }
    if !(sum_sq > 0.0 && sum_sq.is_finite()) {
        return Err(HdrError::ParameterDomain {
            name: "sum_sq".into(),
            value: sum_sq,
            reason: "must be positive and finite",
        });
    }
    Ok(())
}

pub fn variance_pivot(n: usize, sum_sq: f64, pivot: VariancePivot) -> Result<PivotSpec> {
    check_sample(n, sum_sq)?;
    let df = (n - 1) as f64;
    Ok(match pivot {
        VariancePivot::ChisqPivot => {
            let chisq = make_family("chisq", &params([("df", df)]))?;
            PivotSpec::new(
                chisq,
                |y| 1.0 / y,
                |y| -1.0 / (y * y),
                Direction::Decreasing,
            )
            .with_m(|y| -2.0 / y)
            .with_data_factor(sum_sq)
        }
        VariancePivot::InvGammaPivot => {
            PivotSpec::identity(inverse_gamma(0.5 * df, 0.5)?).with_data_factor(sum_sq)
        }
    })
}

/// Shortest confidence interval for a normal variance given the sum of
/// squared deviations `sum_sq` of `n` observations.
pub fn variance_ci(
    n: usize,
    sum_sq: f64,
    level: f64,
    pivot: VariancePivot,
    cfg: &OptimizerConfig,
) -> Result<CiResult> {
    shortest_ci(level, &variance_pivot(n, sum_sq, pivot)?, cfg)
}

/// The conventional equal-tailed variance interval, for comparison.
pub fn equal_tailed_variance_ci(n: usize, sum_sq: f64, level: f64) -> Result<Interval> {
    check_sample(n, sum_sq)?;
    let level = checked_cover(level)?;
    let chisq = make_family("chisq", &params([("df", (n - 1) as f64)]))?;
    let alpha = 1.0 - level;
    Interval::new(
        sum_sq / chisq.quantile(1.0 - 0.5 * alpha),
        sum_sq / chisq.quantile(0.5 * alpha),
    )
}
