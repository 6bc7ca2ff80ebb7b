//! Safeguarded Newton minimisation of smooth scalar functions.

use crate::error::{HdrError, Result};

/// Stopping rules for [`minimize_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub gradtol: f64,
    pub steptol: f64,
    pub iterlim: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            gradtol: 1e-10,
            steptol: 1e-10,
            iterlim: 100,
        }
    }
}

/// Termination reason. The numeric codes follow the convention of R's `nlm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptCode {
    GradientConverged,
    StepConverged,
    LineSearchFailure,
    IterationLimit,
}

impl OptCode {
    pub fn code(self) -> u8 {
        match self {
            OptCode::GradientConverged => 1,
            OptCode::StepConverged => 2,
            OptCode::LineSearchFailure => 3,
            OptCode::IterationLimit => 4,
        }
    }

    pub fn converged(self) -> bool {
        matches!(self, OptCode::GradientConverged | OptCode::StepConverged)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult {
    pub argmin: f64,
    pub objective_at_min: f64,
    pub gradient: f64,
    pub iterations: usize,
    pub code: OptCode,
}

/// A scalar function with optional analytic derivatives.
pub trait Objective {
    fn value(&self, x: f64) -> f64;

    fn gradient(&self, _x: f64) -> Option<f64> {
        None
    }

    fn hessian(&self, _x: f64) -> Option<f64> {
        None
    }
}

type Eval<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// Objective assembled from closures.
pub struct ScalarObjective<'a> {
    value: Eval<'a>,
    gradient: Option<Eval<'a>>,
    hessian: Option<Eval<'a>>,
}

impl<'a> ScalarObjective<'a> {
    pub fn new(value: impl Fn(f64) -> f64 + 'a) -> Self {
        Self {
            value: Box::new(value),
            gradient: None,
            hessian: None,
        }
    }

    pub fn with_gradient(mut self, gradient: impl Fn(f64) -> f64 + 'a) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    pub fn with_hessian(mut self, hessian: impl Fn(f64) -> f64 + 'a) -> Self {
        self.hessian = Some(Box::new(hessian));
        self
    }
}

impl Objective for ScalarObjective<'_> {
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: f64) -> Option<f64> {
        self.gradient.as_ref().map(|g| g(x))
    }

    fn hessian(&self, x: f64) -> Option<f64> {
        self.hessian.as_ref().map(|h| h(x))
    }
}

fn gradient_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Central difference `(f(x+h) - f(x-h)) / 2h` with `h = cbrt(eps) * max(1, |x|)`.
pub fn numeric_gradient(f: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let h = gradient_step(x);
    let (up, down) = (f(x + h), f(x - h));
    if !up.is_finite() {
        return Err(HdrError::NonFiniteEvaluation(x + h));
    }
    if !down.is_finite() {
        return Err(HdrError::NonFiniteEvaluation(x - h));
    }
    Ok((up - down) / (2.0 * h))
}

/// Second difference of values with `h = eps^(1/4) * max(1, |x|)`.
pub fn numeric_hessian(f: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let h = f64::EPSILON.sqrt().sqrt() * x.abs().max(1.0);
    let (up, mid, down) = (f(x + h), f(x), f(x - h));
    for (v, at) in [(up, x + h), (mid, x), (down, x - h)] {
        if !v.is_finite() {
            return Err(HdrError::NonFiniteEvaluation(at));
        }
    }
    Ok((up - 2.0 * mid + down) / (h * h))
}

fn gradient_of(obj: &dyn Objective, x: f64) -> f64 {
    obj.gradient(x)
        .unwrap_or_else(|| numeric_gradient(|t| obj.value(t), x).unwrap_or(f64::NAN))
}

fn hessian_of(obj: &dyn Objective, x: f64) -> f64 {
    if let Some(h) = obj.hessian(x) {
        return h;
    }
    if obj.gradient(x).is_some() {
        // difference the analytic gradient
        let h = gradient_step(x);
        match (obj.gradient(x + h), obj.gradient(x - h)) {
            (Some(up), Some(down)) => (up - down) / (2.0 * h),
            _ => f64::NAN,
        }
    } else {
        numeric_hessian(|t| obj.value(t), x).unwrap_or(f64::NAN)
    }
}

const MAX_HALVINGS: usize = 40;

/// Minimise `obj` starting from `start`.
///
/// Each iteration takes the Newton step when the curvature is positive and a
/// unit-length steepest-descent step otherwise, then halves it until the
/// objective does not increase (up to rounding) and stays finite.
pub fn minimize_scalar(
    obj: &dyn Objective,
    start: f64,
    cfg: &OptimizerConfig,
) -> Result<OptResult> {
    let mut x = start;
    let mut fx = obj.value(x);
    if !fx.is_finite() || !x.is_finite() {
        return Err(HdrError::InvalidStart(start));
    }
    let mut g = gradient_of(obj, x);
    if !g.is_finite() {
        return Err(HdrError::NonFiniteEvaluation(x));
    }
    let result = |x, fx, g, iterations, code| OptResult {
        argmin: x,
        objective_at_min: fx,
        gradient: g,
        iterations,
        code,
    };
    if g.abs() <= cfg.gradtol {
        return Ok(result(x, fx, g, 0, OptCode::GradientConverged));
    }

    for iter in 1..=cfg.iterlim {
        let h = hessian_of(obj, x);
        let direction = if h > 0.0 && h.is_finite() {
            -g / h
        } else {
            -g.signum() * x.abs().max(1.0)
        };

        let slack = 8.0 * f64::EPSILON * fx.abs();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate = x + t * direction;
            let fc = obj.value(candidate);
            if fc.is_finite() && fc <= fx + slack {
                accepted = Some((candidate, fc));
                break;
            }
            t *= 0.5;
        }
        let Some((next, f_next)) = accepted else {
            return Ok(result(x, fx, g, iter - 1, OptCode::LineSearchFailure));
        };

        let g_next = gradient_of(obj, next);
        if !g_next.is_finite() {
            return Ok(result(x, fx, g, iter - 1, OptCode::LineSearchFailure));
        }
        let dx = next - x;
        x = next;
        fx = f_next;
        g = g_next;
        if g.abs() <= cfg.gradtol {
            return Ok(result(x, fx, g, iter, OptCode::GradientConverged));
        }
        if dx.abs() <= cfg.steptol {
            return Ok(result(x, fx, g, iter, OptCode::StepConverged));
        }
    }
    Ok(result(x, fx, g, cfg.iterlim, OptCode::IterationLimit))
}

/// Golden-section search for a minimiser of `f` on `[a, b]`, stopping once
/// the bracket is narrower than `tol * max(1, |x|)`.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if b - a <= tol * (0.5 * (a + b)).abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
