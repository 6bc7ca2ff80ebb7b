use std::cell::Cell;

use super::{
    checked_cover, newton_method_text, HdrResult, MONOTONE_METHOD, TRIVIAL_METHOD, UNIFORM_METHOD,
};
use crate::distributions::{eval_u, ProbabilityBundle};
use crate::error::{HdrError, Result};
use crate::interval::{Interval, IntervalSet};
use crate::optimize::{minimize_scalar, Objective, OptimizerConfig};

pub(crate) fn logistic(phi: f64) -> f64 {
    if phi >= 0.0 {
        1.0 / (1.0 + (-phi).exp())
    } else {
        let e = phi.exp();
        e / (1.0 + e)
    }
}

fn interval(lower: f64, upper: f64) -> IntervalSet {
    // quantile round-off can never make these cross, but be defensive
    IntervalSet::single(Interval::new(lower.min(upper), upper.max(lower)).expect("ordered"))
}

fn finish(
    bundle: &ProbabilityBundle,
    cover: f64,
    region: IntervalSet,
    density_cutoff: Option<f64>,
    method: String,
) -> HdrResult {
    HdrResult {
        actual_cover: bundle.mass(&region),
        region,
        points: Vec::new(),
        cover_prob: cover,
        density_cutoff,
        description: bundle.description().to_string(),
        method,
        iterations: 0,
        code: None,
        theta: None,
    }
}

/// HDR for the degenerate covers 0 (empty region) and 1 (whole support).
pub(super) fn trivial(bundle: &ProbabilityBundle, cover: f64) -> HdrResult {
    let region = if cover == 0.0 {
        IntervalSet::empty()
    } else {
        let (lo, hi) = bundle.support();
        interval(lo, hi)
    };
    finish(bundle, cover, region, None, TRIVIAL_METHOD.to_string())
}

fn min_density(bundle: &ProbabilityBundle, xs: &[f64]) -> Option<f64> {
    if !bundle.has_density() {
        return None;
    }
    xs.iter()
        .filter_map(|&x| bundle.density(x))
        .reduce(f64::min)
}

/// HDR of a monotone density: a tail interval anchored at the mode end.
pub fn hdr_monotone(cover: f64, bundle: &ProbabilityBundle, decreasing: bool) -> Result<HdrResult> {
    let cover = checked_cover(cover)?;
    if cover == 0.0 {
        return Ok(trivial(bundle, cover));
    }
    let (lo, hi) = bundle.support();
    let (region, boundary) = if decreasing {
        let u = bundle.quantile(cover);
        (interval(lo, u), u)
    } else {
        let l = bundle.quantile(1.0 - cover);
        (interval(l, hi), l)
    };
    let cutoff = if cover < 1.0 {
        min_density(bundle, &[boundary])
    } else {
        None
    };
    Ok(finish(
        bundle,
        cover,
        region,
        cutoff,
        MONOTONE_METHOD.to_string(),
    ))
}

/// HDR of a uniform density, by convention the middle interval.
pub fn hdr_uniform(cover: f64, bundle: &ProbabilityBundle) -> Result<HdrResult> {
    let cover = checked_cover(cover)?;
    if cover == 0.0 || cover == 1.0 {
        return Ok(trivial(bundle, cover));
    }
    let l = bundle.quantile(0.5 * (1.0 - cover));
    let u = bundle.quantile(0.5 * (1.0 + cover));
    let cutoff = min_density(bundle, &[0.5 * (l + u)]);
    Ok(finish(
        bundle,
        cover,
        interval(l, u),
        cutoff,
        UNIFORM_METHOD.to_string(),
    ))
}

/// Region width as a function of the unconstrained variable `phi`.
///
/// Unimodal: `theta = alpha * s(phi)`, `L = Q(theta)`, `U = Q(theta + cover)`,
/// width `U - L`. Bimodal: `theta = cover * s(phi)`, `L = Q(theta)`,
/// `U = Q(theta + alpha)`, width `(L - Q(0)) + (Q(1) - U)`.
struct WidthObjective<'a> {
    bundle: &'a ProbabilityBundle,
    theta_scale: f64,
    offset: f64,
    bimodal: bool,
    cache: Cell<Option<(f64, f64, f64)>>,
}

impl<'a> WidthObjective<'a> {
    fn new(bundle: &'a ProbabilityBundle, cover: f64, bimodal: bool) -> Self {
        let alpha = 1.0 - cover;
        let (theta_scale, offset) = if bimodal {
            (cover, alpha)
        } else {
            (alpha, cover)
        };
        Self {
            bundle,
            theta_scale,
            offset,
            bimodal,
            cache: Cell::new(None),
        }
    }

    fn theta(&self, phi: f64) -> f64 {
        self.theta_scale * logistic(phi)
    }

    fn bounds(&self, phi: f64) -> (f64, f64) {
        if let Some((p, l, u)) = self.cache.get() {
            if p.to_bits() == phi.to_bits() {
                return (l, u);
            }
        }
        let theta = self.theta(phi);
        let l = self.bundle.quantile(theta);
        let u = self.bundle.quantile(theta + self.offset);
        self.cache.set(Some((phi, l, u)));
        (l, u)
    }

    /// First and second derivatives of `theta` with respect to `phi`.
    fn theta_derivatives(&self, phi: f64) -> (f64, f64) {
        let s = logistic(phi);
        let d1 = self.theta_scale * s * (1.0 - s);
        (d1, d1 * (1.0 - 2.0 * s))
    }

    fn density(&self, x: f64) -> f64 {
        self.bundle.density(x).unwrap_or(f64::NAN)
    }

    /// Width derivative with respect to `theta`.
    fn d_theta(&self, l: f64, u: f64) -> f64 {
        let d = 1.0 / self.density(u) - 1.0 / self.density(l);
        if self.bimodal {
            -d
        } else {
            d
        }
    }
}

impl Objective for WidthObjective<'_> {
    fn value(&self, phi: f64) -> f64 {
        let (l, u) = self.bounds(phi);
        if self.bimodal {
            let (lo, hi) = self.bundle.support();
            (l - lo) + (hi - u)
        } else {
            u - l
        }
    }

    fn gradient(&self, phi: f64) -> Option<f64> {
        if !self.bundle.has_density() {
            return None;
        }
        let (l, u) = self.bounds(phi);
        Some(self.theta_derivatives(phi).0 * self.d_theta(l, u))
    }

    fn hessian(&self, phi: f64) -> Option<f64> {
        if !self.bundle.has_density() {
            return None;
        }
        let (l, u) = self.bounds(phi);
        let (d1, d2) = self.theta_derivatives(phi);
        let (fl, fu) = (self.density(l), self.density(u));
        let ul = eval_u(self.bundle, l).unwrap_or(f64::NAN);
        let uu = eval_u(self.bundle, u).unwrap_or(f64::NAN);
        let mut curvature = ul / (fl * fl) - uu / (fu * fu);
        if self.bimodal {
            curvature = -curvature;
        }
        Some(d2 * self.d_theta(l, u) + d1 * d1 * curvature)
    }
}

fn optimise(
    bundle: &ProbabilityBundle,
    cover: f64,
    bimodal: bool,
    cfg: &OptimizerConfig,
) -> Result<(f64, f64, f64, crate::optimize::OptResult)> {
    let obj = WidthObjective::new(bundle, cover, bimodal);
    let mut opt = minimize_scalar(&obj, 0.0, cfg)?;
    if let Some((phi, steps)) = polish(&obj, opt.argmin) {
        opt.argmin = phi;
        opt.objective_at_min = obj.value(phi);
        opt.gradient = obj.gradient(phi).unwrap_or(opt.gradient);
        opt.iterations += steps;
    }
    let theta = obj.theta(opt.argmin);
    let (l, u) = obj.bounds(opt.argmin);
    Ok((theta, l, u, opt))
}

/// Boundary densities that differ by more than this (relative) trigger
/// [`polish`].
const POLISH_TOL: f64 = 1e-10;

/// Bisection on the sign of the `theta`-derivative of the width.
///
/// Near the ends of the admissible range the chain factor `theta'(phi)`
/// vanishes, so the `phi`-gradient can pass `gradtol` while the boundary
/// densities still disagree noticeably. The width is convex in `theta`, so
/// its derivative changes sign once and a bracket can be grown from the
/// Newton answer.
fn polish(obj: &WidthObjective, phi: f64) -> Option<(f64, usize)> {
    if !obj.bundle.has_density() {
        return None;
    }
    let sign = |p: f64| {
        let (l, u) = obj.bounds(p);
        obj.d_theta(l, u)
    };
    let (l, u) = obj.bounds(phi);
    let (fl, fu) = (obj.density(l), obj.density(u));
    if !((fl - fu).abs() > POLISH_TOL * fl.max(fu)) {
        return None;
    }
    let d0 = sign(phi);
    if d0 == 0.0 || d0.is_nan() {
        return None;
    }
    // positive slope: the minimum lies at smaller phi
    let dir = if d0 > 0.0 { -1.0 } else { 1.0 };
    let mut step = 1.0;
    let mut far = phi + dir * step;
    let mut steps = 0;
    loop {
        let d = sign(far);
        steps += 1;
        if d.is_nan() {
            return None;
        }
        if d == 0.0 {
            return Some((far, steps));
        }
        if d.signum() != d0.signum() {
            break;
        }
        if steps > 60 {
            return None;
        }
        step *= 2.0;
        far = phi + dir * step;
    }
    let (mut a, mut b) = if dir < 0.0 { (far, phi) } else { (phi, far) };
    while b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) && steps < 200 {
        let mid = 0.5 * (a + b);
        let d = sign(mid);
        steps += 1;
        if d.is_nan() {
            break;
        }
        if d == 0.0 {
            return Some((mid, steps));
        }
        if d > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let best = [a, b]
        .into_iter()
        .min_by(|&x, &y| obj.value(x).total_cmp(&obj.value(y)))
        .unwrap_or(phi);
    // keep the Newton answer if bisection did not help
    let (l, u) = obj.bounds(best);
    let gap = (obj.density(l) - obj.density(u)).abs();
    let better = gap < (fl - fu).abs() || obj.value(best) < obj.value(phi);
    better.then_some((best, steps))
}

/// HDR of a unimodal (quasi-concave) density: a single interval.
pub fn hdr_unimodal(
    cover: f64,
    bundle: &ProbabilityBundle,
    cfg: &OptimizerConfig,
) -> Result<HdrResult> {
    let cover = checked_cover(cover)?;
    if cover == 0.0 || cover == 1.0 {
        return Ok(trivial(bundle, cover));
    }
    let (theta, l, u, opt) = optimise(bundle, cover, false, cfg)?;
    let cutoff = min_density(bundle, &[l, u]);
    let mut result = finish(
        bundle,
        cover,
        interval(l, u),
        cutoff,
        newton_method_text(&opt),
    );
    result.iterations = opt.iterations;
    result.code = Some(opt.code);
    result.theta = Some(theta);
    Ok(result)
}

/// HDR of a bimodal (quasi-convex) density on a bounded support: the two
/// tails `[Q(0), L]` and `[U, Q(1)]`.
pub fn hdr_bimodal(
    cover: f64,
    bundle: &ProbabilityBundle,
    cfg: &OptimizerConfig,
) -> Result<HdrResult> {
    let (lo, hi) = bundle.support();
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(HdrError::UnsupportedShape(
            "a bimodal density needs a bounded support".into(),
        ));
    }
    let cover = checked_cover(cover)?;
    if cover == 0.0 || cover == 1.0 {
        return Ok(trivial(bundle, cover));
    }
    let (theta, l, u, opt) = optimise(bundle, cover, true, cfg)?;
    let region =
        crate::interval::normalize([Interval::new(lo, l.max(lo))?, Interval::new(u.min(hi), hi)?]);
    let cutoff = min_density(bundle, &[l, u]);
    let mut result = finish(bundle, cover, region, cutoff, newton_method_text(&opt));
    result.iterations = opt.iterations;
    result.code = Some(opt.code);
    result.theta = Some(theta);
    Ok(result)
}
