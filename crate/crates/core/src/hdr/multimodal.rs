//! Densities with several local minima.
//!
//! The support is cut at the minima into segments. Segments whose shared
//! minimum sits above the final cutoff are merged first, then each remaining
//! group receives a share of the coverage and is solved as a one-interval
//! problem on its conditional distribution. Shares are balanced by pairwise
//! mass exchanges until the marginal widths agree.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::continuous::{hdr_monotone, hdr_unimodal, logistic, trivial};
use super::intensity::{intensity, segment_mode};
use super::{checked_cover, newton_text, HdrResult, DEGENERATE_COVER};
use crate::distributions::{ProbabilityBundle, Shape};
use crate::error::{HdrError, Result};
use crate::interval::normalize;
use crate::optimize::{minimize_scalar, OptCode, OptimizerConfig, ScalarObjective};

#[derive(Debug, Clone, Copy, PartialEq)]
enum GroupKind {
    Decreasing,
    Increasing,
    Unimodal,
}

struct Solve {
    width: f64,
    rate: f64,
    result: Option<HdrResult>,
}

struct Group<'a> {
    mass: f64,
    kind: GroupKind,
    bundle: ProbabilityBundle,
    peak_density: f64,
    edge_density: f64,
    cfg: &'a OptimizerConfig,
    memo: RefCell<HashMap<u64, Rc<Solve>>>,
}

fn conditional(bundle: &ProbabilityBundle, a: f64, b: f64) -> (ProbabilityBundle, f64) {
    let fa = bundle.cdf(a);
    let mass = bundle.cdf(b) - fa;
    let (b1, b2, b3) = (bundle.clone(), bundle.clone(), bundle.clone());
    let mut g = ProbabilityBundle::new(
        move |x| ((b1.cdf(x) - fa) / mass).clamp(0.0, 1.0),
        move |p| b2.quantile(fa + p * mass).clamp(a, b),
        bundle.description(),
    )
    .with_support(a, b)
    .with_density(move |x| b3.density(x).unwrap_or(0.0) / mass);
    if bundle.has_log_density_slope() {
        let b4 = bundle.clone();
        g = g.with_log_density_slope(move |x| b4.log_density_slope(x).unwrap_or(f64::NAN));
    }
    (g, mass)
}

impl<'a> Group<'a> {
    fn new(bundle: &ProbabilityBundle, a: f64, b: f64, cfg: &'a OptimizerConfig) -> Self {
        let (conditional, mass) = conditional(bundle, a, b);
        let mode = segment_mode(bundle, a, b);
        let f = |x: f64| bundle.density(x).unwrap_or(0.0);
        let kind = if mode == a {
            GroupKind::Decreasing
        } else if mode == b {
            GroupKind::Increasing
        } else {
            GroupKind::Unimodal
        };
        Self {
            mass,
            kind,
            bundle: conditional,
            peak_density: f(mode),
            edge_density: f(a).min(f(b)),
            cfg,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Inner HDR at conditional coverage `c`, with its width and marginal
    /// width per unit of unconditional mass (the reciprocal cutoff).
    fn solve(&self, c: f64) -> Rc<Solve> {
        let c = c.clamp(0.0, 1.0);
        if let Some(hit) = self.memo.borrow().get(&c.to_bits()) {
            return hit.clone();
        }
        let solved = if c < DEGENERATE_COVER {
            Solve {
                width: 0.0,
                rate: 1.0 / self.peak_density,
                result: None,
            }
        } else {
            let inner = match self.kind {
                GroupKind::Decreasing => hdr_monotone(c, &self.bundle, true),
                GroupKind::Increasing => hdr_monotone(c, &self.bundle, false),
                GroupKind::Unimodal => hdr_unimodal(c, &self.bundle, self.cfg),
            };
            match inner {
                Ok(r) => {
                    let rate = if c > 1.0 - DEGENERATE_COVER {
                        1.0 / self.edge_density
                    } else {
                        r.density_cutoff
                            .map_or(f64::NAN, |cut| 1.0 / (cut * self.mass))
                    };
                    Solve {
                        width: r.region.measure(),
                        rate,
                        result: Some(r),
                    }
                }
                Err(_) => Solve {
                    width: f64::NAN,
                    rate: f64::NAN,
                    result: None,
                },
            }
        };
        let solved = Rc::new(solved);
        self.memo.borrow_mut().insert(c.to_bits(), solved.clone());
        solved
    }

    fn solve_mass(&self, m: f64) -> Rc<Solve> {
        self.solve(m / self.mass)
    }
}

struct Exchange {
    delta: f64,
    iterations: usize,
    code: Option<OptCode>,
}

/// Best transfer of mass `delta` into group `g` out of group `h`.
fn exchange(g: &Group, h: &Group, mg: f64, mh: f64, cfg: &OptimizerConfig) -> Exchange {
    let lo = (-mg).max(mh - h.mass);
    let hi = (g.mass - mg).min(mh);
    let none = Exchange {
        delta: 0.0,
        iterations: 0,
        code: None,
    };
    if !(hi - lo > DEGENERATE_COVER) {
        return none;
    }
    let slope = |d: f64| g.solve_mass(mg + d).rate - h.solve_mass(mh - d).rate;
    let width = |d: f64| g.solve_mass(mg + d).width + h.solve_mass(mh - d).width;

    // corner solutions first, so a group can be emptied or filled exactly
    if slope(hi) <= 0.0 {
        return Exchange { delta: hi, ..none };
    }
    if slope(lo) >= 0.0 {
        return Exchange { delta: lo, ..none };
    }
    let span = hi - lo;
    let to_delta = |psi: f64| lo + span * logistic(psi);
    let start = {
        let s = ((0.0 - lo) / span).clamp(1e-9, 1.0 - 1e-9);
        (s / (1.0 - s)).ln()
    };
    let obj = ScalarObjective::new(|psi| width(to_delta(psi))).with_gradient(|psi| {
        let s = logistic(psi);
        slope(to_delta(psi)) * span * s * (1.0 - s)
    });
    match minimize_scalar(&obj, start, cfg) {
        Ok(opt) if width(to_delta(opt.argmin)) <= width(0.0) => Exchange {
            delta: to_delta(opt.argmin),
            iterations: opt.iterations,
            code: Some(opt.code),
        },
        Ok(opt) => Exchange {
            iterations: opt.iterations,
            code: Some(opt.code),
            ..none
        },
        Err(_) => none,
    }
}

/// HDR of a density with local minima at `minima` (ascending, interior).
pub fn hdr_multimodal(
    cover: f64,
    bundle: &ProbabilityBundle,
    minima: &[f64],
    cfg: &OptimizerConfig,
) -> Result<HdrResult> {
    if minima.is_empty() {
        return hdr_unimodal(cover, bundle, cfg);
    }
    if !bundle.has_density() {
        return Err(HdrError::MissingDensity);
    }
    let shape = Shape::Multimodal {
        minima: minima.to_vec(),
    };
    shape.check_against(bundle)?;
    let cover = checked_cover(cover)?;
    if cover == 0.0 || cover == 1.0 {
        return Ok(trivial(bundle, cover));
    }

    // merge neighbours whose shared minimum lies inside the final region
    let (lo, hi) = bundle.support();
    let mut cuts = vec![lo];
    for &x in minima {
        let fx = bundle.density(x).unwrap_or(0.0);
        if intensity(bundle, &shape, fx)? > cover {
            cuts.push(x);
        }
    }
    cuts.push(hi);
    let groups: Vec<Group> = cuts
        .windows(2)
        .map(|w| Group::new(bundle, w[0], w[1], cfg))
        .filter(|g| g.mass > 0.0)
        .collect();

    let mut alloc: Vec<f64> = groups.iter().map(|g| cover * g.mass).collect();
    let mut iterations = 0;
    let mut worst: Option<OptCode> = None;
    for _ in 0..cfg.iterlim {
        let mut moved: f64 = 0.0;
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let ex = exchange(&groups[i], &groups[j], alloc[i], alloc[j], cfg);
                iterations += ex.iterations;
                if let Some(code) = ex.code {
                    worst = Some(match worst {
                        Some(w) if w.code() >= code.code() => w,
                        _ => code,
                    });
                }
                alloc[i] = (alloc[i] + ex.delta).clamp(0.0, groups[i].mass);
                alloc[j] = (alloc[j] - ex.delta).clamp(0.0, groups[j].mass);
                moved = moved.max(ex.delta.abs());
            }
        }
        if moved < cfg.steptol {
            break;
        }
    }

    let mut parts = Vec::new();
    let mut code = worst;
    for (g, m) in groups.iter().zip(&alloc) {
        let solved = g.solve_mass(*m);
        if let Some(r) = &solved.result {
            parts.extend_from_slice(r.region.parts());
            iterations += r.iterations;
            if let Some(c) = r.code {
                code = Some(match code {
                    Some(w) if w.code() >= c.code() => w,
                    _ => c,
                });
            }
        }
    }
    let region = normalize(parts);
    let cutoff = region
        .boundary_points()
        .into_iter()
        .filter(|&x| x != lo && x != hi)
        .filter_map(|x| bundle.density(x))
        .reduce(f64::min);
    let code = code.unwrap_or(OptCode::GradientConverged);
    Ok(HdrResult {
        actual_cover: bundle.mass(&region),
        region,
        points: Vec::new(),
        cover_prob: cover,
        density_cutoff: cutoff,
        description: bundle.description().to_string(),
        method: newton_text(iterations, code),
        iterations,
        code: Some(code),
        theta: None,
    })
}
