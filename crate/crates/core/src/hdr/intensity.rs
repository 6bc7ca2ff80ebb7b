use crate::distributions::{ProbabilityBundle, Shape};
use crate::error::{HdrError, Result};
use crate::interval::{normalize, Interval, IntervalSet};
use crate::optimize::golden_section_minimize;

/// A stretch of the support on which the density is monotone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lower: f64,
    pub upper: f64,
    pub increasing: bool,
}

const BISECTION_TOL: f64 = 1e-12;
const MODE_TOL: f64 = 1e-10;

fn density(bundle: &ProbabilityBundle, x: f64) -> f64 {
    bundle.density(x).unwrap_or(0.0)
}

/// Replace infinite segment ends by far quantiles so a search can run.
pub(crate) fn finite_bracket(bundle: &ProbabilityBundle, a: f64, b: f64) -> (f64, f64) {
    let lo = if a.is_finite() {
        a
    } else {
        bundle.quantile(1e-12).min(b)
    };
    let hi = if b.is_finite() {
        b
    } else {
        bundle.quantile(1.0 - 1e-12).max(lo)
    };
    (lo, hi)
}

/// Location of the density maximum on `[a, b]`, by golden-section search.
pub(crate) fn segment_mode(bundle: &ProbabilityBundle, a: f64, b: f64) -> f64 {
    let (lo, hi) = finite_bracket(bundle, a, b);
    let x = golden_section_minimize(|x| -density(bundle, x), lo, hi, MODE_TOL);
    // the ends are candidates too (monotone stretches, infinite spikes)
    [a, x, b]
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((x, density(bundle, x)), |best, v| {
            let fv = density(bundle, v);
            if fv > best.1 {
                (v, fv)
            } else {
                best
            }
        })
        .0
}

fn rising_then_falling(bundle: &ProbabilityBundle, a: f64, b: f64, out: &mut Vec<Piece>) {
    let mode = segment_mode(bundle, a, b);
    if mode > a {
        out.push(Piece {
            lower: a,
            upper: mode,
            increasing: true,
        });
    }
    if mode < b {
        out.push(Piece {
            lower: mode,
            upper: b,
            increasing: false,
        });
    }
}

/// Split the support into monotone pieces according to the shape.
pub fn monotone_pieces(bundle: &ProbabilityBundle, shape: &Shape) -> Result<Vec<Piece>> {
    shape.check_against(bundle)?;
    let (lo, hi) = bundle.support();
    let piece = |lower, upper, increasing| Piece {
        lower,
        upper,
        increasing,
    };
    let pieces = match shape {
        Shape::MonotoneDecreasing | Shape::Uniform => vec![piece(lo, hi, false)],
        Shape::MonotoneIncreasing => vec![piece(lo, hi, true)],
        Shape::Unimodal { mode } => vec![piece(lo, *mode, true), piece(*mode, hi, false)],
        Shape::Bimodal { antimode } => {
            vec![piece(lo, *antimode, false), piece(*antimode, hi, true)]
        }
        Shape::Multimodal { minima } => {
            let mut ends = Vec::with_capacity(minima.len() + 2);
            ends.push(lo);
            ends.extend_from_slice(minima);
            ends.push(hi);
            let mut out = Vec::new();
            for w in ends.windows(2) {
                rising_then_falling(bundle, w[0], w[1], &mut out);
            }
            out
        }
    };
    Ok(pieces)
}

/// Part of a monotone piece where the density is at least `a > 0`.
fn piece_level_set(bundle: &ProbabilityBundle, piece: &Piece, a: f64) -> Option<Interval> {
    let (peak, foot) = if piece.increasing {
        (piece.upper, piece.lower)
    } else {
        (piece.lower, piece.upper)
    };
    if density(bundle, peak) < a {
        return None;
    }
    let boundary = if density(bundle, foot) >= a {
        foot
    } else {
        let mut outside = foot;
        if !outside.is_finite() {
            let toward = if piece.increasing { -1.0 } else { 1.0 };
            let mut step = peak.abs().max(1.0);
            outside = peak + toward * step;
            while density(bundle, outside) >= a && outside.is_finite() {
                step *= 2.0;
                outside = peak + toward * step;
            }
        }
        let mut inside = peak;
        for _ in 0..400 {
            if (inside - outside).abs() <= BISECTION_TOL * inside.abs().max(1.0) {
                break;
            }
            let mid = 0.5 * (inside + outside);
            if density(bundle, mid) >= a {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let (l, u) = if piece.increasing {
        (boundary, piece.upper)
    } else {
        (piece.lower, boundary)
    };
    Interval::new(l, u).ok()
}

/// The super-level set `{x : f(x) >= a}`, built piece by piece.
pub fn level_set(bundle: &ProbabilityBundle, shape: &Shape, a: f64) -> Result<IntervalSet> {
    if !bundle.has_density() {
        return Err(HdrError::MissingDensity);
    }
    let (lo, hi) = bundle.support();
    if a <= 0.0 {
        return Ok(IntervalSet::single(Interval::new(lo, hi)?));
    }
    let pieces = monotone_pieces(bundle, shape)?;
    Ok(normalize(
        pieces.iter().filter_map(|p| piece_level_set(bundle, p, a)),
    ))
}

/// Intensity `H(a)`: the probability that the density at a random draw is at least `a`.
pub fn intensity(bundle: &ProbabilityBundle, shape: &Shape, a: f64) -> Result<f64> {
    if !bundle.has_density() {
        return Err(HdrError::MissingDensity);
    }
    if a <= 0.0 {
        return Ok(1.0);
    }
    let set = level_set(bundle, shape, a)?;
    Ok(bundle.mass(&set).min(1.0))
}
