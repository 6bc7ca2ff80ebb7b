//! Univariate distributions as bundles of evaluators.
//!
//! A [`ProbabilityBundle`] carries the distribution function `F`, quantile
//! function `Q`, and optionally the density `f` and its log-derivative
//! `u = f'/f`. The HDR routines only ever talk to a distribution through
//! this bundle, so user-defined distributions plug in through
//! [`ProbabilityBundle::new`] and friends.

mod families;
mod special;

use std::fmt;
use std::sync::Arc;

pub use families::{
    classify_shape, make_family, mode_point, normal_mixture, params, Family, Params, FAMILY_NAMES,
};
pub use special::{gamma_quantile, invert_cdf, normal_cdf, normal_quantile};

use crate::error::{HdrError, Result};
use crate::interval::IntervalSet;

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ProbabilityBundle {
    cdf: Evaluator,
    quantile: Evaluator,
    density: Option<Evaluator>,
    log_density_slope: Option<Evaluator>,
    support_lower: f64,
    support_upper: f64,
    description: String,
}

impl ProbabilityBundle {
    /// Build a bundle from a distribution function and a quantile function.
    /// The support is taken from `quantile(0)` and `quantile(1)`.
    pub fn new<F, Q>(cdf: F, quantile: Q, description: impl Into<String>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let support_lower = quantile(0.0);
        let support_upper = quantile(1.0);
        Self {
            cdf: Arc::new(cdf),
            quantile: Arc::new(quantile),
            density: None,
            log_density_slope: None,
            support_lower,
            support_upper,
            description: description.into(),
        }
    }

    pub fn with_support(mut self, lower: f64, upper: f64) -> Self {
        self.support_lower = lower;
        self.support_upper = upper;
        self
    }

    pub fn with_density<D>(mut self, density: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.density = Some(Arc::new(density));
        self
    }

    pub fn with_log_density_slope<U>(mut self, slope: U) -> Self
    where
        U: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.log_density_slope = Some(Arc::new(slope));
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    /// Drop the stored density and slope, leaving only `F` and `Q`.
    pub fn without_density(mut self) -> Self {
        self.density = None;
        self.log_density_slope = None;
        self
    }

    pub fn without_log_density_slope(mut self) -> Self {
        self.log_density_slope = None;
        self
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY || x < self.support_lower {
            0.0
        } else if x == f64::INFINITY || x >= self.support_upper {
            1.0
        } else {
            (self.cdf)(x)
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            self.support_lower
        } else if p >= 1.0 {
            self.support_upper
        } else {
            (self.quantile)(p)
        }
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        self.density.as_ref().map(|f| {
            if x < self.support_lower || x > self.support_upper || x.is_infinite() {
                0.0
            } else {
                f(x)
            }
        })
    }

    /// The stored log-density slope, if any. See [`eval_u`] for the
    /// finite-difference fallback.
    pub fn log_density_slope(&self, x: f64) -> Option<f64> {
        self.log_density_slope.as_ref().map(|u| u(x))
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn has_log_density_slope(&self) -> bool {
        self.log_density_slope.is_some()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lower, self.support_upper)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Probability of a closed region, computed from `F` at the part endpoints.
    pub fn mass(&self, region: &IntervalSet) -> f64 {
        region
            .parts()
            .iter()
            .map(|p| (self.cdf(p.upper()) - self.cdf(p.lower())).max(0.0))
            .sum()
    }
}

impl fmt::Debug for ProbabilityBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProbabilityBundle")
            .field("description", &self.description)
            .field("support", &(self.support_lower, self.support_upper))
            .field("density", &self.density.is_some())
            .field("log_density_slope", &self.log_density_slope.is_some())
            .finish()
    }
}

/// Shape class of a density, which decides the topology of its HDR.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    MonotoneDecreasing,
    MonotoneIncreasing,
    Uniform,
    /// Strictly quasi-concave with the given mode.
    Unimodal {
        mode: f64,
    },
    /// Strictly quasi-convex with the given interior minimiser.
    Bimodal {
        antimode: f64,
    },
    /// Local minima of the density, strictly ascending.
    Multimodal {
        minima: Vec<f64>,
    },
}

impl Shape {
    pub fn check_against(&self, bundle: &ProbabilityBundle) -> Result<()> {
        let (lo, hi) = bundle.support();
        let interior = |x: f64| x > lo && x < hi;
        match self {
            Shape::Unimodal { mode } if !interior(*mode) => Err(HdrError::UnsupportedShape(
                format!("mode {mode} is not inside the support"),
            )),
            Shape::Bimodal { antimode } if !interior(*antimode) => Err(HdrError::UnsupportedShape(
                format!("antimode {antimode} is not inside the support"),
            )),
            Shape::Multimodal { minima } => {
                if minima.iter().any(|&x| !interior(x)) {
                    return Err(HdrError::UnsupportedShape(
                        "local minima must lie inside the support".into(),
                    ));
                }
                if minima.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(HdrError::UnsupportedShape(
                        "local minima must be strictly ascending".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Log-density slope `u(x) = f'(x)/f(x)`.
///
/// Uses the stored closed form when present; otherwise a central difference
/// of `ln f` with step `cbrt(eps) * max(1, |x|)`. Where `f` vanishes on both
/// sides the slope is taken to be zero.
pub fn eval_u(bundle: &ProbabilityBundle, x: f64) -> Result<f64> {
    if let Some(u) = bundle.log_density_slope(x) {
        return Ok(u);
    }
    if !bundle.has_density() {
        return Err(HdrError::MissingDerivative);
    }
    let (lo, hi) = bundle.support();
    let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
    let ln_f = |t: f64| bundle.density(t).unwrap_or(0.0).ln();
    let (a, b) = if x - h <= lo {
        (x, x + h)
    } else if x + h >= hi {
        (x - h, x)
    } else {
        (x - h, x + h)
    };
    let (la, lb) = (ln_f(a), ln_f(b));
    if la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((lb - la) / (b - a))
}

/// A finite probability mass function on ascending support points.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    points: Vec<f64>,
    masses: Vec<f64>,
}

pub const PMF_SUM_TOLERANCE: f64 = 1e-12;

impl DiscretePmf {
    pub fn new(points: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(HdrError::InvalidPmf(format!(
                "{} points but {} masses",
                points.len(),
                masses.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(HdrError::InvalidPmf("support points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HdrError::InvalidPmf(
                "support points must be strictly ascending".into(),
            ));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(HdrError::InvalidPmf(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(HdrError::InvalidPmf(format!(
                "masses sum to {total}, not 1"
            )));
        }
        Ok(Self { points, masses })
    }

    /// Normalise non-negative weights into a pmf.
    pub fn from_weights(points: Vec<f64>, weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(HdrError::InvalidPmf(
                "weights must have a positive finite sum".into(),
            ));
        }
        Self::new(points, weights.iter().map(|w| w / total).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total mass of the listed support indices, summed in ascending index order.
    pub fn mass_of(&self, indices: &[usize]) -> f64 {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.iter().map(|&i| self.masses[i]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_u_examples() {
        let normal = make_family("normal", &params([("mean", 0.0), ("sd", 1.0)])).unwrap();
        assert_eq!(eval_u(&normal, 0.0).unwrap(), 0.0);

        let expo = make_family("exponential", &params([("rate", 1.0)])).unwrap();
        for x in [0.1, 1.0, 7.5] {
            assert_eq!(eval_u(&expo, x).unwrap(), -1.0);
        }

        let gamma = make_family("gamma", &params([("shape", 3.0), ("scale", 4.0)])).unwrap();
        assert!(eval_u(&gamma, 8.0).unwrap().abs() < 1e-8);
        let numeric = gamma.clone().without_log_density_slope();
        assert!(eval_u(&numeric, 8.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn eval_u_requires_density_or_slope() {
        let bare = ProbabilityBundle::new(|x: f64| x, |p: f64| p, "bare").with_support(0.0, 1.0);
        assert_eq!(eval_u(&bare, 0.5), Err(HdrError::MissingDerivative));
    }

    #[test]
    fn eval_u_zero_where_density_vanishes() {
        let b = ProbabilityBundle::new(|x: f64| x, |p: f64| p, "flat zero")
            .with_support(-10.0, 10.0)
            .with_density(|_| 0.0);
        assert_eq!(eval_u(&b, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn numeric_slope_matches_closed_form() {
        let cases = [
            ("normal", params([("mean", 1.0), ("sd", 2.0)])),
            ("gamma", params([("shape", 3.0), ("scale", 4.0)])),
            ("beta", params([("shape1", 2.5), ("shape2", 4.0)])),
            ("beta", params([("shape1", 0.4), ("shape2", 0.6)])),
            ("student_t", params([("df", 5.0)])),
            ("lognormal", params([("meanlog", 0.3), ("sdlog", 0.8)])),
            ("weibull", params([("shape", 2.0), ("scale", 3.0)])),
            ("f", params([("df1", 5.0), ("df2", 9.0)])),
        ];
        for (name, p) in cases {
            let b = make_family(name, &p).unwrap();
            let numeric = b.clone().without_log_density_slope();
            // interior grid: central quantiles, kept away from the ends of a bounded support
            let (lo, hi) = b.support();
            for i in 1..20 {
                let mut x = b.quantile(i as f64 / 20.0);
                if lo.is_finite() && hi.is_finite() {
                    x = x.clamp(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
                }
                let exact = eval_u(&b, x).unwrap();
                let approx = eval_u(&numeric, x).unwrap();
                let scale = exact.abs().max(1.0);
                assert!(
                    (exact - approx).abs() <= 1e-6 * scale,
                    "{name} at {x}: {exact} vs {approx}"
                );
            }
        }
    }

    #[test]
    fn pmf_validation() {
        assert!(DiscretePmf::new(vec![0.0, 1.0], vec![0.5]).is_err());
        assert!(DiscretePmf::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscretePmf::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(DiscretePmf::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        let pmf = DiscretePmf::from_weights(vec![0.0, 1.0, 2.0], &[5.0, 3.0, 2.0]).unwrap();
        assert!((pmf.mass_of(&[2, 0]) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn shape_check_rejects_exterior_mode() {
        let b = make_family("beta", &params([("shape1", 2.0), ("shape2", 2.0)])).unwrap();
        assert!(Shape::Unimodal { mode: 1.5 }.check_against(&b).is_err());
        assert!(Shape::Multimodal {
            minima: vec![0.6, 0.4]
        }
        .check_against(&b)
        .is_err());
        assert!(Shape::Unimodal { mode: 0.5 }.check_against(&b).is_ok());
    }
}
