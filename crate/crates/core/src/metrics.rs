//! Accuracy measures for computed regions.
//!
//! These read only the bundle's `F` and `f`, so they can score any region
//! regardless of how it was produced.

use crate::distributions::ProbabilityBundle;
use crate::interval::IntervalSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disparities {
    /// `|F-mass of region - cover|`.
    pub prob: f64,
    /// Largest gap between densities at interior boundary points.
    pub density: Option<f64>,
    pub interval_count: usize,
    pub outside_support: bool,
}

pub fn prob_disparity(bundle: &ProbabilityBundle, region: &IntervalSet, cover: f64) -> f64 {
    (bundle.mass(region) - cover).abs()
}

/// Boundary points of the region that are not ends of the support.
pub fn interior_boundary(bundle: &ProbabilityBundle, region: &IntervalSet) -> Vec<f64> {
    let (lo, hi) = bundle.support();
    region
        .boundary_points()
        .into_iter()
        .filter(|&x| x != lo && x != hi)
        .collect()
}

/// Maximum pairwise difference of `f` over the interior boundary points;
/// zero with fewer than two such points, `None` without a density.
pub fn density_disparity(bundle: &ProbabilityBundle, region: &IntervalSet) -> Option<f64> {
    let values: Option<Vec<f64>> = interior_boundary(bundle, region)
        .into_iter()
        .map(|x| bundle.density(x))
        .collect();
    let values = values?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(max - min)
}

pub fn outside_support(bundle: &ProbabilityBundle, region: &IntervalSet) -> bool {
    let (lo, hi) = bundle.support();
    region
        .parts()
        .iter()
        .any(|p| p.lower() < lo || p.upper() > hi)
}

pub fn disparities(bundle: &ProbabilityBundle, region: &IntervalSet, cover: f64) -> Disparities {
    Disparities {
        prob: prob_disparity(bundle, region, cover),
        density: density_disparity(bundle, region),
        interval_count: region.len(),
        outside_support: outside_support(bundle, region),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_family, params};

    #[test]
    fn symmetric_interval_has_no_disparity() {
        let b = make_family("normal", &params([])).unwrap();
        let z = 1.959963984540054;
        let region = IntervalSet::from_pairs([(-z, z)]).unwrap();
        let d = disparities(&b, &region, 0.95);
        assert!(d.prob < 1e-14);
        assert_eq!(d.density, Some(0.0));
        assert_eq!(d.interval_count, 1);
        assert!(!d.outside_support);
    }

    #[test]
    fn support_ends_are_ignored() {
        let b = make_family("beta", &params([("shape1", 0.4), ("shape2", 0.6)])).unwrap();
        let region = IntervalSet::from_pairs([(0.0, 0.2), (0.9, 1.0)]).unwrap();
        assert_eq!(interior_boundary(&b, &region), vec![0.2, 0.9]);
        let region = IntervalSet::from_pairs([(-0.1, 0.2)]).unwrap();
        assert!(outside_support(&b, &region));
    }
}
