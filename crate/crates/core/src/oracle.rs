//! Reference solutions used to validate the production solvers.
//!
//! [`hdr_updown_grid`] lowers a density cutoff over a fixed grid until the
//! gridded super-level set reaches the coverage, and [`discrete_brute_force`]
//! enumerates subsets. Neither touches the optimiser.

use crate::distributions::{DiscretePmf, ProbabilityBundle};
use crate::error::{HdrError, Result};
use crate::hdr::DISCRETE_COVER_SLACK;
use crate::interval::{normalize, Interval, IntervalSet};

pub const DEFAULT_GRID_SIZE: usize = 10_000;
pub const BRUTE_FORCE_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(HdrError::InvalidGrid(format!(
                "need finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if n == 0 {
            return Err(HdrError::InvalidGrid("grid needs at least one cell".into()));
        }
        Ok(Self { lo, hi, n })
    }

    /// Grid over the support, with infinite ends replaced by the
    /// `1e-9` and `1 - 1e-9` quantiles.
    pub fn for_bundle(bundle: &ProbabilityBundle, n: usize) -> Result<Self> {
        let (lo, hi) = bundle.support();
        let lo = if lo.is_finite() {
            lo
        } else {
            bundle.quantile(1e-9)
        };
        let hi = if hi.is_finite() {
            hi
        } else {
            bundle.quantile(1.0 - 1e-9)
        };
        Self::new(lo, hi, n)
    }

    pub fn cell_width(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    fn edge(&self, i: usize) -> f64 {
        if i == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.cell_width()
        }
    }
}

/// Grid approximation of the HDR by bisection on the density cutoff.
pub fn hdr_updown_grid(
    cover: f64,
    bundle: &ProbabilityBundle,
    grid: &GridSpec,
) -> Result<IntervalSet> {
    if !(0.0..=1.0).contains(&cover) {
        return Err(HdrError::CoverDomain(cover));
    }
    if !bundle.has_density() {
        return Err(HdrError::MissingDensity);
    }
    let n = grid.n;
    let edges: Vec<f64> = (0..=n).map(|i| grid.edge(i)).collect();
    let cdf: Vec<f64> = edges.iter().map(|&x| bundle.cdf(x)).collect();
    let cells: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let mid = 0.5 * (edges[i] + edges[i + 1]);
            (bundle.density(mid).unwrap_or(0.0), cdf[i + 1] - cdf[i])
        })
        .collect();
    let coverage = |a: f64| -> f64 { cells.iter().filter(|c| c.0 >= a).map(|c| c.1).sum() };

    // largest cutoff whose gridded level set still reaches the coverage
    let top = cells.iter().map(|c| c.0).fold(0.0, f64::max);
    let (mut ok, mut too_high) = (0.0, top * (1.0 + 1e-12) + f64::MIN_POSITIVE);
    for _ in 0..200 {
        let mid = 0.5 * (ok + too_high);
        if mid <= ok || mid >= too_high {
            break;
        }
        if coverage(mid) >= cover {
            ok = mid;
        } else {
            too_high = mid;
        }
    }
    let chosen = (0..n)
        .filter(|&i| cells[i].0 >= ok)
        .map(|i| Interval::new(edges[i], edges[i + 1]).expect("ascending grid edges"));
    Ok(normalize(chosen))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceHdr {
    pub indices: Vec<usize>,
    pub points: Vec<f64>,
    pub mass: f64,
}

/// Exhaustive search for the smallest subset with mass at least `cover`,
/// keeping the heaviest such subset.
pub fn discrete_brute_force(cover: f64, pmf: &DiscretePmf) -> Result<BruteForceHdr> {
    if !(0.0..=1.0).contains(&cover) {
        return Err(HdrError::CoverDomain(cover));
    }
    let n = pmf.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(HdrError::SizeLimit {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<(u32, f64, u32)> = None;
    let mut indices = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones();
        if let Some((best_size, _, _)) = best {
            if size > best_size {
                continue;
            }
        }
        indices.clear();
        indices.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        let mass = pmf.mass_of(&indices);
        if mass < cover - DISCRETE_COVER_SLACK {
            continue;
        }
        best = match best {
            Some((s, m, _)) if s < size || (s == size && m >= mass) => best,
            _ => Some((size, mass, mask)),
        };
    }
    let (_, mass, mask) = best.expect("the full support always qualifies");
    let indices: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
    Ok(BruteForceHdr {
        points: indices.iter().map(|&i| pmf.points()[i]).collect(),
        indices,
        mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{make_family, params};

    #[test]
    fn normal_grid() {
        let b = make_family("normal", &params([])).unwrap();
        let grid = GridSpec::for_bundle(&b, 100_000).unwrap();
        let set = hdr_updown_grid(0.95, &b, &grid).unwrap();
        assert_eq!(set.len(), 1);
        assert!((set.lower().unwrap() + 1.96).abs() < 1e-3);
        assert!((set.upper().unwrap() - 1.96).abs() < 1e-3);
    }

    #[test]
    fn chisq_grid() {
        let b = make_family("chisq", &params([("df", 30.0)])).unwrap();
        let grid = GridSpec::for_bundle(&b, DEFAULT_GRID_SIZE).unwrap();
        let set = hdr_updown_grid(0.98, &b, &grid).unwrap();
        let h = grid.cell_width();
        assert!((set.lower().unwrap() - 13.93249).abs() <= 2.0 * h);
        assert!((set.upper().unwrap() - 49.33727).abs() <= 2.0 * h);
    }

    #[test]
    fn beta_grid_has_two_parts() {
        let b = make_family("beta", &params([("shape1", 0.4), ("shape2", 0.6)])).unwrap();
        let grid = GridSpec::for_bundle(&b, DEFAULT_GRID_SIZE).unwrap();
        let set = hdr_updown_grid(0.95, &b, &grid).unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.lower().unwrap() >= 0.0 && set.upper().unwrap() <= 1.0);
    }

    #[test]
    fn grid_coverage_reaches_target() {
        let b = make_family("gamma", &params([("shape", 3.0), ("scale", 4.0)])).unwrap();
        let grid = GridSpec::for_bundle(&b, 1000).unwrap();
        let set = hdr_updown_grid(0.9, &b, &grid).unwrap();
        let max_cell = (0..grid.n)
            .map(|i| b.cdf(grid.edge(i + 1)) - b.cdf(grid.edge(i)))
            .fold(0.0, f64::max);
        assert!(b.mass(&set) >= 0.9 - max_cell);
    }

    #[test]
    fn invalid_grid() {
        assert!(GridSpec::new(1.0, 0.0, 10).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let pmf = DiscretePmf::new(vec![0.0, 1.0, 2.0], vec![0.5, 0.3, 0.2]).unwrap();
        let r = discrete_brute_force(0.7, &pmf).unwrap();
        assert_eq!(r.indices.len(), 2);
        assert!((r.mass - 0.8).abs() < 1e-15);
        assert_eq!(
            discrete_brute_force(1.0, &pmf).unwrap().indices,
            vec![0, 1, 2]
        );
        assert!(discrete_brute_force(0.0, &pmf).unwrap().indices.is_empty());
    }

    #[test]
    fn brute_force_size_guard() {
        let w = vec![1.0; 26];
        let pmf = DiscretePmf::from_weights((0..26).map(f64::from).collect(), &w).unwrap();
        assert!(matches!(
            discrete_brute_force(0.5, &pmf),
            Err(HdrError::SizeLimit {
                size: 26,
                limit: 25
            })
        ));
    }
}
