use std::cmp::Ordering;

use super::{checked_cover, hdr_with_shape, HdrResult};
use crate::distributions::{DiscretePmf, ProbabilityBundle, Shape};
use crate::error::{HdrError, Result};
use crate::interval::IntervalSet;
use crate::optimize::OptimizerConfig;

/// Allowance for rounding in summed masses when testing `mass >= cover`.
pub const DISCRETE_COVER_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteHdr {
    /// Chosen support indices, ascending.
    pub indices: Vec<usize>,
    /// Chosen support points, ascending.
    pub points: Vec<f64>,
    pub cover_prob: f64,
    pub actual_cover: f64,
    /// Smallest mass among the chosen points.
    pub mass_cutoff: Option<f64>,
}

impl DiscreteHdr {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(crate) fn covers(mass: f64, cover: f64) -> bool {
    mass >= cover - DISCRETE_COVER_SLACK
}

/// Smallest point set with mass at least `cover`: points are taken in order
/// of decreasing mass, ties going to the smaller point.
pub fn hdr_discrete(cover: f64, pmf: &DiscretePmf) -> Result<DiscreteHdr> {
    let cover = checked_cover(cover)?;
    let masses = pmf.masses();
    let mut order: Vec<usize> = (0..pmf.len()).collect();
    order.sort_by(|&i, &j| {
        masses[j]
            .partial_cmp(&masses[i])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut taken = 0;
    if cover > 0.0 {
        let mut running = 0.0;
        for (k, &i) in order.iter().enumerate() {
            running += masses[i];
            // the running sum is only a screen; the decision uses the
            // canonical index-order sum so that equal sets compare equal
            if running + 1e-9 >= cover && covers(pmf.mass_of(&order[..=k]), cover) {
                taken = k + 1;
                break;
            }
            taken = k + 1;
        }
    }
    let mut indices = order[..taken].to_vec();
    indices.sort_unstable();
    let points = indices.iter().map(|&i| pmf.points()[i]).collect();
    let mass_cutoff = indices.iter().map(|&i| masses[i]).reduce(f64::min);
    Ok(DiscreteHdr {
        actual_cover: pmf.mass_of(&indices),
        points,
        indices,
        cover_prob: cover,
        mass_cutoff,
    })
}

/// HDR of a mixture placing weight `discrete_weight` on the pmf and the rest
/// on the continuous bundle. Atoms always take precedence over intervals.
pub fn hdr_mixed(
    cover: f64,
    pmf: &DiscretePmf,
    discrete_weight: f64,
    bundle: &ProbabilityBundle,
    shape: &Shape,
    cfg: &OptimizerConfig,
) -> Result<HdrResult> {
    if !(discrete_weight > 0.0 && discrete_weight < 1.0) {
        return Err(HdrError::ParameterDomain {
            name: "discrete_weight".into(),
            value: discrete_weight,
            reason: "must lie strictly between 0 and 1",
        });
    }
    let cover = checked_cover(cover)?;
    let description = format!(
        "mixture of a {}-point discrete distribution (weight {}) and a {}",
        pmf.len(),
        discrete_weight,
        bundle.description()
    );
    if discrete_weight >= cover {
        let d = hdr_discrete(cover / discrete_weight, pmf)?;
        return Ok(HdrResult {
            region: IntervalSet::empty(),
            points: d.points,
            cover_prob: cover,
            actual_cover: discrete_weight * d.actual_cover,
            density_cutoff: None,
            description,
            method: "Computed using discrete point selection".to_string(),
            iterations: 0,
            code: None,
            theta: None,
        });
    }
    let inner = (cover - discrete_weight) / (1.0 - discrete_weight);
    let continuous = hdr_with_shape(inner.min(1.0), bundle, shape, cfg)?;
    let all = hdr_discrete(1.0, pmf)?;
    Ok(HdrResult {
        actual_cover: discrete_weight * all.actual_cover
            + (1.0 - discrete_weight) * continuous.actual_cover,
        points: all.points,
        cover_prob: cover,
        density_cutoff: continuous
            .density_cutoff
            .map(|f| (1.0 - discrete_weight) * f),
        description,
        ..continuous
    })
}
