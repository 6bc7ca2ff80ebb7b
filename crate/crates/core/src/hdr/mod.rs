//! Highest density regions.
//!
//! The continuous solvers use the quantile ("left-right") formulation: the
//! coverage is fixed by construction as `F(U) - F(L) = cover` and the region
//! width is minimised over the lower tail probability.

mod continuous;
mod discrete;
mod dispatch;
mod intensity;
mod multimodal;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::format::round_sig;
use crate::interval::IntervalSet;
use crate::optimize::{OptCode, OptResult};

pub(crate) use continuous::logistic;
pub use continuous::{hdr_bimodal, hdr_monotone, hdr_uniform, hdr_unimodal};
pub use discrete::{hdr_discrete, hdr_mixed, DiscreteHdr, DISCRETE_COVER_SLACK};
pub use dispatch::{hdr_for_family, hdr_with_shape};
pub use intensity::{intensity, level_set, monotone_pieces, Piece};
pub use multimodal::hdr_multimodal;

/// Covers closer than this to 0 or 1 are snapped to the end point.
pub const DEGENERATE_COVER: f64 = 1e-12;

/// Validate a coverage probability and snap degenerate values.
pub fn checked_cover(cover: f64) -> crate::Result<f64> {
    if !(0.0..=1.0).contains(&cover) {
        return Err(crate::HdrError::CoverDomain(cover));
    }
    Ok(if cover < DEGENERATE_COVER {
        0.0
    } else if cover > 1.0 - DEGENERATE_COVER {
        1.0
    } else {
        cover
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdrResult {
    pub region: IntervalSet,
    /// Isolated support points (discrete and mixed distributions).
    pub points: Vec<f64>,
    /// Stipulated minimum coverage.
    pub cover_prob: f64,
    /// Probability of the returned region, recomputed from `F`.
    pub actual_cover: f64,
    pub density_cutoff: Option<f64>,
    pub description: String,
    pub method: String,
    pub iterations: usize,
    pub code: Option<OptCode>,
    /// Optimised lower tail probability for the one-variable solvers.
    pub theta: Option<f64>,
}

impl HdrResult {
    pub fn is_empty(&self) -> bool {
        self.region.is_empty() && self.points.is_empty()
    }

    pub fn interval_count(&self) -> usize {
        self.region.len()
    }
}

pub(crate) fn newton_method_text(opt: &OptResult) -> String {
    newton_text(opt.iterations, opt.code)
}

pub(crate) fn newton_text(iterations: usize, code: OptCode) -> String {
    let noun = if iterations == 1 {
        "iteration"
    } else {
        "iterations"
    };
    format!(
        "Computed using Newton optimisation with {iterations} {noun} (code = {})",
        code.code()
    )
}

pub(crate) const MONOTONE_METHOD: &str = "Computed using monotone optimisation";
pub(crate) const TRIVIAL_METHOD: &str = "Computed directly (trivial coverage)";
pub(crate) const UNIFORM_METHOD: &str = "Computed using the middle interval of a uniform density";

fn opt_f64<S: SerializeStruct>(
    s: &mut S,
    key: &'static str,
    value: Option<f64>,
) -> Result<(), S::Error> {
    match value {
        Some(v) if v.is_finite() => s.serialize_field(key, &round_sig(v, 15)),
        Some(v) if v > 0.0 => s.serialize_field(key, "inf"),
        _ => s.serialize_field(key, &Option::<f64>::None),
    }
}

impl Serialize for HdrResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("HdrResult", 9)?;
        s.serialize_field("intervals", &self.region)?;
        let points: Vec<f64> = self.points.iter().map(|&p| round_sig(p, 15)).collect();
        s.serialize_field("points", &points)?;
        s.serialize_field("cover_prob", &round_sig(self.cover_prob, 15))?;
        s.serialize_field("actual_cover", &round_sig(self.actual_cover, 15))?;
        opt_f64(&mut s, "density_cutoff", self.density_cutoff)?;
        s.serialize_field("distribution", &self.description)?;
        s.serialize_field("method", &self.method)?;
        s.serialize_field("iterations", &self.iterations)?;
        s.serialize_field("code", &self.code.map(OptCode::code))?;
        s.end()
    }
}
