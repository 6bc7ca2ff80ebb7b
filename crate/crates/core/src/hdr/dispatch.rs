use super::{hdr_bimodal, hdr_monotone, hdr_multimodal, hdr_uniform, hdr_unimodal, HdrResult};
use crate::distributions::{Family, Params, ProbabilityBundle, Shape};
use crate::error::Result;
use crate::optimize::OptimizerConfig;

/// Route a bundle to the solver matching its shape.
pub fn hdr_with_shape(
    cover: f64,
    bundle: &ProbabilityBundle,
    shape: &Shape,
    cfg: &OptimizerConfig,
) -> Result<HdrResult> {
    shape.check_against(bundle)?;
    match shape {
        Shape::MonotoneDecreasing => hdr_monotone(cover, bundle, true),
        Shape::MonotoneIncreasing => hdr_monotone(cover, bundle, false),
        Shape::Uniform => hdr_uniform(cover, bundle),
        Shape::Unimodal { .. } => hdr_unimodal(cover, bundle, cfg),
        Shape::Bimodal { .. } => hdr_bimodal(cover, bundle, cfg),
        Shape::Multimodal { minima } => hdr_multimodal(cover, bundle, minima, cfg),
    }
}

/// HDR of a named family.
pub fn hdr_for_family(
    family: &str,
    params: &Params,
    cover: f64,
    cfg: &OptimizerConfig,
) -> Result<HdrResult> {
    let family = Family::parse(family, params)?;
    let shape = family.shape()?;
    hdr_with_shape(cover, &family.bundle(), &shape, cfg)
}
