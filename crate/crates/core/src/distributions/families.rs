//! Named distribution families, their evaluator bundles and shape rules.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use super::special::{
    beta_cdf, beta_density, beta_quantile, gamma_cdf, gamma_density, gamma_quantile, invert_cdf,
    normal_cdf, normal_density, normal_quantile, student_t_cdf, NoncentralChiSq,
};
use super::{ProbabilityBundle, Shape};
use crate::error::{HdrError, Result};
use crate::optimize::golden_section_minimize;

pub type Params = BTreeMap<String, f64>;

/// Convenience constructor for a parameter map.
pub fn params<const N: usize>(pairs: [(&str, f64); N]) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Normal { mean: f64, sd: f64 },
    LogNormal { meanlog: f64, sdlog: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, scale: f64 },
    Weibull { shape: f64, scale: f64 },
    ChiSquared { df: f64, ncp: f64 },
    StudentT { df: f64 },
    FisherF { df1: f64, df2: f64 },
    Beta { shape1: f64, shape2: f64 },
    Cauchy { location: f64, scale: f64 },
    Uniform { min: f64, max: f64 },
}

pub const FAMILY_NAMES: [&str; 11] = [
    "normal",
    "lognormal",
    "exponential",
    "gamma",
    "weibull",
    "chisq",
    "student_t",
    "f",
    "beta",
    "cauchy",
    "uniform",
];

struct ParamReader<'a> {
    family: &'static str,
    params: &'a Params,
    allowed: &'static [&'static str],
}

impl ParamReader<'_> {
    fn check_keys(&self) -> Result<()> {
        for key in self.params.keys() {
            if !self.allowed.contains(&key.as_str()) {
                return Err(HdrError::UnknownParameter {
                    family: self.family.to_string(),
                    name: key.clone(),
                });
            }
        }
        Ok(())
    }

    fn get(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    fn required(&self, name: &str) -> Result<f64> {
        self.get(name).ok_or_else(|| HdrError::MissingParameter {
            family: self.family.to_string(),
            name: name.to_string(),
        })
    }

    fn or(&self, name: &str, default: f64) -> f64 {
        self.get(name).unwrap_or(default)
    }
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(HdrError::ParameterDomain {
            name: name.to_string(),
            value,
            reason: "must be positive and finite",
        })
    }
}

fn finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(HdrError::ParameterDomain {
            name: name.to_string(),
            value,
            reason: "must be finite",
        })
    }
}

impl Family {
    pub fn parse(name: &str, params: &Params) -> Result<Family> {
        let canonical: &'static str = match name.to_ascii_lowercase().as_str() {
            "normal" | "norm" => "normal",
            "lognormal" | "lnorm" => "lognormal",
            "exponential" | "exp" => "exponential",
            "gamma" => "gamma",
            "weibull" => "weibull",
            "chisq" | "chi-squared" | "chisquared" => "chisq",
            "student_t" | "t" => "student_t",
            "f" => "f",
            "beta" => "beta",
            "cauchy" => "cauchy",
            "uniform" | "unif" => "uniform",
            _ => return Err(HdrError::UnknownFamily(name.to_string())),
        };
        let allowed: &'static [&'static str] = match canonical {
            "normal" => &["mean", "sd"],
            "lognormal" => &["meanlog", "sdlog"],
            "exponential" => &["rate"],
            "gamma" => &["shape", "scale", "rate"],
            "weibull" => &["shape", "scale"],
            "chisq" => &["df", "ncp"],
            "student_t" => &["df"],
            "f" => &["df1", "df2"],
            "beta" => &["shape1", "shape2", "ncp"],
            "cauchy" => &["location", "scale"],
            _ => &["min", "max"],
        };
        let r = ParamReader {
            family: canonical,
            params,
            allowed,
        };
        r.check_keys()?;

        let family = match canonical {
            "normal" => Family::Normal {
                mean: finite("mean", r.or("mean", 0.0))?,
                sd: positive("sd", r.or("sd", 1.0))?,
            },
            "lognormal" => Family::LogNormal {
                meanlog: finite("meanlog", r.or("meanlog", 0.0))?,
                sdlog: positive("sdlog", r.or("sdlog", 1.0))?,
            },
            "exponential" => Family::Exponential {
                rate: positive("rate", r.or("rate", 1.0))?,
            },
            "gamma" => {
                let shape = positive("shape", r.required("shape")?)?;
                let scale = match (r.get("scale"), r.get("rate")) {
                    (Some(_), Some(_)) => {
                        return Err(HdrError::Unsupported(
                            "gamma takes either 'scale' or 'rate', not both".into(),
                        ))
                    }
                    (Some(s), None) => positive("scale", s)?,
                    (None, Some(rate)) => 1.0 / positive("rate", rate)?,
                    (None, None) => 1.0,
                };
                Family::Gamma { shape, scale }
            }
            "weibull" => Family::Weibull {
                shape: positive("shape", r.required("shape")?)?,
                scale: positive("scale", r.or("scale", 1.0))?,
            },
            "chisq" => {
                let df = positive("df", r.required("df")?)?;
                let ncp = r.or("ncp", 0.0);
                if !(ncp >= 0.0 && ncp.is_finite()) {
                    return Err(HdrError::ParameterDomain {
                        name: "ncp".into(),
                        value: ncp,
                        reason: "must be non-negative and finite",
                    });
                }
                if ncp > 0.0 && df <= 2.0 {
                    return Err(HdrError::Unsupported(format!(
                        "non-central chi-squared with df = {df} <= 2 has no fixed monotone shape"
                    )));
                }
                Family::ChiSquared { df, ncp }
            }
            "student_t" => Family::StudentT {
                df: positive("df", r.required("df")?)?,
            },
            "f" => Family::FisherF {
                df1: positive("df1", r.required("df1")?)?,
                df2: positive("df2", r.required("df2")?)?,
            },
            "beta" => {
                if r.or("ncp", 0.0) != 0.0 {
                    return Err(HdrError::Unsupported(
                        "non-central beta distribution is not available".into(),
                    ));
                }
                Family::Beta {
                    shape1: positive("shape1", r.required("shape1")?)?,
                    shape2: positive("shape2", r.required("shape2")?)?,
                }
            }
            "cauchy" => Family::Cauchy {
                location: finite("location", r.or("location", 0.0))?,
                scale: positive("scale", r.or("scale", 1.0))?,
            },
            _ => {
                let min = finite("min", r.or("min", 0.0))?;
                let max = finite("max", r.or("max", 1.0))?;
                if min >= max {
                    return Err(HdrError::ParameterDomain {
                        name: "max".into(),
                        value: max,
                        reason: "must exceed min",
                    });
                }
                Family::Uniform { min, max }
            }
        };
        Ok(family)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Normal { .. } => "normal",
            Family::LogNormal { .. } => "lognormal",
            Family::Exponential { .. } => "exponential",
            Family::Gamma { .. } => "gamma",
            Family::Weibull { .. } => "weibull",
            Family::ChiSquared { .. } => "chisq",
            Family::StudentT { .. } => "student_t",
            Family::FisherF { .. } => "f",
            Family::Beta { .. } => "beta",
            Family::Cauchy { .. } => "cauchy",
            Family::Uniform { .. } => "uniform",
        }
    }

    pub fn description(&self) -> String {
        match *self {
            Family::Normal { mean, sd } => {
                format!("normal distribution with mean = {mean} and standard deviation = {sd}")
            }
            Family::LogNormal { meanlog, sdlog } => format!(
                "log-normal distribution with log-mean = {meanlog} and log-standard deviation = {sdlog}"
            ),
            Family::Exponential { rate } => format!("exponential distribution with rate = {rate}"),
            Family::Gamma { shape, scale } => {
                format!("gamma distribution with shape = {shape} and scale = {scale}")
            }
            Family::Weibull { shape, scale } => {
                format!("Weibull distribution with shape = {shape} and scale = {scale}")
            }
            Family::ChiSquared { df, ncp: 0.0 } => {
                format!("chi-squared distribution with {df} degrees-of-freedom")
            }
            Family::ChiSquared { df, ncp } => format!(
                "chi-squared distribution with {df} degrees-of-freedom and non-centrality parameter = {ncp}"
            ),
            Family::StudentT { df } => {
                format!("Student's T distribution with {df} degrees-of-freedom")
            }
            Family::FisherF { df1, df2 } => format!(
                "F distribution with {df1} numerator degrees-of-freedom and {df2} denominator degrees-of-freedom"
            ),
            Family::Beta { shape1, shape2 } if shape1 == 1.0 && shape2 == 1.0 => {
                "standard uniform distribution".to_string()
            }
            Family::Beta { shape1, shape2 } => {
                format!("beta distribution with shape1 = {shape1} and shape2 = {shape2}")
            }
            Family::Cauchy { location, scale } => {
                format!("Cauchy distribution with location = {location} and scale = {scale}")
            }
            Family::Uniform { min, max } if min == 0.0 && max == 1.0 => {
                "standard uniform distribution".to_string()
            }
            Family::Uniform { min, max } => {
                format!("uniform distribution with minimum = {min} and maximum = {max}")
            }
        }
    }

    pub fn bundle(&self) -> ProbabilityBundle {
        let description = self.description();
        match *self {
            Family::Normal { mean, sd } => ProbabilityBundle::new(
                move |x| normal_cdf((x - mean) / sd),
                move |p| mean + sd * normal_quantile(p),
                description,
            )
            .with_density(move |x| normal_density((x - mean) / sd) / sd)
            .with_log_density_slope(move |x| -(x - mean) / (sd * sd)),

            Family::LogNormal { meanlog, sdlog } => ProbabilityBundle::new(
                move |x| {
                    if x <= 0.0 {
                        0.0
                    } else {
                        normal_cdf((x.ln() - meanlog) / sdlog)
                    }
                },
                move |p| (meanlog + sdlog * normal_quantile(p)).exp(),
                description,
            )
            .with_support(0.0, f64::INFINITY)
            .with_density(move |x| {
                if x <= 0.0 {
                    0.0
                } else {
                    normal_density((x.ln() - meanlog) / sdlog) / (sdlog * x)
                }
            })
            .with_log_density_slope(move |x| -(1.0 + (x.ln() - meanlog) / (sdlog * sdlog)) / x),

            Family::Exponential { rate } => ProbabilityBundle::new(
                move |x| if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() },
                move |p| -(-p).ln_1p() / rate,
                description,
            )
            .with_support(0.0, f64::INFINITY)
            .with_density(move |x| {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            })
            .with_log_density_slope(move |_| -rate),

            Family::Gamma { shape, scale } => gamma_bundle(shape, scale, description),

            Family::Weibull { shape, scale } => ProbabilityBundle::new(
                move |x| {
                    if x <= 0.0 {
                        0.0
                    } else {
                        -(-(x / scale).powf(shape)).exp_m1()
                    }
                },
                move |p| scale * (-(-p).ln_1p()).powf(1.0 / shape),
                description,
            )
            .with_support(0.0, f64::INFINITY)
            .with_density(move |x| {
                if x < 0.0 {
                    0.0
                } else if x == 0.0 {
                    match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0 / scale,
                        _ => 0.0,
                    }
                } else {
                    let z = x / scale;
                    shape / scale * z.powf(shape - 1.0) * (-z.powf(shape)).exp()
                }
            })
            .with_log_density_slope(move |x| {
                (shape - 1.0) / x - shape * x.powf(shape - 1.0) / scale.powf(shape)
            }),

            Family::ChiSquared { df, ncp: 0.0 } => gamma_bundle(0.5 * df, 2.0, description),

            Family::ChiSquared { df, ncp } => {
                let series = Arc::new(NoncentralChiSq::new(df, ncp));
                let (s1, s2, s3) = (series.clone(), series.clone(), series);
                ProbabilityBundle::new(move |x| s1.cdf(x), move |p| s2.quantile(p), description)
                    .with_support(0.0, f64::INFINITY)
                    .with_density(move |x| s3.density(x))
            }

            Family::StudentT { df } => {
                let ln_norm =
                    ln_gamma(0.5 * (df + 1.0)) - ln_gamma(0.5 * df) - 0.5 * (df * PI).ln();
                let density =
                    move |x: f64| (ln_norm - 0.5 * (df + 1.0) * (x * x / df).ln_1p()).exp();
                ProbabilityBundle::new(
                    move |x| student_t_cdf(x, df),
                    move |p| {
                        let guess = normal_quantile(p);
                        invert_cdf(
                            p,
                            |x| student_t_cdf(x, df),
                            density,
                            f64::NEG_INFINITY,
                            f64::INFINITY,
                            guess,
                        )
                    },
                    description,
                )
                .with_density(density)
                .with_log_density_slope(move |x| -(df + 1.0) * x / (df + x * x))
            }

            Family::FisherF { df1, df2 } => {
                let (a, b) = (0.5 * df1, 0.5 * df2);
                let ln_b = ln_beta(a, b);
                let cdf = move |x: f64| {
                    if x <= 0.0 {
                        0.0
                    } else {
                        beta_cdf(df1 * x / (df1 * x + df2), a, b)
                    }
                };
                let density = move |x: f64| {
                    if x < 0.0 {
                        0.0
                    } else if x == 0.0 {
                        if df1 < 2.0 {
                            f64::INFINITY
                        } else if df1 == 2.0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        (a * (df1 * x).ln() + b * df2.ln()
                            - (a + b) * (df1 * x + df2).ln()
                            - x.ln()
                            - ln_b)
                            .exp()
                    }
                };
                ProbabilityBundle::new(
                    cdf,
                    move |p| {
                        let y = beta_quantile(p, a, b, ln_b);
                        let guess = df2 * y / (df1 * (1.0 - y));
                        invert_cdf(p, cdf, density, 0.0, f64::INFINITY, guess)
                    },
                    description,
                )
                .with_support(0.0, f64::INFINITY)
                .with_density(density)
                .with_log_density_slope(move |x| (a - 1.0) / x - (a + b) * df1 / (df2 + df1 * x))
            }

            Family::Beta { shape1, shape2 } => {
                let ln_b = ln_beta(shape1, shape2);
                ProbabilityBundle::new(
                    move |x| beta_cdf(x, shape1, shape2),
                    move |p| beta_quantile(p, shape1, shape2, ln_b),
                    description,
                )
                .with_support(0.0, 1.0)
                .with_density(move |x| beta_density(x, shape1, shape2, ln_b))
                .with_log_density_slope(move |x| (shape1 - 1.0) / x - (shape2 - 1.0) / (1.0 - x))
            }

            Family::Cauchy { location, scale } => ProbabilityBundle::new(
                move |x| 0.5 + ((x - location) / scale).atan() / PI,
                move |p| location + scale * (PI * (p - 0.5)).tan(),
                description,
            )
            .with_support(f64::NEG_INFINITY, f64::INFINITY)
            .with_density(move |x| {
                let z = (x - location) / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            })
            .with_log_density_slope(move |x| {
                let d = x - location;
                -2.0 * d / (scale * scale + d * d)
            }),

            Family::Uniform { min, max } => ProbabilityBundle::new(
                move |x| ((x - min) / (max - min)).clamp(0.0, 1.0),
                move |p| min + p * (max - min),
                description,
            )
            .with_support(min, max)
            .with_density(move |x| {
                if (min..=max).contains(&x) {
                    1.0 / (max - min)
                } else {
                    0.0
                }
            })
            .with_log_density_slope(|_| 0.0),
        }
    }

    pub fn shape(&self) -> Result<Shape> {
        let shape = match *self {
            Family::Exponential { .. } => Shape::MonotoneDecreasing,
            Family::Gamma { shape, .. } | Family::Weibull { shape, .. } if shape <= 1.0 => {
                Shape::MonotoneDecreasing
            }
            Family::ChiSquared { df, .. } if df <= 2.0 => Shape::MonotoneDecreasing,
            Family::FisherF { df1, .. } if df1 <= 2.0 => Shape::MonotoneDecreasing,
            Family::Beta { shape1, shape2 } => {
                if shape1 == 1.0 && shape2 == 1.0 {
                    Shape::Uniform
                } else if shape1 <= 1.0 && shape2 >= 1.0 {
                    Shape::MonotoneDecreasing
                } else if shape1 >= 1.0 && shape2 <= 1.0 {
                    Shape::MonotoneIncreasing
                } else if shape1 > 1.0 && shape2 > 1.0 {
                    Shape::Unimodal {
                        mode: self.mode_point()?,
                    }
                } else {
                    Shape::Bimodal {
                        antimode: self.mode_point()?,
                    }
                }
            }
            Family::Uniform { .. } => Shape::Uniform,
            _ => Shape::Unimodal {
                mode: self.mode_point()?,
            },
        };
        Ok(shape)
    }

    /// The interior extremum: the mode of a unimodal density or the
    /// minimiser of a bimodal one.
    pub fn mode_point(&self) -> Result<f64> {
        match *self {
            Family::Normal { mean, .. } => Ok(mean),
            Family::LogNormal { meanlog, sdlog } => Ok((meanlog - sdlog * sdlog).exp()),
            Family::Gamma { shape, scale } if shape > 1.0 => Ok((shape - 1.0) * scale),
            Family::Weibull { shape, scale } if shape > 1.0 => {
                Ok(scale * ((shape - 1.0) / shape).powf(1.0 / shape))
            }
            Family::ChiSquared { df, ncp } if df > 2.0 => {
                if ncp == 0.0 {
                    Ok(df - 2.0)
                } else {
                    let bundle = self.bundle();
                    let hi = bundle.quantile(0.999);
                    Ok(golden_section_minimize(
                        |x| -bundle.density(x).unwrap_or(0.0),
                        0.0,
                        hi,
                        1e-10,
                    ))
                }
            }
            Family::StudentT { .. } => Ok(0.0),
            Family::FisherF { df1, df2 } if df1 > 2.0 => Ok((df1 - 2.0) / df1 * df2 / (df2 + 2.0)),
            Family::Beta { shape1, shape2 }
                if (shape1 > 1.0 && shape2 > 1.0) || (shape1 < 1.0 && shape2 < 1.0) =>
            {
                Ok((shape1 - 1.0) / (shape1 + shape2 - 2.0))
            }
            Family::Cauchy { location, .. } => Ok(location),
            _ => Err(HdrError::NoInteriorExtremum),
        }
    }
}

fn gamma_bundle(shape: f64, scale: f64, description: String) -> ProbabilityBundle {
    ProbabilityBundle::new(
        move |x| gamma_cdf(x, shape, scale),
        move |p| gamma_quantile(p, shape, scale),
        description,
    )
    .with_support(0.0, f64::INFINITY)
    .with_density(move |x| gamma_density(x, shape, scale))
    .with_log_density_slope(move |x| (shape - 1.0) / x - 1.0 / scale)
}

pub fn make_family(name: &str, params: &Params) -> Result<ProbabilityBundle> {
    Ok(Family::parse(name, params)?.bundle())
}

pub fn classify_shape(name: &str, params: &Params) -> Result<Shape> {
    Family::parse(name, params)?.shape()
}

pub fn mode_point(name: &str, params: &Params) -> Result<f64> {
    Family::parse(name, params)?.mode_point()
}

/// Finite mixture of normal components given as `(weight, mean, sd)`.
/// Weights are normalised to sum to one.
pub fn normal_mixture(components: &[(f64, f64, f64)]) -> Result<ProbabilityBundle> {
    if components.is_empty() {
        return Err(HdrError::Unsupported(
            "mixture needs at least one component".into(),
        ));
    }
    let total: f64 = components.iter().map(|c| c.0).sum();
    for &(w, mean, sd) in components {
        if !(w > 0.0) {
            return Err(HdrError::ParameterDomain {
                name: "weight".into(),
                value: w,
                reason: "must be positive",
            });
        }
        finite("mean", mean)?;
        positive("sd", sd)?;
    }
    let comps: Arc<Vec<(f64, f64, f64)>> = Arc::new(
        components
            .iter()
            .map(|&(w, m, s)| (w / total, m, s))
            .collect(),
    );

    let description = format!(
        "normal mixture with {} components ({})",
        comps.len(),
        comps
            .iter()
            .map(|(w, m, s)| format!("{w}*N({m}, {s})"))
            .collect::<Vec<_>>()
            .join(" + ")
    );

    let c = comps.clone();
    let cdf = move |x: f64| {
        c.iter()
            .map(|&(w, m, s)| w * normal_cdf((x - m) / s))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    };
    let c = comps.clone();
    let density = move |x: f64| {
        c.iter()
            .map(|&(w, m, s)| w * normal_density((x - m) / s) / s)
            .sum::<f64>()
    };
    let c = comps.clone();
    let slope = move |x: f64| {
        let (mut num, mut den) = (0.0, 0.0);
        for &(w, m, s) in c.iter() {
            let d = w * normal_density((x - m) / s) / s;
            num += -d * (x - m) / (s * s);
            den += d;
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    };
    let c = comps;
    let (cdf_q, density_q) = (cdf.clone(), density.clone());
    let quantile = move |p: f64| {
        let guess: f64 = c
            .iter()
            .map(|&(w, m, s)| w * (m + s * normal_quantile(p)))
            .sum();
        invert_cdf(
            p,
            &cdf_q,
            &density_q,
            f64::NEG_INFINITY,
            f64::INFINITY,
            guess,
        )
    };
    Ok(ProbabilityBundle::new(cdf, quantile, description)
        .with_support(f64::NEG_INFINITY, f64::INFINITY)
        .with_density(density)
        .with_log_density_slope(slope))
}
