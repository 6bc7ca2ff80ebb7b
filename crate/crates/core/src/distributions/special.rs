//! Special-function plumbing on top of `statrs`: normal and Student-t
//! distribution functions, the non-central chi-squared series, and a
//! bracketed Newton inversion used for every quantile without a closed form.

use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc_inv;
use statrs::function::gamma::{gamma_lr, ln_gamma};

const MAX_INVERSION_STEPS: usize = 600;

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile, polished against [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let guess = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    invert_cdf(
        p,
        normal_cdf,
        normal_density,
        f64::NEG_INFINITY,
        f64::INFINITY,
        guess,
    )
}

/// Find `x` in `[lower, upper]` with `cdf(x) = p`.
///
/// Newton steps are taken while they stay strictly inside the current
/// bracket; otherwise the bracket is split (geometrically when it spans
/// several orders of magnitude on one side of zero). Infinite ends are
/// replaced by a doubling search outward from `guess`.
pub fn invert_cdf<F, D>(p: f64, cdf: F, density: D, lower: f64, upper: f64, guess: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if p <= 0.0 {
        return lower;
    }
    if p >= 1.0 {
        return upper;
    }

    let mut x = if guess.is_finite() {
        guess.clamp(lower, upper)
    } else if lower.is_finite() && upper.is_finite() {
        0.5 * (lower + upper)
    } else if lower.is_finite() {
        lower + 1.0
    } else if upper.is_finite() {
        upper - 1.0
    } else {
        0.0
    };

    let mut lo = lower;
    let mut hi = upper;
    if lo == f64::NEG_INFINITY {
        let mut step = x.abs().max(1.0);
        lo = x - step;
        while cdf(lo) > p && lo.is_finite() {
            step *= 2.0;
            lo = x - step;
        }
    }
    if hi == f64::INFINITY {
        let mut step = x.abs().max(1.0);
        hi = x + step;
        while cdf(hi) < p && hi.is_finite() {
            step *= 2.0;
            hi = x + step;
        }
    }
    if !(x > lo && x < hi) {
        x = split(lo, hi);
    }

    for _ in 0..MAX_INVERSION_STEPS {
        let excess = cdf(x) - p;
        if excess == 0.0 {
            return x;
        }
        if excess < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = density(x);
        let newton = if d > 0.0 && d.is_finite() {
            x - excess / d
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            split(lo, hi)
        };
        let scale = x.abs().max(f64::MIN_POSITIVE);
        if (next - x).abs() <= 2.0 * f64::EPSILON * scale
            || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs())
        {
            return next;
        }
        x = next;
    }
    x
}

fn split(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 && hi > 16.0 * lo {
        lo.sqrt() * hi.sqrt()
    } else if hi < 0.0 && lo < 16.0 * hi {
        -((-lo).sqrt() * (-hi).sqrt())
    } else if lo == 0.0 && hi > 1e-300 {
        hi * 1e-3
    } else if hi == 0.0 && lo < -1e-300 {
        lo * 1e-3
    } else {
        lo + 0.5 * (hi - lo)
    }
}

pub fn gamma_cdf(x: f64, shape: f64, scale: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(shape, x / scale)
    }
}

pub fn gamma_density(x: f64, shape: f64, scale: f64) -> f64 {
    if x < 0.0 || x.is_infinite() {
        return 0.0;
    }
    if x == 0.0 {
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            1.0 / scale
        } else {
            0.0
        };
    }
    ((shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln()).exp()
}

/// Gamma quantile with a Wilson-Hilferty starting point.
pub fn gamma_quantile(p: f64, shape: f64, scale: f64) -> f64 {
    let z = normal_quantile(p.clamp(1e-300, 1.0 - 1e-16));
    let c = 1.0 / (9.0 * shape);
    let wh = shape * (1.0 - c + z * c.sqrt()).powi(3);
    let guess = if wh > 0.0 && wh.is_finite() {
        wh * scale
    } else {
        // small-p regime: F(x) ~ (x/scale)^shape / Gamma(shape + 1)
        scale * (p * (ln_gamma(shape + 1.0)).exp()).powf(1.0 / shape)
    };
    invert_cdf(
        p,
        |x| gamma_cdf(x, shape, scale),
        |x| gamma_density(x, shape, scale),
        0.0,
        f64::INFINITY,
        guess,
    )
}

pub fn beta_cdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta_reg(a, b, x)
    }
}

pub fn beta_density(x: f64, a: f64, b: f64, ln_norm: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    if x == 0.0 {
        return edge_density(a, -ln_norm);
    }
    if x == 1.0 {
        return edge_density(b, -ln_norm);
    }
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_norm).exp()
}

fn edge_density(exponent: f64, ln_scale: f64) -> f64 {
    if exponent < 1.0 {
        f64::INFINITY
    } else if exponent == 1.0 {
        ln_scale.exp()
    } else {
        0.0
    }
}

pub fn beta_quantile(p: f64, a: f64, b: f64, ln_norm: f64) -> f64 {
    let guess = statrs::function::beta::inv_beta_reg(a, b, p);
    let guess = if guess > 0.0 && guess < 1.0 {
        guess
    } else {
        0.5
    };
    invert_cdf(
        p,
        |x| beta_cdf(x, a, b),
        |x| beta_density(x, a, b, ln_norm),
        0.0,
        1.0,
        guess,
    )
}

pub fn student_t_cdf(x: f64, df: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return 0.5;
    }
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let x2 = x * x;
    if x2 < df {
        let centre = 0.5 * beta_reg(0.5, 0.5 * df, x2 / (df + x2));
        if x > 0.0 {
            0.5 + centre
        } else {
            0.5 - centre
        }
    } else {
        let tail = 0.5 * beta_reg(0.5 * df, 0.5, df / (df + x2));
        if x > 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }
}

/// Poisson-weighted series for the non-central chi-squared distribution.
#[derive(Debug, Clone, Copy)]
pub struct NoncentralChiSq {
    df: f64,
    ncp: f64,
    first: u32,
    last: u32,
}

impl NoncentralChiSq {
    pub fn new(df: f64, ncp: f64) -> Self {
        let half = 0.5 * ncp;
        let spread = 12.0 * half.sqrt() + 12.0;
        let first = (half - spread).floor().max(0.0) as u32;
        let last = (half + spread + 20.0).ceil() as u32;
        Self {
            df,
            ncp,
            first,
            last,
        }
    }

    fn weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * self.ncp;
        let ln_half = half.ln();
        (self.first..=self.last).map(move |j| {
            let j = j as f64;
            let w = (-half + j * ln_half - ln_gamma(j + 1.0)).exp();
            (w, 0.5 * self.df + j)
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        let total: f64 = self.weights().map(|(w, a)| w * gamma_lr(a, 0.5 * x)).sum();
        total.clamp(0.0, 1.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 || x.is_infinite() {
            return 0.0;
        }
        self.weights()
            .map(|(w, a)| w * gamma_density(x, a, 2.0))
            .sum()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let mean = self.df + self.ncp;
        let var = 2.0 * (self.df + 2.0 * self.ncp);
        let guess =
            (mean + normal_quantile(p.clamp(1e-300, 1.0 - 1e-16)) * var.sqrt()).max(mean * 1e-3);
        invert_cdf(
            p,
            |x| self.cdf(x),
            |x| self.density(x),
            0.0,
            f64::INFINITY,
            guess,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_quantile_round_trip() {
        for &p in &[1e-12, 1e-6, 0.025, 0.3, 0.5, 0.975, 1.0 - 1e-9] {
            let z = normal_quantile(p);
            assert!((normal_cdf(z) - p).abs() <= 4.0 * f64::EPSILON * p.max(1e-300) + 1e-17);
        }
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn gamma_quantile_small_shape() {
        for &shape in &[0.05, 0.3, 1.0, 3.0, 250.0] {
            for &p in &[1e-10, 0.01, 0.5, 0.99] {
                let x = gamma_quantile(p, shape, 2.0);
                let back = gamma_cdf(x, shape, 2.0);
                assert!(
                    (back - p).abs() <= 1e-12 * p.max(1e-3),
                    "shape {shape} p {p}: {back}"
                );
            }
        }
    }

    #[test]
    fn beta_quantile_extreme_shapes() {
        let (a, b) = (0.03, 0.05);
        let ln_norm = statrs::function::beta::ln_beta(a, b);
        for &p in &[0.01, 0.3, 0.6, 0.62, 0.9, 0.999] {
            let x = beta_quantile(p, a, b, ln_norm);
            // near x = 1 adjacent doubles can be far apart in probability,
            // so require the neighbours of x to straddle p
            let below = beta_cdf(x.next_down(), a, b);
            let above = beta_cdf(x.next_up(), a, b);
            assert!(below <= p + 1e-13 && above >= p - 1e-13, "p {p} -> {x}");
        }
    }

    #[test]
    fn noncentral_reduces_to_central() {
        let nc = NoncentralChiSq::new(4.0, 1e-300_f64.max(0.0));
        for &x in &[0.5, 2.0, 7.0] {
            assert!((nc.cdf(x) - gamma_cdf(x, 2.0, 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn student_t_symmetry() {
        for &x in &[0.1, 1.0, 3.0, 40.0] {
            let s = student_t_cdf(x, 3.5) + student_t_cdf(-x, 3.5);
            assert!((s - 1.0).abs() < 1e-15);
        }
        // df = 1 is the standard Cauchy
        let c = 0.5 + (2.0f64).atan() / std::f64::consts::PI;
        assert!((student_t_cdf(2.0, 1.0) - c).abs() < 1e-14);
    }
}
