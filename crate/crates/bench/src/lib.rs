//! Shared fixtures for the criterion benches.

use hdr_core::{params, Params};

pub struct Case {
    pub label: &'static str,
    pub family: &'static str,
    pub params: Params,
}

/// The four reference distributions used by `hdrtool benchmark`, plus the
/// chi-squared example.
pub fn reference_cases() -> Vec<Case> {
    vec![
        Case {
            label: "chisq_30",
            family: "chisq",
            params: params([("df", 30.0)]),
        },
        Case {
            label: "chisq_4_ncp2",
            family: "chisq",
            params: params([("df", 4.0), ("ncp", 2.0)]),
        },
        Case {
            label: "gamma_3_4",
            family: "gamma",
            params: params([("shape", 3.0), ("scale", 4.0)]),
        },
        Case {
            label: "beta_0.4_0.6",
            family: "beta",
            params: params([("shape1", 0.4), ("shape2", 0.6)]),
        },
        Case {
            label: "beta_0.03_0.05",
            family: "beta",
            params: params([("shape1", 0.03), ("shape2", 0.05)]),
        },
    ]
}

pub const COVERS: [f64; 3] = [0.5, 0.9, 0.99];
