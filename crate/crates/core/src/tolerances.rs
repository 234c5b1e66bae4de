use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every module.
///
/// `alg` gates algebraic identities (antisymmetry, Jacobi, skewness),
/// `pd` the smallest admissible metric eigenvalue, `rank` the singular value
/// cut-off of rank-revealing factorizations and `cert` the sign decisions on
/// curvature values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub alg: f64,
    pub pd: f64,
    pub rank: f64,
    pub cert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            alg: 1e-9,
            pd: 1e-12,
            rank: 1e-9,
            cert: 1e-8,
        }
    }
}
