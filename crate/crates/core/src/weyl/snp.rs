//! Conditions around stretched non-positivity.
//!
//! All checks normalize the field first: `X = E / |E|`. Left-invariant
//! fields have constant length, so the constant-length condition holds
//! automatically and is not checked separately.

use rayon::prelude::*;

use super::{certify_nonpositive, Certificate, CertifyConfig, Verdict, WeylStructure};
use crate::linalg::{self, householder_completion, symmetric_part};
use crate::{Error, Matrix, Result, Vector};

/// Orthonormal basis of `E^perp` (columns) and the unit field.
fn unit_and_complement(w: &WeylStructure) -> Result<(Vector, Matrix)> {
    let norm = w.field().norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector("Weyl field"));
    }
    let x = w.field() / norm;
    let h = householder_completion(&x);
    let n = w.dim();
    let complement = h.columns(1, n - 1).into_owned();
    Ok((x, complement))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W1Report {
    pub holds: bool,
    /// Largest sectional curvature of a plane through `E`.
    pub worst: f64,
}

/// Every plane containing `E` has non-positive Riemannian curvature.
pub fn check_w1(w: &WeylStructure) -> Result<W1Report> {
    let (x, b) = unit_and_complement(w)?;
    let lc = w.levi_civita_connection();
    let k = lc.sectional_operator(&x);
    let restricted = b.transpose() * k * &b;
    let (worst, _) = linalg::lambda_max(&restricted);
    let worst = if worst.is_finite() { worst } else { 0.0 };
    Ok(W1Report { holds: worst <= w.space().tolerances().cert, worst })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W2Report {
    pub holds: bool,
    /// Largest `|eigenvalue|` of the symmetric part of `Y -> nabla_Y X` on `E^perp`.
    pub residual: f64,
}

/// Symmetric part of `Y -> nabla_Y X` restricted to `E^perp`.
fn restricted_nabla(w: &WeylStructure) -> Result<(Vector, Matrix, Matrix)> {
    let (x, b) = unit_and_complement(w)?;
    let lc = w.levi_civita_connection();
    let m = lc.nabla_field(&x);
    let restricted = b.transpose() * symmetric_part(&m) * &b;
    Ok((x, b, restricted))
}

/// `<nabla_Y E, Y> = 0` for every `Y` orthogonal to `E`.
pub fn check_w2(w: &WeylStructure) -> Result<W2Report> {
    let (_, _, s) = restricted_nabla(w)?;
    let residual = s.amax();
    Ok(W2Report { holds: residual <= w.space().tolerances().alg, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct W45Report {
    /// `<nabla_E E, Y1>^2 <= -4 K(E, Y2)` for all orthonormal `(E, Y1, Y2)`.
    pub w4: bool,
    /// The strict version.
    pub w5: bool,
    /// `sup <nabla_E E, Y1>^2 + 4 K(E, Y2)`.
    pub sup: f64,
    /// `|proj nabla_E E|^2 + 4 lambda_max(K(E, .))`, an upper bound on `sup`.
    pub decoupled_bound: f64,
    /// `(Y1, Y2)` attaining `sup`.
    pub worst_pair: (Vector, Vector),
}

/// Evaluates the discriminant conditions on unit `E` satisfying the
/// tangential condition. For fixed `Y2` the best `Y1` is the direction of
/// `nabla_E E` orthogonal to `Y2`, which reduces the supremum to
/// `|c|^2 + lambda_max(4K - c c^T)` on `E^perp`, `c` the projection of
/// `nabla_E E`.
pub fn check_w4_w5(w: &WeylStructure) -> Result<W45Report> {
    let n = w.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall { min: 3, found: n });
    }
    let w2 = check_w2(w)?;
    if !w2.holds {
        return Err(Error::Precondition(format!(
            "tangential condition <nabla_Y E, Y> = 0 fails (residual {:e})",
            w2.residual
        )));
    }
    let (x, b) = unit_and_complement(w)?;
    let lc = w.levi_civita_connection();
    let c = b.transpose() * lc.nabla_unchecked(&x, &x);
    let k = b.transpose() * lc.sectional_operator(&x) * &b;
    let (k_max, _) = linalg::lambda_max(&k);
    let decoupled_bound = c.norm_squared() + 4.0 * k_max;
    let reduced = &k * 4.0 - &c * c.transpose();
    let (top, y2_local) = linalg::lambda_max(&reduced);
    let sup = c.norm_squared() + top;

    let mut y1_local = &c - &y2_local * y2_local.dot(&c);
    if y1_local.norm() < 1e-12 {
        // any unit vector orthogonal to y2 in E^perp
        let h = householder_completion(&y2_local);
        y1_local = h.column(1).into_owned();
    }
    let y1_local = y1_local.normalize();
    let tol = w.space().tolerances().cert;
    Ok(W45Report {
        w4: sup <= tol,
        w5: sup < -tol,
        sup,
        decoupled_bound,
        worst_pair: (&b * y1_local, &b * y2_local),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwReport {
    pub holds: bool,
    /// Smallest eigenvalue of the symmetric part of `Y -> nabla_Y X` on `E^perp`.
    pub lambda_min: f64,
}

/// `<nabla_Y E, Y> > 0` strictly for every unit `Y` orthogonal to `E`.
pub fn check_snp_sufficient_ow(w: &WeylStructure) -> Result<OwReport> {
    let (_, _, s) = restricted_nabla(w)?;
    let lambda_min = linalg::lambda_min(&s);
    Ok(OwReport { holds: lambda_min > w.space().tolerances().cert, lambda_min })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnpEntry {
    pub gamma: f64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnpScan {
    pub entries: Vec<SnpEntry>,
    /// Smallest grid value from which every larger grid value certifies.
    pub gamma0: Option<f64>,
    pub inconclusive: Vec<f64>,
}

/// Certifies `gamma * E / |E|` for each grid value. The grid stretches the
/// unit field; the structure's own `gamma` is ignored.
pub fn snp_scan(w: &WeylStructure, grid: &[f64], cfg: &CertifyConfig) -> Result<SnpScan> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty gamma grid".into()));
    }
    if grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidGrid("gamma values must be positive and finite".into()));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidGrid("gamma grid must be strictly increasing".into()));
    }
    let unit = w.normalized()?;
    let entries = grid
        .par_iter()
        .map(|&gamma| {
            let stretched = unit.with_gamma(gamma)?;
            Ok(SnpEntry { gamma, certificate: certify_nonpositive(&stretched, cfg)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut gamma0 = None;
    for entry in entries.iter().rev() {
        if entry.certificate.verdict.is_certified() {
            gamma0 = Some(entry.gamma);
        } else {
            break;
        }
    }
    let inconclusive = entries
        .iter()
        .filter(|e| matches!(e.certificate.verdict, Verdict::Inconclusive { .. }))
        .map(|e| e.gamma)
        .collect();
    Ok(SnpScan { entries, gamma0, inconclusive })
}
