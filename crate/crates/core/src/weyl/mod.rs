//! Weyl connections defined by a left-invariant field.
//!
//! A Weyl structure is a metric Lie algebra with a field `E` and a stretch
//! factor `gamma`; every formula uses the effective field `gamma * E` and
//! the 1-form `phi = <gamma E, .>`:
//!
//! `nabla^W_X Y = nabla_X Y + phi(Y) X + phi(X) Y - <X, Y> gamma E`.
//!
//! The Weyl sectional curvature of an orthonormal plane is
//! `K(P) - |(gamma E)_perp|^2 - div_P(gamma E)`.

mod certify;
mod form;
mod snp;

pub use certify::{certify_nonpositive, CertifyConfig, Certificate, Method, Verdict};
pub use form::{pair_index, pairs, plucker, weyl_form, BivectorForm};
pub use snp::{
    check_snp_sufficient_ow, check_w1, check_w2, check_w4_w5, snp_scan, OwReport, SnpEntry, SnpScan, W1Report,
    W2Report, W45Report,
};

use crate::levicivita::LeviCivita;
use crate::{Error, MetricLieAlgebra, Result, Vector};

/// Orthonormal pair spanning a plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    x: Vector,
    y: Vector,
}

impl Plane {
    /// Accepts `(x, y)` when `|x| = |y| = 1` and `<x, y> = 0` within `tol`.
    pub fn new(x: Vector, y: Vector, tol: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        let p = Self { x, y };
        let residual = p.orthonormality_residual();
        if !(residual <= tol) {
            return Err(Error::NonOrthonormalPlane { residual });
        }
        Ok(p)
    }

    /// Gram-Schmidt on two spanning vectors.
    pub fn spanned_by(a: &Vector, b: &Vector) -> Result<Self> {
        let (x, y) = crate::linalg::orthonormal_pair(a, b).ok_or(Error::ZeroVector("plane spanning pair is dependent"))?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    pub fn y(&self) -> &Vector {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn orthonormality_residual(&self) -> f64 {
        (self.x.norm_squared() - 1.0)
            .abs()
            .max((self.y.norm_squared() - 1.0).abs())
            .max(self.x.dot(&self.y).abs())
    }

    pub(crate) fn check(&self, n: usize, tol: f64) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.dim() });
        }
        let residual = self.orthonormality_residual();
        if !(residual <= tol) {
            return Err(Error::NonOrthonormalPlane { residual });
        }
        Ok(())
    }

    pub fn plucker(&self) -> Vector {
        plucker(&self.x, &self.y)
    }

    /// Component of `v` orthogonal to the plane.
    pub fn reject(&self, v: &Vector) -> Vector {
        v - &self.x * self.x.dot(v) - &self.y * self.y.dot(v)
    }
}

#[derive(Debug, Clone)]
pub struct WeylStructure {
    space: MetricLieAlgebra,
    field: Vector,
    gamma: f64,
}

impl WeylStructure {
    /// `field` is in orthonormal-frame coordinates. A zero field gives the
    /// Levi-Civita connection.
    pub fn new(space: MetricLieAlgebra, field: Vector, gamma: f64) -> Result<Self> {
        space.check_len(&field)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be positive and finite, got {gamma}")));
        }
        if field.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("field has non-finite components".into()));
        }
        Ok(Self { space, field, gamma })
    }

    pub fn levi_civita(space: MetricLieAlgebra) -> Self {
        let n = space.dim();
        Self { space, field: Vector::zeros(n), gamma: 1.0 }
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.field.clone(), gamma)
    }

    /// Same structure with the field replaced by `E / |E|` and `gamma`
    /// multiplied by `|E|`, so the effective field is unchanged.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.field.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector("Weyl field"));
        }
        Self::new(self.space.clone(), &self.field / norm, self.gamma * norm)
    }

    pub fn space(&self) -> &MetricLieAlgebra {
        &self.space
    }

    pub fn field(&self) -> &Vector {
        &self.field
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn effective_field(&self) -> Vector {
        &self.field * self.gamma
    }

    pub fn levi_civita_connection(&self) -> LeviCivita<'_> {
        LeviCivita::new(&self.space)
    }

    pub fn weyl_nabla(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.space.check_len(x)?;
        self.space.check_len(y)?;
        Ok(self.weyl_nabla_with(&self.levi_civita_connection(), x, y))
    }

    fn weyl_nabla_with(&self, lc: &LeviCivita<'_>, x: &Vector, y: &Vector) -> Vector {
        let e = self.effective_field();
        lc.nabla_unchecked(x, y) + x * e.dot(y) + y * e.dot(x) - &e * x.dot(y)
    }

    /// `R^W(X,Y)Z` of the Weyl connection itself.
    pub fn weyl_curvature(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector> {
        for v in [x, y, z] {
            self.space.check_len(v)?;
        }
        let lc = self.levi_civita_connection();
        let a = self.weyl_nabla_with(&lc, x, &self.weyl_nabla_with(&lc, y, z));
        let b = self.weyl_nabla_with(&lc, y, &self.weyl_nabla_with(&lc, x, z));
        let bracket = self.space.algebra().bracket_unchecked(x, y);
        Ok(a - b - self.weyl_nabla_with(&lc, &bracket, z))
    }

    /// Antisymmetric part of the Weyl curvature, `R^W(X,Y)Z - dphi(X,Y) Z`.
    pub fn direction_curvature(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector> {
        let full = self.weyl_curvature(x, y, z)?;
        Ok(full - z * self.distance_curvature(x, y)?)
    }

    /// `dphi(X, Y) = -<gamma E, [X, Y]>`.
    pub fn distance_curvature(&self, x: &Vector, y: &Vector) -> Result<f64> {
        Ok(-self.effective_field().dot(&self.space.bracket(x, y)?))
    }

    /// `<nabla_X (gamma E), X> + <nabla_Y (gamma E), Y>`.
    pub fn partial_divergence(&self, plane: &Plane) -> Result<f64> {
        plane.check(self.dim(), self.space.tolerances().alg)?;
        let lc = self.levi_civita_connection();
        Ok(self.partial_divergence_with(&lc, plane))
    }

    fn partial_divergence_with(&self, lc: &LeviCivita<'_>, plane: &Plane) -> f64 {
        let e = self.effective_field();
        lc.nabla_unchecked(plane.x(), &e).dot(plane.x()) + lc.nabla_unchecked(plane.y(), &e).dot(plane.y())
    }

    pub fn weyl_sectional(&self, plane: &Plane) -> Result<f64> {
        plane.check(self.dim(), self.space.tolerances().alg)?;
        let lc = self.levi_civita_connection();
        Ok(self.weyl_sectional_with(&lc, plane))
    }

    pub(crate) fn weyl_sectional_with(&self, lc: &LeviCivita<'_>, plane: &Plane) -> f64 {
        let k = lc.sectional_unchecked(plane.x(), plane.y());
        let perp = plane.reject(&self.effective_field());
        k - perp.norm_squared() - self.partial_divergence_with(lc, plane)
    }

    /// Coefficients of the Weyl sectional curvature of the plane spanned by
    /// `a X + b Y1` and `Y2` as a quadratic form in `(a, b)`, where
    /// `X = E / |E|` and `(X, Y1, Y2)` is orthonormal.
    pub fn plane_pencil(&self, y1: &Vector, y2: &Vector) -> Result<PlanePencil> {
        let norm = self.field.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector("Weyl field"));
        }
        self.space.check_len(y1)?;
        self.space.check_len(y2)?;
        let x = &self.field / norm;
        let residual = [x.dot(y1), x.dot(y2), y1.dot(y2), y1.norm() - 1.0, y2.norm() - 1.0]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if residual > self.space.tolerances().alg {
            return Err(Error::NonOrthonormalPlane { residual });
        }
        let lc = self.levi_civita_connection();
        let e = &self.field;
        let g = self.gamma;
        let r = |a: &Vector, b: &Vector, c: &Vector, d: &Vector| lc.curvature_unchecked(a, b, c).dot(d);
        let ne = |v: &Vector, w: &Vector| lc.nabla_unchecked(v, e).dot(w);
        Ok(PlanePencil {
            aa: r(y2, &x, &x, y2) - g * (ne(&x, &x) + ne(y2, y2)),
            bb: r(y2, y1, y1, y2) - g * (ne(y1, y1) + ne(y2, y2)) - g * g * e.norm_squared(),
            ab: 2.0 * r(y2, &x, y1, y2) - g * (ne(&x, y1) + ne(y1, &x)),
        })
    }
}

/// `aa * a^2 + bb * b^2 + ab * a b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePencil {
    pub aa: f64,
    pub bb: f64,
    pub ab: f64,
}

impl PlanePencil {
    pub fn evaluate(&self, a: f64, b: f64) -> f64 {
        self.aa * a * a + self.bb * b * b + self.ab * a * b
    }

    /// `ab^2 - 4 aa bb`; the pencil is negative semi-definite iff this is
    /// non-positive and both diagonal coefficients are non-positive.
    pub fn discriminant(&self) -> f64 {
        self.ab * self.ab - 4.0 * self.aa * self.bb
    }
}

pub fn weyl_nabla(w: &WeylStructure, x: &Vector, y: &Vector) -> Result<Vector> {
    w.weyl_nabla(x, y)
}

pub fn partial_divergence(w: &WeylStructure, plane: &Plane) -> Result<f64> {
    w.partial_divergence(plane)
}

pub fn weyl_sectional(w: &WeylStructure, plane: &Plane) -> Result<f64> {
    w.weyl_sectional(plane)
}

pub fn distance_curvature(w: &WeylStructure, x: &Vector, y: &Vector) -> Result<f64> {
    w.distance_curvature(x, y)
}
