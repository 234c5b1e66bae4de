//! Reductive homogeneous spaces `G/H` at the algebra level.
//!
//! A [`ReductiveSpace`] stores the ambient constants in the adapted basis
//! `(h_1, .., h_k, p_1, .., p_m)` with the `p_a` orthonormal for the chosen
//! inner product. Vectors "in g" are adapted `(k + m)`-vectors; vectors "in p"
//! are `m`-vectors in the orthonormal `p` coordinates.
//!
//! Convention: [`ReductiveSpace::nabla_at_o`] treats its arguments as
//! generators of Killing fields (projected right-invariant fields). For
//! `h = 0` this gives `nabla_at_o(X, Y) = nabla_Y X` in terms of the
//! left-invariant Levi-Civita connection; the curvature formula is invariant
//! under reversing the bracket, so both conventions yield the same sectional
//! curvatures.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::linalg::{self, householder_completion, symmetric_part};
use crate::{Error, LieAlgebra, Matrix, MetricLieAlgebra, Result, Tolerances, Vector};

#[derive(Debug, Clone)]
pub struct ReductiveSpace {
    adapted: LieAlgebra,
    /// Columns: adapted basis vectors in ambient coordinates.
    basis: Matrix,
    /// Maps orthonormal `p` coordinates to coordinates in the given `p` basis.
    p_to_given: Matrix,
    h_dim: usize,
    tol: Tolerances,
}

impl ReductiveSpace {
    /// Validates the splitting `g = h + p` (columns of `h_basis`, `p_basis`
    /// in ambient coordinates) with `inner` the Gram matrix on `p_basis`.
    pub fn new(ambient: &LieAlgebra, h_basis: &Matrix, p_basis: &Matrix, inner: &Matrix, tol: Tolerances) -> Result<Self> {
        let n = ambient.dim();
        let (k, m) = (h_basis.ncols(), p_basis.ncols());
        if h_basis.nrows() != n || p_basis.nrows() != n {
            return Err(Error::InvalidSplitting(format!("basis vectors must have length {n}")));
        }
        if k + m != n {
            return Err(Error::InvalidSplitting(format!("dim h + dim p = {} differs from dim g = {n}", k + m)));
        }
        if m == 0 {
            return Err(Error::InvalidSplitting("p is empty".into()));
        }
        if inner.shape() != (m, m) {
            return Err(Error::DimensionMismatch { expected: m, found: inner.nrows() });
        }
        let asym = (inner - inner.transpose()).amax();
        if asym > 1e-12 * (1.0 + inner.amax()) {
            return Err(Error::NotSymmetric { residual: asym });
        }
        let chol = Cholesky::new(symmetric_part(inner)).ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: linalg::lambda_min(inner),
        })?;
        let l_inv_t = chol
            .l()
            .try_inverse()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue: 0.0 })?
            .transpose();
        let p_on = p_basis * &l_inv_t;

        let mut basis = Matrix::zeros(n, n);
        basis.view_mut((0, 0), (n, k)).copy_from(h_basis);
        basis.view_mut((0, k), (n, m)).copy_from(&p_on);
        let smallest = basis.singular_values().min();
        if smallest <= tol.rank * (1.0 + basis.amax()) {
            return Err(Error::InvalidSplitting(format!("h and p do not span g (smallest singular value {smallest:e})")));
        }
        let basis_inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidSplitting("adapted basis is singular".into()))?;
        let adapted = ambient.change_basis(&basis, &basis_inv);
        let space = Self { adapted, basis, p_to_given: l_inv_t, h_dim: k, tol };
        space.validate()?;
        Ok(space)
    }

    /// The group case `h = 0`, `p = g` with the metric of `a`.
    pub fn from_metric_algebra(a: &MetricLieAlgebra) -> Self {
        let n = a.dim();
        Self {
            adapted: a.algebra().clone(),
            basis: Matrix::identity(n, n),
            p_to_given: Matrix::identity(n, n),
            h_dim: 0,
            tol: a.tolerances(),
        }
    }

    fn validate(&self) -> Result<()> {
        let (k, n) = (self.h_dim, self.dim());
        let tol = self.tol.alg;
        for i in 0..k {
            for j in 0..k {
                let p_part = self.p_part(&self.bracket_basis(i, j));
                if p_part.amax() > tol {
                    return Err(Error::InvalidSplitting(format!(
                        "h is not a subalgebra: [h_{i}, h_{j}] has p-component {:e}",
                        p_part.amax()
                    )));
                }
            }
            for a in k..n {
                let b = self.bracket_basis(i, a);
                let h_part = b.rows(0, k).amax();
                if h_part > tol {
                    return Err(Error::InvalidSplitting(format!(
                        "[h, p] not contained in p: [h_{i}, p_{}] has h-component {h_part:e}",
                        a - k
                    )));
                }
            }
            let skew = self.isotropy_action(i);
            let residual = (&skew + skew.transpose()).amax();
            if residual > tol {
                return Err(Error::InvalidSplitting(format!(
                    "ad(h_{i}) is not skew on p (residual {residual:e}); the metric is not isotropy invariant"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.adapted.dim()
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn p_dim(&self) -> usize {
        self.dim() - self.h_dim
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    /// Ambient constants in the adapted basis.
    pub fn adapted_algebra(&self) -> &LieAlgebra {
        &self.adapted
    }

    /// Adapted coordinates to ambient coordinates.
    pub fn to_ambient(&self, x: &Vector) -> Vector {
        &self.basis * x
    }

    /// Orthonormal `p` coordinates to coordinates in the given `p` basis.
    pub fn p_to_given_basis(&self, v: &Vector) -> Vector {
        &self.p_to_given * v
    }

    /// Embeds a `p` vector as an adapted vector in `g`.
    pub fn embed_p(&self, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        out.rows_mut(self.h_dim, self.p_dim()).copy_from(v);
        out
    }

    pub fn p_part(&self, x: &Vector) -> Vector {
        x.rows(self.h_dim, self.p_dim()).into_owned()
    }

    fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        self.adapted.bracket_unchecked(&self.basis_vector(i), &self.basis_vector(j))
    }

    /// Matrix of `ad(h_i)` restricted to `p`.
    fn isotropy_action(&self, i: usize) -> Matrix {
        let m = self.p_dim();
        let mut out = Matrix::zeros(m, m);
        for a in 0..m {
            let col = self.p_part(&self.bracket_basis(i, self.h_dim + a));
            out.set_column(a, &col);
        }
        out
    }

    fn check_g(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    fn check_p(&self, x: &Vector) -> Result<()> {
        if x.len() != self.p_dim() {
            return Err(Error::DimensionMismatch { expected: self.p_dim(), found: x.len() });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.adapted.bracket(x, y)
    }

    /// `[X, Y]_p` for `X, Y` in `g`.
    pub fn bracket_p(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        Ok(self.p_part(&self.bracket(x, y)?))
    }

    /// Orthonormal basis (columns, `p` coordinates) of the subspace of `p`
    /// annihilated by `ad(h)`.
    pub fn p0(&self) -> Matrix {
        let (k, m) = (self.h_dim, self.p_dim());
        if k == 0 {
            return Matrix::identity(m, m);
        }
        let mut stacked = Matrix::zeros(k * m, m);
        for i in 0..k {
            stacked.view_mut((i * m, 0), (m, m)).copy_from(&self.isotropy_action(i));
        }
        linalg::null_space(&stacked, self.tol.rank)
    }

    /// The `p`-valued symmetric tensor with
    /// `<U(X, Y), Z> = (<[Z, X]_p, Y> + <[Z, Y]_p, X>) / 2` for `Z` in `p`.
    pub fn u_tensor(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_g(x)?;
        self.check_g(y)?;
        Ok(self.u_unchecked(x, y))
    }

    fn u_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        let m = self.p_dim();
        let (xp, yp) = (self.p_part(x), self.p_part(y));
        Vector::from_iterator(
            m,
            (0..m).map(|a| {
                let z = self.basis_vector(self.h_dim + a);
                let zx = self.p_part(&self.adapted.bracket_unchecked(&z, x));
                let zy = self.p_part(&self.adapted.bracket_unchecked(&z, y));
                0.5 * (zx.dot(&yp) + zy.dot(&xp))
            }),
        )
    }

    /// Covariant derivative at the base point of the Killing field generated
    /// by `y` along the one generated by `x`: `-[X, Y]_p / 2 + U(X, Y)`.
    pub fn nabla_at_o(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_g(x)?;
        self.check_g(y)?;
        Ok(self.nabla_unchecked(x, y))
    }

    fn nabla_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        self.p_part(&self.adapted.bracket_unchecked(x, y)) * -0.5 + self.u_unchecked(x, y)
    }

    /// Sectional curvature at the base point of the plane spanned by the
    /// orthonormal pair `(v, j)` in `p`.
    pub fn sectional_homogeneous(&self, v: &Vector, j: &Vector) -> Result<f64> {
        self.check_p(v)?;
        self.check_p(j)?;
        let residual = (v.norm_squared() - 1.0)
            .abs()
            .max((j.norm_squared() - 1.0).abs())
            .max(v.dot(j).abs());
        if residual > self.tol.alg {
            return Err(Error::NonOrthonormalPlane { residual });
        }
        Ok(self.curvature_term(&self.embed_p(v), &self.embed_p(j)))
    }

    /// The four-term curvature expression; quadratic in `j`, so it is also
    /// used unnormalized for polarization.
    fn curvature_term(&self, v: &Vector, j: &Vector) -> f64 {
        let alg = &self.adapted;
        let jv = alg.bracket_unchecked(j, v);
        let jv_p = self.p_part(&jv);
        let first = &jv_p * 0.5 + self.u_unchecked(v, j);
        let jp = self.p_part(j);
        let second = self.p_part(&alg.bracket_unchecked(&jv, v)).dot(&jp);
        let uvv = self.embed_p(&self.u_unchecked(v, v));
        let third = self.p_part(&alg.bracket_unchecked(j, &uvv)).dot(&jp);
        first.norm_squared() - second + third - jv_p.norm_squared()
    }

    /// Symmetric matrix on `p` of `Y -> K(v, Y) |Y|^2` for unit `v`
    /// (the expression is quadratic in `Y`).
    fn sectional_operator(&self, v: &Vector) -> Matrix {
        let m = self.p_dim();
        let ve = self.embed_p(v);
        let mut out = Matrix::zeros(m, m);
        let basis = |a: usize| self.basis_vector(self.h_dim + a);
        for a in 0..m {
            out[(a, a)] = self.curvature_term(&ve, &basis(a));
        }
        for a in 0..m {
            for b in (a + 1)..m {
                let both = self.curvature_term(&ve, &(basis(a) + basis(b)));
                let value = 0.5 * (both - out[(a, a)] - out[(b, b)]);
                out[(a, b)] = value;
                out[(b, a)] = value;
            }
        }
        out
    }

    /// Checks the parallelism criterion for a `G`-invariant field generated
    /// by `e` in `p_0` (`p` coordinates). Non-unimodular ambients are
    /// reported as skipped.
    pub fn verify_parallelism(&self, e: &Vector) -> Result<ParallelismOutcome> {
        self.check_p(e)?;
        let norm = e.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector("invariant field"));
        }
        let tol = self.tol;
        let (unimodular, trace_residual) = self.adapted.is_unimodular(tol.alg);
        if !unimodular {
            return Ok(ParallelismOutcome::Skipped {
                reason: format!("ambient algebra is not unimodular (largest |trace ad| = {trace_residual:e})"),
            });
        }
        let x = e / norm;
        let xe = self.embed_p(&x);
        let isotropy_residual = (0..self.h_dim)
            .map(|i| (self.isotropy_action(i) * &x).amax())
            .fold(0.0, f64::max);
        if isotropy_residual > tol.alg {
            return Err(Error::Precondition(format!(
                "field is not annihilated by ad(h) (residual {isotropy_residual:e})"
            )));
        }

        let m = self.p_dim();
        let frame = householder_completion(&x);
        let ys: Vec<Vector> = (1..m).map(|i| frame.column(i).into_owned()).collect();
        let bracket_p = |y: &Vector| self.p_part(&self.adapted.bracket_unchecked(&xe, &self.embed_p(y)));

        let sigma: Vec<f64> = ys.iter().map(|y| bracket_p(y).dot(&x)).collect();
        let a_op = Matrix::from_fn(m - 1, m - 1, |i, j| bracket_p(&ys[j]).dot(&ys[i]));
        let a_skew_residual = if m > 1 { (&a_op + a_op.transpose()).amax() } else { 0.0 };

        // nabla_Y E = nabla_E Y for the Killing field Y and invariant E
        let nabla_y_e = |y: &Vector| self.nabla_unchecked(&xe, &self.embed_p(y));
        let tangential = Matrix::from_fn(m - 1, m - 1, |i, j| nabla_y_e(&ys[j]).dot(&ys[i]));
        let w2_residual = if m > 1 { symmetric_part(&tangential).amax() } else { 0.0 };
        let w2 = w2_residual <= tol.alg;

        let k_full = self.sectional_operator(&x);
        let complement = Matrix::from_columns(&ys);
        let k_perp = if m > 1 { complement.transpose() * &k_full * &complement } else { Matrix::zeros(0, 0) };
        let (w1_worst, _) = linalg::lambda_max(&k_perp);
        let w1_worst = if w1_worst.is_finite() { w1_worst } else { 0.0 };
        let w1 = w1_worst <= tol.cert;

        let uee = self.u_unchecked(&xe, &xe);
        let uee_g = self.embed_p(&uee);
        let ad_u = |y: &Vector| self.p_part(&self.adapted.bracket_unchecked(&uee_g, &self.embed_p(y)));
        let sectional: Vec<f64> = (0..m - 1).map(|i| k_perp[(i, i)]).collect();
        let ricci: f64 = sectional.iter().sum();

        let curvature_identity_residual = w2.then(|| {
            ys.iter()
                .enumerate()
                .map(|(i, y)| {
                    let rhs = nabla_y_e(y).norm_squared() - sigma[i] * sigma[i] - ad_u(y).dot(y);
                    (sectional[i] - rhs).abs()
                })
                .fold(0.0, f64::max)
        });
        let trace_terms: f64 = ys.iter().map(|y| ad_u(y).dot(y)).sum::<f64>() + ad_u(&x).dot(&x);
        let sigma_sq: f64 = sigma.iter().map(|s| s * s).sum();
        let sigma_identity_residual = (ad_u(&x).dot(&x) - sigma_sq).abs();
        let u_reconstruction_residual = ys
            .iter()
            .zip(&sigma)
            .fold(uee.clone(), |acc, (y, s)| acc + y * *s)
            .amax();

        let conclusion = (w1 && w2).then(|| {
            let nabla_max = (0..m)
                .map(|a| {
                    let mut y = Vector::zeros(m);
                    y[a] = 1.0;
                    nabla_y_e(&y).norm()
                })
                .fold(0.0, f64::max);
            let sigma_max = sigma.iter().fold(0.0_f64, |acc, s| acc.max(s.abs()));
            let curvature_max = if m > 1 { k_perp.amax() } else { 0.0 };
            let bound = tol.cert;
            ParallelismConclusion {
                max_nabla: nabla_max,
                max_sigma: sigma_max,
                max_curvature: curvature_max,
                holds: nabla_max <= bound && sigma_max <= bound && curvature_max <= bound,
                tolerance: bound,
            }
        });

        Ok(ParallelismOutcome::Verified(Box::new(ParallelismReport {
            w1,
            w1_worst,
            w2,
            w2_residual,
            a_skew_residual,
            sigma,
            sectional,
            ricci,
            curvature_identity_residual,
            trace_residual: trace_terms.abs(),
            sigma_identity_residual,
            u_reconstruction_residual,
            conclusion,
            tolerances: tol,
        })))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ParallelismOutcome {
    Skipped { reason: String },
    Verified(Box<ParallelismReport>),
}

impl ParallelismOutcome {
    pub fn report(&self) -> Option<&ParallelismReport> {
        match self {
            Self::Verified(r) => Some(r),
            Self::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelismReport {
    /// `K(E, Y) <= 0` for `Y` orthogonal to `E`, judged against `tol_cert`.
    pub w1: bool,
    pub w1_worst: f64,
    /// `<nabla_Y E, Y> = 0` for `Y` orthogonal to `E`, judged against `tol_alg`.
    pub w2: bool,
    pub w2_residual: f64,
    /// `|A + A^T|` for `A` the compression of `ad_E` to `E^perp`; zero exactly
    /// when the tangential condition holds.
    pub a_skew_residual: f64,
    /// `sigma(Y_i) = <[E, Y_i]_p, E>` on the completion basis of `E^perp`.
    pub sigma: Vec<f64>,
    pub sectional: Vec<f64>,
    pub ricci: f64,
    /// `|K(E, Y) - (|nabla_Y E|^2 - sigma(Y)^2 - <[U(E, E), Y]_p, Y>)|`,
    /// evaluated only when the tangential condition holds.
    pub curvature_identity_residual: Option<f64>,
    /// `|trace of ad U(E, E) on p|`.
    pub trace_residual: f64,
    /// `|<[U(E, E), E]_p, E> - sum sigma(Y_i)^2|`.
    pub sigma_identity_residual: f64,
    /// `|U(E, E) + sum sigma(Y_i) Y_i|`.
    pub u_reconstruction_residual: f64,
    /// Present when both conditions hold.
    pub conclusion: Option<ParallelismConclusion>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParallelismConclusion {
    pub max_nabla: f64,
    pub max_sigma: f64,
    pub max_curvature: f64,
    pub holds: bool,
    pub tolerance: f64,
}
