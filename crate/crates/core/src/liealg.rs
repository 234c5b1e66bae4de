//! Finite-dimensional real Lie algebras with an inner product.
//!
//! Structure constants are stored densely: `c[i][j][k]` is the `e_k`
//! coefficient of `[e_i, e_j]`. A [`MetricLieAlgebra`] caches an orthonormal
//! frame (upper-triangular, from the Cholesky factor of the Gram matrix) and
//! the constants re-expressed in it; all curvature code runs in that frame.

use nalgebra::Cholesky;

use crate::linalg::{self, max_abs};
use crate::{Error, Matrix, Result, Tolerances, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    n: usize,
    c: Vec<f64>,
}

impl LieAlgebra {
    /// Builds an algebra from a dense `n^3` tensor in `c[i][j][k]` order,
    /// rejecting non-antisymmetric tables and Jacobi residuals above
    /// `tol_alg`.
    pub fn new(n: usize, c: Vec<f64>, tol_alg: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        if c.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: c.len(),
            });
        }
        let alg = Self { n, c };
        alg.check_antisymmetry()?;
        alg.check_jacobi(tol_alg)?;
        Ok(alg)
    }

    /// Builds an algebra from sparse entries `(i, j, k, value)`. An entry
    /// fixes both `c[i][j][k]` and `c[j][i][k] = -value`; listing the mirror
    /// with an inconsistent value is an antisymmetry error.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, f64)], tol_alg: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooSmall { min: 1, found: 0 });
        }
        let mut c = vec![0.0; n * n * n];
        let mut explicit = vec![false; n * n * n];
        for &(i, j, k, value) in entries {
            for idx in [i, j, k] {
                if idx >= n {
                    return Err(Error::DimensionMismatch { expected: n, found: idx + 1 });
                }
            }
            let at = (i * n + j) * n + k;
            let mirror = (j * n + i) * n + k;
            if i == j {
                if value != 0.0 {
                    return Err(Error::NotAntisymmetric { i, j, k, value, mirror: value });
                }
                continue;
            }
            if explicit[mirror] && c[mirror] != -value {
                return Err(Error::NotAntisymmetric {
                    i,
                    j,
                    k,
                    value,
                    mirror: c[mirror],
                });
            }
            if explicit[at] && c[at] != value {
                return Err(Error::NotAntisymmetric {
                    i,
                    j,
                    k,
                    value,
                    mirror: c[at],
                });
            }
            c[at] = value;
            c[mirror] = -value;
            explicit[at] = true;
            explicit[mirror] = true;
        }
        Self::new(n, c, tol_alg)
    }

    pub fn abelian(n: usize) -> Self {
        Self { n, c: vec![0.0; n * n * n] }
    }

    pub(crate) fn from_raw(n: usize, c: Vec<f64>) -> Self {
        debug_assert_eq!(c.len(), n * n * n);
        Self { n, c }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.n + j) * self.n + k]
    }

    pub fn constants(&self) -> &[f64] {
        &self.c
    }

    /// Non-zero entries with `i < j`, in lexicographic order.
    pub fn sparse_entries(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.c(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b) = (self.c(i, j, k), self.c(j, i, k));
                    if a != -b {
                        return Err(Error::NotAntisymmetric { i, j, k, value: a, mirror: b });
                    }
                }
            }
        }
        Ok(())
    }

    /// `max |sum_m c_ijm c_mkl + c_jkm c_mil + c_kim c_mjl|` over all indices.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.c(i, j, m) * self.c(m, k, l)
                                + self.c(j, k, m) * self.c(m, i, l)
                                + self.c(k, i, m) * self.c(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    fn check_jacobi(&self, tol: f64) -> Result<()> {
        let residual = self.jacobi_residual();
        if residual > tol {
            return Err(Error::JacobiViolation { residual, tolerance: tol });
        }
        Ok(())
    }

    fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        Ok(())
    }

    pub fn bracket(&self, u: &Vector, v: &Vector) -> Result<Vector> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.bracket_unchecked(u, v))
    }

    pub(crate) fn bracket_unchecked(&self, u: &Vector, v: &Vector) -> Vector {
        let n = self.n;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = u[i] * v[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.c(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `v -> [u, v]`.
    pub fn ad(&self, u: &Vector) -> Result<Matrix> {
        self.check_len(u)?;
        Ok(self.ad_unchecked(u))
    }

    pub(crate) fn ad_unchecked(&self, u: &Vector) -> Matrix {
        let n = self.n;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += u[i] * self.c(i, j, k);
                }
            }
        }
        m
    }

    /// `trace(ad(e_i)) = sum_j c[i][j][j]`.
    pub fn trace_ad_basis(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self.c(i, j, j)).sum()
    }

    /// Returns whether every `|trace(ad(e_i))| <= tol`, and the worst trace.
    pub fn is_unimodular(&self, tol: f64) -> (bool, f64) {
        let residual = (0..self.n)
            .map(|i| self.trace_ad_basis(i).abs())
            .fold(0.0, f64::max);
        (residual <= tol, residual)
    }

    /// Orthonormal basis (columns) of `span{[e_i, e_j]}`.
    pub fn commutator_subalgebra(&self, tol_rank: f64) -> Matrix {
        let n = self.n;
        let mut cols = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                cols.push(Vector::from_iterator(n, (0..n).map(|k| self.c(i, j, k))));
            }
        }
        if cols.is_empty() {
            return Matrix::zeros(n, 0);
        }
        linalg::range_basis(&Matrix::from_columns(&cols), tol_rank)
    }

    /// Constants in the basis `f_a = sum_i basis[(i, a)] e_i`.
    pub fn change_basis(&self, basis: &Matrix, basis_inv: &Matrix) -> LieAlgebra {
        let n = self.n;
        // first contract the output index, then the two inputs
        let mut tmp = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += self.c(i, j, k) * basis_inv[(c, k)];
                    }
                    tmp[(i * n + j) * n + c] = s;
                }
            }
        }
        let mut tmp2 = vec![0.0; n * n * n];
        for a in 0..n {
            for j in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += basis[(i, a)] * tmp[(i * n + j) * n + c];
                    }
                    tmp2[(a * n + j) * n + c] = s;
                }
            }
        }
        let mut out = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = 0.0;
                    for j in 0..n {
                        s += basis[(j, b)] * tmp2[(a * n + j) * n + c];
                    }
                    out[(a * n + b) * n + c] = s;
                }
            }
        }
        // restore exact antisymmetry lost to rounding
        for a in 0..n {
            for b in a..n {
                for c in 0..n {
                    let ab = (a * n + b) * n + c;
                    let ba = (b * n + a) * n + c;
                    let avg = 0.5 * (out[ab] - out[ba]);
                    out[ab] = avg;
                    out[ba] = -avg;
                }
            }
        }
        LieAlgebra { n, c: out }
    }
}

/// Gram matrix of the basis. Symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    g: Matrix,
}

impl Metric {
    pub fn new(g: Matrix, tol_pd: f64) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(Error::DimensionMismatch { expected: g.nrows(), found: g.ncols() });
        }
        let scale = max_abs(&g).max(1.0);
        let residual = max_abs(&(&g - g.transpose()));
        if residual > 1e-12 * scale {
            return Err(Error::NotSymmetric { residual });
        }
        let g = linalg::symmetric_part(&g);
        let min_eigenvalue = linalg::lambda_min(&g);
        if !(min_eigenvalue > tol_pd) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self { g })
    }

    pub fn identity(n: usize) -> Self {
        Self { g: Matrix::identity(n, n) }
    }

    pub fn gram(&self) -> &Matrix {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn is_identity(&self) -> bool {
        self.g == Matrix::identity(self.dim(), self.dim())
    }
}

/// A Lie algebra with an inner product, together with the cached orthonormal
/// frame and the structure constants in that frame.
#[derive(Debug, Clone)]
pub struct MetricLieAlgebra {
    algebra: LieAlgebra,
    metric: Metric,
    frame: Matrix,
    frame_inv: Matrix,
    on: LieAlgebra,
    tol: Tolerances,
}

/// Orthonormalizes `metric` by its Cholesky factor and re-expresses the
/// constants of `algebra` in the resulting frame.
pub fn orthonormalize(algebra: LieAlgebra, metric: Metric, tol: Tolerances) -> Result<MetricLieAlgebra> {
    let n = algebra.dim();
    if metric.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: metric.dim() });
    }
    algebra.check_jacobi(tol.alg)?;
    let (frame, frame_inv) = if metric.is_identity() {
        (Matrix::identity(n, n), Matrix::identity(n, n))
    } else {
        let chol = Cholesky::new(metric.gram().clone()).ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: linalg::lambda_min(metric.gram()),
        })?;
        let l = chol.l();
        // frame = L^{-T}, frame^{-1} = L^T
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue: 0.0 })?;
        (l_inv.transpose(), l.transpose())
    };
    let on = if metric.is_identity() {
        algebra.clone()
    } else {
        algebra.change_basis(&frame, &frame_inv)
    };
    on.check_antisymmetry()?;
    on.check_jacobi(tol.alg)?;
    Ok(MetricLieAlgebra { algebra, metric, frame, frame_inv, on, tol })
}

impl MetricLieAlgebra {
    /// Algebra whose given basis is already orthonormal.
    pub fn orthonormal(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        Self {
            on: algebra.clone(),
            algebra,
            metric: Metric::identity(n),
            frame: Matrix::identity(n, n),
            frame_inv: Matrix::identity(n, n),
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.on.dim()
    }

    /// Algebra in the user basis.
    pub fn user_algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// Algebra in the orthonormal frame.
    pub fn algebra(&self) -> &LieAlgebra {
        &self.on
    }

    /// Columns are the orthonormal frame vectors in user coordinates.
    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.on.c(i, j, k)
    }

    /// User coordinates to frame coordinates.
    pub fn to_frame(&self, user: &Vector) -> Result<Vector> {
        self.check_len(user)?;
        Ok(&self.frame_inv * user)
    }

    /// Frame coordinates to user coordinates.
    pub fn from_frame(&self, v: &Vector) -> Result<Vector> {
        self.check_len(v)?;
        Ok(&self.frame * v)
    }

    pub(crate) fn check_len(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    pub fn bracket(&self, u: &Vector, v: &Vector) -> Result<Vector> {
        self.on.bracket(u, v)
    }

    pub fn ad(&self, u: &Vector) -> Result<Matrix> {
        self.on.ad(u)
    }

    pub fn is_unimodular(&self) -> (bool, f64) {
        self.on.is_unimodular(self.tol.alg)
    }

    pub fn commutator_subalgebra(&self) -> Matrix {
        self.on.commutator_subalgebra(self.tol.rank)
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// Re-runs [`orthonormalize`] on the frame-expressed structure.
    pub fn reorthonormalize(&self) -> Result<MetricLieAlgebra> {
        orthonormalize(self.on.clone(), Metric::identity(self.dim()), self.tol)
    }
}
