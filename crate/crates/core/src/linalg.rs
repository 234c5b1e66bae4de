//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{SymmetricEigen, SVD};

use crate::{Matrix, Vector};

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn symmetric_part(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition with eigenvalues sorted ascending, eigenvectors as
/// matching columns.
pub fn sorted_symmetric_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetric_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Largest eigenvalue of a symmetric matrix together with a unit eigenvector.
/// Returns `(-inf, empty)` for a 0x0 matrix.
pub fn lambda_max(m: &Matrix) -> (f64, Vector) {
    let (values, vectors) = sorted_symmetric_eigen(m);
    match values.last() {
        Some(&v) => (v, vectors.column(values.len() - 1).into_owned()),
        None => (f64::NEG_INFINITY, Vector::zeros(0)),
    }
}

/// Smallest eigenvalue of a symmetric matrix (`+inf` for 0x0).
pub fn lambda_min(m: &Matrix) -> f64 {
    let (values, _) = sorted_symmetric_eigen(m);
    values.first().copied().unwrap_or(f64::INFINITY)
}

/// Orthonormal basis of the column space, singular values above `tol`.
pub fn range_basis(m: &Matrix, tol: f64) -> Matrix {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return Matrix::zeros(n, 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    let mut out = Matrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &u.column(i));
    }
    out
}

/// Orthonormal basis of the kernel of `m` (columns), singular values at or
/// below `tol` counted as zero.
pub fn null_space(m: &Matrix, tol: f64) -> Matrix {
    let n = m.ncols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let rows = m.nrows().max(n);
    let mut padded = Matrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..n)
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    let mut out = Matrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &v_t.row(i).transpose());
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the span of the columns
/// of `basis` in R^n.
pub fn orthogonal_complement(basis: &Matrix, n: usize, tol: f64) -> Matrix {
    if basis.ncols() == 0 {
        return Matrix::identity(n, n);
    }
    null_space(&basis.transpose(), tol)
}

/// Householder completion: an orthogonal matrix whose first column is the
/// unit vector `x`. Deterministic in `x`.
pub fn householder_completion(x: &Vector) -> Matrix {
    let n = x.len();
    let mut e1 = Vector::zeros(n);
    e1[0] = 1.0;
    if x[0] <= 0.0 {
        // H e1 = x with w = e1 - x
        let w = &e1 - x;
        let ww = w.dot(&w);
        if ww == 0.0 {
            return Matrix::identity(n, n);
        }
        Matrix::identity(n, n) - (&w * w.transpose()) * (2.0 / ww)
    } else {
        // H e1 = -x with w = e1 + x, then flip the first column
        let w = &e1 + x;
        let ww = w.dot(&w);
        let mut h = Matrix::identity(n, n) - (&w * w.transpose()) * (2.0 / ww);
        let first = -h.column(0);
        h.set_column(0, &first);
        h
    }
}

/// QR re-orthonormalization of the columns of `f`, with the sign convention
/// that the triangular factor has a non-negative diagonal.
pub fn qr_retract(f: &Matrix) -> Matrix {
    let qr = f.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    q
}

/// Column-wise Gram-Schmidt of two vectors. Returns `None` when they are
/// (numerically) dependent.
pub fn orthonormal_pair(a: &Vector, b: &Vector) -> Option<(Vector, Vector)> {
    let na = a.norm();
    if na < 1e-14 {
        return None;
    }
    let x = a / na;
    let mut y = b - &x * x.dot(b);
    // second pass for accuracy
    y -= &x * x.dot(&y);
    let ny = y.norm();
    if ny < 1e-12 * b.norm().max(1.0) {
        return None;
    }
    Some((x, y / ny))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn householder_first_column_and_orthogonality() {
        for x in [
            Vector::from_vec(vec![1.0, 0.0, 0.0]),
            Vector::from_vec(vec![-1.0, 0.0, 0.0]),
            Vector::from_vec(vec![0.6, 0.0, 0.8]),
            Vector::from_vec(vec![-0.36, 0.48, 0.8]),
        ] {
            let h = householder_completion(&x);
            assert!((h.column(0) - &x).norm() < 1e-14);
            let err = &h.transpose() * &h - Matrix::identity(3, 3);
            assert!(max_abs(&err) < 1e-14);
        }
    }

    #[test]
    fn null_space_of_wide_and_tall() {
        let m = Matrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&m, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
        let tall = Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(null_space(&tall, 1e-9).ncols(), 0);
    }

    #[test]
    fn range_drops_dependent_columns() {
        let m = Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0]);
        assert_eq!(range_basis(&m, 1e-9).ncols(), 1);
    }

    #[test]
    fn qr_retract_keeps_orientation() {
        let f = Matrix::from_row_slice(3, 2, &[2.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let q = qr_retract(&f);
        assert!((q[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((q[(1, 1)] - 1.0).abs() < 1e-14);
    }
}
