//! The curvature form on the exterior square.
//!
//! Bivectors are indexed by lexicographic pairs `(i, j)`, `i < j`; the
//! coordinates of `X ^ Y` are the Plücker coordinates
//! `m_ij = x_i y_j - x_j y_i`.

use super::{Plane, WeylStructure};
use crate::linalg::{self, symmetric_part};
use crate::{Matrix, Vector};

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// Position of `(i, j)`, `i < j`, in the lexicographic pair order.
pub fn pair_index(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn plucker(x: &Vector, y: &Vector) -> Vector {
    let n = x.len();
    Vector::from_iterator(n * n.saturating_sub(1) / 2, pairs(n).into_iter().map(|(i, j)| x[i] * y[j] - x[j] * y[i]))
}

/// Symmetric quadratic form on bivectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BivectorForm {
    n: usize,
    q: Matrix,
}

impl BivectorForm {
    pub fn new(n: usize, q: Matrix) -> Self {
        debug_assert_eq!(q.nrows(), n * (n - 1) / 2);
        Self { n, q: symmetric_part(&q) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    pub fn evaluate(&self, bivector: &Vector) -> f64 {
        bivector.dot(&(&self.q * bivector))
    }

    pub fn evaluate_plane(&self, plane: &Plane) -> f64 {
        self.evaluate(&plane.plucker())
    }

    pub fn lambda_max(&self) -> (f64, Vector) {
        linalg::lambda_max(&self.q)
    }

    /// `Q m` reshaped as a skew matrix, used for gradients.
    pub(crate) fn skew_action(&self, bivector: &Vector) -> Matrix {
        let s = &self.q * bivector;
        to_skew(self.n, &s)
    }
}

pub(crate) fn to_skew(n: usize, b: &Vector) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for (p, (i, j)) in pairs(n).into_iter().enumerate() {
        m[(i, j)] = b[p];
        m[(j, i)] = -b[p];
    }
    m
}

/// `Q = Q_R - Q_div - Q_perp`: the Riemann form, the partial-divergence form
/// `D ^ I` of the symmetrized `Y -> nabla_Y (gamma E)`, and the form
/// `|gamma E ^ beta|^2` through the wedge map into the third exterior power.
pub fn weyl_form(w: &WeylStructure) -> BivectorForm {
    let n = w.dim();
    let lc = w.levi_civita_connection();
    let riemann = lc.riemann_tensor();
    let e = w.effective_field();
    let d = symmetric_part(&lc.nabla_field(&e));
    let ps = pairs(n);
    let big = ps.len();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };

    let mut q = Matrix::zeros(big, big);
    for (p, &(i, j)) in ps.iter().enumerate() {
        for (r, &(k, l)) in ps.iter().enumerate() {
            let curv = riemann.get(i, j, l, k);
            let div = d[(i, k)] * delta(j, l) - d[(j, k)] * delta(i, l) + delta(i, k) * d[(j, l)]
                - delta(j, k) * d[(i, l)];
            q[(p, r)] = curv - div;
        }
    }

    // wedge with gamma E: Lambda^2 -> Lambda^3
    let triples: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).flat_map(move |b| ((b + 1)..n).map(move |c| (a, b, c))))
        .collect();
    if !triples.is_empty() {
        let index_of = |a: usize, b: usize, c: usize| triples.iter().position(|&t| t == (a, b, c)).unwrap();
        let mut t = Matrix::zeros(triples.len(), big);
        for (p, &(i, j)) in ps.iter().enumerate() {
            for k in 0..n {
                if k == i || k == j || e[k] == 0.0 {
                    continue;
                }
                // e_k ^ e_i ^ e_j with i < j: sort k into place
                let (sorted, sign) = if k < i {
                    ((k, i, j), 1.0)
                } else if k < j {
                    ((i, k, j), -1.0)
                } else {
                    ((i, j, k), 1.0)
                };
                t[(index_of(sorted.0, sorted.1, sorted.2), p)] += sign * e[k];
            }
        }
        q -= t.transpose() * t;
    }
    BivectorForm::new(n, q)
}
