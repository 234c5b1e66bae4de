//! Levi-Civita connection of a left-invariant metric.
//!
//! For left-invariant fields in an orthonormal frame the Koszul formula is
//! purely algebraic:
//! `<nabla_X Y, Z> = 1/2 (<[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>)`.
//! Curvature follows `R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]`
//! and the sectional curvature of an orthonormal pair is `<R(Y,X)X, Y>`.

use crate::linalg::{self, max_abs};
use crate::weyl::Plane;
use crate::{Error, Matrix, MetricLieAlgebra, Result, Vector};

/// Christoffel table `gamma[i][j][k] = <nabla_{e_i} e_j, e_k>` in the frame.
#[derive(Debug, Clone)]
pub struct LeviCivita<'a> {
    space: &'a MetricLieAlgebra,
    gamma: Vec<f64>,
}

impl<'a> LeviCivita<'a> {
    pub fn new(space: &'a MetricLieAlgebra) -> Self {
        let n = space.dim();
        let mut gamma = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma[(i * n + j) * n + k] =
                        0.5 * (space.c(i, j, k) - space.c(j, k, i) + space.c(k, i, j));
                }
            }
        }
        Self { space, gamma }
    }

    pub fn space(&self) -> &MetricLieAlgebra {
        self.space
    }

    #[inline]
    pub fn christoffel(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.space.dim();
        self.gamma[(i * n + j) * n + k]
    }

    pub fn nabla(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.space.check_len(x)?;
        self.space.check_len(y)?;
        Ok(self.nabla_unchecked(x, y))
    }

    pub(crate) fn nabla_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.space.dim();
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.christoffel(i, j, k);
                }
            }
        }
        out
    }

    /// `R(X,Y)Z`.
    pub fn curvature(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector> {
        self.space.check_len(x)?;
        self.space.check_len(y)?;
        self.space.check_len(z)?;
        Ok(self.curvature_unchecked(x, y, z))
    }

    pub(crate) fn curvature_unchecked(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let xyz = self.nabla_unchecked(x, &self.nabla_unchecked(y, z));
        let yxz = self.nabla_unchecked(y, &self.nabla_unchecked(x, z));
        let bracket = self.space.algebra().bracket_unchecked(x, y);
        xyz - yxz - self.nabla_unchecked(&bracket, z)
    }

    /// Dense tensor `r[a][b][c][d] = <R(e_a, e_b) e_c, e_d>`.
    pub fn riemann_tensor(&self) -> RiemannTensor {
        let n = self.space.dim();
        let mut r = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = 0.0;
                        for k in 0..n {
                            s += self.christoffel(b, c, k) * self.christoffel(a, k, d)
                                - self.christoffel(a, c, k) * self.christoffel(b, k, d)
                                - self.space.c(a, b, k) * self.christoffel(k, c, d);
                        }
                        r[((a * n + b) * n + c) * n + d] = s;
                    }
                }
            }
        }
        RiemannTensor { n, r }
    }

    pub fn sectional(&self, plane: &Plane) -> Result<f64> {
        plane.check(self.space.dim(), self.space.tolerances().alg)?;
        Ok(self.sectional_unchecked(plane.x(), plane.y()))
    }

    pub(crate) fn sectional_unchecked(&self, x: &Vector, y: &Vector) -> f64 {
        self.curvature_unchecked(y, x, x).dot(y)
    }

    /// Ricci curvature in the unit direction `x`, summed over the Householder
    /// completion of `x`.
    pub fn ricci(&self, x: &Vector) -> Result<f64> {
        self.space.check_len(x)?;
        let norm = x.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector("ricci direction"));
        }
        if (norm - 1.0).abs() > self.space.tolerances().alg {
            return Err(Error::Precondition(format!("ricci direction must be unit, |X| = {norm}")));
        }
        let basis = linalg::householder_completion(&(x / norm));
        let x = basis.column(0).into_owned();
        Ok((1..basis.ncols())
            .map(|i| self.sectional_unchecked(&x, &basis.column(i).into_owned()))
            .sum())
    }

    /// Matrix of `Y -> nabla_Y E`.
    pub fn nabla_field(&self, e: &Vector) -> Matrix {
        let n = self.space.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.nabla_unchecked(&self.space.basis_vector(j), e);
            m.set_column(j, &col);
        }
        m
    }

    /// Symmetric matrix of `Y -> <R(Y, X) X, Y>` for a fixed `x`.
    pub fn sectional_operator(&self, x: &Vector) -> Matrix {
        let n = self.space.dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            let ei = self.space.basis_vector(i);
            let col = self.curvature_unchecked(&ei, x, x);
            m.set_column(i, &col);
        }
        // m[(k, i)] = <R(e_i, x) x, e_k>, symmetric by pair symmetry
        linalg::symmetric_part(&m)
    }

    pub fn classify_field(&self, e: &Vector) -> Result<FieldClassification> {
        self.space.check_len(e)?;
        if e.norm() == 0.0 {
            return Err(Error::ZeroVector("classified field"));
        }
        let tol = self.space.tolerances();
        let ad = self.space.algebra().ad_unchecked(e);
        let killing_residual = max_abs(&(&ad + ad.transpose()));
        let commutator = self.space.commutator_subalgebra();
        let closed_residual = if commutator.ncols() == 0 {
            0.0
        } else {
            (commutator.transpose() * e).amax()
        };
        let is_killing = killing_residual <= tol.alg;
        let is_closed_form = closed_residual <= tol.alg;
        Ok(FieldClassification {
            is_killing,
            is_parallel: is_killing && is_closed_form,
            is_closed_form,
            killing_residual,
            closed_residual,
            nabla_e: self.nabla_field(e),
        })
    }

    /// `div E = -trace(ad_E)`.
    pub fn divergence(&self, e: &Vector) -> Result<f64> {
        self.space.check_len(e)?;
        Ok(-self.space.algebra().ad_unchecked(e).trace())
    }

    /// `sum_i <nabla_{e_i} E, e_i>`, the Koszul route to the divergence.
    pub fn divergence_koszul(&self, e: &Vector) -> Result<f64> {
        self.space.check_len(e)?;
        Ok(self.nabla_field(e).trace())
    }

    /// For a parallel field, checks that `R(X, E) = 0` on every basis pair.
    pub fn check_parallel_consequence(&self, e: &Vector) -> Result<ParallelConsequence> {
        let class = self.classify_field(e)?;
        if !class.is_parallel {
            return Err(Error::Precondition(format!(
                "field is not parallel (killing residual {:e}, commutator residual {:e})",
                class.killing_residual, class.closed_residual
            )));
        }
        let n = self.space.dim();
        let mut residual = 0.0_f64;
        for i in 0..n {
            let ei = self.space.basis_vector(i);
            for j in 0..n {
                let ej = self.space.basis_vector(j);
                residual = residual.max(self.curvature_unchecked(&ei, e, &ej).amax());
            }
        }
        residual = residual.max(class.nabla_e.amax());
        Ok(ParallelConsequence {
            holds: residual <= self.space.tolerances().alg,
            residual,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RiemannTensor {
    n: usize,
    r: Vec<f64>,
}

impl RiemannTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        self.r[((a * n + b) * n + c) * n + d]
    }
}

#[derive(Debug, Clone)]
pub struct FieldClassification {
    pub is_killing: bool,
    pub is_parallel: bool,
    pub is_closed_form: bool,
    /// `max |ad_E + ad_E^T|`
    pub killing_residual: f64,
    /// largest component of `E` along `[g, g]`
    pub closed_residual: f64,
    /// column `j` is `nabla_{e_j} E`
    pub nabla_e: Matrix,
}

#[derive(Debug, Clone, Copy)]
pub struct ParallelConsequence {
    pub holds: bool,
    pub residual: f64,
}

pub fn nabla(a: &MetricLieAlgebra, x: &Vector, y: &Vector) -> Result<Vector> {
    LeviCivita::new(a).nabla(x, y)
}

pub fn curvature(a: &MetricLieAlgebra, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector> {
    LeviCivita::new(a).curvature(x, y, z)
}

pub fn sectional(a: &MetricLieAlgebra, plane: &Plane) -> Result<f64> {
    LeviCivita::new(a).sectional(plane)
}

pub fn ricci(a: &MetricLieAlgebra, x: &Vector) -> Result<f64> {
    LeviCivita::new(a).ricci(x)
}

pub fn classify_field(a: &MetricLieAlgebra, e: &Vector) -> Result<FieldClassification> {
    LeviCivita::new(a).classify_field(e)
}

pub fn divergence(a: &MetricLieAlgebra, e: &Vector) -> Result<f64> {
    LeviCivita::new(a).divergence(e)
}

pub fn check_parallel_consequence(a: &MetricLieAlgebra, e: &Vector) -> Result<ParallelConsequence> {
    LeviCivita::new(a).check_parallel_consequence(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{self, MilnorTriple, SolvableFamily};
    use crate::LieAlgebra;

    fn e(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn plane(x: Vector, y: Vector) -> Plane {
        Plane::new(x, y, 1e-12).unwrap()
    }

    #[test]
    fn abelian_is_flat() {
        let a = MetricLieAlgebra::orthonormal(LieAlgebra::abelian(3));
        let lc = LeviCivita::new(&a);
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(lc.nabla(&x, &x).unwrap(), Vector::zeros(3));
        assert_eq!(lc.sectional(&plane(e(3, 0), e(3, 1))).unwrap(), 0.0);
        assert_eq!(lc.ricci(&e(3, 2)).unwrap(), 0.0);
        let c = lc.classify_field(&x).unwrap();
        assert!(c.is_parallel && c.is_killing && c.is_closed_form);
        assert!(lc.check_parallel_consequence(&x).unwrap().holds);
    }

    #[test]
    fn solvable_covariant_derivatives() {
        let mu = [1.0, 2.0, 3.0];
        let a = families::solvable(&SolvableFamily::new(mu.to_vec()));
        let lc = LeviCivita::new(&a);
        let b = e(4, 0);
        assert!(lc.nabla(&b, &b).unwrap().norm() < 1e-15);
        for i in 1..4 {
            let u = e(4, i);
            // nabla_u b = -L u
            assert!((lc.nabla(&u, &b).unwrap() + &u * mu[i - 1]).norm() < 1e-15);
            for j in 1..4 {
                let v = e(4, j);
                let expected = if i == j { &b * mu[i - 1] } else { Vector::zeros(4) };
                assert!((lc.nabla(&u, &v).unwrap() - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn milnor_so3_nabla() {
        let a = families::milnor(MilnorTriple::new(1.0, 1.0, 1.0));
        let got = nabla(&a, &e(3, 0), &e(3, 1)).unwrap();
        assert!((got - e(3, 2) * 0.5).norm() < 1e-15);
    }

    #[test]
    fn solvable_sectional_values() {
        let hyp = families::solvable(&SolvableFamily::new(vec![1.0, 1.0]));
        assert!((sectional(&hyp, &plane(e(3, 0), e(3, 1))).unwrap() + 1.0).abs() < 1e-14);
        let sol = families::solvable(&SolvableFamily::new(vec![1.0, -1.0]));
        assert!((sectional(&sol, &plane(e(3, 1), e(3, 2))).unwrap() - 1.0).abs() < 1e-14);
        assert!((ricci(&sol, &e(3, 0)).unwrap() + 2.0).abs() < 1e-14);
        let h4 = families::hyperbolic(3);
        let x = Vector::from_vec(vec![0.5, -0.5, 0.5, 0.5]);
        assert!((ricci(&h4, &x).unwrap() + 3.0).abs() < 1e-13);
    }

    #[test]
    fn divergence_examples() {
        let a = families::solvable(&SolvableFamily::new(vec![1.0, 2.0, 3.0]));
        assert!((divergence(&a, &e(4, 0)).unwrap() + 6.0).abs() < 1e-15);
        assert_eq!(divergence(&a, &e(4, 1)).unwrap(), 0.0);
        let lc = LeviCivita::new(&a);
        assert!((lc.divergence_koszul(&e(4, 0)).unwrap() + 6.0).abs() < 1e-15);
        let m = families::milnor(MilnorTriple::new(2.0, -1.0, 0.5));
        assert_eq!(divergence(&m, &Vector::from_vec(vec![1.0, 2.0, 3.0])).unwrap(), 0.0);
    }

    #[test]
    fn classification_examples() {
        let flat = families::milnor(MilnorTriple::new(0.7, 0.7, 0.0));
        let c = classify_field(&flat, &e(3, 2)).unwrap();
        assert!(c.is_killing && c.is_parallel);
        assert!(check_parallel_consequence(&flat, &e(3, 2)).unwrap().holds);

        let hyp = families::hyperbolic(3);
        assert!(!classify_field(&hyp, &e(4, 1)).unwrap().is_killing);

        let sol = families::solvable(&SolvableFamily::new(vec![1.0, -1.0]));
        let c = classify_field(&sol, &e(3, 0)).unwrap();
        assert!(!c.is_killing && !c.is_parallel);
        assert!(matches!(
            check_parallel_consequence(&sol, &e(3, 0)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(classify_field(&sol, &Vector::zeros(3)), Err(Error::ZeroVector(_))));
    }

    #[test]
    fn ricci_rejects_zero_and_non_unit() {
        let a = families::hyperbolic(2);
        assert!(matches!(ricci(&a, &Vector::zeros(3)), Err(Error::ZeroVector(_))));
        assert!(matches!(ricci(&a, &(e(3, 0) * 2.0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn riemann_table_matches_vector_route() {
        let a = families::milnor(MilnorTriple::new(1.0, -0.5, 2.0));
        let lc = LeviCivita::new(&a);
        let r = lc.riemann_tensor();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let v = lc.curvature(&e(3, i), &e(3, j), &e(3, k)).unwrap();
                    for l in 0..3 {
                        assert!((r.get(i, j, k, l) - v[l]).abs() < 1e-14);
                    }
                }
            }
        }
    }
}
