#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weylcurv::families::{self, MilnorTriple, SolvableFamily};
use weylcurv::liealg::orthonormalize;
use weylcurv::{Matrix, Metric, MetricLieAlgebra, Plane, Tolerances, Vector, WeylStructure};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn e(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

pub fn uniform(rng: &mut TestRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn random_vector(rng: &mut TestRng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_unit(rng: &mut TestRng, n: usize) -> Vector {
    loop {
        let v = random_vector(rng, n);
        if v.norm() > 0.1 {
            return v.normalize();
        }
    }
}

pub fn random_orthonormal_pair(rng: &mut TestRng, n: usize) -> (Vector, Vector) {
    loop {
        let x = random_unit(rng, n);
        let y = random_vector(rng, n);
        let y = &y - &x * x.dot(&y);
        if y.norm() > 0.1 {
            return (x, y.normalize());
        }
    }
}

pub fn random_plane(rng: &mut TestRng, n: usize) -> Plane {
    let (x, y) = random_orthonormal_pair(rng, n);
    Plane::new(x, y, 1e-12).unwrap()
}

/// Unit vector orthogonal to `axis` (unit).
pub fn random_unit_orthogonal(rng: &mut TestRng, axis: &Vector) -> Vector {
    loop {
        let v = random_vector(rng, axis.len());
        let v = &v - axis * axis.dot(&v);
        if v.norm() > 0.1 {
            return v.normalize();
        }
    }
}

pub fn random_spd(rng: &mut TestRng, n: usize) -> Matrix {
    let a = Matrix::from_fn(n, n, |_, _| rng.random_range(-0.5..0.5));
    &a * a.transpose() + Matrix::identity(n, n) * 0.5
}

pub fn random_milnor(rng: &mut TestRng) -> MetricLieAlgebra {
    families::milnor(MilnorTriple::new(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)))
}

pub fn random_solvable(rng: &mut TestRng, rank: usize) -> MetricLieAlgebra {
    families::solvable(&SolvableFamily::new((0..rank).map(|_| uniform(rng, -2.0, 2.0)).collect()))
}

/// Four-dimensional extension of a random Milnor algebra by a derivation
/// `L = A Lambda^{-1}`, `A` antisymmetric.
pub fn random_extension4(rng: &mut TestRng) -> MetricLieAlgebra {
    let mut l = [0.0; 3];
    for x in l.iter_mut() {
        let mag = uniform(rng, 0.3, 2.0);
        *x = if rng.random_bool(0.5) { mag } else { -mag };
    }
    let t = MilnorTriple::new(l[0], l[1], l[2]);
    let a = Matrix::from_fn(3, 3, |_, _| rng.random_range(-1.0..1.0));
    let a = &a - a.transpose();
    let lambda_inv = Matrix::from_diagonal(&Vector::from_vec(l.iter().map(|x| 1.0 / x).collect()));
    let report = families::extension4_check(t, &(a * lambda_inv)).unwrap();
    assert!(report.jacobi_ok, "random extension violates Jacobi: {}", report.jacobi_residual);
    report.algebra.unwrap()
}

/// A random structure of dimension `n in {3, 4, 5}` from the family
/// constructors and direct sums, with the basis orthonormal.
pub fn random_structure(rng: &mut TestRng, n: usize) -> MetricLieAlgebra {
    let pick = rng.random_range(0..3);
    match (n, pick) {
        (3, 0) => random_milnor(rng),
        (3, 1) => random_solvable(rng, 2),
        (3, _) => families::direct_sum(&families::abelian(1), &random_solvable(rng, 1)),
        (4, 0) => random_solvable(rng, 3),
        (4, 1) => families::direct_sum(&families::abelian(1), &random_milnor(rng)),
        (4, _) => random_extension4(rng),
        (5, 0) => random_solvable(rng, 4),
        (5, 1) => families::direct_sum(&random_milnor(rng), &random_solvable(rng, 1)),
        (5, _) => families::direct_sum(&random_extension4(rng), &families::abelian(1)),
        _ => panic!("unsupported dimension {n}"),
    }
}

/// `random_structure` re-expressed through a random inner product, so that
/// the orthonormal frame is not the given basis.
pub fn random_metric_algebra(rng: &mut TestRng, n: usize) -> MetricLieAlgebra {
    let base = random_structure(rng, n);
    let g = random_spd(rng, n);
    orthonormalize(base.algebra().clone(), Metric::new(g, 1e-12).unwrap(), Tolerances::default()).unwrap()
}

pub fn random_weyl(rng: &mut TestRng, n: usize) -> WeylStructure {
    let a = random_metric_algebra(rng, n);
    let field = random_vector(rng, n);
    let gamma = uniform(rng, 0.2, 3.0);
    WeylStructure::new(a, field, gamma).unwrap()
}

/// Milnor-basis coordinates of the solvable SOL frame `(b, f_-, f_+)`:
/// `e_3` acts on `(e_1 +- e_2)/sqrt 2` with eigenvalues `-+1`.
pub fn sol_identification() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_column_slice(3, 3, &[0.0, 0.0, 1.0, s, s, 0.0, s, -s, 0.0])
}
