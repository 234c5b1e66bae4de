//! Certification of non-positive Weyl sectional curvature.
//!
//! In dimension at most three every bivector is decomposable, so the sign of
//! the largest eigenvalue of the bivector form decides the question. Above
//! that, a non-positive form is only a sufficient certificate; otherwise the
//! form is maximized over orthonormal pairs to find a positive plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::form::{to_skew, weyl_form, BivectorForm};
use super::{Plane, WeylStructure};
use crate::linalg::{self, qr_retract};
use crate::{Error, Matrix, Result, Tolerances, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub starts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { starts: 64, max_iterations: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact3D,
    EigenSufficient,
    WitnessSearch,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact3D => "Exact3D",
            Method::EigenSufficient => "EigenSufficient",
            Method::WitnessSearch => "WitnessSearch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every plane has Weyl sectional curvature at most `tol_cert`;
    /// `max_value` is the largest eigenvalue of the bivector form.
    CertifiedNonPositive { max_value: f64 },
    PositiveWitness { plane: Plane, value: f64 },
    Inconclusive { lambda_max: f64, best_found: f64, best_plane: Option<Plane> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::CertifiedNonPositive { .. } => "CertifiedNonPositive",
            Verdict::PositiveWitness { .. } => "PositiveWitness",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedNonPositive { .. })
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, Verdict::PositiveWitness { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    pub lambda_max: f64,
    pub tolerances: Tolerances,
    /// Number of ascent runs (zero unless a search ran).
    pub starts: usize,
}

pub fn certify_nonpositive(w: &WeylStructure, cfg: &CertifyConfig) -> Result<Certificate> {
    let tol = w.space().tolerances();
    let n = w.dim();
    let form = weyl_form(w);
    let (lambda_max, top) = form.lambda_max();
    if !lambda_max.is_finite() && n >= 2 {
        return Err(Error::Divergence(format!("bivector form has non-finite spectrum ({lambda_max})")));
    }
    let lc = w.levi_civita_connection();
    let verify = |plane: &Plane| w.weyl_sectional_with(&lc, plane);

    if n < 2 {
        return Ok(Certificate {
            verdict: Verdict::CertifiedNonPositive { max_value: 0.0 },
            method: Method::Exact3D,
            lambda_max: 0.0,
            tolerances: tol,
            starts: 0,
        });
    }

    if n <= 3 {
        let verdict = if lambda_max <= tol.cert {
            Verdict::CertifiedNonPositive { max_value: lambda_max }
        } else {
            let plane = decomposable_plane(n, &top);
            let value = verify(&plane);
            Verdict::PositiveWitness { plane, value }
        };
        return Ok(Certificate { verdict, method: Method::Exact3D, lambda_max, tolerances: tol, starts: 0 });
    }

    if lambda_max <= tol.cert {
        return Ok(Certificate {
            verdict: Verdict::CertifiedNonPositive { max_value: lambda_max },
            method: Method::EigenSufficient,
            lambda_max,
            tolerances: tol,
            starts: 0,
        });
    }

    let starts = initial_frames(n, &form, &top, cfg);
    let runs: Vec<(f64, Matrix)> = starts
        .par_iter()
        .map(|f0| ascend(&form, f0, cfg.max_iterations))
        .collect::<Result<Vec<_>>>()?;
    let (mut best_value, mut best_frame) = (f64::NEG_INFINITY, None);
    for (value, frame) in runs {
        if value > best_value {
            best_value = value;
            best_frame = Some(frame);
        }
    }
    let frame = best_frame.expect("at least one start");
    let plane = Plane { x: frame.column(0).into_owned(), y: frame.column(1).into_owned() };
    let value = verify(&plane);
    if !value.is_finite() {
        return Err(Error::Divergence("witness value is not finite".into()));
    }
    let verdict = if value > tol.cert {
        Verdict::PositiveWitness { plane, value }
    } else {
        Verdict::Inconclusive { lambda_max, best_found: value, best_plane: Some(plane) }
    };
    Ok(Certificate { verdict, method: Method::WitnessSearch, lambda_max, tolerances: tol, starts: starts.len() })
}

/// Plane closest to the bivector `b` (top two singular directions of its
/// skew matrix). Exact when `b` is decomposable.
fn decomposable_plane(n: usize, b: &Vector) -> Plane {
    let skew = to_skew(n, b);
    let (_, vecs) = linalg::sorted_symmetric_eigen(&(&skew * skew.transpose()));
    let u = vecs.column(n - 1).into_owned();
    let v = vecs.column(n - 2).into_owned();
    let f = qr_retract(&Matrix::from_columns(&[u, v]));
    Plane { x: f.column(0).into_owned(), y: f.column(1).into_owned() }
}

fn frame_of(plane: &Plane) -> Matrix {
    Matrix::from_columns(&[plane.x().clone(), plane.y().clone()])
}

/// First the plane nearest the top eigenvector, then the coordinate plane
/// with the largest diagonal entry, then shifted Halton points.
fn initial_frames(n: usize, form: &BivectorForm, top: &Vector, cfg: &CertifyConfig) -> Vec<Matrix> {
    let count = cfg.starts.max(2);
    let mut frames = Vec::with_capacity(count);
    frames.push(frame_of(&decomposable_plane(n, top)));

    let diag = form.matrix().diagonal();
    let best = (0..diag.len()).max_by(|&a, &b| diag[a].total_cmp(&diag[b])).unwrap_or(0);
    let (i, j) = super::form::pairs(n)[best];
    let mut coord = Matrix::zeros(n, 2);
    coord[(i, 0)] = 1.0;
    coord[(j, 1)] = 1.0;
    frames.push(coord);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shift: Vec<f64> = (0..2 * n).map(|_| rng.random::<f64>()).collect();
    let primes = first_primes(2 * n);
    let mut index = 1u64;
    while frames.len() < count {
        let mut f = Matrix::zeros(n, 2);
        for d in 0..2 * n {
            let u = (radical_inverse(index, primes[d]) + shift[d]).fract();
            f[(d % n, d / n)] = 2.0 * u - 1.0;
        }
        index += 1;
        if f.column(0).norm() < 1e-6 || f.column(1).norm() < 1e-6 {
            continue;
        }
        let q = qr_retract(&f);
        if (q.transpose() * &q - Matrix::identity(2, 2)).amax() < 1e-10 {
            frames.push(q);
        }
    }
    frames
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 1.0 / base as f64;
    while index > 0 {
        result += f * (index % base) as f64;
        index /= base;
        f /= base as f64;
    }
    result
}

fn frame_value(form: &BivectorForm, f: &Matrix) -> f64 {
    form.evaluate(&super::form::plucker(&f.column(0).into_owned(), &f.column(1).into_owned()))
}

/// Projected gradient ascent on the Stiefel manifold of orthonormal pairs,
/// QR retraction, step halving on failure and doubling on success.
fn ascend(form: &BivectorForm, start: &Matrix, max_iterations: usize) -> Result<(f64, Matrix)> {
    let mut f = start.clone();
    let mut value = frame_value(form, &f);
    let scale = form.matrix().amax().max(1e-300);
    let mut step = 0.25 / scale;
    let mut stalled = 0;
    for _ in 0..max_iterations {
        let x = f.column(0).into_owned();
        let y = f.column(1).into_owned();
        let skew = form.skew_action(&super::form::plucker(&x, &y));
        let grad = Matrix::from_columns(&[&skew * &y * 2.0, -(&skew * &x) * 2.0]);
        let ftg = f.transpose() * &grad;
        let tangent = &grad - &f * linalg::symmetric_part(&ftg);
        let gnorm2 = tangent.norm_squared();
        if !gnorm2.is_finite() {
            return Err(Error::Divergence("non-finite gradient in witness search".into()));
        }
        if gnorm2 < 1e-20 * scale * scale {
            break;
        }
        let mut accepted = false;
        while step * scale > 1e-16 {
            let candidate = qr_retract(&(&f + &tangent * step));
            let cv = frame_value(form, &candidate);
            if cv >= value + 1e-4 * step * gnorm2 {
                // Improvements below rounding level for several steps count as converged.
                if cv - value <= 1e-15 * scale.max(value.abs()) {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
                f = candidate;
                value = cv;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || stalled >= 5 {
            break;
        }
    }
    if !value.is_finite() {
        return Err(Error::Divergence("non-finite value in witness search".into()));
    }
    Ok((value, f))
}
