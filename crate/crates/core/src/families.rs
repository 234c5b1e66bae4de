//! Explicit families: three-dimensional unimodular (Milnor) algebras,
//! rank-one solvable extensions of abelian algebras, real hyperbolic space,
//! direct sums, and closed-form classifiers on the solvable family.
//!
//! Solvable convention: `e_0 = b`, `[b, e_i] = mu_i e_i` for `i >= 1`, the
//! spectrum sorted ascending. All fields are in orthonormal-frame
//! coordinates with that ordering.

use serde::Serialize;

use crate::{Error, LieAlgebra, Matrix, MetricLieAlgebra, Result, Tolerances, Vector};

/// Brackets `[e_2, e_3] = l1 e_1`, `[e_3, e_1] = l2 e_2`, `[e_1, e_2] = l3 e_3`
/// on an orthonormal basis (0-based in code).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MilnorTriple {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl MilnorTriple {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Self {
        Self { l1, l2, l3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.l3]
    }
}

fn milnor_algebra(t: MilnorTriple) -> LieAlgebra {
    let n = 3;
    let mut c = vec![0.0; 27];
    let mut set = |i: usize, j: usize, k: usize, v: f64| {
        c[(i * n + j) * n + k] = v;
        c[(j * n + i) * n + k] = -v;
    };
    set(1, 2, 0, t.l1);
    set(2, 0, 1, t.l2);
    set(0, 1, 2, t.l3);
    LieAlgebra::from_raw(n, c)
}

/// Jacobi holds for every triple.
pub fn milnor(t: MilnorTriple) -> MetricLieAlgebra {
    MetricLieAlgebra::orthonormal(milnor_algebra(t))
}

/// Spectrum of `ad_b` on the abelian ideal, sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvableFamily {
    mu: Vec<f64>,
    /// `original[i]` is the input position of sorted eigenvalue `i`.
    original: Vec<usize>,
}

impl SolvableFamily {
    pub fn new(mu: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..mu.len()).collect();
        order.sort_by(|&a, &b| mu[a].total_cmp(&mu[b]));
        let sorted = order.iter().map(|&i| mu[i]).collect();
        Self { mu: sorted, original: order }
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Dimension of the abelian ideal.
    pub fn rank(&self) -> usize {
        self.mu.len()
    }

    /// Input position of the eigenvalue at sorted index `i` (0-based over
    /// the ideal).
    pub fn original_index(&self, i: usize) -> usize {
        self.original[i]
    }

    /// Frame index of the ideal vector carrying the eigenvalue listed at
    /// input position `input`.
    pub fn frame_index_of_input(&self, input: usize) -> Option<usize> {
        self.original.iter().position(|&o| o == input).map(|p| p + 1)
    }

    fn require_nonzero(&self) -> Result<()> {
        if self.mu.is_empty() {
            return Err(Error::InvalidParameter("empty spectrum".into()));
        }
        if let Some(i) = self.mu.iter().position(|m| *m == 0.0) {
            return Err(Error::HypothesisViolated(format!(
                "eigenvalue mu_{} (input position {}) is zero; the classification assumes every eigenvalue of L is non-zero",
                i + 1,
                self.original[i]
            )));
        }
        Ok(())
    }
}

/// `(n+1)`-dimensional extension with `[e_0, e_i] = mu_i e_i` and the
/// identity metric.
pub fn solvable(f: &SolvableFamily) -> MetricLieAlgebra {
    let n = f.rank() + 1;
    let mut c = vec![0.0; n * n * n];
    for (i, &m) in f.mu().iter().enumerate() {
        let k = i + 1;
        c[k * n + k] = m;
        c[(k * n) * n + k] = -m;
    }
    MetricLieAlgebra::orthonormal(LieAlgebra::from_raw(n, c))
}

/// Real hyperbolic space of dimension `n + 1` as the solvable extension
/// with `L = I`.
pub fn hyperbolic(n: usize) -> MetricLieAlgebra {
    solvable(&SolvableFamily::new(vec![1.0; n]))
}

pub fn abelian(n: usize) -> MetricLieAlgebra {
    MetricLieAlgebra::orthonormal(LieAlgebra::abelian(n))
}

/// Orthogonal direct sum of the two orthonormal frames; `a` comes first.
pub fn direct_sum(a: &MetricLieAlgebra, b: &MetricLieAlgebra) -> MetricLieAlgebra {
    let (na, nb) = (a.dim(), b.dim());
    let n = na + nb;
    let mut c = vec![0.0; n * n * n];
    for (off, part, m) in [(0, a, na), (na, b, nb)] {
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    c[((off + i) * n + off + j) * n + off + k] = part.c(i, j, k);
                }
            }
        }
    }
    MetricLieAlgebra::orthonormal(LieAlgebra::from_raw(n, c)).with_tolerances(a.tolerances())
}

/// One-dimensional extension `R b + g` with `ad_b = operator` on the span
/// `(b, g)`, `b` at index 0 and orthonormal to `g`. A `dim(g)`-square
/// operator acts on `g` alone. Fails when the result violates Jacobi.
pub fn abelian_extension(base: &MetricLieAlgebra, operator: &Matrix, tol: Tolerances) -> Result<MetricLieAlgebra> {
    let c = extension_constants(base, operator)?;
    let n = base.dim() + 1;
    let alg = LieAlgebra::new(n, c, tol.alg)?;
    Ok(MetricLieAlgebra::orthonormal(alg).with_tolerances(tol))
}

fn embed_operator(m: usize, operator: &Matrix) -> Result<Matrix> {
    let n = m + 1;
    if operator.shape() == (n, n) {
        if operator.column(0).amax() != 0.0 {
            return Err(Error::InvalidParameter("ad_b(b) must vanish: first column of the operator is non-zero".into()));
        }
        Ok(operator.clone())
    } else if operator.shape() == (m, m) {
        let mut full = Matrix::zeros(n, n);
        full.view_mut((1, 1), (m, m)).copy_from(operator);
        Ok(full)
    } else {
        Err(Error::DimensionMismatch { expected: n, found: operator.nrows() })
    }
}

fn extension_constants(base: &MetricLieAlgebra, operator: &Matrix) -> Result<Vec<f64>> {
    let m = base.dim();
    let n = m + 1;
    let l = embed_operator(m, operator)?;
    let mut c = vec![0.0; n * n * n];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                c[((i + 1) * n + j + 1) * n + k + 1] = base.c(i, j, k);
            }
        }
    }
    for j in 1..n {
        for k in 0..n {
            c[j * n + k] = l[(k, j)];
            c[(j * n) * n + k] = -l[(k, j)];
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisOutcome {
    NonPositive,
    NotNonPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisVerdict {
    pub verdict: AxisOutcome,
    pub reason: String,
    /// Largest coefficient of the diagonal form and its index pair in the
    /// frame; `(0, k)` stands for `m_{0k}`.
    pub worst_coefficient: f64,
    pub worst_pair: (usize, usize),
    pub tolerance: f64,
    /// Outcome of the closed-form case analysis on the spectrum alone.
    pub case_analysis: AxisOutcome,
}

/// Diagonal coefficients of the Weyl sectional form for `E = alpha b`:
/// `mu_k (alpha - mu_k)` on `m_{0k}^2` and `-(alpha - mu_i)(alpha - mu_j)`
/// on `m_{ij}^2`.
pub fn axis_coefficients(f: &SolvableFamily, alpha: f64) -> Vec<((usize, usize), f64)> {
    let mu = f.mu();
    let n = mu.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for k in 0..n {
        out.push(((0, k + 1), mu[k] * (alpha - mu[k])));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(((i + 1, j + 1), -(alpha - mu[i]) * (alpha - mu[j])));
        }
    }
    out
}

/// Sign case analysis on the sorted spectrum: mixed signs force
/// `alpha = mu_1` with every negative eigenvalue equal to `mu_1`, or the
/// mirror at `mu_n`; a one-signed spectrum needs `alpha <= mu_1`
/// (`alpha >= mu_n`).
fn axis_case_analysis(mu: &[f64], alpha: f64, tol: f64) -> AxisOutcome {
    let (lo, hi) = (mu[0], mu[mu.len() - 1]);
    let close = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + b.abs());
    let ok = if lo < 0.0 && hi > 0.0 {
        let low_end = close(alpha, lo) && mu.iter().filter(|m| **m < 0.0).all(|m| close(*m, lo));
        let high_end = close(alpha, hi) && mu.iter().filter(|m| **m > 0.0).all(|m| close(*m, hi));
        low_end || high_end
    } else if lo > 0.0 {
        alpha <= lo + tol
    } else {
        alpha >= hi - tol
    };
    if ok {
        AxisOutcome::NonPositive
    } else {
        AxisOutcome::NotNonPositive
    }
}

/// Decides non-positivity of the Weyl connection of `E = alpha b`.
/// Coefficients are judged against `tol_cert`.
pub fn classify_axis_field(f: &SolvableFamily, alpha: f64) -> Result<AxisVerdict> {
    classify_axis_field_with(f, alpha, Tolerances::default().cert)
}

pub fn classify_axis_field_with(f: &SolvableFamily, alpha: f64, tol: f64) -> Result<AxisVerdict> {
    f.require_nonzero()?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    let coeffs = axis_coefficients(f, alpha);
    let &(worst_pair, worst_coefficient) = coeffs
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty spectrum");
    let verdict = if worst_coefficient <= tol {
        AxisOutcome::NonPositive
    } else {
        AxisOutcome::NotNonPositive
    };
    let reason = match (verdict, worst_pair) {
        (AxisOutcome::NonPositive, _) => format!("all coefficients <= {tol:e} (largest {worst_coefficient:e})"),
        (AxisOutcome::NotNonPositive, (0, k)) => format!(
            "coefficient mu_{k}(alpha - mu_{k}) = {worst_coefficient:e} > 0 on the plane (e_0, e_{k})"
        ),
        (AxisOutcome::NotNonPositive, (i, j)) => format!(
            "coefficient -(alpha - mu_{i})(alpha - mu_{j}) = {worst_coefficient:e} > 0 on the plane (e_{i}, e_{j})"
        ),
    };
    Ok(AxisVerdict {
        verdict,
        reason,
        worst_coefficient,
        worst_pair,
        tolerance: tol,
        case_analysis: axis_case_analysis(f.mu(), alpha, tol),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcedForm {
    /// The only admissible field, in frame coordinates.
    pub expected: Vec<f64>,
    pub field_matches: bool,
    /// Every eigenvalue of the relevant sign equals the extreme one.
    pub spectrum_matches: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralFieldReport {
    pub alpha0: f64,
    /// `alpha_0` lies outside the open interval `(mu_1, mu_n)`.
    pub alpha0_window_ok: bool,
    pub forced_form: Option<ForcedForm>,
    /// First necessary condition that fails, if any.
    pub failure: Option<String>,
}

impl GeneralFieldReport {
    pub fn necessary_conditions_hold(&self) -> bool {
        self.failure.is_none()
    }
}

/// Necessary conditions for non-positivity of a general left-invariant
/// field `E = sum alpha_i e_i`.
pub fn classify_general_field(f: &SolvableFamily, e: &Vector) -> Result<GeneralFieldReport> {
    f.require_nonzero()?;
    let n = f.rank() + 1;
    if e.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: e.len() });
    }
    if e.norm() == 0.0 {
        return Err(Error::ZeroVector("field"));
    }
    let tol = Tolerances::default().alg;
    let mu = f.mu();
    let (lo, hi) = (mu[0], mu[n - 2]);
    let alpha0 = e[0];
    let alpha0_window_ok = !(alpha0 > lo + tol && alpha0 < hi - tol);
    let mut failure = None;
    if !alpha0_window_ok {
        failure = Some(format!("alpha_0 = {alpha0} lies in the open interval (mu_1, mu_n) = ({lo}, {hi})"));
    }

    let forcing = if hi > 0.0 && alpha0 >= hi - tol {
        Some((hi, true))
    } else if lo < 0.0 && alpha0 <= lo + tol {
        Some((lo, false))
    } else {
        None
    };
    let forced_form = forcing.map(|(extreme, positive)| {
        let mut expected = Vector::zeros(n);
        expected[0] = extreme;
        let residual = (e - &expected).amax();
        let spectrum_matches = mu
            .iter()
            .filter(|m| if positive { **m > 0.0 } else { **m < 0.0 })
            .all(|m| (m - extreme).abs() <= tol);
        let field_matches = residual <= tol;
        if failure.is_none() {
            let side = if positive { "mu_n" } else { "mu_1" };
            if !field_matches {
                failure = Some(format!("forced form E = {side} e_0 = {extreme} e_0 fails (residual {residual:e})"));
            } else if !spectrum_matches {
                let sign = if positive { "positive" } else { "negative" };
                failure = Some(format!("not every {sign} eigenvalue equals {side} = {extreme}"));
            }
        }
        ForcedForm { expected: expected.iter().copied().collect(), field_matches, spectrum_matches, residual }
    });
    Ok(GeneralFieldReport { alpha0, alpha0_window_ok, forced_form, failure })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvectorSnp {
    /// `mu_k <= 4 mu_1`.
    pub necessary: bool,
    /// `mu_k < 4 mu_1`.
    pub sufficient: bool,
    /// `mu_k = 4 mu_1`: necessary holds, sufficient fails, and the
    /// classification gives no answer.
    pub boundary: bool,
    /// `-K(e_k, e_1) = mu_1 mu_k`, the extremal curvature term.
    pub witness_value: f64,
}

/// SNP test for the eigenvector `e_k` (1-based in the sorted spectrum) of an
/// all-positive spectrum.
pub fn eigenvector_snp(f: &SolvableFamily, k: usize) -> Result<EigenvectorSnp> {
    f.require_nonzero()?;
    let mu = f.mu();
    if mu.iter().any(|m| *m < 0.0) {
        return Err(Error::HypothesisViolated("eigenvector SNP test requires every eigenvalue of L to be positive".into()));
    }
    if k == 0 || k > mu.len() {
        return Err(Error::InvalidParameter(format!("eigenvector index {k} outside 1..={}", mu.len())));
    }
    let (m1, mk) = (mu[0], mu[k - 1]);
    let tol = Tolerances::default().alg;
    let gap = mk - 4.0 * m1;
    Ok(EigenvectorSnp {
        necessary: gap <= tol,
        sufficient: gap < -tol,
        boundary: gap.abs() <= tol,
        witness_value: m1 * mk,
    })
}

#[derive(Debug, Clone)]
pub struct Extension4Report {
    pub jacobi_ok: bool,
    pub jacobi_residual: f64,
    /// `[h, h]` lies in `g`, equivalently `L g` lies in `g` and trace is zero
    /// on `h`.
    pub unimodular: bool,
    /// `L Lambda` is antisymmetric for `Lambda = diag(1, l1, l2, l3)`.
    pub l_lambda_antisymmetric: bool,
    pub l_lambda_residual: f64,
    /// The extension, when Jacobi holds.
    pub algebra: Option<MetricLieAlgebra>,
}

/// Builds the four-dimensional extension of a Milnor algebra with
/// `ad_b = operator` (4x4 over `(b, e_1, e_2, e_3)`, or 3x3 on `g`).
pub fn extension4_check(t: MilnorTriple, operator: &Matrix) -> Result<Extension4Report> {
    let tol = Tolerances::default();
    let base = milnor(t);
    let c = extension_constants(&base, operator)?;
    let alg = LieAlgebra::from_raw(4, c);
    let jacobi_residual = alg.jacobi_residual();
    let jacobi_ok = jacobi_residual <= tol.alg;
    let l = embed_operator(3, operator)?;
    let lambda = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, t.l1, t.l2, t.l3]));
    let ll = &l * lambda;
    let l_lambda_residual = (&ll + ll.transpose()).amax();
    let (unimodular, _) = alg.is_unimodular(tol.alg);
    let algebra = jacobi_ok.then(|| MetricLieAlgebra::orthonormal(alg).with_tolerances(tol));
    Ok(Extension4Report {
        jacobi_ok,
        jacobi_residual,
        unimodular,
        l_lambda_antisymmetric: l_lambda_residual <= tol.alg,
        l_lambda_residual,
        algebra,
    })
}
