//! Gaussian thermostat `nabla_v v = gamma E - (<gamma E, v> / <v, v>) v` in
//! the left-invariant orthonormal frame, integrated with fixed-step RK4.
//!
//! In frame coordinates the equation reads
//! `v' = -nabla_v v + gamma E - (<gamma E, v> / |v|^2) v`, where `nabla_v v`
//! is the left-invariant Koszul term. `|v|^2` is conserved by the flow and
//! monitored, never projected.

use serde::Serialize;

use crate::levicivita::LeviCivita;
use crate::{Error, Result, Vector, WeylStructure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermostatState {
    pub t: f64,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
}

impl IntegratorConfig {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        let cfg = Self { dt, steps };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("step size must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("at least one step is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<ThermostatState>,
    /// `|v|^2` at every recorded state.
    pub energy: Vec<f64>,
    /// `max |(|v|^2 - |v_0|^2)| / |v_0|^2` over the run.
    pub relative_drift: f64,
}

impl Trajectory {
    pub fn final_velocity(&self) -> Vector {
        Vector::from_vec(self.states.last().expect("non-empty trajectory").v.clone())
    }
}

fn rhs_with(lc: &LeviCivita<'_>, force: &Vector, v: &Vector) -> Vector {
    let vv = v.norm_squared();
    -lc.nabla_unchecked(v, v) + force - v * (force.dot(v) / vv)
}

/// Time derivative of the frame velocity.
pub fn rhs(w: &WeylStructure, v: &Vector) -> Result<Vector> {
    w.space().check_len(v)?;
    if v.norm_squared() == 0.0 {
        return Err(Error::ZeroVector("thermostat velocity"));
    }
    let lc = w.levi_civita_connection();
    Ok(rhs_with(&lc, &w.effective_field(), v))
}

fn rk4_step<F: Fn(&Vector) -> Vector>(f: &F, y: &Vector, dt: f64) -> Vector {
    let k1 = f(y);
    let k2 = f(&(y + &k1 * (0.5 * dt)));
    let k3 = f(&(y + &k2 * (0.5 * dt)));
    let k4 = f(&(y + &k3 * dt));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn integrate(w: &WeylStructure, v0: &Vector, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    w.space().check_len(v0)?;
    let e0 = v0.norm_squared();
    if e0 == 0.0 {
        return Err(Error::ZeroVector("initial velocity"));
    }
    let lc = w.levi_civita_connection();
    let force = w.effective_field();
    let f = |v: &Vector| rhs_with(&lc, &force, v);

    let mut states = Vec::with_capacity(cfg.steps + 1);
    let mut energy = Vec::with_capacity(cfg.steps + 1);
    let mut v = v0.clone();
    states.push(ThermostatState { t: 0.0, v: v.iter().copied().collect() });
    energy.push(e0);
    let mut drift = 0.0_f64;
    for step in 1..=cfg.steps {
        v = rk4_step(&f, &v, cfg.dt);
        if !all_finite(&v) {
            return Err(Error::NonFinite { step });
        }
        let e = v.norm_squared();
        drift = drift.max((e - e0).abs() / e0);
        states.push(ThermostatState { t: step as f64 * cfg.dt, v: v.iter().copied().collect() });
        energy.push(e);
    }
    Ok(Trajectory { dt: cfg.dt, states, energy, relative_drift: drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoordinateModel {
    /// Coordinates `(x, y, z)` with orthonormal frame
    /// `(e^{-z} d_x, e^{z} d_y, d_z)` = `(e_1, e_2, e_0)` of the solvable
    /// extension with spectrum `(-1, 1)`.
    Sol,
    /// Upper half-space `(x_1, .., x_n, y)` with frame `y d_y = e_0`,
    /// `y d_{x_i} = e_i`.
    Hyperbolic,
}

impl CoordinateModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Sol => "sol",
            Self::Hyperbolic => "hyperbolic",
        }
    }

    /// Names of the coordinate columns, in output order.
    pub fn coordinate_names(&self, dim: usize) -> Vec<String> {
        match self {
            Self::Sol => vec!["x".into(), "y".into(), "z".into()],
            Self::Hyperbolic => (1..dim).map(|i| format!("x{i}")).chain(std::iter::once("y".into())).collect(),
        }
    }
}

/// Extracts `mu` when the frame constants are exactly those of a diagonal
/// solvable extension `[e_0, e_i] = mu_i e_i`.
fn diagonal_spectrum(w: &WeylStructure, tol: f64) -> Option<Vec<f64>> {
    let n = w.dim();
    let a = w.space();
    let mu: Vec<f64> = (1..n).map(|i| a.c(0, i, i)).collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let expected = match (i, j) {
                    (0, j) if j > 0 && k == j => mu[j - 1],
                    (i, 0) if i > 0 && k == i => -mu[i - 1],
                    _ => 0.0,
                };
                if (a.c(i, j, k) - expected).abs() > tol {
                    return None;
                }
            }
        }
    }
    Some(mu)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordinatePath {
    pub model: CoordinateModel,
    pub names: Vec<String>,
    pub points: Vec<Vec<f64>>,
}

/// Integrates velocity and chart position jointly on the time grid of
/// `trajectory`, starting at the chart origin (`y = 1` in the half-space).
pub fn reconstruct(w: &WeylStructure, trajectory: &Trajectory, model: CoordinateModel) -> Result<CoordinatePath> {
    let n = w.dim();
    let tol = w.space().tolerances().alg;
    let mu = diagonal_spectrum(w, tol)
        .ok_or_else(|| Error::ModelMismatch("structure is not a diagonal solvable extension in the orthonormal frame".into()))?;
    match model {
        CoordinateModel::Sol => {
            if n != 3 || (mu[0] + 1.0).abs() > tol || (mu[1] - 1.0).abs() > tol {
                return Err(Error::ModelMismatch(format!("SOL chart needs spectrum (-1, 1), found {mu:?}")));
            }
        }
        CoordinateModel::Hyperbolic => {
            if mu.iter().any(|m| (m - 1.0).abs() > tol) {
                return Err(Error::ModelMismatch(format!("half-space chart needs L = I, found {mu:?}")));
            }
        }
    }
    let first = trajectory.states.first().ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let steps = trajectory.states.len() - 1;
    let lc = w.levi_civita_connection();
    let force = w.effective_field();

    // state = (v_0..v_{n-1}, q) with q the chart coordinates in output order
    let f = |s: &Vector| -> Vector {
        let v = s.rows(0, n).into_owned();
        let q = s.rows(n, n);
        let dv = rhs_with(&lc, &force, &v);
        let mut out = Vector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&dv);
        match model {
            CoordinateModel::Sol => {
                let z = q[2];
                out[n] = v[1] * (-z).exp();
                out[n + 1] = v[2] * z.exp();
                out[n + 2] = v[0];
            }
            CoordinateModel::Hyperbolic => {
                let y = q[n - 1];
                for i in 1..n {
                    out[n + i - 1] = y * v[i];
                }
                out[2 * n - 1] = y * v[0];
            }
        }
        out
    };

    let mut s = Vector::zeros(2 * n);
    for (i, x) in first.v.iter().enumerate() {
        s[i] = *x;
    }
    if model == CoordinateModel::Hyperbolic {
        s[2 * n - 1] = 1.0;
    }
    let mut points = Vec::with_capacity(steps + 1);
    points.push(s.rows(n, n).iter().copied().collect());
    for step in 1..=steps {
        s = rk4_step(&f, &s, trajectory.dt);
        if !all_finite(&s) {
            return Err(Error::NonFinite { step });
        }
        points.push(s.rows(n, n).iter().copied().collect());
    }
    Ok(CoordinatePath { model, names: model.coordinate_names(n), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{self, SolvableFamily};

    fn e(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    fn sol(field: Vector) -> WeylStructure {
        WeylStructure::new(families::solvable(&SolvableFamily::new(vec![1.0, -1.0])), field, 1.0).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let flat = WeylStructure::levi_civita(families::abelian(3));
        assert_eq!(rhs(&flat, &Vector::from_vec(vec![1.0, 2.0, 3.0])).unwrap(), Vector::zeros(3));
        // frame index 2 carries mu = 1 after sorting
        let r = rhs(&sol(e(3, 0)), &e(3, 2)).unwrap();
        assert!(r.amax() < 1e-15);
        let r = rhs(&sol(e(3, 0)), &e(3, 1)).unwrap();
        assert!((r - e(3, 0) * 2.0).amax() < 1e-15);
        let flat_e3 = WeylStructure::new(families::milnor(families::MilnorTriple::new(1.0, 1.0, 0.0)), e(3, 2), 1.0).unwrap();
        assert!(rhs(&flat_e3, &(e(3, 2) * 0.7)).unwrap().amax() < 1e-15);
        assert!(matches!(rhs(&flat, &Vector::zeros(3)), Err(Error::ZeroVector(_))));
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(0.0, 10).is_err());
        assert!(IntegratorConfig::new(0.1, 0).is_err());
        assert!(IntegratorConfig::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn abelian_velocity_is_constant() {
        let flat = WeylStructure::levi_civita(families::abelian(2));
        let v0 = Vector::from_vec(vec![0.3, -0.4]);
        let t = integrate(&flat, &v0, &IntegratorConfig::new(0.1, 50).unwrap()).unwrap();
        assert!(t.states.iter().all(|s| s.v == vec![0.3, -0.4]));
        assert_eq!(t.relative_drift, 0.0);
    }

    #[test]
    fn divergence_is_reported_with_step() {
        // large forcing with a huge step blows up
        let w = WeylStructure::new(families::hyperbolic(2), e(3, 1), 1e3).unwrap();
        let err = integrate(&w, &e(3, 0), &IntegratorConfig::new(10.0, 1000).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err:?}");
    }

    #[test]
    fn vertical_geodesic_in_half_space() {
        let w = WeylStructure::levi_civita(families::hyperbolic(2));
        let t = integrate(&w, &e(3, 0), &IntegratorConfig::new(1e-3, 1000).unwrap()).unwrap();
        let path = reconstruct(&w, &t, CoordinateModel::Hyperbolic).unwrap();
        let end = path.points.last().unwrap();
        assert!((end[2] - 1f64.exp()).abs() < 1e-10);
        assert!(end[0].abs() < 1e-15 && end[1].abs() < 1e-15);
        assert_eq!(path.names, vec!["x1", "x2", "y"]);
    }

    #[test]
    fn sol_axis_is_a_geodesic() {
        let w = WeylStructure::levi_civita(families::solvable(&SolvableFamily::new(vec![1.0, -1.0])));
        let t = integrate(&w, &e(3, 0), &IntegratorConfig::new(1e-2, 200).unwrap()).unwrap();
        let path = reconstruct(&w, &t, CoordinateModel::Sol).unwrap();
        let end = path.points.last().unwrap();
        assert!(end[0].abs() < 1e-15 && end[1].abs() < 1e-15 && (end[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn model_mismatch() {
        let w = WeylStructure::levi_civita(families::milnor(families::MilnorTriple::new(1.0, -1.0, 0.0)));
        let t = integrate(&w, &e(3, 0), &IntegratorConfig::new(1e-2, 2).unwrap()).unwrap();
        assert!(matches!(reconstruct(&w, &t, CoordinateModel::Sol), Err(Error::ModelMismatch(_))));
        let w = WeylStructure::levi_civita(families::hyperbolic(2));
        let t = integrate(&w, &e(3, 0), &IntegratorConfig::new(1e-2, 2).unwrap()).unwrap();
        assert!(matches!(reconstruct(&w, &t, CoordinateModel::Sol), Err(Error::ModelMismatch(_))));
    }
}
