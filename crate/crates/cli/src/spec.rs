//! The JSON structure document and its conversion to core types.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use weylcurv::families::{self, MilnorTriple, SolvableFamily};
use weylcurv::homogeneous::ReductiveSpace;
use weylcurv::liealg::orthonormalize;
use weylcurv::{LieAlgebra, Matrix, Metric, MetricLieAlgebra, Tolerances, Vector};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

impl Default for MetricSpec {
    fn default() -> Self {
        Self::Named("identity".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Milnor,
    Solvable,
    Hyperbolic,
    Abelian,
    DirectSum,
}

/// `params` by kind: milnor `[l1, l2, l3]`, solvable `[mu_1, ..]`,
/// hyperbolic and abelian an integer `n`, direct_sum a list of families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneousSpec {
    /// Basis vectors of `h` in user coordinates.
    pub h_basis: Vec<Vec<f64>>,
    /// Basis vectors of `p` in user coordinates.
    pub p_basis: Vec<Vec<f64>>,
    /// Gram matrix on `p_basis`; defaults to the restriction of `metric`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_inner: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure_constants: Option<Vec<Entry>>,
    #[serde(default)]
    pub metric: MetricSpec,
    /// Field in user coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneous: Option<HomogeneousSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

/// Raw bytes of a spec file and the parsed document.
pub struct LoadedSpec {
    pub bytes: Vec<u8>,
    pub doc: SpecDocument,
}

pub fn load(path: &Path) -> CliResult<LoadedSpec> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let doc = serde_json::from_slice(&bytes).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(LoadedSpec { bytes, doc })
}

/// Everything the subcommands consume.
pub struct Model {
    pub space: MetricLieAlgebra,
    /// Field in frame coordinates.
    pub field: Option<Vector>,
    pub gamma: f64,
    pub tolerances: Tolerances,
    /// Present for solvable and hyperbolic families.
    pub solvable: Option<SolvableFamily>,
    pub reductive: Option<ReductiveSpace>,
    pub source: String,
}

impl Model {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn require_field(&self) -> CliResult<&Vector> {
        self.field
            .as_ref()
            .ok_or_else(|| CliError::invalid("a field is required: set \"field\" in the spec or pass --field"))
    }

    /// Replaces the field with one given in user coordinates.
    pub fn set_user_field(&mut self, user: &[f64]) -> CliResult<()> {
        let v = Vector::from_column_slice(user);
        check_finite("field", user)?;
        self.field = Some(self.space.to_frame(&v)?);
        Ok(())
    }
}

fn check_finite(what: &str, values: &[f64]) -> CliResult<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::invalid(format!("{what} contains a non-finite value")))
    }
}

fn square(name: &str, rows: &[Vec<f64>], n: usize) -> CliResult<Matrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::invalid(format!("{name} must be a {n}x{n} matrix")));
    }
    for r in rows {
        check_finite(name, r)?;
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn columns(name: &str, vectors: &[Vec<f64>], n: usize) -> CliResult<Matrix> {
    if vectors.iter().any(|v| v.len() != n) {
        return Err(CliError::invalid(format!("every vector of {name} must have length {n}")));
    }
    for v in vectors {
        check_finite(name, v)?;
    }
    Ok(Matrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]))
}

fn numbers(kind: &str, params: &Value) -> CliResult<Vec<f64>> {
    let arr = params
        .as_array()
        .ok_or_else(|| CliError::invalid(format!("{kind} params must be an array of numbers")))?;
    arr.iter()
        .map(|v| v.as_f64().ok_or_else(|| CliError::invalid(format!("{kind} params must be numbers"))))
        .collect()
}

fn count(kind: &str, params: &Value) -> CliResult<usize> {
    let n = params
        .as_u64()
        .or_else(|| params.as_array().filter(|a| a.len() == 1).and_then(|a| a[0].as_u64()))
        .ok_or_else(|| CliError::invalid(format!("{kind} params must be a positive integer")))?;
    if n == 0 {
        return Err(CliError::invalid(format!("{kind} params must be a positive integer")));
    }
    Ok(n as usize)
}

fn parse_family(spec: &FamilySpec) -> CliResult<(MetricLieAlgebra, Option<SolvableFamily>)> {
    match spec.kind {
        FamilyKind::Milnor => {
            let l = numbers("milnor", &spec.params)?;
            if l.len() != 3 {
                return Err(CliError::invalid("milnor params must be [l1, l2, l3]"));
            }
            check_finite("milnor params", &l)?;
            Ok((families::milnor(MilnorTriple::new(l[0], l[1], l[2])), None))
        }
        FamilyKind::Solvable => {
            let mu = numbers("solvable", &spec.params)?;
            if mu.is_empty() {
                return Err(CliError::invalid("solvable params must list at least one eigenvalue"));
            }
            check_finite("solvable params", &mu)?;
            let f = SolvableFamily::new(mu);
            Ok((families::solvable(&f), Some(f)))
        }
        FamilyKind::Hyperbolic => {
            let n = count("hyperbolic", &spec.params)?;
            let f = SolvableFamily::new(vec![1.0; n]);
            Ok((families::hyperbolic(n), Some(f)))
        }
        FamilyKind::Abelian => Ok((families::abelian(count("abelian", &spec.params)?), None)),
        FamilyKind::DirectSum => {
            let parts: Vec<FamilySpec> = serde_json::from_value(spec.params.clone())
                .map_err(|e| CliError::invalid(format!("direct_sum params must be a list of families: {e}")))?;
            if parts.len() < 2 {
                return Err(CliError::invalid("direct_sum needs at least two summands"));
            }
            let mut acc: Option<MetricLieAlgebra> = None;
            for part in &parts {
                let (a, _) = parse_family(part)?;
                acc = Some(match acc {
                    None => a,
                    Some(prev) => families::direct_sum(&prev, &a),
                });
            }
            Ok((acc.expect("at least two summands"), None))
        }
    }
}

fn family_params_normalized(spec: &FamilySpec) -> CliResult<Value> {
    Ok(match spec.kind {
        FamilyKind::Milnor | FamilyKind::Solvable => serde_json::json!(numbers("family", &spec.params)?),
        FamilyKind::Hyperbolic | FamilyKind::Abelian => serde_json::json!(count("family", &spec.params)?),
        FamilyKind::DirectSum => {
            let parts: Vec<FamilySpec> = serde_json::from_value(spec.params.clone())
                .map_err(|e| CliError::invalid(format!("direct_sum params must be a list of families: {e}")))?;
            let parts = parts.iter().map(normalize_family).collect::<CliResult<Vec<_>>>()?;
            serde_json::to_value(parts).expect("families serialize")
        }
    })
}

fn normalize_family(spec: &FamilySpec) -> CliResult<FamilySpec> {
    Ok(FamilySpec { kind: spec.kind, params: family_params_normalized(spec)? })
}

fn kind_name(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Milnor => "milnor",
        FamilyKind::Solvable => "solvable",
        FamilyKind::Hyperbolic => "hyperbolic",
        FamilyKind::Abelian => "abelian",
        FamilyKind::DirectSum => "direct_sum",
    }
}

impl SpecDocument {
    pub fn build(&self) -> CliResult<Model> {
        let tol = self.tolerances.unwrap_or_default();
        let (base, solvable, source) = match (&self.structure_constants, &self.family) {
            (Some(_), Some(_)) => {
                return Err(CliError::invalid("give exactly one of \"structure_constants\" and \"family\", not both"))
            }
            (None, None) => return Err(CliError::invalid("give exactly one of \"structure_constants\" and \"family\"")),
            (Some(entries), None) => {
                let n = self
                    .dimension
                    .ok_or_else(|| CliError::invalid("\"dimension\" is required with \"structure_constants\""))?;
                let raw: Vec<_> = entries.iter().map(|e| (e.i, e.j, e.k, e.value)).collect();
                for e in entries {
                    if e.i >= n || e.j >= n || e.k >= n {
                        return Err(CliError::invalid(format!(
                            "structure constant index ({}, {}, {}) out of range for dimension {n}",
                            e.i, e.j, e.k
                        )));
                    }
                    if !e.value.is_finite() {
                        return Err(CliError::invalid("structure constants must be finite"));
                    }
                }
                let alg = LieAlgebra::from_entries(n, &raw, tol.alg)?;
                (alg, None, "structure_constants".to_string())
            }
            (None, Some(f)) => {
                let (a, solvable) = parse_family(f)?;
                if let Some(d) = self.dimension {
                    if d != a.dim() {
                        return Err(CliError::invalid(format!(
                            "\"dimension\" is {d} but the {} family has dimension {}",
                            kind_name(f.kind),
                            a.dim()
                        )));
                    }
                }
                (a.algebra().clone(), solvable, format!("family:{}", kind_name(f.kind)))
            }
        };
        let n = base.dim();
        let metric = match &self.metric {
            MetricSpec::Named(name) if name == "identity" => Metric::identity(n),
            MetricSpec::Named(name) => {
                return Err(CliError::invalid(format!("metric must be \"identity\" or a matrix, got \"{name}\"")))
            }
            MetricSpec::Matrix(rows) => Metric::new(square("metric", rows, n)?, tol.pd)?,
        };
        let (ambient, gram) = (base.clone(), metric.gram().clone());
        let space = orthonormalize(base, metric, tol)?;
        let field = match &self.field {
            None => None,
            Some(v) => {
                if v.len() != n {
                    return Err(CliError::invalid(format!("field must have length {n}, got {}", v.len())));
                }
                check_finite("field", v)?;
                Some(space.to_frame(&Vector::from_column_slice(v))?)
            }
        };
        let gamma = self.gamma.unwrap_or(1.0);
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(CliError::invalid(format!("gamma must be positive and finite, got {gamma}")));
        }
        let reductive = match &self.homogeneous {
            None => None,
            Some(h) => {
                let hb = columns("h_basis", &h.h_basis, n)?;
                let pb = columns("p_basis", &h.p_basis, n)?;
                let inner = match &h.p_inner {
                    Some(rows) => square("p_inner", rows, pb.ncols())?,
                    None => pb.transpose() * &gram * &pb,
                };
                Some(ReductiveSpace::new(&ambient, &hb, &pb, &inner, tol)?)
            }
        };
        Ok(Model { space, field, gamma, tolerances: tol, solvable, reductive, source })
    }

    /// Canonical form: sparse constants with `i < j`, sorted, zeros dropped;
    /// family parameters in their plain form; tolerances explicit.
    pub fn normalized(&self) -> CliResult<SpecDocument> {
        let model = self.build()?;
        let n = model.dim();
        let structure_constants = self.structure_constants.as_ref().map(|_| {
            model
                .space
                .user_algebra()
                .sparse_entries()
                .into_iter()
                .filter(|&(i, j, _, v)| i < j && v != 0.0)
                .map(|(i, j, k, value)| Entry { i, j, k, value })
                .collect::<Vec<_>>()
        });
        let metric = if model.space.metric().is_identity() {
            MetricSpec::default()
        } else {
            let g = model.space.metric().gram();
            MetricSpec::Matrix((0..n).map(|i| g.row(i).iter().copied().collect()).collect())
        };
        Ok(SpecDocument {
            dimension: Some(n),
            structure_constants,
            metric,
            field: self.field.clone(),
            gamma: Some(model.gamma),
            family: self.family.as_ref().map(normalize_family).transpose()?,
            homogeneous: self.homogeneous.clone(),
            tolerances: Some(model.tolerances),
        })
    }
}
