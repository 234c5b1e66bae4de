//! Subcommand bodies. Each returns the `result` object of the report.

use std::path::Path;

use serde_json::{json, Value};
use weylcurv::families::{self, AxisOutcome, MilnorTriple, SolvableFamily};
use weylcurv::levicivita::LeviCivita;
use weylcurv::linalg;
use weylcurv::thermostat::{self, CoordinateModel, IntegratorConfig};
use weylcurv::weyl::{self, Certificate, CertifyConfig, Verdict};
use weylcurv::{Matrix, MetricLieAlgebra, Tolerances, Vector, WeylStructure};

use crate::error::{CliError, CliResult};
use crate::output::{self, format_f64, frame_and_user, vector};
use crate::spec::{LoadedSpec, Model};

pub struct Outcome {
    pub result: Value,
    pub tolerances: Tolerances,
    /// A certificate came back inconclusive.
    pub inconclusive: bool,
}

impl Outcome {
    fn new(result: Value, tolerances: Tolerances) -> Self {
        Self { result, tolerances, inconclusive: false }
    }
}

fn certify_config(seed: u64) -> CertifyConfig {
    CertifyConfig { seed, ..CertifyConfig::default() }
}

pub fn certificate_json(space: &MetricLieAlgebra, c: &Certificate) -> Value {
    let mut obj = json!({
        "verdict": c.verdict.name(),
        "method": c.method.as_str(),
        "lambda_max": c.lambda_max,
        "tolerance": c.tolerances.cert,
        "starts": c.starts,
    });
    match &c.verdict {
        Verdict::CertifiedNonPositive { max_value } => obj["max_value"] = json!(max_value),
        Verdict::PositiveWitness { plane, value } => {
            obj["witness"] = json!({ "value": value, "plane": output::plane(space, plane) });
        }
        Verdict::Inconclusive { best_found, best_plane, .. } => {
            obj["best_found"] = json!(best_found);
            obj["best_plane"] = best_plane.as_ref().map_or(Value::Null, |p| output::plane(space, p));
        }
    }
    obj
}

fn solvable_frame_json(f: &SolvableFamily) -> Value {
    json!({
        "mu_sorted": f.mu(),
        "input_index": (0..f.rank()).map(|i| f.original_index(i)).collect::<Vec<_>>(),
    })
}

pub fn validate(loaded: &LoadedSpec, emit_normalized: Option<&Path>) -> CliResult<Outcome> {
    let model = loaded.doc.build()?;
    let tol = model.tolerances;
    let n = model.dim();
    let jacobi = model.space.user_algebra().jacobi_residual();
    let (unimodular, max_trace) = model.space.is_unimodular();
    let gram = model.space.metric().gram();
    let mut result = json!({
        "valid": true,
        "dimension": n,
        "source": model.source,
        "antisymmetry": { "holds": true },
        "jacobi": { "holds": true, "residual": jacobi, "tolerance": tol.alg },
        "metric": {
            "identity": model.space.metric().is_identity(),
            "min_eigenvalue": linalg::lambda_min(gram),
            "tolerance": tol.pd,
        },
        "unimodular": { "holds": unimodular, "max_abs_trace_ad": max_trace, "tolerance": tol.alg },
        "gamma": model.gamma,
    });
    if let Some(e) = &model.field {
        result["field"] = json!({ "coordinates": frame_and_user(&model.space, e), "norm": e.norm() });
    }
    if let Some(f) = &model.solvable {
        result["solvable_frame"] = solvable_frame_json(f);
    }
    if let Some(r) = &model.reductive {
        result["homogeneous"] = json!({ "h_dim": r.h_dim(), "p_dim": r.p_dim(), "p0_dim": r.p0().ncols() });
    }
    if let Some(path) = emit_normalized {
        let normalized = loaded.doc.normalized()?;
        std::fs::write(path, output::to_json_string(&normalized)).map_err(|e| CliError::io(path, e))?;
        result["normalized_spec"] = json!(path.display().to_string());
    }
    Ok(Outcome::new(result, tol))
}

/// Field classification, divergence and the stretched non-positivity
/// conditions for the unit field.
pub fn classify(model: &Model) -> CliResult<Outcome> {
    let tol = model.tolerances;
    let e = model.require_field()?;
    let space = &model.space;
    let lc = LeviCivita::new(space);
    let class = lc.classify_field(e)?;
    let w = WeylStructure::new(space.clone(), e.clone(), 1.0)?;
    let w1 = weyl::check_w1(&w)?;
    let w2 = weyl::check_w2(&w)?;
    let ow = weyl::check_snp_sufficient_ow(&w)?;
    let w45 = if space.dim() < 3 {
        json!({ "skipped": format!("needs dimension at least 3, got {}", space.dim()) })
    } else if !w2.holds {
        json!({ "skipped": "the tangential condition W2 fails" })
    } else {
        let r = weyl::check_w4_w5(&w)?;
        json!({
            "w4": r.w4,
            "w5": r.w5,
            "sup": r.sup,
            "decoupled_bound": r.decoupled_bound,
            "worst_y1": frame_and_user(space, &r.worst_pair.0),
            "worst_y2": frame_and_user(space, &r.worst_pair.1),
            "condition": "<nabla_E E, Y1>^2 <= -4 K(E, Y2)",
            "tolerance": tol.cert,
        })
    };
    let mut result = json!({
        "field": frame_and_user(space, e),
        "killing": { "holds": class.is_killing, "residual": class.killing_residual, "tolerance": tol.alg },
        "closed_form": { "holds": class.is_closed_form, "residual": class.closed_residual, "tolerance": tol.alg },
        "parallel": { "holds": class.is_parallel, "tolerance": tol.alg },
        "nabla_e_frame": output::matrix_rows(&class.nabla_e),
        "divergence": { "trace_ad": lc.divergence(e)?, "koszul": lc.divergence_koszul(e)? },
        "w1": { "holds": w1.holds, "worst": w1.worst, "tolerance": tol.cert },
        "w2": { "holds": w2.holds, "residual": w2.residual, "tolerance": tol.alg },
        "w4_w5": w45,
        "ow_sufficient_snp": { "holds": ow.holds, "lambda_min": ow.lambda_min, "tolerance": tol.cert },
    });
    if let Some(r) = &model.reductive {
        result["homogeneous"] = homogeneous_json(model, r, e)?;
    }
    Ok(Outcome::new(result, tol))
}

/// Base-point parallelism check for the field, which must lie in `p`.
fn homogeneous_json(model: &Model, r: &weylcurv::homogeneous::ReductiveSpace, e_frame: &Vector) -> CliResult<Value> {
    let user = model.space.from_frame(e_frame)?;
    let m = r.p_dim();
    // columns: orthonormal p vectors in user coordinates
    let p_user = Matrix::from_columns(
        &(0..m)
            .map(|a| {
                let mut v = Vector::zeros(m);
                v[a] = 1.0;
                r.to_ambient(&r.embed_p(&v))
            })
            .collect::<Vec<_>>(),
    );
    let coords = p_user
        .clone()
        .svd(true, true)
        .solve(&user, 1e-14)
        .map_err(|e| CliError::invalid(format!("cannot express the field in p: {e}")))?;
    let residual = (&p_user * &coords - &user).amax();
    if residual > model.tolerances.alg * (1.0 + user.amax()) {
        return Err(CliError::invalid(format!("field does not lie in p (residual {residual:e})")));
    }
    let outcome = r.verify_parallelism(&coords)?;
    Ok(json!({ "field_p": vector(&coords), "parallelism": serde_json::to_value(&outcome).expect("report serializes") }))
}

pub fn weyl_report(model: &Model, seed: u64) -> CliResult<Outcome> {
    let tol = model.tolerances;
    let e = model.field.clone().unwrap_or_else(|| Vector::zeros(model.dim()));
    let w = WeylStructure::new(model.space.clone(), e, model.gamma)?;
    let cert = weyl::certify_nonpositive(&w, &certify_config(seed))?;
    let lc_form = weyl::weyl_form(&WeylStructure::levi_civita(model.space.clone()));
    let result = json!({
        "gamma": model.gamma,
        "field": frame_and_user(&model.space, w.field()),
        "effective_field": frame_and_user(&model.space, &w.effective_field()),
        "certificate": certificate_json(&model.space, &cert),
        "riemannian_form_lambda_max": lc_form.lambda_max().0,
    });
    let inconclusive = matches!(cert.verdict, Verdict::Inconclusive { .. });
    Ok(Outcome { result, tolerances: tol, inconclusive })
}

pub fn gamma_grid(min: f64, max: f64, steps: usize, log: bool) -> CliResult<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && min > 0.0 && max >= min) {
        return Err(CliError::invalid(format!("gamma range must satisfy 0 < min <= max, got [{min}, {max}]")));
    }
    if steps == 0 || (steps == 1 && max > min) {
        return Err(CliError::invalid("gamma-steps must be at least 2 for a non-degenerate range"));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let t = |i: usize| i as f64 / (steps - 1) as f64;
    let mut grid: Vec<f64> = if log {
        let (a, b) = (min.ln(), max.ln());
        (0..steps).map(|i| (a + (b - a) * t(i)).exp()).collect()
    } else {
        (0..steps).map(|i| min + (max - min) * t(i)).collect()
    };
    grid[0] = min;
    grid[steps - 1] = max;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::invalid("gamma grid is not strictly increasing"));
    }
    Ok(grid)
}

pub fn snp_scan(model: &Model, grid: &[f64], seed: u64) -> CliResult<Outcome> {
    let tol = model.tolerances;
    let e = model.require_field()?;
    let w = WeylStructure::new(model.space.clone(), e.clone(), 1.0)?;
    let scan = weyl::snp_scan(&w, grid, &certify_config(seed))?;
    let entries: Vec<Value> = scan
        .entries
        .iter()
        .map(|en| json!({ "gamma": en.gamma, "certificate": certificate_json(&model.space, &en.certificate) }))
        .collect();
    let w2 = weyl::check_w2(&w)?;
    let conditions = json!({
        "w1": weyl::check_w1(&w)?.holds,
        "w2": w2.holds,
        "w5": if w2.holds && w.dim() >= 3 { json!(weyl::check_w4_w5(&w)?.w5) } else { Value::Null },
        "ow_sufficient_snp": weyl::check_snp_sufficient_ow(&w)?.holds,
    });
    let result = json!({
        "field_unit": frame_and_user(&model.space, &(e / e.norm())),
        "grid_size": grid.len(),
        "gamma0": scan.gamma0,
        "certified_beyond_gamma0": scan.gamma0.is_some(),
        "inconclusive": scan.inconclusive,
        "conditions": conditions,
        "entries": entries,
    });
    Ok(Outcome { result, tolerances: tol, inconclusive: !scan.inconclusive.is_empty() })
}

/// `a,b,c` lists values; `start:stop:count` is an inclusive linear grid.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let bad = |msg: &str| CliError::invalid(format!("invalid grid \"{s}\": {msg}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("expected numbers"));
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range form is start:stop:count"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count must be a positive integer"))?;
        match count {
            0 => return Err(bad("count must be positive")),
            1 => vec![a],
            _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
        }
    } else {
        s.split(',').map(num).collect::<CliResult<Vec<f64>>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad("values must be finite"));
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    Milnor,
    Solvable,
    Hyperbolic,
}

pub fn family_sweep(kind: SweepKind, grid: &[f64], mu: Option<&[f64]>, seed: u64) -> CliResult<Outcome> {
    let tol = Tolerances::default();
    let cfg = certify_config(seed);
    match kind {
        SweepKind::Milnor => {
            // unit fields +-e_k on every ordered triple
            let mut cases = Vec::new();
            let mut any_inconclusive = false;
            let mut total = 0usize;
            for &l1 in grid {
                for &l2 in grid {
                    for &l3 in grid {
                        let t = MilnorTriple::new(l1, l2, l3);
                        let a = families::milnor(t);
                        let flat = {
                            let form = weyl::weyl_form(&WeylStructure::levi_civita(a.clone()));
                            form.matrix().amax() <= tol.cert
                        };
                        for k in 0..3 {
                            for sign in [1.0, -1.0] {
                                let mut e = Vector::zeros(3);
                                e[k] = sign;
                                let w = WeylStructure::new(a.clone(), e, 1.0)?;
                                let cert = weyl::certify_nonpositive(&w, &cfg)?;
                                total += 1;
                                any_inconclusive |= matches!(cert.verdict, Verdict::Inconclusive { .. });
                                if cert.verdict.is_certified() {
                                    let l = t.as_array();
                                    let others = [l[(k + 1) % 3], l[(k + 2) % 3]];
                                    let sol_type = l[k] == 0.0 && others[0] == -others[1] && others[0] != 0.0;
                                    cases.push(json!({
                                        "triple": l,
                                        "axis": k,
                                        "sign": sign,
                                        "riemannian_flat": flat,
                                        "sol_type": sol_type,
                                        "max_value": cert.lambda_max,
                                    }));
                                }
                            }
                        }
                    }
                }
            }
            let non_flat_non_sol = cases
                .iter()
                .filter(|c| c["riemannian_flat"] == json!(false) && c["sol_type"] == json!(false))
                .count();
            let result = json!({
                "kind": "milnor",
                "grid": grid,
                "cases_checked": total,
                "non_positive_cases": cases,
                "non_positive_non_flat_non_sol": non_flat_non_sol,
                "tolerance": tol.cert,
            });
            Ok(Outcome { result, tolerances: tol, inconclusive: any_inconclusive })
        }
        SweepKind::Solvable => {
            let mu = mu.ok_or_else(|| CliError::invalid("--kind solvable needs --mu"))?;
            let f = SolvableFamily::new(mu.to_vec());
            let a = families::solvable(&f);
            let n = a.dim();
            let mut entries = Vec::new();
            let mut all_agree = true;
            let mut any_inconclusive = false;
            for &alpha in grid {
                let verdict = families::classify_axis_field(&f, alpha)?;
                let mut e = Vector::zeros(n);
                e[0] = alpha;
                let w = WeylStructure::new(a.clone(), e, 1.0)?;
                let cert = weyl::certify_nonpositive(&w, &cfg)?;
                any_inconclusive |= matches!(cert.verdict, Verdict::Inconclusive { .. });
                let agree = match verdict.verdict {
                    AxisOutcome::NonPositive => cert.verdict.is_certified(),
                    AxisOutcome::NotNonPositive => cert.verdict.is_witness(),
                };
                all_agree &= agree;
                entries.push(json!({
                    "alpha": alpha,
                    "classifier": serde_json::to_value(&verdict).expect("verdict serializes"),
                    "certificate": certificate_json(&a, &cert),
                    "agree": agree,
                }));
            }
            let result = json!({
                "kind": "solvable",
                "solvable_frame": solvable_frame_json(&f),
                "all_agree": all_agree,
                "entries": entries,
            });
            Ok(Outcome { result, tolerances: tol, inconclusive: any_inconclusive })
        }
        SweepKind::Hyperbolic => {
            let mut entries = Vec::new();
            for &g in grid {
                if g.fract() != 0.0 || g < 1.0 {
                    return Err(CliError::invalid(format!("hyperbolic grid values are ranks >= 1, got {g}")));
                }
                let rank = g as usize;
                let a = families::hyperbolic(rank);
                let n = a.dim();
                let mut tangent = Vector::zeros(n);
                tangent[1] = 1.0;
                let w = WeylStructure::new(a.clone(), tangent, 1.0)?;
                let w5 = if n >= 3 { json!(weyl::check_w4_w5(&w)?.w5) } else { Value::Null };
                let mut axis = Vector::zeros(n);
                axis[0] = -1.0;
                let ow = weyl::check_snp_sufficient_ow(&WeylStructure::new(a, axis, 1.0)?)?;
                entries.push(json!({
                    "rank": rank,
                    "e1": { "w1": weyl::check_w1(&w)?.holds, "w2": weyl::check_w2(&w)?.holds, "w5": w5 },
                    "minus_e0": { "ow_sufficient_snp": ow.holds, "lambda_min": ow.lambda_min },
                }));
            }
            Ok(Outcome::new(json!({ "kind": "hyperbolic", "entries": entries, "tolerance": tol.cert }), tol))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ChartArg {
    Sol,
    Hyperbolic,
}

pub struct ThermostatArgs<'a> {
    pub v0: &'a [f64],
    pub dt: f64,
    pub steps: usize,
    pub reconstruct: Option<ChartArg>,
    pub out: Option<&'a Path>,
    pub every: usize,
}

pub fn thermostat(model: &Model, args: &ThermostatArgs<'_>) -> CliResult<Outcome> {
    let tol = model.tolerances;
    let n = model.dim();
    if args.v0.len() != n {
        return Err(CliError::invalid(format!("--v0 must have {n} components, got {}", args.v0.len())));
    }
    if args.every == 0 {
        return Err(CliError::invalid("--every must be positive"));
    }
    let e = model.field.clone().unwrap_or_else(|| Vector::zeros(n));
    let w = WeylStructure::new(model.space.clone(), e, model.gamma)?;
    let v0 = model.space.to_frame(&Vector::from_column_slice(args.v0))?;
    let cfg = IntegratorConfig::new(args.dt, args.steps)?;
    let traj = thermostat::integrate(&w, &v0, &cfg)?;
    let path = match args.reconstruct {
        None => None,
        Some(ChartArg::Sol) => Some(thermostat::reconstruct(&w, &traj, CoordinateModel::Sol)?),
        Some(ChartArg::Hyperbolic) => Some(thermostat::reconstruct(&w, &traj, CoordinateModel::Hyperbolic)?),
    };
    if let Some(out) = args.out {
        let io = |e: csv::Error| CliError::Io { path: out.display().to_string(), source: e.into() };
        let mut wtr = csv::Writer::from_path(out).map_err(io)?;
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("v{i}")));
        header.push("energy".into());
        if let Some(p) = &path {
            header.extend(p.names.iter().cloned());
        }
        wtr.write_record(&header).map_err(io)?;
        for (idx, state) in traj.states.iter().enumerate() {
            if idx % args.every != 0 && idx != traj.states.len() - 1 {
                continue;
            }
            let mut row = vec![format_f64(state.t)];
            row.extend(state.v.iter().map(|x| format_f64(*x)));
            row.push(format_f64(traj.energy[idx]));
            if let Some(p) = &path {
                row.extend(p.points[idx].iter().map(|x| format_f64(*x)));
            }
            wtr.write_record(&row).map_err(io)?;
        }
        wtr.flush().map_err(|e| CliError::io(out, e))?;
    }
    let last = traj.states.last().expect("trajectory has the initial state");
    let final_v = Vector::from_column_slice(&last.v);
    let mut result = json!({
        "dt": args.dt,
        "steps": args.steps,
        "final_time": last.t,
        "initial_velocity": frame_and_user(&model.space, &v0),
        "final_velocity": frame_and_user(&model.space, &final_v),
        "energy_initial": traj.energy[0],
        "energy_final": traj.energy[traj.energy.len() - 1],
        "relative_energy_drift": traj.relative_drift,
        "csv": args.out.map(|p| p.display().to_string()),
    });
    if let Some(p) = &path {
        result["chart"] = json!({
            "model": p.model.as_str(),
            "names": p.names,
            "final_point": p.points.last().expect("path has the initial point"),
        });
    }
    Ok(Outcome::new(result, tol))
}
