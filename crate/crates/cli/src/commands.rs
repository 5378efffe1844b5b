use std::path::{Path, PathBuf};

use ferro_zeros::barvinok::approx_z;
use ferro_zeros::geometry::{lambda_star_d, threshold_sweep};
use ferro_zeros::oracle::{kd_boundary_cloud, oracle_min_product, OracleProblem};
use ferro_zeros::spin::z_exact_with_budget;
use ferro_zeros::verify::{verify_sweep, SweepConfig};
use ferro_zeros::{build_geometry, Error, FieldVector, Graph, SpinParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::FileConfig;
use crate::format::{csv, emit, json as to_json};
use crate::{ApproxArgs, CliError, OracleArgs, RegionsArgs, ThresholdsArgs, VerifyArgs};

/// Graphs up to this many vertices get an exact reference value.
pub const EXACT_MAX_N: usize = 16;
pub const ORACLE_TOL: f64 = 1e-5;

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn params(beta: Option<f64>, gamma: Option<f64>) -> Result<SpinParams, CliError> {
    Ok(SpinParams::new(required(beta, "beta")?, required(gamma, "gamma")?)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))
}

fn out_path(flag: Option<PathBuf>, file: &FileConfig) -> Option<PathBuf> {
    flag.or_else(|| file.out.clone())
}

pub fn thresholds(a: ThresholdsArgs, file: &FileConfig) -> Result<(), CliError> {
    let beta = a.beta.or(file.beta).unwrap_or(2.0);
    let lo = a.gamma_lo.or(file.gamma_lo).unwrap_or(0.5);
    let hi = a.gamma_hi.or(file.gamma_hi).unwrap_or(2.0);
    let step = a.step.or(file.step).unwrap_or(0.01);
    let mut rows = Vec::new();
    for row in threshold_sweep(beta, lo, hi, step)? {
        match row.thresholds {
            Some(t) if row.gamma <= beta => {
                rows.push(vec![row.gamma, t.lambda_mcmc, t.d_c, t.lambda_c, t.d_star, t.lambda_star]);
            }
            _ => eprintln!("skipping gamma = {}: needs beta * gamma > 1 and gamma <= beta", row.gamma),
        }
    }
    let header = ["gamma", "lambda_mcmc", "d_c", "lambda_c", "d_star", "lambda_star"];
    emit(out_path(a.out, file).as_deref(), &csv(&header, &rows))
}

#[derive(Serialize)]
struct Cloud {
    d: usize,
    /// Smallest point of the cloud on the positive real axis.
    intercept: Option<f64>,
    points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct Regions {
    beta: f64,
    gamma: f64,
    samples: usize,
    restarts: usize,
    seed: u64,
    clouds: Vec<Cloud>,
}

pub fn regions(a: RegionsArgs, file: &FileConfig) -> Result<(), CliError> {
    let p = params(a.beta.or(file.beta), a.gamma.or(file.gamma))?;
    let d_list = a.d_list.or_else(|| file.d_list.clone()).unwrap_or_else(|| vec![2, 3, 4]);
    let samples = a.samples.or(file.samples).unwrap_or(360);
    let restarts = a.restarts.or(file.restarts).unwrap_or(16);
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let geometry = build_geometry(&p);
    let mut clouds = Vec::new();
    for &d in &d_list {
        let pts = kd_boundary_cloud(&geometry, d, samples, restarts, seed)?;
        let intercept = pts.iter().filter(|z| z.im == 0.0 && z.re > 0.0).map(|z| z.re).reduce(f64::min);
        clouds.push(Cloud { d, intercept, points: pts.iter().map(|z| [z.re, z.im]).collect() });
    }
    if let Some(best) = clouds.iter().filter(|c| c.intercept.is_some()).min_by(|x, y| x.intercept.partial_cmp(&y.intercept).unwrap()) {
        eprintln!("smallest positive-real intercept: d = {}, {}", best.d, best.intercept.unwrap());
    }
    let doc = Regions { beta: p.beta(), gamma: p.gamma(), samples, restarts, seed, clouds };
    emit(out_path(a.out, file).as_deref(), &to_json(&doc)?)
}

pub fn verify(a: VerifyArgs, file: &FileConfig) -> Result<(), CliError> {
    let pairs = match (a.beta.or(file.beta), a.gamma.or(file.gamma)) {
        (None, None) => vec![(3.0, 4.0 / 3.0), (4.0, 0.5), (2.0, 2.0), (2.0, 1.01)],
        (b, g) => vec![(required(b, "beta")?, required(g, "gamma")?)],
    };
    let config = SweepConfig {
        count: a.count.or(file.count).unwrap_or(100),
        n_max: a.n_max.or(file.n_max).unwrap_or(12),
        deg_max: a.deg_max.or(file.deg_max).unwrap_or(5),
        params: pairs.into_iter().map(|(b, g)| SpinParams::new(b, g)).collect::<Result<_, _>>()?,
        seed: a.seed.or(file.seed).unwrap_or(7),
        safety: a.safety.or(file.safety).unwrap_or(0.9),
    };
    let summary = verify_sweep(&config)?;
    emit(out_path(a.out, file).as_deref(), &to_json(&summary)?)?;
    eprintln!("{}/{} cases pass", summary.passed, summary.total);
    if summary.passed < summary.total {
        return Err(CliError::Failure(format!("{} of {} cases failed", summary.total - summary.passed, summary.total)));
    }
    Ok(())
}

pub fn approx(a: ApproxArgs, file: &FileConfig) -> Result<(), CliError> {
    let p = params(a.beta.or(file.beta), a.gamma.or(file.gamma))?;
    let epsilon = a.epsilon.or(file.epsilon).unwrap_or(1e-2);
    let graph_path = required(a.graph.or_else(|| file.graph.clone()), "graph")?;
    let g = Graph::parse_edge_list(&read(&graph_path)?)?;
    let fields = match a.fields.or_else(|| file.fields.clone()) {
        Some(path) => FieldVector::parse(&read(&path)?)?,
        None => FieldVector::uniform(g.n(), required(a.lambda.or(file.lambda), "lambda or --fields")?),
    };
    let result = approx_z(&g, &p, &fields, epsilon)?;
    let mut doc = serde_json::to_value(&result).map_err(|e| CliError::Failure(e.to_string()))?;

    let mut failure = None;
    let exact = if g.n() <= EXACT_MAX_N {
        match z_exact_with_budget(&g, &p, &fields, 1u128 << EXACT_MAX_N) {
            Ok(z) => {
                let rel = (result.value - z).norm() / z.norm();
                if !(rel <= epsilon) {
                    failure = Some(format!("relative error {rel:e} exceeds epsilon {epsilon:e}"));
                }
                json!({ "value": z.re, "value_im": z.im, "relative_error": rel })
            }
            Err(Error::OverBudget { .. }) => Value::Null,
            Err(e) => return Err(e.into()),
        }
    } else {
        Value::Null
    };
    if let Value::Object(map) = &mut doc {
        map.insert("n".into(), json!(g.n()));
        map.insert("exact".into(), exact);
    }
    emit(out_path(a.out, file).as_deref(), &to_json(&doc)?)?;
    match failure {
        Some(msg) => Err(CliError::Failure(msg)),
        None => Ok(()),
    }
}

pub fn oracle(a: OracleArgs, file: &FileConfig) -> Result<(), CliError> {
    let p = params(a.beta.or(file.beta), a.gamma.or(file.gamma))?;
    let d_max = a.d_max.or(file.d_max).unwrap_or(8);
    let restarts = a.restarts.or(file.restarts).unwrap_or(64);
    let seed = a.seed.or(file.seed).unwrap_or(0);
    if d_max < 2 {
        return Err(CliError::Usage(format!("--d-max must be at least 2, got {d_max}")));
    }
    let geometry = build_geometry(&p);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for d in 2..=d_max {
        let closed = lambda_star_d(&geometry, d as f64);
        let problem = OracleProblem::new(geometry.region, d, 0.0)?;
        let numeric = match oracle_min_product(&problem, restarts, seed.wrapping_add(d as u64)) {
            Ok(sol) => sol.value,
            Err(Error::Infeasible { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        let gap = match (closed.is_finite(), numeric.is_finite()) {
            (true, true) => (numeric - closed).abs() / closed,
            (false, false) => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(gap);
        rows.push(vec![d as f64, closed, numeric, gap]);
    }
    emit(out_path(a.out, file).as_deref(), &csv(&["d", "closed_form", "oracle", "relative_gap"], &rows))?;
    if worst > ORACLE_TOL {
        return Err(CliError::Failure(format!("oracle and closed form differ by {worst:e} (tolerance {ORACLE_TOL:e})")));
    }
    Ok(())
}
