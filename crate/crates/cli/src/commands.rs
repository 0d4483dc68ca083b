use ppt_robust::montecarlo::{
    ball_fraction_estimate, verify_ball, verify_separable_mixing, SamplerConfig, VerificationOutcome,
};
use ppt_robust::operator::DensityMatrix;
use ppt_robust::oracle::{grid_lambda, GridOracleConfig};
use ppt_robust::robustness::{
    build_profile, crossing_x0, entanglement_threshold_upb, interior_grid, radius_y0, verify_maximal_robustness,
    LineFamily, MaximalRobustnessReport, RadiusInputs, RadiusMode,
};
use ppt_robust::upb::{by_name, omega_state, UpbSet, CATALOG};
use ppt_robust::witness::{build_witness, compute_lambda_any, LambdaResult, SeesawConfig, UpbWitness};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Command, RunArgs, RunConfig};
use crate::report::{rows_from_objects, Report, Table};
use crate::{CliError, Status};

/// Fraction of the radius used for the ball check.
pub const Y_FRACTION: f64 = 0.99;
/// Fraction of λ used for the separable mixing check.
pub const Z_FRACTION: f64 = 0.99;
/// Product terms in each random separable state.
pub const MIXTURE_TERMS: usize = 4;
/// Largest weight toward the maximal-robustness direction.
pub const Z_MAX: f64 = 0.999;

const BALL_STREAM: u64 = 1;
const MIXING_STREAM: u64 = 2;
const MEMBERSHIP_STREAM: u64 = 3;

/// Agreement required between the see-saw and the grid oracle.
pub fn oracle_tolerance(parties: usize) -> f64 {
    if parties > 2 {
        1e-5
    } else {
        1e-6
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub status: Status,
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let config = RunConfig::from_command(command);
    match command {
        Command::UpbList(_) => upb_list(&config),
        Command::Lambda(r) => lambda(&config, r),
        Command::Profile(r) => profile(&config, r),
        Command::Verify(r) => verify(&config, r),
        Command::Membership(r) => membership(&config, r),
        Command::Export(r) => export(&config, r),
    }
}

fn load(name: &str) -> Result<UpbSet<f64>, CliError> {
    by_name::<f64>(name).map_err(|e| CliError::Usage(e.to_string()))
}

fn seesaw_config(args: &RunArgs) -> SeesawConfig {
    SeesawConfig { seed: args.seed, ..SeesawConfig::default() }
}

fn convergence(lam: &LambdaResult<f64>) -> Status {
    if lam.converged {
        Status::Ok
    } else {
        Status::NotConverged
    }
}

fn upb_list(config: &RunConfig) -> Result<Outcome, CliError> {
    let entries: Vec<Value> = CATALOG
        .iter()
        .map(|name| {
            let upb = by_name::<f64>(name)?;
            let dims = upb.structure().local_dims();
            Ok(json!({
                "name": name,
                "dims": dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x"),
                "parties": dims.len(),
                "members": upb.len(),
                "total_dim": upb.total_dim(),
            }))
        })
        .collect::<Result<_, ppt_robust::Error>>()?;
    let headers = vec!["name", "dims", "parties", "members", "total_dim"];
    let entries = Value::Array(entries);
    let table = Table { rows: rows_from_objects(&entries, &headers), headers };
    let report = Report::new(config, json!({ "upbs": entries }), "result.upbs", table)?;
    Ok(Outcome { report, status: Status::Ok })
}

#[derive(Serialize)]
struct LambdaReport {
    lambda: f64,
    restarts: usize,
    converged: bool,
    distinct_minimizers: usize,
    minimizer_vectors: Vec<Vec<[f64; 2]>>,
    grid_oracle_value: f64,
    grid_points: usize,
    agreement: f64,
    agreement_tolerance: f64,
    seesaw: SeesawConfig,
    grid_oracle: GridOracleConfig,
}

fn lambda(config: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let upb = load(&args.upb)?;
    let cfg = seesaw_config(args);
    let lam = compute_lambda_any(&upb, &cfg)?;
    let oracle_cfg = GridOracleConfig::default();
    let oracle = grid_lambda(&upb, &oracle_cfg);
    let minimizer_vectors: Vec<Vec<[f64; 2]>> =
        lam.minimizer.locals().iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect();

    let mut rows = Vec::new();
    for (party, v) in minimizer_vectors.iter().enumerate() {
        for (index, [re, im]) in v.iter().enumerate() {
            rows.push(vec![json!(party), json!(index), json!(re), json!(im)]);
        }
    }
    let result = LambdaReport {
        lambda: lam.lambda,
        restarts: lam.restarts_used,
        converged: lam.converged,
        distinct_minimizers: lam.minimizers.len(),
        minimizer_vectors,
        grid_oracle_value: oracle.value,
        grid_points: oracle.grid_points,
        agreement: (lam.lambda - oracle.value).abs(),
        agreement_tolerance: oracle_tolerance(upb.structure().parties()),
        seesaw: cfg,
        grid_oracle: oracle_cfg,
    };
    let table = Table { headers: vec!["party", "index", "re", "im"], rows };
    let report = Report::new(config, result, "result.minimizer_vectors", table)?;
    Ok(Outcome { report, status: convergence(&lam) })
}

struct Line {
    lam: LambdaResult<f64>,
    uw: UpbWitness<f64>,
    omega: DensityMatrix<f64>,
}

fn line(args: &RunArgs) -> Result<Line, CliError> {
    let upb = load(&args.upb)?;
    let omega = omega_state(&upb)?;
    let lam = compute_lambda_any(&upb, &seesaw_config(args))?;
    let uw = build_witness(&upb, &lam)?;
    Ok(Line { lam, uw, omega })
}

fn profile(config: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let l = line(args)?;
    let profile = build_profile(&args.upb, &l.uw, args.grid)?;
    let crossing = crossing_x0(l.uw.n, l.uw.dim, l.uw.lambda)?;
    let formula_inside = crossing.formula > crossing.x_star && crossing.formula < 1.0;
    let mut result = serde_json::to_value(&profile)?;
    let extra = json!({
        "radius_mode_default": RadiusMode::default(),
        "crossing": crossing,
        "x0_formula_check": {
            "root": crossing.root,
            "formula": crossing.formula,
            "formula_inside_interval": formula_inside,
            "note": "the closed-form x0 expression does not solve the branch equation; the bisection root is used",
        },
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    let headers = vec!["x", "y0_tight", "y0_averaged"];
    let table = Table { rows: rows_from_objects(&result["radius_samples"], &headers), headers };
    let report = Report::new(config, result, "result.radius_samples", table)?;
    Ok(Outcome { report, status: convergence(&l.lam) })
}

#[derive(Serialize)]
struct VerifyReport {
    lambda: f64,
    x_star: f64,
    ball: VerificationOutcome,
    separable_mixing: VerificationOutcome,
    maximal_direction: MaximalRobustnessReport<f64>,
    passed: bool,
}

fn verify(config: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    if args.trials == 0 || args.grid == 0 {
        return Err(CliError::Usage("verify needs --trials and --grid of at least 1".into()));
    }
    let l = line(args)?;
    let x_star = entanglement_threshold_upb(&l.uw)?.x_star;
    let x_grid = interior_grid(x_star, args.grid);

    let ball_cfg = SamplerConfig::new(args.seed, args.trials, BALL_STREAM);
    let ball = verify_ball(&args.upb, &l.omega, &l.uw, &x_grid, Y_FRACTION, RadiusMode::Tight, &ball_cfg)?;
    let mixing_cfg = SamplerConfig::new(args.seed, args.trials, MIXING_STREAM);
    let mixing = verify_separable_mixing(&args.upb, &l.omega, &l.uw, Z_FRACTION, MIXTURE_TERMS, &mixing_cfg)?;

    let fam = LineFamily::new(l.omega.clone());
    let direction = l.lam.minimizer.density(l.omega.structure())?;
    let z_grid: Vec<f64> = (0..=args.grid).map(|k| Z_MAX * k as f64 / args.grid as f64).collect();
    let maximal = verify_maximal_robustness(&fam, 1.0, &l.uw.witness, &direction, &z_grid)?;

    let passed = ball.passed() && mixing.passed() && maximal.all_passed;
    let rows = [("ball", &ball), ("separable_mixing", &mixing)]
        .iter()
        .map(|(name, o)| {
            vec![
                json!(name),
                json!(o.trials),
                json!(o.ppt_violations),
                json!(o.witness_violations),
                json!(o.worst_margin),
            ]
        })
        .chain(std::iter::once(vec![
            json!("maximal_direction"),
            json!(maximal.points.len()),
            json!(maximal.points.iter().filter(|p| !p.ppt).count()),
            json!(maximal.points.iter().filter(|p| !p.witness_negative).count()),
            json!(maximal
                .points
                .iter()
                .map(|p| (p.min_pt_eigenvalue + ppt_robust::operator::PSD_TOL).min(-p.witness_value))
                .fold(f64::INFINITY, f64::min)),
        ]))
        .collect();
    let table =
        Table { headers: vec!["check", "trials", "ppt_violations", "witness_violations", "worst_margin"], rows };
    let result = VerifyReport {
        lambda: l.uw.lambda,
        x_star,
        ball,
        separable_mixing: mixing,
        maximal_direction: maximal,
        passed,
    };
    let report = Report::new(config, result, "", table)?;
    let status = if !l.lam.converged {
        Status::NotConverged
    } else if passed {
        Status::Ok
    } else {
        Status::Violation
    };
    Ok(Outcome { report, status })
}

#[derive(Serialize)]
struct MembershipReport {
    x: f64,
    radius: f64,
    radius_mode: RadiusMode,
    hits: usize,
    trials: usize,
    fraction: f64,
    ci_low: f64,
    ci_high: f64,
    confidence: f64,
    sampler: SamplerConfig,
}

fn membership(config: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("membership needs --trials of at least 1".into()));
    }
    let l = line(args)?;
    let x = crossing_x0(l.uw.n, l.uw.dim, l.uw.lambda)?.root;
    let mode = RadiusMode::Tight;
    let radius = radius_y0(&RadiusInputs::from_upb(&l.uw), x, mode)?;
    let center = LineFamily::new(l.omega.clone()).member(x)?;
    let cfg = SamplerConfig::new(args.seed, args.trials, MEMBERSHIP_STREAM);
    let est = ball_fraction_estimate(&center, radius, &cfg)?;
    let result = MembershipReport {
        x,
        radius,
        radius_mode: mode,
        hits: est.hits,
        trials: est.trials,
        fraction: est.fraction,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        confidence: 0.95,
        sampler: cfg,
    };
    let headers = vec!["x", "radius", "hits", "trials", "fraction", "ci_low", "ci_high"];
    let value = serde_json::to_value(&result)?;
    let table = Table { rows: rows_from_objects(&Value::Array(vec![value.clone()]), &headers), headers };
    let report = Report::new(config, value, "", table)?;
    Ok(Outcome { report, status: convergence(&l.lam) })
}

fn export(config: &RunConfig, args: &RunArgs) -> Result<Outcome, CliError> {
    let export = load(&args.upb)?.to_export();
    let mut rows = Vec::new();
    for (member, locals) in export.vectors.iter().enumerate() {
        for (party, v) in locals.iter().enumerate() {
            for (index, [re, im]) in v.iter().enumerate() {
                rows.push(vec![json!(member), json!(party), json!(index), json!(re), json!(im)]);
            }
        }
    }
    let table = Table { headers: vec!["member", "party", "index", "re", "im"], rows };
    let report = Report::new(config, &export, "result.vectors", table)?;
    Ok(Outcome { report, status: Status::Ok })
}
