use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use cheeger_flow::{
    area_law_check, cap_area_evolution_residuals, cap_balance_identity, convergence_order,
    detect_stationarity, evolve, heat_equation_residual, length_evolution_residual,
    length_ratio_identity, monotonicity_check, ConvergenceStudy, EvolveError, FlowState, FlowTrace,
    MonotonicityViolation, OrderEstimate, ResidualReport, ScenarioSpec, StopReason,
    SurfaceGeometry, SurfaceProfile,
};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::{RunConfig, Verification};
use crate::csv::{format_float, trace_csv};

/// Bumped whenever a column or report field changes meaning.
pub const ARTIFACT_VERSION: u32 = 1;

pub const IDENTITY_SAMPLES: usize = 1000;
pub const IDENTITY_TOL: f64 = 1e-12;
/// Accepted range for the measured convergence order of the residuals.
pub const ORDER_RANGE: (f64, f64) = (1.7, 2.3);

#[derive(Debug, Error)]
pub enum RunError {
    #[error("scenario setup failed: {0}")]
    Setup(#[from] cheeger_flow::Error),
    #[error("flow failed: {0}")]
    Flow(#[from] Box<EvolveError>),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: Verification,
    pub passed: bool,
    /// The measured quantity compared against `limit`.
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagedResidual {
    /// `initial` or `final`.
    pub stage: &'static str,
    pub max_abs_curvature: f64,
    pub report: ResidualReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedStudy {
    pub residual: &'static str,
    pub study: ConvergenceStudy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub artifact_version: u32,
    pub config: RunConfig,
    pub stop_reason: Option<StopReason>,
    pub steps: usize,
    pub final_time: f64,
    pub final_area: f64,
    pub checks: Vec<CheckOutcome>,
    pub residuals: Vec<StagedResidual>,
    pub monotonicity_violations: Vec<MonotonicityViolation>,
    pub stationarity_times: Vec<f64>,
    pub convergence: Vec<NamedStudy>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub trace: FlowTrace,
}

type ResidualFn = fn(&SurfaceProfile) -> cheeger_flow::Result<ResidualReport>;

fn plus_residual(p: &SurfaceProfile) -> cheeger_flow::Result<ResidualReport> {
    Ok(cap_area_evolution_residuals(p)?.0)
}

fn minus_residual(p: &SurfaceProfile) -> cheeger_flow::Result<ResidualReport> {
    Ok(cap_area_evolution_residuals(p)?.1)
}

fn residual_fns(v: Verification) -> &'static [(&'static str, ResidualFn)] {
    match v {
        Verification::Residual12a => &[("length_evolution", length_evolution_residual)],
        Verification::Residual12b => &[
            ("cap_area_evolution_plus", plus_residual),
            ("cap_area_evolution_minus", minus_residual),
        ],
        Verification::ResidualHeat9 => &[("heat_equation", heat_equation_residual)],
        _ => &[],
    }
}

/// Integrates the scenario and evaluates every requested verification.
pub fn execute(config: &RunConfig) -> Result<RunOutput, RunError> {
    let spec = &config.scenario;
    let (profile, control) = spec.prepare()?;
    info!(
        "running {} on {} intervals to t = {}",
        spec.name, spec.grid_n, control.t_end
    );
    let evolution = evolve(FlowState::new(profile.clone())?, &control, |_, _| {})?;
    let trace = evolution.trace;
    let last = *trace.last().expect("a trace starts with the initial state");
    let final_profile = evolution.final_state.profile;

    let mut report = Report {
        artifact_version: ARTIFACT_VERSION,
        config: config.clone(),
        stop_reason: trace.stop_reason(),
        steps: trace.len() - 1,
        final_time: last.t,
        final_area: last.area,
        checks: Vec::new(),
        residuals: Vec::new(),
        monotonicity_violations: Vec::new(),
        stationarity_times: Vec::new(),
        convergence: Vec::new(),
    };
    let tol = config.tolerances;
    for &v in &config.verify {
        let outcome = match v {
            Verification::AreaLaw => {
                let dev = area_law_check(&trace);
                CheckOutcome {
                    name: v,
                    passed: dev <= tol.area_law,
                    value: dev,
                    limit: tol.area_law,
                    detail: "max |A(t) - (A(0) - 8πt)| / A(0)".into(),
                }
            }
            Verification::Residual12a | Verification::Residual12b | Verification::ResidualHeat9 => {
                residual_check(
                    v,
                    &[("initial", &profile), ("final", &final_profile)],
                    tol.residual,
                    &mut report,
                )?
            }
            Verification::Identities13 => identities_check(config.seed),
            Verification::Monotonicity => {
                let violations = monotonicity_check(&trace, tol.monotonicity);
                let guarded = trace.records().iter().filter(|r| r.threshold_ok).count();
                let outcome = CheckOutcome {
                    name: v,
                    passed: violations.is_empty(),
                    value: violations.len() as f64,
                    limit: 0.0,
                    detail: format!(
                        "decreases of h_sum beyond {} relative while hL < 4π ({guarded} of {} records below threshold)",
                        format_float(tol.monotonicity),
                        trace.len()
                    ),
                };
                report.monotonicity_violations = violations;
                outcome
            }
            Verification::Papasoglu => {
                let failing = trace.records().iter().filter(|r| !r.papasoglu_ok).count();
                CheckOutcome {
                    name: v,
                    passed: failing == 0,
                    value: failing as f64,
                    limit: 0.0,
                    detail: "records with h_min > 16/√A".into(),
                }
            }
            Verification::Stationarity => {
                let times = detect_stationarity(&trace, tol.stationarity);
                let outcome = CheckOutcome {
                    name: v,
                    passed: true,
                    value: times.len() as f64,
                    limit: f64::INFINITY,
                    detail: format!(
                        "times with |dh/dt| <= {}·h (informational)",
                        format_float(tol.stationarity)
                    ),
                };
                report.stationarity_times = times;
                outcome
            }
            Verification::Convergence => convergence_check(spec, &mut report)?,
        };
        report.checks.push(outcome);
    }
    Ok(RunOutput { report, trace })
}

fn residual_check(
    v: Verification,
    stages: &[(&'static str, &SurfaceProfile)],
    tol: f64,
    report: &mut Report,
) -> Result<CheckOutcome, RunError> {
    // Worst ratio of windowed sup norm to its allowance over all stages.
    let mut worst = 0.0f64;
    let mut limit = tol;
    for &(stage, p) in stages {
        let max_k = SurfaceGeometry::new(p)?.max_abs_curvature();
        let allowance = tol * max_k.max(1.0);
        for (_, f) in residual_fns(v) {
            let r = f(p)?.in_default_window();
            if r.sup_norm / allowance >= worst / limit {
                worst = r.sup_norm;
                limit = allowance;
            }
            report.residuals.push(StagedResidual {
                stage,
                max_abs_curvature: max_k,
                report: r,
            });
        }
    }
    Ok(CheckOutcome {
        name: v,
        passed: worst <= limit,
        value: worst,
        limit,
        detail: "worst windowed sup norm over initial and final profiles, θ in [0.2, π - 0.2]"
            .into(),
    })
}

/// Largest relative disagreement between the equivalent forms of the
/// cap-balance and length-ratio identities over seeded random inputs.
pub fn identity_disagreement(seed: u64, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    for _ in 0..samples {
        let mut draw = || (rng.gen_range(-5.0..5.0f64)).exp();
        let (length, plus, minus) = (draw(), draw(), draw());
        let (l, r) = cap_balance_identity(plus, minus).expect("positive inputs");
        let (a, b, c) = length_ratio_identity(length, plus, minus).expect("positive inputs");
        worst = worst
            .max(rel(l, r))
            .max(rel(a, b))
            .max(rel(a, c))
            .max(rel(b, c));
    }
    worst
}

fn identities_check(seed: u64) -> CheckOutcome {
    let worst = identity_disagreement(seed, IDENTITY_SAMPLES);
    CheckOutcome {
        name: Verification::Identities13,
        passed: worst <= IDENTITY_TOL,
        value: worst,
        limit: IDENTITY_TOL,
        detail: format!(
            "max relative spread of equivalent forms over {IDENTITY_SAMPLES} seeded samples"
        ),
    }
}

/// The configured grid and two successive refinements.
pub fn convergence_grids(n: usize) -> [usize; 3] {
    [n, 2 * n, 4 * n]
}

fn convergence_check(spec: &ScenarioSpec, report: &mut Report) -> Result<CheckOutcome, RunError> {
    let grids = convergence_grids(spec.grid_n);
    let family = |g: cheeger_flow::GridSpec| spec.name.build(&spec.parameters, g);
    let mut passed = true;
    let mut worst = f64::NAN;
    for v in [
        Verification::Residual12a,
        Verification::Residual12b,
        Verification::ResidualHeat9,
    ] {
        for &(name, f) in residual_fns(v) {
            let study = convergence_order(|p| Ok(f(p)?.in_default_window()), family, &grids)?;
            if let OrderEstimate::Order(q) = study.estimate {
                let ok = (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&q);
                passed &= ok;
                let off = |x: f64| (x - 2.0).abs();
                if worst.is_nan() || off(q) > off(worst) {
                    worst = q;
                }
            }
            report.convergence.push(NamedStudy {
                residual: name,
                study,
            });
        }
    }
    let detail = if worst.is_nan() {
        "all residuals vanish to rounding".to_string()
    } else {
        format!(
            "least-squares order on grids {grids:?}, accepted [{}, {}]",
            ORDER_RANGE.0, ORDER_RANGE.1
        )
    };
    Ok(CheckOutcome {
        name: Verification::Convergence,
        passed,
        value: worst,
        limit: 2.0,
        detail,
    })
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_text(report: &Report) -> String {
    let c = &report.config;
    let mut s = String::new();
    let params: Vec<String> = c
        .scenario
        .parameters
        .iter()
        .map(|(k, v)| format!("{k} = {v}"))
        .collect();
    let _ = writeln!(
        s,
        "scenario: {} ({}), {} intervals",
        c.scenario.name,
        params.join(", "),
        c.scenario.grid_n
    );
    let stop = report
        .stop_reason
        .map_or_else(|| "none".to_string(), |r| r.to_string());
    let _ = writeln!(
        s,
        "flow: {} steps to t = {}, area {} (stopped at {stop})",
        report.steps, report.final_time, report.final_area
    );
    for check in &report.checks {
        let _ = writeln!(
            s,
            "{} {:<16} {:.3e} (limit {:.3e}) {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name.name(),
            check.value,
            check.limit,
            check.detail
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    match report.first_failure() {
        None => {
            let _ = writeln!(s, "result: all {} checks passed", report.checks.len());
        }
        Some(first) => {
            let _ = writeln!(
                s,
                "result: {failed} of {} checks failed (first: {})",
                report.checks.len(),
                first.name
            );
        }
    }
    s
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, RunError> {
    fs::write(&path, contents).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `trace.csv`, `report.json` and `report.txt` as configured.
pub fn write_artifacts(
    output: &RunOutput,
    config: &RunConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if config.emit_csv {
        written.push(write(dir.join("trace.csv"), &trace_csv(&output.trace))?);
    }
    if config.emit_json {
        written.push(write(
            dir.join("report.json"),
            &report_json(&output.report),
        )?);
    }
    written.push(write(dir.join("report.txt"), &report_text(&output.report))?);
    Ok(written)
}

/// [`execute`] followed by [`write_artifacts`].
pub fn run(config: &RunConfig, dir: &Path) -> Result<Report, RunError> {
    let output = execute(config)?;
    write_artifacts(&output, config, dir)?;
    Ok(output.report)
}
