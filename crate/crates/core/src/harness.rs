//! Monte Carlo experiment runner: paired-stream scenario simulation, ARMSE
//! metrics, per-step timing, and report serialization in CSV and JSON-lines
//! form.

use crate::casefile::PowerNetwork;
use crate::filters::{step, FilterConfig, FilterState, MeasurementModel};
use crate::noisegen::{apply_bad_data, derive_stream, Scenario, StreamRole};
use crate::psmodel::{measure_packed, simulate_truth, HoltState, MeasurementPlan, StateVector};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Schema version stamped into all report files.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serde(String),
    #[error("{0}")]
    Invalid(String),
}

/// Measurement model binding a network and a plan.
pub struct NetworkModel<'a> {
    pub net: &'a PowerNetwork,
    pub plan: &'a MeasurementPlan,
}

impl MeasurementModel for NetworkModel<'_> {
    fn dim(&self) -> usize {
        self.plan.m()
    }
    fn eval(&self, u: &DVector<f64>) -> DVector<f64> {
        measure_packed(self.net, u, self.plan)
    }
}

/// How the scalar ARMSE aggregates the per-time RMSE series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RmseConvention {
    /// Sum of per-time RMSE values divided by the sample count, i.e. the
    /// per-time formula carried verbatim with its outer /N.
    #[default]
    AsPrinted,
    /// Root of the mean square over buses, experiments, and time.
    InsideRoot,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InitialConditions {
    /// Initial state covariance scale P_00.
    pub p0: f64,
    /// Initial process noise diagonal Q_0.
    pub q0: f64,
    /// Initial measurement noise diagonal R_0.
    pub r0: f64,
}

impl Default for InitialConditions {
    fn default() -> Self {
        InitialConditions {
            p0: 1e-2,
            q0: 1e-5,
            r0: 1e-2,
        }
    }
}

/// Everything one Monte Carlo comparison run needs besides the network.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub filters: Vec<(String, FilterConfig)>,
    /// Monte Carlo repetitions D.
    pub monte_carlo: usize,
    /// Horizon T.
    pub horizon: usize,
    pub base_seed: u64,
    pub init: InitialConditions,
    pub holt_level: f64,
    pub holt_trend: f64,
    pub rmse_convention: RmseConvention,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterReport {
    pub name: String,
    /// Per-time RMSE of the voltage magnitudes.
    pub rmse_v: Vec<f64>,
    /// Per-time RMSE of the voltage phases.
    pub rmse_phi: Vec<f64>,
    pub armse_v: f64,
    pub armse_phi: f64,
    pub mean_step_seconds: f64,
    pub fallbacks: u64,
    pub jitter_events: u64,
    pub step_failures: u64,
    /// Histogram of fixed-point iteration counts; index i counts steps that
    /// used i iterations (saturating at the configured maximum).
    pub iteration_histogram: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub config_hash: String,
    pub base_seed: u64,
    pub code_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub provenance: Provenance,
    pub bus_count: usize,
    pub monte_carlo: usize,
    pub horizon: usize,
    pub floor_events: u64,
    pub filters: Vec<FilterReport>,
}

/// The ARMSE metric over a set of trajectories.
///
/// `estimates[j][t]` and `truths[j][t]` hold the compared components for
/// experiment j at time t. Per time step the squared errors are averaged
/// over `a * d` and rooted; the scalar aggregates over the `n` samples per
/// the chosen convention.
pub fn armse(
    estimates: &[Vec<DVector<f64>>],
    truths: &[Vec<DVector<f64>>],
    a: usize,
    d: usize,
    n: usize,
    convention: RmseConvention,
) -> Result<f64, HarnessError> {
    if estimates.len() != d || truths.len() != d {
        return Err(HarnessError::Shape(format!(
            "expected {d} experiments, got {} and {}",
            estimates.len(),
            truths.len()
        )));
    }
    let mut sq_per_t = vec![0.0; n];
    for (est_run, truth_run) in estimates.iter().zip(truths.iter()) {
        if est_run.len() != n || truth_run.len() != n {
            return Err(HarnessError::Shape(format!(
                "expected horizon {n}, got {} and {}",
                est_run.len(),
                truth_run.len()
            )));
        }
        for t in 0..n {
            if est_run[t].len() != truth_run[t].len() {
                return Err(HarnessError::Shape(
                    "estimate/truth component mismatch".into(),
                ));
            }
            sq_per_t[t] += (&est_run[t] - &truth_run[t]).norm_squared();
        }
    }
    Ok(aggregate(&sq_per_t, a, d, n, convention))
}

fn aggregate(sq_per_t: &[f64], a: usize, d: usize, n: usize, convention: RmseConvention) -> f64 {
    let ad = (a * d) as f64;
    match convention {
        RmseConvention::AsPrinted => {
            sq_per_t.iter().map(|s| (s / ad).sqrt()).sum::<f64>() / n as f64
        }
        RmseConvention::InsideRoot => {
            (sq_per_t.iter().sum::<f64>() / (ad * n as f64)).sqrt()
        }
    }
}

struct PerFilterAccumulator {
    sq_v: Vec<f64>,
    sq_phi: Vec<f64>,
    step_seconds: f64,
    steps_timed: u64,
    fallbacks: u64,
    jitter_events: u64,
    step_failures: u64,
    iteration_histogram: Vec<u64>,
}

impl PerFilterAccumulator {
    fn new(horizon: usize, max_iters: usize) -> Self {
        PerFilterAccumulator {
            sq_v: vec![0.0; horizon],
            sq_phi: vec![0.0; horizon],
            step_seconds: 0.0,
            steps_timed: 0,
            fallbacks: 0,
            jitter_events: 0,
            step_failures: 0,
            iteration_histogram: vec![0; max_iters + 1],
        }
    }

    fn merge(&mut self, other: &PerFilterAccumulator) {
        for (a, b) in self.sq_v.iter_mut().zip(&other.sq_v) {
            *a += b;
        }
        for (a, b) in self.sq_phi.iter_mut().zip(&other.sq_phi) {
            *a += b;
        }
        self.step_seconds += other.step_seconds;
        self.steps_timed += other.steps_timed;
        self.fallbacks += other.fallbacks;
        self.jitter_events += other.jitter_events;
        self.step_failures += other.step_failures;
        for (a, b) in self
            .iteration_histogram
            .iter_mut()
            .zip(&other.iteration_histogram)
        {
            *a += b;
        }
    }
}

/// Run the full paired Monte Carlo comparison.
///
/// Every experiment simulates one truth trajectory and feeds the identical
/// measurement stream to every configured filter; experiments run in
/// parallel over deterministic per-experiment noise streams.
pub fn run_experiment(
    net: &PowerNetwork,
    plan: &MeasurementPlan,
    u0: &StateVector,
    spec: &ExperimentSpec,
    config_hash: &str,
) -> Result<RunReport, HarnessError> {
    plan.validate(net)
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    if spec.monte_carlo == 0 || spec.horizon == 0 {
        return Err(HarnessError::Invalid(
            "monte_carlo and horizon must be at least 1".into(),
        ));
    }
    if let Some(schedule) = &spec.scenario.bad_data {
        schedule
            .validate(spec.horizon)
            .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    }
    for (name, cfg) in &spec.filters {
        cfg.validate()
            .map_err(|e| HarnessError::Invalid(format!("filter '{name}': {e}")))?;
    }

    let n_bus = net.bus_count();
    let t_len = spec.horizon;
    let packed0 = u0.pack(net.slack_index);
    let holt0 = HoltState::new(&packed0, spec.holt_level, spec.holt_trend)
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;
    let model = NetworkModel { net, plan };
    let max_hist = spec
        .filters
        .iter()
        .map(|(_, c)| c.fixed_point_max_iters)
        .max()
        .unwrap_or(1);

    let results: Vec<(Vec<PerFilterAccumulator>, u64)> = (0..spec.monte_carlo)
        .into_par_iter()
        .map(|exp| {
            let mut q_rng = derive_stream(spec.base_seed, exp as u64, StreamRole::Process);
            let mut r_rng = derive_stream(spec.base_seed, exp as u64, StreamRole::Measurement);
            // Both channels draw their impulse randomness from one shared
            // stream; the per-step call order (process, then measurement)
            // is fixed, so this stays deterministic.
            let i_rng =
                std::cell::RefCell::new(derive_stream(spec.base_seed, exp as u64, StreamRole::Impulse));
            let scenario = &spec.scenario;
            let mut qgen =
                |d: usize| scenario.process.sample(&mut q_rng, &mut i_rng.borrow_mut(), d);
            let mut rgen =
                |d: usize| scenario.measurement.sample(&mut r_rng, &mut i_rng.borrow_mut(), d);
            let traj = simulate_truth(net, plan, u0, t_len, &holt0, &mut qgen, &mut rgen);

            let mut accs: Vec<PerFilterAccumulator> = spec
                .filters
                .iter()
                .map(|_| PerFilterAccumulator::new(t_len, max_hist))
                .collect();

            for ((_, cfg), acc) in spec.filters.iter().zip(accs.iter_mut()) {
                let mut state = FilterState::init(
                    &packed0,
                    spec.init.p0,
                    spec.init.q0,
                    spec.init.r0,
                    plan.m(),
                    spec.holt_level,
                    spec.holt_trend,
                )
                .expect("validated Holt coefficients");
                for t in 1..=t_len {
                    let mut v = traj.measurements[t - 1].clone();
                    if let Some(schedule) = &scenario.bad_data {
                        v = apply_bad_data(&v, t, schedule, plan);
                    }
                    let started = Instant::now();
                    match step(&state, &v, &model, cfg) {
                        Ok((next, diag)) => {
                            acc.step_seconds += started.elapsed().as_secs_f64();
                            acc.steps_timed += 1;
                            if diag.fallback {
                                acc.fallbacks += 1;
                            }
                            acc.jitter_events += diag.jitter_events as u64;
                            let bucket = diag.iterations.min(max_hist);
                            acc.iteration_histogram[bucket] += 1;
                            state = next;
                        }
                        Err(_) => {
                            // Freeze the estimate for this step; the batch
                            // must never abort on one filter's failure.
                            acc.step_seconds += started.elapsed().as_secs_f64();
                            acc.steps_timed += 1;
                            acc.step_failures += 1;
                            state.step_index = t;
                        }
                    }
                    let truth = &traj.states[t - 1];
                    let mut sq_v = 0.0;
                    for i in 0..n_bus {
                        let dv = state.mean[i] - truth[i];
                        sq_v += dv * dv;
                    }
                    let mut sq_phi = 0.0;
                    for i in n_bus..(2 * n_bus - 1) {
                        let dp = state.mean[i] - truth[i];
                        sq_phi += dp * dp;
                    }
                    acc.sq_v[t - 1] += sq_v;
                    acc.sq_phi[t - 1] += sq_phi;
                }
            }
            (accs, traj.floor_events as u64)
        })
        .collect();

    // Order-stable sequential reduction keeps reports byte-deterministic.
    let mut totals: Vec<PerFilterAccumulator> = spec
        .filters
        .iter()
        .map(|_| PerFilterAccumulator::new(t_len, max_hist))
        .collect();
    let mut floor_events = 0u64;
    for (accs, floors) in &results {
        floor_events += floors;
        for (total, acc) in totals.iter_mut().zip(accs.iter()) {
            total.merge(acc);
        }
    }

    let a = n_bus;
    let d = spec.monte_carlo;
    let filters = spec
        .filters
        .iter()
        .zip(totals.iter())
        .map(|((name, _), acc)| {
            let ad = (a * d) as f64;
            let rmse_v: Vec<f64> = acc.sq_v.iter().map(|s| (s / ad).sqrt()).collect();
            let rmse_phi: Vec<f64> = acc.sq_phi.iter().map(|s| (s / ad).sqrt()).collect();
            FilterReport {
                name: name.clone(),
                armse_v: aggregate(&acc.sq_v, a, d, t_len, spec.rmse_convention),
                armse_phi: aggregate(&acc.sq_phi, a, d, t_len, spec.rmse_convention),
                rmse_v,
                rmse_phi,
                mean_step_seconds: if acc.steps_timed > 0 {
                    acc.step_seconds / acc.steps_timed as f64
                } else {
                    0.0
                },
                fallbacks: acc.fallbacks,
                jitter_events: acc.jitter_events,
                step_failures: acc.step_failures,
                iteration_histogram: acc.iteration_histogram.clone(),
            }
        })
        .collect();

    Ok(RunReport {
        provenance: Provenance {
            schema_version: REPORT_SCHEMA_VERSION,
            config_hash: config_hash.to_string(),
            base_seed: spec.base_seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        bus_count: n_bus,
        monte_carlo: d,
        horizon: t_len,
        floor_events,
        filters,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub filter: String,
    pub armse_v: f64,
    pub armse_phi: f64,
    pub mean_step_ms: f64,
    pub fallbacks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub filter: String,
    pub metric: String,
    pub t: usize,
    pub value: f64,
}

pub fn summary_rows(report: &RunReport) -> Vec<SummaryRow> {
    report
        .filters
        .iter()
        .map(|f| SummaryRow {
            filter: f.name.clone(),
            armse_v: f.armse_v,
            armse_phi: f.armse_phi,
            mean_step_ms: f.mean_step_seconds * 1e3,
            fallbacks: f.fallbacks,
        })
        .collect()
}

pub fn series_rows(report: &RunReport) -> Vec<SeriesRow> {
    let mut rows = Vec::new();
    for f in &report.filters {
        for (metric, series) in [("rmse_v", &f.rmse_v), ("rmse_phi", &f.rmse_phi)] {
            for (t, value) in series.iter().enumerate() {
                rows.push(SeriesRow {
                    filter: f.name.clone(),
                    metric: metric.to_string(),
                    t: t + 1,
                    value: *value,
                });
            }
        }
    }
    rows
}

/// Write the summary table, the long-format series, and the full report.
/// Returns the paths written.
pub fn emit_report(
    report: &RunReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let summary = summary_rows(report);
    let series = series_rows(report);
    match format {
        ReportFormat::Csv => {
            let path = out_dir.join("summary.csv");
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "filter,armse_v,armse_phi,mean_step_ms,fallbacks")?;
            for r in &summary {
                writeln!(
                    f,
                    "{},{},{},{},{}",
                    r.filter, r.armse_v, r.armse_phi, r.mean_step_ms, r.fallbacks
                )?;
            }
            written.push(path);

            let path = out_dir.join("series.csv");
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "filter,metric,t,value")?;
            for r in &series {
                writeln!(f, "{},{},{},{}", r.filter, r.metric, r.t, r.value)?;
            }
            written.push(path);
        }
        ReportFormat::JsonLines => {
            let path = out_dir.join("summary.jsonl");
            write_jsonl(&path, &summary)?;
            written.push(path);
            let path = out_dir.join("series.jsonl");
            write_jsonl(&path, &series)?;
            written.push(path);
        }
    }

    let path = out_dir.join("report.json");
    let json =
        serde_json::to_string_pretty(report).map_err(|e| HarnessError::Serde(e.to_string()))?;
    std::fs::write(&path, json + "\n")?;
    written.push(path);
    Ok(written)
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut f = std::fs::File::create(path)?;
    for row in rows {
        let line = serde_json::to_string(row).map_err(|e| HarnessError::Serde(e.to_string()))?;
        writeln!(f, "{line}")?;
    }
    Ok(())
}

pub fn read_summary_jsonl(path: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    read_jsonl(path)
}

pub fn read_series_jsonl(path: &Path) -> Result<Vec<SeriesRow>, HarnessError> {
    read_jsonl(path)
}

pub fn read_report_json(path: &Path) -> Result<RunReport, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Serde(e.to_string()))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| HarnessError::Serde(e.to_string())))
        .collect()
}

/// Stable hex digest of a config's canonical text form.
pub fn config_hash(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(16);
    for b in digest.iter().take(8) {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
