//! The migration-inspired population optimizer, its echolocation-based
//! exploitation variant, a classic particle swarm for comparison, and the
//! filter-coefficient tuning wrapper.

pub mod benchmarks;

use crate::casefile::PowerNetwork;
use crate::filters::{FilterConfig, ThetaMode};
use crate::harness::{run_experiment, ExperimentSpec, HarnessError, InitialConditions, RmseConvention};
use crate::noisegen::Scenario;
use crate::psmodel::{MeasurementPlan, StateVector};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IsgaError {
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Benchmark(#[from] benchmarks::BenchmarkError),
    #[error("tuning: {0}")]
    Tuning(String),
}

/// One member of the population.
#[derive(Debug, Clone)]
pub struct Agent {
    pub position: DVector<f64>,
    pub velocity: DVector<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Sga,
    Isga,
    Bat,
    Pso,
}

/// Which damping coefficient the exploration velocity recursion uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DampingMode {
    /// `4t / (M e^M)`, as printed (vanishingly small for realistic M).
    #[default]
    AsPrinted,
    /// `4t / (M e^(t/M))`, the plausible intended ratio form.
    ExpRatio,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub variant: Variant,
    pub population: usize,
    pub max_iters: usize,
    pub bounds: Vec<(f64, f64)>,
    pub f_min: f64,
    pub f_max: f64,
    /// Probability that an agent takes the pulse-gated local walk around the
    /// best position during the echolocation phase.
    #[serde(default = "default_pulse_rate")]
    pub bat_pulse_rate: f64,
    /// Initial loudness: the local walk radius as a fraction of the box
    /// width.
    #[serde(default = "default_loudness")]
    pub bat_loudness: f64,
    /// Geometric per-step decay of the loudness.
    #[serde(default = "default_loudness_decay")]
    pub bat_loudness_decay: f64,
    pub seed: u64,
    #[serde(default)]
    pub sga_damping: DampingMode,
    /// Positions injected into the initial population (warm starts).
    #[serde(default)]
    pub initial_positions: Vec<Vec<f64>>,
}

fn default_pulse_rate() -> f64 {
    0.5
}

fn default_loudness() -> f64 {
    1.0
}

fn default_loudness_decay() -> f64 {
    0.9
}

impl OptimizerConfig {
    pub fn new(variant: Variant, bounds: Vec<(f64, f64)>, seed: u64) -> Self {
        OptimizerConfig {
            variant,
            population: 30,
            max_iters: 500,
            bounds,
            f_min: 10.0,
            f_max: 100.0,
            bat_pulse_rate: default_pulse_rate(),
            bat_loudness: default_loudness(),
            bat_loudness_decay: default_loudness_decay(),
            seed,
            sga_damping: DampingMode::AsPrinted,
            initial_positions: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), IsgaError> {
        if self.population < 5 {
            return Err(IsgaError::InvalidConfig(
                "population must be at least 5 (cohort split needs fifths)".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(IsgaError::InvalidConfig("max_iters must be positive".into()));
        }
        if self.bounds.is_empty() {
            return Err(IsgaError::InvalidConfig("bounds must be non-empty".into()));
        }
        for (lo, hi) in &self.bounds {
            if !(lo < hi) {
                return Err(IsgaError::InvalidConfig(format!(
                    "bound ({lo}, {hi}) must satisfy lo < hi"
                )));
            }
        }
        if self.f_min > self.f_max {
            return Err(IsgaError::InvalidConfig("f_min must not exceed f_max".into()));
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        self.bounds.len()
    }
}

/// Phase angle `omega = 2 pi t / M`: exploration below pi, exploitation from
/// pi on.
pub fn omega_phase(t: usize, max_iters: usize) -> f64 {
    2.0 * std::f64::consts::PI * t as f64 / max_iters as f64
}

fn clamp_position(x: &mut DVector<f64>, bounds: &[(f64, f64)]) {
    for (i, (lo, hi)) in bounds.iter().enumerate() {
        x[i] = x[i].clamp(*lo, *hi);
    }
}

/// Velocities are kept within one box width per dimension. The printed
/// recursion's quadratic term otherwise sends straggler velocities to
/// infinity, which poisons the position updates.
fn clamp_velocity(v: &mut DVector<f64>, bounds: &[(f64, f64)]) {
    for (i, (lo, hi)) in bounds.iter().enumerate() {
        let width = hi - lo;
        if !v[i].is_finite() {
            v[i] = 0.0;
        } else {
            v[i] = v[i].clamp(-width, width);
        }
    }
}

/// Fitness-weighted centroid `sum_i X_i f(X_i) / (n sum_i f(X_i))`,
/// including the printed 1/n. A vanishing or non-finite weight total falls
/// back to the arithmetic mean.
fn weighted_centroid(agents: &[Agent]) -> DVector<f64> {
    let d = agents[0].position.len();
    let n = agents.len() as f64;
    let total: f64 = agents.iter().map(|a| a.fitness).sum();
    if total.abs() < 1e-300 || !total.is_finite() {
        let mut c = DVector::zeros(d);
        for a in agents {
            c += &a.position;
        }
        return c / n;
    }
    let mut c = DVector::zeros(d);
    for a in agents {
        c += &a.position * a.fitness;
    }
    c / (n * total)
}

/// Herringbone exploration: cohort-specific position updates around the best
/// position, the fitness-weighted centroid, and the worst individual, plus
/// the shared velocity recursion.
pub fn explore_step(
    agents: &mut [Agent],
    best: &DVector<f64>,
    t: usize,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha12Rng,
) {
    let n = agents.len();
    let omega = omega_phase(t, cfg.max_iters);
    let damping = match cfg.sga_damping {
        DampingMode::AsPrinted => {
            let e_m = (cfg.max_iters as f64).exp();
            if e_m.is_finite() {
                4.0 * t as f64 / (cfg.max_iters as f64 * e_m)
            } else {
                0.0
            }
        }
        DampingMode::ExpRatio => {
            4.0 * t as f64 / (cfg.max_iters as f64 * (t as f64 / cfg.max_iters as f64).exp())
        }
    };
    let centroid = weighted_centroid(agents);
    let worst = agents[n - 1].position.clone();
    let first = n / 5;
    let mid_end = 4 * n / 5;

    for (i, agent) in agents.iter_mut().enumerate() {
        // Fresh scalar coefficients per agent per step; all three are always
        // drawn to keep the stream layout fixed across cohorts.
        let b = 4.0 * rng.gen::<f64>() - 2.0;
        let d_coef = 3.0 * rng.gen::<f64>() - 1.5;
        let eta = 2.0 * rng.gen::<f64>() - 1.0;

        let to_best = best - &agent.position;
        // V' = damp V + (X_b - X_i) - 1.29e-2 V^2 sin(omega) / 2, componentwise.
        let v_sq = agent.velocity.component_mul(&agent.velocity);
        let mut new_velocity =
            &agent.velocity * damping + &to_best - v_sq * (1.29e-2 * omega.sin() / 2.0);
        clamp_velocity(&mut new_velocity, &cfg.bounds);

        let mut pos = &agent.position + &to_best * b + &new_velocity;
        if i >= first {
            let to_centroid = &centroid - &agent.position;
            if i < mid_end {
                pos -= to_centroid * d_coef;
            } else {
                pos += to_centroid * d_coef;
                pos -= (&worst + &agent.position) * eta;
            }
        }
        clamp_position(&mut pos, &cfg.bounds);
        agent.position = pos;
        agent.velocity = new_velocity;
    }
}

/// Echolocation exploitation: frequency-scaled pull toward the best position.
pub fn exploit_step_bat(
    agents: &mut [Agent],
    best: &DVector<f64>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha12Rng,
) {
    for agent in agents.iter_mut() {
        let xi: f64 = rng.gen();
        let freq = cfg.f_min + (cfg.f_max - cfg.f_min) * xi;
        agent.velocity += (&agent.position - best) * freq;
        clamp_velocity(&mut agent.velocity, &cfg.bounds);
        let mut pos = &agent.position + &agent.velocity;
        clamp_position(&mut pos, &cfg.bounds);
        agent.position = pos;
    }
}

/// The other half of the echolocation phase: pulse-gated local walks around
/// the best position with geometrically decaying loudness. `exploit_index`
/// counts echolocation steps from 1.
pub fn bat_local_search(
    agents: &mut [Agent],
    best: &DVector<f64>,
    exploit_index: usize,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha12Rng,
) {
    if cfg.bat_pulse_rate <= 0.0 {
        return;
    }
    let loudness = cfg.bat_loudness * cfg.bat_loudness_decay.powi(exploit_index as i32 - 1);
    for agent in agents.iter_mut() {
        let gate: f64 = rng.gen();
        if gate >= cfg.bat_pulse_rate {
            continue;
        }
        let mut pos = best.clone();
        for (j, (lo, hi)) in cfg.bounds.iter().enumerate() {
            let eps: f64 = 2.0 * rng.gen::<f64>() - 1.0;
            pos[j] += eps * loudness * (hi - lo);
        }
        clamp_position(&mut pos, &cfg.bounds);
        agent.position = pos;
    }
}

/// Straight-line exploitation: multiplicative drift away from the best, with
/// a Brownian-modulated branch half the time.
pub fn exploit_step_sga(
    agents: &mut [Agent],
    best: &DVector<f64>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha12Rng,
) {
    for agent in agents.iter_mut() {
        let r: f64 = rng.gen();
        let drift = (&agent.position - best) * r;
        let mut pos = if r > 0.5 {
            &agent.position + drift
        } else {
            let brownian =
                DVector::from_fn(agent.position.len(), |_, _| StandardNormal.sample(rng));
            &agent.position + drift.component_mul(&brownian)
        };
        clamp_position(&mut pos, &cfg.bounds);
        agent.position = pos;
    }
}

/// Classic particle swarm step (the original global-best form with velocity
/// clamping).
fn pso_step(
    agents: &mut [Agent],
    pbest: &[DVector<f64>],
    gbest: &DVector<f64>,
    cfg: &OptimizerConfig,
    rng: &mut ChaCha12Rng,
) {
    let c1 = 2.0;
    let c2 = 2.0;
    for (agent, pb) in agents.iter_mut().zip(pbest.iter()) {
        for j in 0..agent.position.len() {
            let r1: f64 = rng.gen();
            let r2: f64 = rng.gen();
            let vmax = cfg.bounds[j].1 - cfg.bounds[j].0;
            let v = agent.velocity[j]
                + c1 * r1 * (pb[j] - agent.position[j])
                + c2 * r2 * (gbest[j] - agent.position[j]);
            agent.velocity[j] = v.clamp(-vmax, vmax);
            agent.position[j] += agent.velocity[j];
        }
        clamp_position(&mut agent.position, &cfg.bounds);
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best_position: DVector<f64>,
    pub best_fitness: f64,
    /// Incumbent best fitness after each iteration.
    pub curve: Vec<f64>,
}

/// Run the configured variant. Greedy incumbent tracking makes the returned
/// curve non-increasing; everything is deterministic for a fixed seed.
pub fn run<F>(objective: F, cfg: &OptimizerConfig) -> Result<RunResult, IsgaError>
where
    F: Fn(&DVector<f64>) -> f64 + Sync,
{
    cfg.validate()?;
    let d = cfg.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    let mut agents: Vec<Agent> = (0..cfg.population)
        .map(|i| {
            let position = if let Some(seeded) = cfg.initial_positions.get(i) {
                let mut p = DVector::from_fn(d, |j, _| {
                    seeded.get(j).copied().unwrap_or(cfg.bounds[j].0)
                });
                clamp_position(&mut p, &cfg.bounds);
                p
            } else {
                DVector::from_fn(d, |j, _| rng.gen_range(cfg.bounds[j].0..cfg.bounds[j].1))
            };
            Agent {
                position,
                velocity: DVector::zeros(d),
                fitness: f64::INFINITY,
            }
        })
        .collect();

    let evaluate = |agents: &mut [Agent], objective: &F| {
        let fits: Vec<f64> = agents
            .par_iter()
            .map(|a| objective(&a.position))
            .collect();
        for (agent, fit) in agents.iter_mut().zip(fits) {
            if fit.is_finite() {
                agent.fitness = fit;
            } else if agent.fitness.is_infinite() {
                agent.fitness = f64::INFINITY;
            }
            // A non-finite objective on a previously evaluated agent keeps
            // the old fitness.
        }
    };

    evaluate(&mut agents, &objective);
    let mut best = agents
        .iter()
        .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .expect("non-empty population")
        .clone();

    // PSO keeps per-agent personal bests; identity is positional, so it
    // skips the fitness sort the cohort variants need.
    let mut pbest_pos: Vec<DVector<f64>> = agents.iter().map(|a| a.position.clone()).collect();
    let mut pbest_fit: Vec<f64> = agents.iter().map(|a| a.fitness).collect();

    let mut curve = Vec::with_capacity(cfg.max_iters);
    let mut exploit_steps = 0usize;
    for t in 1..=cfg.max_iters {
        match cfg.variant {
            Variant::Pso => {
                pso_step(&mut agents, &pbest_pos, &best.position, cfg, &mut rng);
            }
            Variant::Bat => {
                exploit_steps += 1;
                exploit_step_bat(&mut agents, &best.position, cfg, &mut rng);
                bat_local_search(&mut agents, &best.position, exploit_steps, cfg, &mut rng);
            }
            Variant::Sga | Variant::Isga => {
                agents.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
                let omega = omega_phase(t, cfg.max_iters);
                if omega < std::f64::consts::PI {
                    explore_step(&mut agents, &best.position, t, cfg, &mut rng);
                } else if cfg.variant == Variant::Isga {
                    exploit_steps += 1;
                    exploit_step_bat(&mut agents, &best.position, cfg, &mut rng);
                    bat_local_search(&mut agents, &best.position, exploit_steps, cfg, &mut rng);
                } else {
                    exploit_step_sga(&mut agents, &best.position, cfg, &mut rng);
                }
            }
        }
        evaluate(&mut agents, &objective);
        for (i, agent) in agents.iter().enumerate() {
            if cfg.variant == Variant::Pso && agent.fitness < pbest_fit[i] {
                pbest_fit[i] = agent.fitness;
                pbest_pos[i] = agent.position.clone();
            }
            if agent.fitness < best.fitness {
                best = agent.clone();
            }
        }
        curve.push(best.fitness);
    }

    Ok(RunResult {
        best_position: best.position,
        best_fitness: best.fitness,
        curve,
    })
}

/// The nine tunable coefficients: sigma-point scaling, the three kernel
/// shapes and bandwidths, and the noise update coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningVector {
    pub ut_alpha: f64,
    pub ut_beta: f64,
    pub shape1: f64,
    pub shape2: f64,
    pub shape3: f64,
    pub bandwidth1: f64,
    pub bandwidth2: f64,
    pub bandwidth3: f64,
    pub theta: f64,
}

impl TuningVector {
    pub fn from_position(x: &DVector<f64>) -> Self {
        TuningVector {
            ut_alpha: x[0],
            ut_beta: x[1],
            shape1: x[2],
            shape2: x[3],
            shape3: x[4],
            bandwidth1: x[5],
            bandwidth2: x[6],
            bandwidth3: x[7],
            theta: x[8],
        }
    }

    pub fn to_position(self) -> DVector<f64> {
        DVector::from_vec(vec![
            self.ut_alpha,
            self.ut_beta,
            self.shape1,
            self.shape2,
            self.shape3,
            self.bandwidth1,
            self.bandwidth2,
            self.bandwidth3,
            self.theta,
        ])
    }

    pub fn from_config(cfg: &FilterConfig) -> Self {
        TuningVector {
            ut_alpha: cfg.ut.alpha,
            ut_beta: cfg.ut.beta,
            shape1: cfg.criterion.fiducial_kernel_1.shape,
            shape2: cfg.criterion.fiducial_kernel_2.shape,
            shape3: cfg.criterion.entropy_kernel.shape,
            bandwidth1: cfg.criterion.fiducial_kernel_1.bandwidth,
            bandwidth2: cfg.criterion.fiducial_kernel_2.bandwidth,
            bandwidth3: cfg.criterion.entropy_kernel.bandwidth,
            theta: match cfg.theta {
                ThetaMode::Constant(v) | ThetaMode::Forgetting(v) => v,
            },
        }
    }

    /// Overlay these coefficients onto a filter configuration.
    pub fn apply(&self, base: &FilterConfig) -> FilterConfig {
        let mut cfg = base.clone();
        cfg.ut.alpha = self.ut_alpha;
        cfg.ut.beta = self.ut_beta;
        cfg.criterion.fiducial_kernel_1.shape = self.shape1;
        cfg.criterion.fiducial_kernel_1.bandwidth = self.bandwidth1;
        cfg.criterion.fiducial_kernel_2.shape = self.shape2;
        cfg.criterion.fiducial_kernel_2.bandwidth = self.bandwidth2;
        cfg.criterion.entropy_kernel.shape = self.shape3;
        cfg.criterion.entropy_kernel.bandwidth = self.bandwidth3;
        cfg.theta = match cfg.theta {
            ThetaMode::Constant(_) => ThetaMode::Constant(self.theta),
            ThetaMode::Forgetting(_) => ThetaMode::Forgetting(self.theta),
        };
        cfg
    }
}

/// Search box for the nine coefficients, bracketing the reported operating
/// point. The shape lower bound below 2 relies on the criterion's gap floor.
pub fn default_tuning_bounds() -> Vec<(f64, f64)> {
    vec![
        (1e-4, 1.0),  // ut alpha
        (0.0, 3.0),   // ut beta
        (1.5, 4.0),   // shape 1
        (1.5, 4.0),   // shape 2
        (1.5, 4.0),   // shape 3
        (0.5, 20.0),  // bandwidth 1
        (0.5, 20.0),  // bandwidth 2
        (0.5, 20.0),  // bandwidth 3
        (0.05, 0.95), // theta / forgetting factor
    ]
}

/// Everything the offline coefficient calibration needs.
pub struct TuneSpec<'a> {
    pub net: &'a PowerNetwork,
    pub plan: &'a MeasurementPlan,
    pub u0: &'a StateVector,
    pub scenario: Scenario,
    pub base_filter: FilterConfig,
    pub init: InitialConditions,
    pub holt_level: f64,
    pub holt_trend: f64,
    pub rmse_convention: RmseConvention,
    pub optimizer: OptimizerConfig,
    /// Monte Carlo repeats per fitness evaluation.
    pub fitness_monte_carlo: usize,
    /// Horizon per fitness evaluation.
    pub fitness_horizon: usize,
    /// Base seed of the (fixed) fitness noise streams.
    pub fitness_seed: u64,
}

/// Calibrate the free coefficients offline: the objective is the summed
/// magnitude and phase ARMSE of the configured filter over seeded scenario
/// runs. The current coefficients are injected as a warm start, so the
/// returned vector is never worse than them on the training objective.
pub fn tune_filter(spec: &TuneSpec) -> Result<(TuningVector, RunResult), IsgaError> {
    let mut opt = spec.optimizer.clone();
    if opt.bounds.len() != 9 {
        return Err(IsgaError::InvalidConfig(format!(
            "tuning bounds must have 9 dimensions, got {}",
            opt.bounds.len()
        )));
    }
    let warm = TuningVector::from_config(&spec.base_filter).to_position();
    opt.initial_positions
        .insert(0, warm.iter().copied().collect());

    let objective = |x: &DVector<f64>| -> f64 {
        let tv = TuningVector::from_position(x);
        let cfg = tv.apply(&spec.base_filter);
        if cfg.validate().is_err() {
            return f64::INFINITY;
        }
        let exp = ExperimentSpec {
            scenario: spec.scenario.clone(),
            filters: vec![("candidate".to_string(), cfg)],
            monte_carlo: spec.fitness_monte_carlo,
            horizon: spec.fitness_horizon,
            base_seed: spec.fitness_seed,
            init: spec.init,
            holt_level: spec.holt_level,
            holt_trend: spec.holt_trend,
            rmse_convention: spec.rmse_convention,
        };
        match run_experiment(spec.net, spec.plan, spec.u0, &exp, "tune") {
            Ok(report) => {
                let f = &report.filters[0];
                f.armse_v + f.armse_phi
            }
            Err(_) => f64::INFINITY,
        }
    };

    let result = run(objective, &opt)?;
    Ok((TuningVector::from_position(&result.best_position), result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_phase_boundaries() {
        assert_eq!(omega_phase(0, 500), 0.0);
        assert!((omega_phase(250, 500) - std::f64::consts::PI).abs() < 1e-15);
        assert!((omega_phase(500, 500) - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    fn sphere(x: &DVector<f64>) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn small_cfg(variant: Variant, d: usize, seed: u64) -> OptimizerConfig {
        let mut cfg = OptimizerConfig::new(variant, vec![(-10.0, 10.0); d], seed);
        cfg.population = 10;
        cfg.max_iters = 60;
        cfg
    }

    #[test]
    fn centroid_follows_printed_normalization() {
        // Equal fitness: sum(X f) / (n sum f) = mean / n.
        let a1 = Agent {
            position: DVector::from_vec(vec![1.0, 3.0]),
            velocity: DVector::zeros(2),
            fitness: 2.5,
        };
        let a2 = Agent {
            position: DVector::from_vec(vec![3.0, -1.0]),
            velocity: DVector::zeros(2),
            fitness: 2.5,
        };
        let c = weighted_centroid(&[a1, a2]);
        assert!((c - DVector::from_vec(vec![1.0, 0.5])).abs().max() < 1e-12);
    }

    #[test]
    fn explore_keeps_positions_in_bounds() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let cfg = small_cfg(Variant::Sga, 2, 3);
        let mut agents: Vec<Agent> = (0..10)
            .map(|_| Agent {
                position: DVector::from_fn(2, |_, _| rng.gen_range(-10.0..10.0)),
                velocity: DVector::from_fn(2, |_, _| rng.gen_range(-5.0..5.0)),
                fitness: rng.gen_range(0.0..10.0),
            })
            .collect();
        let best = DVector::zeros(2);
        for t in 1..=1000 {
            agents.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
            explore_step(&mut agents, &best, t % 30 + 1, &cfg, &mut rng);
            for a in &agents {
                for j in 0..2 {
                    assert!(a.position[j] >= -10.0 && a.position[j] <= 10.0);
                }
            }
        }
    }

    #[test]
    fn bat_recursion_hand_value() {
        // One agent, f locked to 1, best at 0, x0 = 1, v0 = 0: v1 = 1, x1 = 2.
        let mut cfg = small_cfg(Variant::Bat, 1, 1);
        cfg.f_min = 1.0;
        cfg.f_max = 1.0;
        cfg.bounds = vec![(-10.0, 10.0)];
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let mut agents = vec![Agent {
            position: DVector::from_element(1, 1.0),
            velocity: DVector::zeros(1),
            fitness: 1.0,
        }];
        exploit_step_bat(&mut agents, &DVector::zeros(1), &cfg, &mut rng);
        assert!((agents[0].velocity[0] - 1.0).abs() < 1e-15);
        assert!((agents[0].position[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bat_at_best_drifts_by_old_velocity() {
        let cfg = small_cfg(Variant::Bat, 2, 1);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let best = DVector::from_vec(vec![0.5, -0.5]);
        let mut agents = vec![Agent {
            position: best.clone(),
            velocity: DVector::from_vec(vec![0.25, 0.125]),
            fitness: 1.0,
        }];
        exploit_step_bat(&mut agents, &best, &cfg, &mut rng);
        assert!((agents[0].velocity.clone() - DVector::from_vec(vec![0.25, 0.125]))
            .abs()
            .max()
            < 1e-15);
        assert!((agents[0].position.clone() - (best + DVector::from_vec(vec![0.25, 0.125])))
            .abs()
            .max()
            < 1e-15);
    }

    #[test]
    fn sga_exploit_at_best_is_stationary() {
        let cfg = small_cfg(Variant::Sga, 2, 1);
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let best = DVector::from_vec(vec![1.0, 2.0]);
        let mut agents = vec![Agent {
            position: best.clone(),
            velocity: DVector::zeros(2),
            fitness: 0.0,
        }];
        for _ in 0..50 {
            exploit_step_sga(&mut agents, &best, &cfg, &mut rng);
            assert!((agents[0].position.clone() - &best).abs().max() < 1e-15);
        }
    }

    #[test]
    fn sga_exploit_brownian_branch_variance() {
        // With r <= 0.5 the per-dimension increment is r (x - best) z with
        // z standard normal, so its variance is r^2 (x - best)^2.
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 100_000;
        let x0 = 2.0_f64;
        let best = 0.0_f64;
        let mut acc = 0.0;
        let mut count = 0usize;
        let mut sum_r2 = 0.0;
        for _ in 0..n {
            let r: f64 = rng.gen();
            if r > 0.5 {
                continue;
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            let inc = (x0 - best) * r * z;
            acc += inc * inc;
            sum_r2 += r * r * (x0 - best) * (x0 - best);
            count += 1;
        }
        let measured = acc / count as f64;
        let expected = sum_r2 / count as f64;
        assert!(
            (measured - expected).abs() < 0.05 * expected,
            "{measured} vs {expected}"
        );
    }

    #[test]
    fn constant_objective_settles_immediately() {
        for variant in [Variant::Sga, Variant::Isga, Variant::Bat, Variant::Pso] {
            let cfg = small_cfg(variant, 3, 17);
            let res = run(|_| 4.25, &cfg).unwrap();
            assert_eq!(res.best_fitness, 4.25);
            assert!(res.curve.iter().all(|&v| v == 4.25));
        }
    }

    #[test]
    fn incumbent_curve_is_monotone_for_all_variants() {
        for variant in [Variant::Sga, Variant::Isga, Variant::Bat, Variant::Pso] {
            for seed in 0..3 {
                let cfg = small_cfg(variant, 4, seed);
                let res = run(sphere, &cfg).unwrap();
                for w in res.curve.windows(2) {
                    assert!(w[1] <= w[0], "{variant:?} curve increased");
                }
            }
        }
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let cfg = small_cfg(Variant::Isga, 4, 23);
        let a = run(sphere, &cfg).unwrap();
        let b = run(sphere, &cfg).unwrap();
        assert_eq!(a.best_fitness, b.best_fitness);
        assert_eq!(a.curve, b.curve);
        assert_eq!(a.best_position.as_slice(), b.best_position.as_slice());
    }

    #[test]
    fn objective_failures_are_penalized_not_fatal() {
        let cfg = small_cfg(Variant::Isga, 2, 31);
        let res = run(
            |x| {
                if x[0] > 0.0 {
                    f64::NAN
                } else {
                    sphere(x)
                }
            },
            &cfg,
        )
        .unwrap();
        assert!(res.best_fitness.is_finite());
        assert!(res.best_position[0] <= 0.0);
    }

    #[test]
    fn isga_reaches_small_sphere_values() {
        let mut cfg = OptimizerConfig::new(Variant::Isga, vec![(-100.0, 100.0); 10], 1);
        cfg.population = 30;
        cfg.max_iters = 200;
        let res = run(sphere, &cfg).unwrap();
        assert!(res.best_fitness < 1e-2, "sphere best {}", res.best_fitness);
    }

    #[test]
    fn tuning_vector_round_trips_through_config() {
        let base = FilterConfig::gmmeef_aukf();
        let tv = TuningVector::from_config(&base);
        let cfg = tv.apply(&base);
        let tv2 = TuningVector::from_config(&cfg);
        assert_eq!(tv, tv2);
        let pos = tv.to_position();
        assert_eq!(TuningVector::from_position(&pos), tv);
    }

    #[test]
    fn default_bounds_bracket_reported_coefficients() {
        let bounds = default_tuning_bounds();
        let paper = TuningVector::from_config(&FilterConfig::gmmeef_aukf()).to_position();
        assert_eq!(bounds.len(), 9);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            assert!(
                paper[i] >= *lo && paper[i] <= *hi,
                "coefficient {i} = {} outside [{lo}, {hi}]",
                paper[i]
            );
        }
    }
}
