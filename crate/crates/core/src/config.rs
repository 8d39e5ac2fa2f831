//! The run configuration file: one TOML document describing the network,
//! measurement plan, noise scenario, filter roster, experiment size, and
//! optimizer block. Unknown keys are rejected.

use crate::casefile::{parse_cdf, PowerNetwork};
use crate::criteria::{CriterionMode, LambdaPrefactor};
use crate::filters::{FilterConfig, ThetaMode};
use crate::harness::{ExperimentSpec, InitialConditions, RmseConvention};
use crate::isga::{default_tuning_bounds, DampingMode, OptimizerConfig, TuningVector, Variant};
use crate::noisegen::{ImpulseKnobs, Scenario, ScenarioPreset};
use crate::psmodel::{MeasurementPlan, StateVector};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Version of the config schema; embedded in emitted reports through the
/// config hash and checked on load.
pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("case file: {0}")]
    Case(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub network: NetworkBlock,
    #[serde(default)]
    pub plan: PlanBlock,
    pub scenario: ScenarioBlock,
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub init: InitBlock,
    #[serde(default)]
    pub holt: HoltBlock,
    pub filters: Vec<FilterBlock>,
    #[serde(default)]
    pub optimizer: Option<OptimizerBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkBlock {
    pub case_file: PathBuf,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanBlock {
    /// `"full"` (default) takes every voltage magnitude, injection pair, and
    /// flow pair; otherwise list descriptors explicitly.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub descriptors: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioBlock {
    #[serde(default)]
    pub preset: Option<ScenarioPreset>,
    #[serde(default)]
    pub impulse: Option<ImpulseKnobs>,
    /// Full custom scenario; overrides `preset` when given.
    #[serde(default)]
    pub custom: Option<Scenario>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    pub monte_carlo: usize,
    pub horizon: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub rmse_convention: RmseConvention,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitBlock {
    pub p0: f64,
    pub q0: f64,
    pub r0: f64,
}

impl Default for InitBlock {
    fn default() -> Self {
        InitBlock {
            p0: 1e-2,
            q0: 1e-5,
            r0: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoltBlock {
    pub level_coeff: f64,
    pub trend_coeff: f64,
}

impl Default for HoltBlock {
    fn default() -> Self {
        HoltBlock {
            level_coeff: 0.8,
            trend_coeff: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    Gaussian,
    Mcc,
    Mee,
    Meef,
    Gmmeef,
}

/// One named filter in the comparison roster. `mode` picks a preset; every
/// other field overrides it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterBlock {
    pub name: String,
    pub mode: FilterMode,
    #[serde(default)]
    pub adapt_noise: Option<bool>,
    /// Gaussian kernel size for the mcc/mee/meef baselines.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub phi: Option<f64>,
    /// Kernel shapes [alpha1, alpha2, alpha3].
    #[serde(default)]
    pub shape: Option<[f64; 3]>,
    /// Kernel bandwidths [beta1, beta2, beta3].
    #[serde(default)]
    pub bandwidth: Option<[f64; 3]>,
    #[serde(default)]
    pub ut_alpha: Option<f64>,
    #[serde(default)]
    pub ut_beta: Option<f64>,
    #[serde(default)]
    pub ut_lambda: Option<f64>,
    #[serde(default)]
    pub theta_mode: Option<String>,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Fixed-point threshold delta.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub lambda_prefactor: Option<LambdaPrefactor>,
    #[serde(default)]
    pub divergence_fallback: Option<bool>,
    #[serde(default)]
    pub epsilon_floor: Option<f64>,
}

/// Default Gaussian kernel size for the correntropy/entropy baselines,
/// applied to the whitened regression errors.
pub const DEFAULT_BASELINE_SIGMA: f64 = 2.5;

impl FilterBlock {
    pub fn build(&self) -> Result<FilterConfig, ConfigError> {
        let sigma = self.sigma.unwrap_or(DEFAULT_BASELINE_SIGMA);
        let mut cfg = match self.mode {
            FilterMode::Gaussian => FilterConfig::ukf(),
            FilterMode::Mcc => FilterConfig::mcc_ukf(sigma),
            FilterMode::Mee => FilterConfig::mee_ukf(sigma),
            FilterMode::Meef => FilterConfig::meef_ukf(sigma),
            FilterMode::Gmmeef => FilterConfig::gmmeef_aukf(),
        };
        if let Some(adapt) = self.adapt_noise {
            cfg.adapt_noise = adapt;
        }
        if let Some(kappa) = self.kappa {
            cfg.criterion.kappa = kappa;
        }
        if let Some(phi) = self.phi {
            cfg.criterion.phi = phi;
        }
        if let Some([a1, a2, a3]) = self.shape {
            cfg.criterion.fiducial_kernel_1.shape = a1;
            cfg.criterion.fiducial_kernel_2.shape = a2;
            cfg.criterion.entropy_kernel.shape = a3;
        }
        if let Some([b1, b2, b3]) = self.bandwidth {
            cfg.criterion.fiducial_kernel_1.bandwidth = b1;
            cfg.criterion.fiducial_kernel_2.bandwidth = b2;
            cfg.criterion.entropy_kernel.bandwidth = b3;
        }
        if let Some(a) = self.ut_alpha {
            cfg.ut.alpha = a;
        }
        if let Some(b) = self.ut_beta {
            cfg.ut.beta = b;
        }
        if let Some(l) = self.ut_lambda {
            cfg.ut.lambda_free = l;
        }
        let theta_value = self.theta.unwrap_or(match cfg.theta {
            ThetaMode::Constant(v) | ThetaMode::Forgetting(v) => v,
        });
        cfg.theta = match self.theta_mode.as_deref() {
            None => match cfg.theta {
                ThetaMode::Constant(_) => ThetaMode::Constant(theta_value),
                ThetaMode::Forgetting(_) => ThetaMode::Forgetting(theta_value),
            },
            Some("constant") => ThetaMode::Constant(theta_value),
            Some("forgetting") => ThetaMode::Forgetting(theta_value),
            Some(other) => {
                return Err(ConfigError::Invalid(format!(
                    "filter '{}': unknown theta_mode '{other}'",
                    self.name
                )))
            }
        };
        if let Some(delta) = self.delta {
            cfg.fixed_point_tol = delta;
        }
        if let Some(m) = self.max_iters {
            cfg.fixed_point_max_iters = m;
        }
        if let Some(p) = self.lambda_prefactor {
            cfg.criterion.lambda_prefactor = p;
        }
        if let Some(f) = self.divergence_fallback {
            cfg.divergence_fallback = f;
        }
        if let Some(eps) = self.epsilon_floor {
            cfg.criterion.epsilon_floor = if eps > 0.0 { Some(eps) } else { None };
        }
        cfg.validate()
            .map_err(|e| ConfigError::Invalid(format!("filter '{}': {e}", self.name)))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerBlock {
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_opt_iters")]
    pub max_iters: usize,
    #[serde(default = "default_f_min")]
    pub f_min: f64,
    #[serde(default = "default_f_max")]
    pub f_max: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sga_damping: DampingMode,
    /// Nine (lo, hi) pairs; defaults to the documented search box.
    #[serde(default)]
    pub bounds: Option<Vec<(f64, f64)>>,
    #[serde(default = "default_fitness_d")]
    pub fitness_monte_carlo: usize,
    #[serde(default = "default_fitness_t")]
    pub fitness_horizon: usize,
    #[serde(default = "default_fitness_seed")]
    pub fitness_seed: u64,
    /// Which filter block the tuned coefficients target.
    pub target_filter: String,
}

fn default_variant() -> Variant {
    Variant::Isga
}
fn default_population() -> usize {
    20
}
fn default_opt_iters() -> usize {
    30
}
fn default_f_min() -> f64 {
    10.0
}
fn default_f_max() -> f64 {
    100.0
}
fn default_fitness_d() -> usize {
    5
}
fn default_fitness_t() -> usize {
    60
}
fn default_fitness_seed() -> u64 {
    990
}

impl OptimizerBlock {
    pub fn build(&self) -> Result<OptimizerConfig, ConfigError> {
        let bounds = match &self.bounds {
            Some(b) => {
                if b.len() != 9 {
                    return Err(ConfigError::Invalid(format!(
                        "optimizer bounds must have 9 entries, got {}",
                        b.len()
                    )));
                }
                b.clone()
            }
            None => default_tuning_bounds(),
        };
        let mut cfg = OptimizerConfig::new(self.variant, bounds, self.seed);
        cfg.population = self.population;
        cfg.max_iters = self.max_iters;
        cfg.f_min = self.f_min;
        cfg.f_max = self.f_max;
        cfg.sga_damping = self.sga_damping;
        cfg.validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_format() -> String {
    "csv".to_string()
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: default_out_dir(),
            format: default_format(),
        }
    }
}

/// A tuned-coefficient overlay, written by `tune` and consumed by
/// `estimate --overlay`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overlay {
    pub tuning: OverlayBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayBlock {
    pub filter: String,
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

impl Overlay {
    pub fn from_tuning(filter: &str, tv: &TuningVector) -> Self {
        Overlay {
            tuning: OverlayBlock {
                filter: filter.to_string(),
                ut_alpha: tv.ut_alpha,
                ut_beta: tv.ut_beta,
                shape1: tv.shape1,
                shape2: tv.shape2,
                shape3: tv.shape3,
                bandwidth1: tv.bandwidth1,
                bandwidth2: tv.bandwidth2,
                bandwidth3: tv.bandwidth3,
                theta: tv.theta,
            },
        }
    }

    pub fn tuning_vector(&self) -> TuningVector {
        TuningVector {
            ut_alpha: self.tuning.ut_alpha,
            ut_beta: self.tuning.ut_beta,
            shape1: self.tuning.shape1,
            shape2: self.tuning.shape2,
            shape3: self.tuning.shape3,
            bandwidth1: self.tuning.bandwidth1,
            bandwidth2: self.tuning.bandwidth2,
            bandwidth3: self.tuning.bandwidth3,
            theta: self.tuning.theta,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("overlay serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))
    }
}

/// A fully resolved run: network, plan, initial state, and the experiment
/// spec ready for the harness.
pub struct ResolvedRun {
    pub network: PowerNetwork,
    pub plan: MeasurementPlan,
    pub initial_state: StateVector,
    pub spec: ExperimentSpec,
    pub config_text: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        if cfg.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok((cfg, text))
    }

    pub fn scenario(&self, init: &InitBlock) -> Result<Scenario, ConfigError> {
        let scenario = if let Some(custom) = &self.scenario.custom {
            custom.clone()
        } else {
            let preset = self.scenario.preset.ok_or_else(|| {
                ConfigError::Invalid("scenario needs either a preset or a custom block".into())
            })?;
            let knobs = self.scenario.impulse.unwrap_or_default();
            preset.build(init.q0.sqrt(), init.r0.sqrt(), knobs)
        };
        scenario
            .process
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        scenario
            .measurement
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scenario)
    }

    /// Resolve into runnable pieces. Relative paths are taken against
    /// `base_dir` (normally the config file's directory).
    pub fn resolve(
        &self,
        base_dir: &Path,
        config_text: &str,
        overlay: Option<&Overlay>,
    ) -> Result<ResolvedRun, ConfigError> {
        if self.filters.is_empty() {
            return Err(ConfigError::Invalid("at least one filter is required".into()));
        }
        let case_path = if self.network.case_file.is_absolute() {
            self.network.case_file.clone()
        } else {
            base_dir.join(&self.network.case_file)
        };
        let case_text = std::fs::read_to_string(&case_path).map_err(|e| {
            ConfigError::Case(format!("{}: {e}", case_path.display()))
        })?;
        let network = parse_cdf(&case_text).map_err(|e| ConfigError::Case(e.to_string()))?;

        let plan = match (&self.plan.descriptors, self.plan.preset.as_deref()) {
            (Some(descriptors), _) => MeasurementPlan::from_strings(&network, descriptors)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?,
            (None, None | Some("full")) => MeasurementPlan::full(&network),
            (None, Some(other)) => {
                return Err(ConfigError::Invalid(format!("unknown plan preset '{other}'")))
            }
        };
        plan.validate(&network)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let scenario = self.scenario(&self.init)?;
        if let Some(schedule) = &scenario.bad_data {
            schedule
                .validate(self.experiment.horizon)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }

        let mut filters = Vec::with_capacity(self.filters.len());
        let mut seen = std::collections::HashSet::new();
        for block in &self.filters {
            if !seen.insert(block.name.clone()) {
                return Err(ConfigError::Invalid(format!(
                    "duplicate filter name '{}'",
                    block.name
                )));
            }
            let mut cfg = block.build()?;
            if let Some(ov) = overlay {
                if ov.tuning.filter == block.name {
                    cfg = ov.tuning_vector().apply(&cfg);
                    cfg.validate()
                        .map_err(|e| ConfigError::Invalid(format!("overlay: {e}")))?;
                }
            }
            filters.push((block.name.clone(), cfg));
        }

        let spec = ExperimentSpec {
            scenario,
            filters,
            monte_carlo: self.experiment.monte_carlo,
            horizon: self.experiment.horizon,
            base_seed: self.experiment.base_seed,
            init: InitialConditions {
                p0: self.init.p0,
                q0: self.init.q0,
                r0: self.init.r0,
            },
            holt_level: self.holt.level_coeff,
            holt_trend: self.holt.trend_coeff,
            rmse_convention: self.experiment.rmse_convention,
        };
        Ok(ResolvedRun {
            initial_state: StateVector::from_case(&network),
            network,
            plan,
            spec,
            config_text: config_text.to_string(),
        })
    }
}

/// The shipped preset reproducing the reported experimental setup on the
/// 14-bus case: six filters, scenario 1, D = 200, T = 60.
pub fn paper_defaults_toml() -> String {
    r#"# Paper-default comparison run: IEEE 14-bus, scenario 1.
schema_version = 1

[network]
case_file = "../data/ieee14.cdf"

[plan]
preset = "full"

[scenario]
preset = "scenario1"

[experiment]
monte_carlo = 200
horizon = 60
base_seed = 7
rmse_convention = "as_printed"

[init]
p0 = 1e-2
q0 = 1e-5
r0 = 1e-2

[holt]
level_coeff = 0.8
trend_coeff = 0.5

[[filters]]
name = "ukf"
mode = "gaussian"

[[filters]]
name = "mcc-ukf"
mode = "mcc"

[[filters]]
name = "mee-ukf"
mode = "mee"

[[filters]]
name = "meef-ukf"
mode = "meef"

[[filters]]
name = "gmmeef-aukf"
mode = "gmmeef"

[[filters]]
name = "isga-gmmeef-aukf"
mode = "gmmeef"

[optimizer]
variant = "isga"
population = 12
max_iters = 12
seed = 1
fitness_monte_carlo = 4
fitness_horizon = 60
fitness_seed = 990
target_filter = "isga-gmmeef-aukf"

[output]
dir = "out"
format = "csv"
"#
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("gridse-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn paper_defaults_parse_and_resolve() {
        let text = paper_defaults_toml();
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg.filters.len(), 6);
        assert_eq!(cfg.experiment.monte_carlo, 200);
        // Resolve against the repo's configs/ directory layout.
        let base = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"));
        let resolved = cfg.resolve(&base, &text, None).unwrap();
        assert_eq!(resolved.network.bus_count(), 14);
        assert_eq!(resolved.plan.m(), 82);
        assert_eq!(resolved.spec.filters.len(), 6);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = paper_defaults_toml();
        text.push_str("\n[experiment2]\nx = 1\n");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
        let text = paper_defaults_toml().replace("monte_carlo", "monte_crlo");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }

    #[test]
    fn filter_overrides_apply() {
        let block: FilterBlock = toml::from_str(
            r#"
name = "custom"
mode = "gmmeef"
kappa = 0.25
shape = [2.0, 2.2, 3.0]
bandwidth = [5.0, 6.0, 7.0]
theta_mode = "constant"
theta = 0.4
delta = 1e-5
max_iters = 60
"#,
        )
        .unwrap();
        let cfg = block.build().unwrap();
        assert_eq!(cfg.criterion.kappa, 0.25);
        assert_eq!(cfg.criterion.fiducial_kernel_2.shape, 2.2);
        assert_eq!(cfg.criterion.entropy_kernel.bandwidth, 7.0);
        assert_eq!(cfg.theta, ThetaMode::Constant(0.4));
        assert_eq!(cfg.fixed_point_tol, 1e-5);
        assert_eq!(cfg.fixed_point_max_iters, 60);
        assert_eq!(cfg.criterion.mode, CriterionMode::Gmmeef);
    }

    #[test]
    fn invalid_filter_values_rejected() {
        let block: FilterBlock = toml::from_str(
            r#"
name = "bad"
mode = "gmmeef"
kappa = 1.5
"#,
        )
        .unwrap();
        assert!(block.build().is_err());
    }

    #[test]
    fn overlay_round_trip() {
        let base = FilterConfig::gmmeef_aukf();
        let tv = TuningVector::from_config(&base);
        let overlay = Overlay::from_tuning("gmmeef-aukf", &tv);
        let path = write_temp("overlay.toml", &overlay.to_toml());
        let loaded = Overlay::load(&path).unwrap();
        assert_eq!(loaded.tuning_vector(), tv);
    }

    #[test]
    fn overlay_applies_to_named_filter_on_resolve() {
        let text = paper_defaults_toml();
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        let mut tv = TuningVector::from_config(&FilterConfig::gmmeef_aukf());
        tv.bandwidth3 = 9.75;
        let overlay = Overlay::from_tuning("isga-gmmeef-aukf", &tv);
        let base = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"));
        let resolved = cfg.resolve(&base, &text, Some(&overlay)).unwrap();
        let tuned = &resolved
            .spec
            .filters
            .iter()
            .find(|(n, _)| n == "isga-gmmeef-aukf")
            .unwrap()
            .1;
        assert_eq!(tuned.criterion.entropy_kernel.bandwidth, 9.75);
        let untouched = &resolved
            .spec
            .filters
            .iter()
            .find(|(n, _)| n == "gmmeef-aukf")
            .unwrap()
            .1;
        assert_eq!(untouched.criterion.entropy_kernel.bandwidth, 3.2);
    }

    #[test]
    fn scenario_presets_build_from_init_constants() {
        let text = paper_defaults_toml();
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        let scenario = cfg.scenario(&cfg.init).unwrap();
        match scenario.process {
            crate::noisegen::NoiseModel::Impulse { ref spec } => match spec.base {
                crate::noisegen::BaseNoise::Gaussian { std } => {
                    assert!((std - 1e-5_f64.sqrt()).abs() < 1e-15);
                }
                _ => panic!("expected Gaussian base"),
            },
            _ => panic!("expected impulse model"),
        }
    }

    #[test]
    fn duplicate_filter_names_rejected() {
        let text = paper_defaults_toml().replace("name = \"mcc-ukf\"", "name = \"ukf\"");
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        let base = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"));
        assert!(cfg.resolve(&base, &text, None).is_err());
    }
}
