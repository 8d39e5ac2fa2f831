//! Reproducible noise and fault generators for the four experimental
//! scenarios: Gaussian-plus-impulse noise, bimodal and asymmetric Gaussian
//! mixtures, and scheduled bad measurement data.

use crate::psmodel::MeasurementPlan;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("invalid impulse spec: {0}")]
    InvalidImpulse(String),
    #[error("bad-data event at t = {t} lies outside the horizon T = {horizon}")]
    EventOutsideHorizon { t: usize, horizon: usize },
}

/// Which noise channel a derived RNG stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Process,
    Measurement,
    Impulse,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive an independent, reproducible stream for one
/// `(base_seed, experiment, role)` triple. Distinct experiments and roles get
/// decorrelated streams, so experiments can run in parallel.
pub fn derive_stream(base_seed: u64, experiment: u64, role: StreamRole) -> ChaCha12Rng {
    let role_tag = match role {
        StreamRole::Process => 0xa076_1d64_78bd_642f_u64,
        StreamRole::Measurement => 0xe703_7ed1_a0b4_28db,
        StreamRole::Impulse => 0x8ebc_6af0_9c88_c6e3,
    };
    let mut s = splitmix64(base_seed);
    s = splitmix64(s ^ experiment.wrapping_mul(0x2545_f491_4f6c_dd1d));
    s = splitmix64(s ^ role_tag);
    ChaCha12Rng::seed_from_u64(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// A scalar Gaussian mixture applied independently to every vector component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub components: Vec<MixtureComponent>,
}

impl MixtureSpec {
    pub fn new(components: Vec<(f64, f64, f64)>) -> Result<Self, NoiseError> {
        let spec = MixtureSpec {
            components: components
                .into_iter()
                .map(|(weight, mean, variance)| MixtureComponent {
                    weight,
                    mean,
                    variance,
                })
                .collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        if self.components.is_empty() {
            return Err(NoiseError::InvalidMixture("no components".into()));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(NoiseError::InvalidMixture(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        for c in &self.components {
            if c.weight < 0.0 || c.variance < 0.0 {
                return Err(NoiseError::InvalidMixture(
                    "negative weight or variance".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.components
            .iter()
            .map(|c| c.weight * (c.variance + c.mean * c.mean))
            .sum::<f64>()
            - m * m
    }
}

/// Draw a `d`-dimensional sample with each component drawn independently
/// from the mixture.
pub fn sample_mixture(spec: &MixtureSpec, rng: &mut ChaCha12Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| {
        let pick: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = &spec.components[spec.components.len() - 1];
        for c in &spec.components {
            acc += c.weight;
            if pick < acc {
                chosen = c;
                break;
            }
        }
        let z: f64 = StandardNormal.sample(rng);
        chosen.mean + z * chosen.variance.sqrt()
    })
}

/// Base distribution underneath an impulse layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BaseNoise {
    Zero,
    Gaussian { std: f64 },
    Mixture { spec: MixtureSpec },
}

impl BaseNoise {
    pub fn sample(&self, rng: &mut ChaCha12Rng, d: usize) -> DVector<f64> {
        match self {
            BaseNoise::Zero => DVector::zeros(d),
            BaseNoise::Gaussian { std } => {
                DVector::from_fn(d, |_, _| {
                    let z: f64 = StandardNormal.sample(rng);
                    z * std
                })
            }
            BaseNoise::Mixture { spec } => sample_mixture(spec, rng, d),
        }
    }

    pub fn std(&self) -> f64 {
        match self {
            BaseNoise::Zero => 0.0,
            BaseNoise::Gaussian { std } => *std,
            BaseNoise::Mixture { spec } => spec.variance().sqrt(),
        }
    }
}

/// Base noise plus sparse impulse additions (the randn/randi construction):
/// with probability `step_prob` per step, a uniformly chosen `fraction` of
/// the components receives an extra Gaussian draw of standard deviation
/// `scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseSpec {
    pub base: BaseNoise,
    pub step_prob: f64,
    pub fraction: f64,
    pub scale: f64,
}

impl ImpulseSpec {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(0.0..=1.0).contains(&self.step_prob) || !(0.0..=1.0).contains(&self.fraction) {
            return Err(NoiseError::InvalidImpulse(
                "step_prob and fraction must lie in [0, 1]".into(),
            ));
        }
        if self.scale < 0.0 {
            return Err(NoiseError::InvalidImpulse("scale must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Draw base noise from `base_rng` and impulse gating/indices/magnitudes from
/// `impulse_rng` so the base stream stays aligned whether or not impulses fire.
pub fn sample_impulse(
    spec: &ImpulseSpec,
    base_rng: &mut ChaCha12Rng,
    impulse_rng: &mut ChaCha12Rng,
    d: usize,
) -> DVector<f64> {
    let mut out = spec.base.sample(base_rng, d);
    if spec.step_prob == 0.0 || spec.fraction == 0.0 || spec.scale == 0.0 {
        return out;
    }
    let gate: f64 = impulse_rng.gen();
    if gate >= spec.step_prob {
        return out;
    }
    let count = ((spec.fraction * d as f64).ceil() as usize).clamp(1, d);
    for _ in 0..count {
        let idx = impulse_rng.gen_range(0..d);
        let z: f64 = StandardNormal.sample(impulse_rng);
        out[idx] += z * spec.scale;
    }
    out
}

/// Any noise model a scenario can attach to a channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseModel {
    Zero,
    Gaussian { std: f64 },
    Mixture { spec: MixtureSpec },
    Impulse { spec: ImpulseSpec },
}

impl NoiseModel {
    pub fn sample(
        &self,
        base_rng: &mut ChaCha12Rng,
        impulse_rng: &mut ChaCha12Rng,
        d: usize,
    ) -> DVector<f64> {
        match self {
            NoiseModel::Zero => DVector::zeros(d),
            NoiseModel::Gaussian { std } => BaseNoise::Gaussian { std: *std }.sample(base_rng, d),
            NoiseModel::Mixture { spec } => sample_mixture(spec, base_rng, d),
            NoiseModel::Impulse { spec } => sample_impulse(spec, base_rng, impulse_rng, d),
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        match self {
            NoiseModel::Zero | NoiseModel::Gaussian { .. } => Ok(()),
            NoiseModel::Mixture { spec } => spec.validate(),
            NoiseModel::Impulse { spec } => {
                spec.validate()?;
                if let BaseNoise::Mixture { spec } = &spec.base {
                    spec.validate()?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BadDataEvent {
    pub time_index: usize,
    pub multiplier: f64,
}

/// Scheduled multiplicative corruption of every power measurement.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BadDataSchedule {
    pub events: Vec<BadDataEvent>,
}

impl BadDataSchedule {
    pub fn validate(&self, horizon: usize) -> Result<(), NoiseError> {
        for ev in &self.events {
            if ev.time_index == 0 || ev.time_index > horizon {
                return Err(NoiseError::EventOutsideHorizon {
                    t: ev.time_index,
                    horizon,
                });
            }
        }
        Ok(())
    }
}

/// Apply any event scheduled at step `t` (1-based): power injection and flow
/// entries are scaled, voltage magnitudes untouched.
pub fn apply_bad_data(
    v: &DVector<f64>,
    t: usize,
    schedule: &BadDataSchedule,
    plan: &MeasurementPlan,
) -> DVector<f64> {
    let mut out = v.clone();
    for ev in &schedule.events {
        if ev.time_index == t {
            let mask = plan.power_mask();
            for (k, is_power) in mask.iter().enumerate() {
                if *is_power {
                    out[k] *= ev.multiplier;
                }
            }
        }
    }
    out
}

/// A full noise scenario: process channel, measurement channel, optional
/// bad-data schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub process: NoiseModel,
    pub measurement: NoiseModel,
    #[serde(default)]
    pub bad_data: Option<BadDataSchedule>,
}

/// Knobs for the impulse construction; the reference implementation is not
/// public, so these four numbers are configuration, with defaults chosen to
/// give sparse 10-sigma outliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpulseKnobs {
    pub step_prob: f64,
    pub fraction: f64,
    /// Impulse standard deviation as a multiple of the base std.
    pub scale_mult: f64,
}

impl Default for ImpulseKnobs {
    fn default() -> Self {
        ImpulseKnobs {
            step_prob: 0.05,
            fraction: 0.10,
            scale_mult: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioPreset {
    Scenario1,
    Scenario2,
    Scenario3,
    Scenario4,
}

impl ScenarioPreset {
    /// Build the preset. `q_std`/`r_std` set the Gaussian bases of the
    /// impulse scenarios (the initialization constants by default).
    pub fn build(self, q_std: f64, r_std: f64, knobs: ImpulseKnobs) -> Scenario {
        let impulse = |std: f64| NoiseModel::Impulse {
            spec: ImpulseSpec {
                base: BaseNoise::Gaussian { std },
                step_prob: knobs.step_prob,
                fraction: knobs.fraction,
                scale: knobs.scale_mult * std,
            },
        };
        match self {
            ScenarioPreset::Scenario1 => Scenario {
                process: impulse(q_std),
                measurement: impulse(r_std),
                bad_data: None,
            },
            ScenarioPreset::Scenario2 => Scenario {
                process: NoiseModel::Mixture {
                    spec: MixtureSpec::new(vec![
                        (0.4, 0.2, 1e-4),
                        (0.2, 0.0, 1e-2),
                        (0.4, -0.2, 1e-4),
                    ])
                    .unwrap(),
                },
                measurement: NoiseModel::Mixture {
                    spec: MixtureSpec::new(vec![
                        (0.4, 0.2, 0.3),
                        (0.2, 0.0, 20.0),
                        (0.4, -0.2, 0.3),
                    ])
                    .unwrap(),
                },
                bad_data: None,
            },
            ScenarioPreset::Scenario3 => Scenario {
                process: NoiseModel::Mixture {
                    spec: MixtureSpec::new(vec![
                        (0.4, 0.3, 1e-3),
                        (0.2, 0.0, 1e-2),
                        (0.4, -0.1, 1e-4),
                    ])
                    .unwrap(),
                },
                measurement: NoiseModel::Mixture {
                    spec: MixtureSpec::new(vec![
                        (0.4, 0.3, 0.2),
                        (0.2, 0.0, 20.0),
                        (0.4, -0.1, 0.3),
                    ])
                    .unwrap(),
                },
                bad_data: None,
            },
            ScenarioPreset::Scenario4 => {
                let mut s = ScenarioPreset::Scenario1.build(q_std, r_std, knobs);
                s.bad_data = Some(BadDataSchedule {
                    events: vec![
                        BadDataEvent {
                            time_index: 20,
                            multiplier: 1.15,
                        },
                        BadDataEvent {
                            time_index: 40,
                            multiplier: 0.85,
                        },
                    ],
                });
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::casefile::parse_cdf;
    use crate::psmodel::Descriptor;

    #[test]
    fn degenerate_single_component_is_zero() {
        let spec = MixtureSpec::new(vec![(1.0, 0.0, 0.0)]).unwrap();
        let mut rng = derive_stream(1, 0, StreamRole::Process);
        let v = sample_mixture(&spec, &mut rng, 16);
        assert_eq!(v.abs().max(), 0.0);
    }

    #[test]
    fn bimodal_mixture_mean_converges() {
        // 0.4 N(0.2, .) + 0.2 N(0, .) + 0.4 N(-0.2, .) has mean 0.
        let spec = MixtureSpec::new(vec![
            (0.4, 0.2, 1e-4),
            (0.2, 0.0, 1e-2),
            (0.4, -0.2, 1e-4),
        ])
        .unwrap();
        let mut rng = derive_stream(2, 0, StreamRole::Process);
        let n = 1_000_000;
        let v = sample_mixture(&spec, &mut rng, n);
        let mean = v.sum() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((spec.mean() - 0.0).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_mixture_mean_converges() {
        // 0.4 * 0.3 + 0.4 * (-0.1) = 0.08.
        let spec = MixtureSpec::new(vec![
            (0.4, 0.3, 0.2),
            (0.2, 0.0, 20.0),
            (0.4, -0.1, 0.3),
        ])
        .unwrap();
        let mut rng = derive_stream(3, 0, StreamRole::Measurement);
        let n = 1_000_000;
        let v = sample_mixture(&spec, &mut rng, n);
        let mean = v.sum() / n as f64;
        assert!((mean - 0.08).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn mixture_empirical_variance_matches_analytic() {
        let spec = MixtureSpec::new(vec![
            (0.4, 0.2, 0.3),
            (0.2, 0.0, 20.0),
            (0.4, -0.2, 0.3),
        ])
        .unwrap();
        let mut rng = derive_stream(4, 0, StreamRole::Measurement);
        let n = 1_000_000;
        let v = sample_mixture(&spec, &mut rng, n);
        let mean = v.sum() / n as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let analytic = spec.variance();
        // 3-sigma band for the variance estimate of a heavy mixture.
        assert!(
            (var - analytic).abs() < 0.05 * analytic,
            "var {var} vs {analytic}"
        );
    }

    #[test]
    fn invalid_mixture_weights_rejected() {
        assert!(MixtureSpec::new(vec![(0.5, 0.0, 1.0), (0.4, 0.0, 1.0)]).is_err());
        assert!(MixtureSpec::new(vec![(1.0, 0.0, -1.0)]).is_err());
    }

    #[test]
    fn impulse_prob_zero_reduces_to_base() {
        let spec = ImpulseSpec {
            base: BaseNoise::Gaussian { std: 0.1 },
            step_prob: 0.0,
            fraction: 0.5,
            scale: 10.0,
        };
        let mut base1 = derive_stream(5, 0, StreamRole::Process);
        let mut imp1 = derive_stream(5, 0, StreamRole::Impulse);
        let v1 = sample_impulse(&spec, &mut base1, &mut imp1, 32);
        let mut base2 = derive_stream(5, 0, StreamRole::Process);
        let v2 = spec.base.sample(&mut base2, 32);
        assert_eq!(v1.as_slice(), v2.as_slice());
    }

    #[test]
    fn impulse_always_on_adds_variance() {
        // step_prob = 1, fraction = 1, scale = 10: variance ~ base + 100.
        let spec = ImpulseSpec {
            base: BaseNoise::Gaussian { std: 1.0 },
            step_prob: 1.0,
            fraction: 1.0,
            scale: 10.0,
        };
        let mut base = derive_stream(6, 0, StreamRole::Process);
        let mut imp = derive_stream(6, 0, StreamRole::Impulse);
        let n = 1_000_000;
        let v = sample_impulse(&spec, &mut base, &mut imp, n);
        let mean = v.sum() / n as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!(
            (var - 101.0).abs() < 0.05 * 101.0,
            "variance {var}, expected ~101"
        );
    }

    #[test]
    fn impulse_fixed_seed_reproducible() {
        let spec = ImpulseSpec {
            base: BaseNoise::Gaussian { std: 0.1 },
            step_prob: 0.3,
            fraction: 0.2,
            scale: 1.0,
        };
        let draw = || {
            let mut base = derive_stream(7, 3, StreamRole::Process);
            let mut imp = derive_stream(7, 3, StreamRole::Impulse);
            (0..20)
                .map(|_| sample_impulse(&spec, &mut base, &mut imp, 10))
                .collect::<Vec<_>>()
        };
        let a = draw();
        let b = draw();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.as_slice(), y.as_slice());
        }
    }

    #[test]
    fn derived_streams_differ_by_index_and_role() {
        let mut a = derive_stream(1, 0, StreamRole::Process);
        let mut b = derive_stream(1, 1, StreamRole::Process);
        let mut c = derive_stream(1, 0, StreamRole::Measurement);
        let (xa, xb, xc): (u64, u64, u64) = (a.gen(), b.gen(), c.gen());
        assert_ne!(xa, xb);
        assert_ne!(xa, xc);
    }

    fn plan14() -> (crate::casefile::PowerNetwork, MeasurementPlan) {
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/ieee14.cdf"
        ))
        .unwrap();
        let net = parse_cdf(&text).unwrap();
        let plan = MeasurementPlan::full(&net);
        (net, plan)
    }

    #[test]
    fn bad_data_identity_off_schedule() {
        let (_, plan) = plan14();
        let schedule = BadDataSchedule {
            events: vec![BadDataEvent {
                time_index: 20,
                multiplier: 1.15,
            }],
        };
        let v = DVector::from_element(plan.m(), 2.0);
        let out = apply_bad_data(&v, 19, &schedule, &plan);
        assert_eq!(out.as_slice(), v.as_slice());
    }

    #[test]
    fn bad_data_scales_power_entries_only() {
        let (_, plan) = plan14();
        let schedule = BadDataSchedule {
            events: vec![
                BadDataEvent {
                    time_index: 20,
                    multiplier: 1.15,
                },
                BadDataEvent {
                    time_index: 40,
                    multiplier: 0.85,
                },
            ],
        };
        let v = DVector::from_element(plan.m(), 1.0);
        let up = apply_bad_data(&v, 20, &schedule, &plan);
        let down = apply_bad_data(&v, 40, &schedule, &plan);
        for (k, d) in plan.entries.iter().enumerate() {
            match d {
                Descriptor::VoltageMagnitude { .. } => {
                    assert_eq!(up[k], 1.0);
                    assert_eq!(down[k], 1.0);
                }
                _ => {
                    assert_eq!(up[k], 1.15);
                    assert_eq!(down[k], 0.85);
                }
            }
        }
    }

    #[test]
    fn bad_data_outside_horizon_rejected() {
        let schedule = BadDataSchedule {
            events: vec![BadDataEvent {
                time_index: 80,
                multiplier: 1.15,
            }],
        };
        assert!(matches!(
            schedule.validate(60),
            Err(NoiseError::EventOutsideHorizon { t: 80, horizon: 60 })
        ));
        assert!(schedule.validate(100).is_ok());
    }

    #[test]
    fn scenario_presets_validate() {
        for preset in [
            ScenarioPreset::Scenario1,
            ScenarioPreset::Scenario2,
            ScenarioPreset::Scenario3,
            ScenarioPreset::Scenario4,
        ] {
            let s = preset.build(1e-5_f64.sqrt(), 0.1, ImpulseKnobs::default());
            s.process.validate().unwrap();
            s.measurement.validate().unwrap();
            if preset == ScenarioPreset::Scenario4 {
                let sched = s.bad_data.expect("scenario 4 has bad data");
                assert_eq!(sched.events.len(), 2);
                sched.validate(60).unwrap();
            } else {
                assert!(s.bad_data.is_none());
            }
        }
    }
}
