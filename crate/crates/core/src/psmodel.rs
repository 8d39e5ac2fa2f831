//! Quasi-steady-state dynamic model of the power system: Holt two-parameter
//! smoothing as the state transition, the nonlinear power-flow measurement
//! function, and ground-truth trajectory simulation.

use crate::casefile::PowerNetwork;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Magnitudes are clamped here during simulation so the measurement function
/// stays well defined under extreme process noise.
pub const MAGNITUDE_FLOOR: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid smoothing coefficient: {0} must lie strictly inside (0, 1)")]
    InvalidCoefficient(f64),
    #[error("invalid measurement plan: {0}")]
    InvalidPlan(String),
}

/// Bus voltage magnitudes and phases. The slack phase is pinned to zero and
/// omitted from the packed form, so the packed dimension is 2N - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub magnitudes: DVector<f64>,
    pub phases: DVector<f64>,
}

impl StateVector {
    pub fn flat_start(n_bus: usize) -> Self {
        StateVector {
            magnitudes: DVector::from_element(n_bus, 1.0),
            phases: DVector::zeros(n_bus),
        }
    }

    /// Voltage profile recorded in the case file, with the phase reference
    /// shifted so the slack bus sits exactly at zero.
    pub fn from_case(net: &PowerNetwork) -> Self {
        let slack_phase = net.buses[net.slack_index].initial_phase;
        StateVector {
            magnitudes: DVector::from_iterator(
                net.bus_count(),
                net.buses.iter().map(|b| b.initial_magnitude),
            ),
            phases: DVector::from_iterator(
                net.bus_count(),
                net.buses.iter().map(|b| b.initial_phase - slack_phase),
            ),
        }
    }

    pub fn n_bus(&self) -> usize {
        self.magnitudes.len()
    }

    /// Pack into `[magnitudes; phases except slack]`.
    pub fn pack(&self, slack_index: usize) -> DVector<f64> {
        let n = self.n_bus();
        let mut out = DVector::zeros(2 * n - 1);
        out.rows_mut(0, n).copy_from(&self.magnitudes);
        let mut k = n;
        for i in 0..n {
            if i != slack_index {
                out[k] = self.phases[i];
                k += 1;
            }
        }
        out
    }

    pub fn unpack(packed: &DVector<f64>, n_bus: usize, slack_index: usize) -> Self {
        assert_eq!(packed.len(), 2 * n_bus - 1, "packed dimension");
        let magnitudes = packed.rows(0, n_bus).clone_owned();
        let mut phases = DVector::zeros(n_bus);
        let mut k = n_bus;
        for i in 0..n_bus {
            if i != slack_index {
                phases[i] = packed[k];
                k += 1;
            }
        }
        StateVector { magnitudes, phases }
    }
}

/// Holt two-parameter exponential smoothing internals.
///
/// The trend recursion follows the standard Holt form
/// `trend = gamma (level - prev_level) + (1 - gamma) prev_trend`; the level
/// blends the new observation with the previous one-step prediction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoltState {
    pub level: DVector<f64>,
    pub prev_level: DVector<f64>,
    pub trend: DVector<f64>,
    pub level_coeff: f64,
    pub trend_coeff: f64,
}

impl HoltState {
    pub fn new(initial: &DVector<f64>, level_coeff: f64, trend_coeff: f64) -> Result<Self, ModelError> {
        for c in [level_coeff, trend_coeff] {
            if !(c > 0.0 && c < 1.0) {
                return Err(ModelError::InvalidCoefficient(c));
            }
        }
        Ok(HoltState {
            level: initial.clone(),
            prev_level: initial.clone(),
            trend: DVector::zeros(initial.len()),
            level_coeff,
            trend_coeff,
        })
    }

    pub fn dim(&self) -> usize {
        self.level.len()
    }

    /// The one-step transition is affine in the input: `f(u) = a u + c`.
    /// Exposing the coefficients lets sigma points share one exact map.
    pub fn affine_map(&self) -> (f64, DVector<f64>) {
        let up = self.level_coeff;
        let gamma = self.trend_coeff;
        let prev_prediction = &self.level + &self.trend;
        let slope = up * (1.0 + gamma);
        let offset = prev_prediction * ((1.0 - up) * (1.0 + gamma)) - &self.level * gamma
            + &self.trend * (1.0 - gamma);
        (slope, offset)
    }
}

/// One Holt step: returns the prediction `f(u) = level + trend` and the
/// advanced smoothing state.
pub fn holt_predict(u: &DVector<f64>, h: &HoltState) -> Result<(DVector<f64>, HoltState), ModelError> {
    if u.len() != h.dim() {
        return Err(ModelError::Dimension(format!(
            "state has {} components, Holt state {}",
            u.len(),
            h.dim()
        )));
    }
    let up = h.level_coeff;
    let gamma = h.trend_coeff;
    let prev_prediction = &h.level + &h.trend;
    let level = u * up + prev_prediction * (1.0 - up);
    let trend = (&level - &h.level) * gamma + &h.trend * (1.0 - gamma);
    let predicted = &level + &trend;
    let next = HoltState {
        prev_level: h.level.clone(),
        level,
        trend,
        level_coeff: up,
        trend_coeff: gamma,
    };
    Ok((predicted, next))
}

/// One measurement channel. Buses and branches are referenced by internal
/// index; the string form uses external bus numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descriptor {
    VoltageMagnitude { bus: usize },
    RealInjection { bus: usize },
    ReactiveInjection { bus: usize },
    RealFlow { branch: usize },
    ReactiveFlow { branch: usize },
}

/// Ordered measurement channels; `m` must exceed the packed state dimension.
#[derive(Debug, Clone)]
pub struct MeasurementPlan {
    pub entries: Vec<Descriptor>,
}

impl MeasurementPlan {
    /// All bus voltage magnitudes, all bus P/Q injections, and all branch
    /// P/Q flows (measured at the from side).
    pub fn full(net: &PowerNetwork) -> Self {
        let mut entries = Vec::new();
        for bus in 0..net.bus_count() {
            entries.push(Descriptor::VoltageMagnitude { bus });
        }
        for bus in 0..net.bus_count() {
            entries.push(Descriptor::RealInjection { bus });
            entries.push(Descriptor::ReactiveInjection { bus });
        }
        for branch in 0..net.branch_count() {
            entries.push(Descriptor::RealFlow { branch });
            entries.push(Descriptor::ReactiveFlow { branch });
        }
        MeasurementPlan { entries }
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn validate(&self, net: &PowerNetwork) -> Result<(), ModelError> {
        if self.m() <= net.state_dim() {
            return Err(ModelError::InvalidPlan(format!(
                "m = {} must exceed the state dimension n = {} for observability",
                self.m(),
                net.state_dim()
            )));
        }
        for d in &self.entries {
            let ok = match *d {
                Descriptor::VoltageMagnitude { bus }
                | Descriptor::RealInjection { bus }
                | Descriptor::ReactiveInjection { bus } => bus < net.bus_count(),
                Descriptor::RealFlow { branch } | Descriptor::ReactiveFlow { branch } => {
                    branch < net.branch_count()
                }
            };
            if !ok {
                return Err(ModelError::InvalidPlan(format!(
                    "descriptor {d:?} references a missing bus or branch"
                )));
            }
        }
        Ok(())
    }

    /// True for channels that carry active or reactive power (the ones a
    /// bad-data event corrupts).
    pub fn power_mask(&self) -> Vec<bool> {
        self.entries
            .iter()
            .map(|d| !matches!(d, Descriptor::VoltageMagnitude { .. }))
            .collect()
    }

    /// Parse descriptor strings like `"Vm 4"`, `"Pinj 4"`, `"Qflow 4-5"`.
    /// `4-5/2` picks the second parallel circuit between buses 4 and 5.
    pub fn from_strings(net: &PowerNetwork, specs: &[String]) -> Result<Self, ModelError> {
        let mut entries = Vec::with_capacity(specs.len());
        for s in specs {
            entries.push(parse_descriptor(net, s)?);
        }
        let plan = MeasurementPlan { entries };
        plan.validate(net)?;
        Ok(plan)
    }

    pub fn to_strings(&self, net: &PowerNetwork) -> Vec<String> {
        self.entries
            .iter()
            .map(|d| match *d {
                Descriptor::VoltageMagnitude { bus } => format!("Vm {}", net.buses[bus].id),
                Descriptor::RealInjection { bus } => format!("Pinj {}", net.buses[bus].id),
                Descriptor::ReactiveInjection { bus } => format!("Qinj {}", net.buses[bus].id),
                Descriptor::RealFlow { branch } => {
                    let b = &net.branches[branch];
                    format!("Pflow {}-{}", b.from_bus, b.to_bus)
                }
                Descriptor::ReactiveFlow { branch } => {
                    let b = &net.branches[branch];
                    format!("Qflow {}-{}", b.from_bus, b.to_bus)
                }
            })
            .collect()
    }
}

fn parse_descriptor(net: &PowerNetwork, s: &str) -> Result<Descriptor, ModelError> {
    let bad = |msg: &str| ModelError::InvalidPlan(format!("descriptor '{s}': {msg}"));
    let mut parts = s.split_whitespace();
    let kind = parts.next().ok_or_else(|| bad("empty"))?;
    let arg = parts.next().ok_or_else(|| bad("missing argument"))?;
    if parts.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    let bus_of = |tok: &str| -> Result<usize, ModelError> {
        let id: usize = tok.parse().map_err(|_| bad("invalid bus number"))?;
        net.bus_index(id)
            .ok_or_else(|| bad(&format!("unknown bus {id}")))
    };
    let branch_of = |tok: &str| -> Result<usize, ModelError> {
        let (pair, circuit) = match tok.split_once('/') {
            Some((p, c)) => (
                p,
                c.parse::<usize>().map_err(|_| bad("invalid circuit"))?,
            ),
            None => (tok, 1),
        };
        let (f, t) = pair.split_once('-').ok_or_else(|| bad("expected from-to"))?;
        let f: usize = f.parse().map_err(|_| bad("invalid from bus"))?;
        let t: usize = t.parse().map_err(|_| bad("invalid to bus"))?;
        net.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.from_bus == f && b.to_bus == t)
            .map(|(i, _)| i)
            .nth(circuit - 1)
            .ok_or_else(|| bad(&format!("no branch {f}-{t} (circuit {circuit})")))
    };
    match kind {
        "Vm" => Ok(Descriptor::VoltageMagnitude { bus: bus_of(arg)? }),
        "Pinj" => Ok(Descriptor::RealInjection { bus: bus_of(arg)? }),
        "Qinj" => Ok(Descriptor::ReactiveInjection { bus: bus_of(arg)? }),
        "Pflow" => Ok(Descriptor::RealFlow {
            branch: branch_of(arg)?,
        }),
        "Qflow" => Ok(Descriptor::ReactiveFlow {
            branch: branch_of(arg)?,
        }),
        other => Err(bad(&format!("unknown kind '{other}'"))),
    }
}

/// Evaluate the measurement function at `u`.
///
/// Injections use nodal admittance entries; flows use the branch two-port
/// terms (series plus half line charging, taps folded in). The two families
/// deliberately read different admittance quantities so injections stay
/// consistent with nodal balance.
pub fn measure(net: &PowerNetwork, u: &StateVector, plan: &MeasurementPlan) -> DVector<f64> {
    let v = &u.magnitudes;
    let ph = &u.phases;
    let mut out = DVector::zeros(plan.m());
    for (k, d) in plan.entries.iter().enumerate() {
        out[k] = match *d {
            Descriptor::VoltageMagnitude { bus } => v[bus],
            Descriptor::RealInjection { bus } => {
                let mut p = 0.0;
                for j in 0..net.bus_count() {
                    let g = net.g[(bus, j)];
                    let b = net.b[(bus, j)];
                    if g == 0.0 && b == 0.0 {
                        continue;
                    }
                    let d_ph = ph[bus] - ph[j];
                    p += v[bus] * v[j] * (g * d_ph.cos() + b * d_ph.sin());
                }
                p
            }
            Descriptor::ReactiveInjection { bus } => {
                let mut q = 0.0;
                for j in 0..net.bus_count() {
                    let g = net.g[(bus, j)];
                    let b = net.b[(bus, j)];
                    if g == 0.0 && b == 0.0 {
                        continue;
                    }
                    let d_ph = ph[bus] - ph[j];
                    q += v[bus] * v[j] * (g * d_ph.sin() - b * d_ph.cos());
                }
                q
            }
            Descriptor::RealFlow { branch } => {
                let br = &net.branches[branch];
                let adm = br.admittance();
                let f = net.bus_index(br.from_bus).unwrap();
                let t = net.bus_index(br.to_bus).unwrap();
                let d_ph = ph[f] - ph[t];
                v[f] * v[f] * adm.g_ff
                    + v[f] * v[t] * (adm.g_ft * d_ph.cos() + adm.b_ft * d_ph.sin())
            }
            Descriptor::ReactiveFlow { branch } => {
                let br = &net.branches[branch];
                let adm = br.admittance();
                let f = net.bus_index(br.from_bus).unwrap();
                let t = net.bus_index(br.to_bus).unwrap();
                let d_ph = ph[f] - ph[t];
                -v[f] * v[f] * adm.b_ff
                    + v[f] * v[t] * (adm.g_ft * d_ph.sin() - adm.b_ft * d_ph.cos())
            }
        };
    }
    out
}

/// Measurement function over packed states.
pub fn measure_packed(net: &PowerNetwork, packed: &DVector<f64>, plan: &MeasurementPlan) -> DVector<f64> {
    let u = StateVector::unpack(packed, net.bus_count(), net.slack_index);
    measure(net, &u, plan)
}

/// A simulated ground-truth trajectory and its noisy measurements.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Packed true states u_1..u_T.
    pub states: Vec<DVector<f64>>,
    /// Noisy measurements v_1..v_T.
    pub measurements: Vec<DVector<f64>>,
    /// Number of magnitude components clamped at the simulation floor.
    pub floor_events: usize,
}

/// Simulate `u_t = f(u_{t-1}) + q_t`, `v_t = g(u_t) + r_t` for T steps.
///
/// `qgen` and `rgen` draw the packed process and measurement noise for each
/// step; determinism is entirely theirs.
pub fn simulate_truth(
    net: &PowerNetwork,
    plan: &MeasurementPlan,
    u0: &StateVector,
    steps: usize,
    holt: &HoltState,
    qgen: &mut dyn FnMut(usize) -> DVector<f64>,
    rgen: &mut dyn FnMut(usize) -> DVector<f64>,
) -> Trajectory {
    let n_bus = net.bus_count();
    let n = net.state_dim();
    let m = plan.m();
    let mut holt_state = holt.clone();
    let mut u = u0.pack(net.slack_index);
    let mut states = Vec::with_capacity(steps);
    let mut measurements = Vec::with_capacity(steps);
    let mut floor_events = 0usize;

    for _ in 0..steps {
        let (predicted, next_holt) = holt_predict(&u, &holt_state).expect("dimensions agree");
        holt_state = next_holt;
        let q = qgen(n);
        u = predicted + q;
        for i in 0..n_bus {
            if u[i] < MAGNITUDE_FLOOR {
                u[i] = MAGNITUDE_FLOOR;
                floor_events += 1;
            }
        }
        let r = rgen(m);
        let v = measure_packed(net, &u, plan) + r;
        states.push(u.clone());
        measurements.push(v);
    }
    Trajectory {
        states,
        measurements,
        floor_events,
    }
}
