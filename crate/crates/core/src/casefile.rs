//! IEEE Common Data Format case files: parsing, validation, and nodal
//! admittance construction.
//!
//! The ingest format is the fixed-column CDF layout of the Washington test
//! case archive (bus number in columns 1-4, name in 5-17, remaining fields
//! whitespace-delimited). All electrical quantities are normalized to the
//! file's MVA base at load time; downstream code only ever sees per-unit
//! values. A versioned JSON dump serves as the internal cache format.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Schema version embedded in JSON network dumps.
pub const NETWORK_DUMP_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation: {0}")]
    Validation(String),
    #[error("json: {0}")]
    Json(String),
}

impl CaseError {
    fn parse(line: usize, msg: impl Into<String>) -> Self {
        CaseError::Parse {
            line,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BusType {
    Slack,
    Pv,
    Pq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BusRecord {
    /// External bus number as given in the file.
    pub id: usize,
    pub base_voltage_kv: f64,
    pub bus_type: BusType,
    /// Shunt conductance S_i, per unit.
    pub shunt_conductance: f64,
    /// Shunt susceptance F_i, per unit.
    pub shunt_susceptance: f64,
    /// Voltage magnitude from the file, per unit.
    pub initial_magnitude: f64,
    /// Voltage phase from the file, radians.
    pub initial_phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchRecord {
    pub from_bus: usize,
    pub to_bus: usize,
    pub resistance: f64,
    pub reactance: f64,
    /// Total line charging susceptance, per unit.
    pub line_charging: f64,
    /// Off-nominal turns ratio on the from side; 1.0 for plain lines.
    pub tap_ratio: f64,
    /// Series conductance S_ij = r / (r^2 + x^2).
    pub series_conductance: f64,
    /// Series susceptance F_ij = -x / (r^2 + x^2).
    pub series_susceptance: f64,
}

/// Per-branch two-port admittance entries with the tap folded in.
#[derive(Debug, Clone, Copy)]
pub struct BranchAdmittance {
    pub g_ff: f64,
    pub b_ff: f64,
    pub g_ft: f64,
    pub b_ft: f64,
    pub g_tt: f64,
    pub b_tt: f64,
}

impl BranchRecord {
    pub fn admittance(&self) -> BranchAdmittance {
        let gs = self.series_conductance;
        let bs = self.series_susceptance;
        let half_charge = self.line_charging / 2.0;
        let a = self.tap_ratio;
        BranchAdmittance {
            g_ff: gs / (a * a),
            b_ff: (bs + half_charge) / (a * a),
            g_ft: -gs / a,
            b_ft: -bs / a,
            g_tt: gs,
            b_tt: bs + half_charge,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerNetwork {
    pub buses: Vec<BusRecord>,
    pub branches: Vec<BranchRecord>,
    /// Real part of the nodal admittance matrix.
    pub g: DMatrix<f64>,
    /// Imaginary part of the nodal admittance matrix.
    pub b: DMatrix<f64>,
    pub slack_index: usize,
    pub mva_base: f64,
}

impl PowerNetwork {
    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Packed state dimension 2N - 1 (slack phase pinned to zero).
    pub fn state_dim(&self) -> usize {
        2 * self.bus_count() - 1
    }

    /// Index of the bus with the given external number.
    pub fn bus_index(&self, id: usize) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn to_json(&self) -> Result<String, CaseError> {
        let dump = NetworkDump {
            schema_version: NETWORK_DUMP_VERSION,
            network: self.clone(),
        };
        serde_json::to_string_pretty(&dump).map_err(|e| CaseError::Json(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, CaseError> {
        let dump: NetworkDump =
            serde_json::from_str(text).map_err(|e| CaseError::Json(e.to_string()))?;
        if dump.schema_version != NETWORK_DUMP_VERSION {
            return Err(CaseError::Json(format!(
                "unsupported network dump version {}",
                dump.schema_version
            )));
        }
        Ok(dump.network)
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkDump {
    schema_version: u32,
    network: PowerNetwork,
}

/// Parse an IEEE CDF case file into a validated network.
pub fn parse_cdf(text: &str) -> Result<PowerNetwork, CaseError> {
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| CaseError::parse(1, "empty file"))?;
    let mva_base = parse_mva_base(header).ok_or_else(|| CaseError::parse(1, "missing MVA base"))?;
    if mva_base <= 0.0 {
        return Err(CaseError::parse(1, "MVA base must be positive"));
    }

    let mut buses: Vec<BusRecord> = Vec::new();
    let mut raw_branches: Vec<(usize, RawBranch)> = Vec::new();
    let mut section = Section::None;

    for (idx, line) in lines {
        let lineno = idx + 1;
        let upper = line.to_ascii_uppercase();
        if upper.starts_with("BUS DATA") {
            section = Section::Bus;
            continue;
        }
        if upper.starts_with("BRANCH DATA") {
            section = Section::Branch;
            continue;
        }
        let trimmed = line.trim();
        if trimmed.starts_with("-9") {
            section = Section::None;
            continue;
        }
        if trimmed.is_empty() || upper.starts_with("END") {
            continue;
        }
        match section {
            Section::Bus => buses.push(parse_bus_line(line, lineno)?),
            Section::Branch => raw_branches.push((lineno, parse_branch_line(line, lineno)?)),
            Section::None => {}
        }
    }

    if buses.is_empty() {
        return Err(CaseError::Validation("no bus records found".to_string()));
    }

    // Validate bus set.
    let mut seen = std::collections::HashSet::new();
    for bus in &buses {
        if !seen.insert(bus.id) {
            return Err(CaseError::Validation(format!("duplicate bus id {}", bus.id)));
        }
    }
    let slack_count = buses
        .iter()
        .filter(|b| b.bus_type == BusType::Slack)
        .count();
    if slack_count != 1 {
        return Err(CaseError::Validation(format!(
            "expected exactly one slack bus, found {slack_count}"
        )));
    }
    let slack_index = buses
        .iter()
        .position(|b| b.bus_type == BusType::Slack)
        .unwrap();

    let find = |id: usize| buses.iter().position(|b| b.id == id);
    let mut branches = Vec::with_capacity(raw_branches.len());
    for (lineno, raw) in raw_branches {
        if raw.from == raw.to {
            return Err(CaseError::Validation(format!(
                "line {lineno}: branch connects bus {} to itself",
                raw.from
            )));
        }
        if raw.r == 0.0 && raw.x == 0.0 {
            return Err(CaseError::Validation(format!(
                "line {lineno}: branch {}-{} has zero impedance",
                raw.from, raw.to
            )));
        }
        if raw.phase_shift != 0.0 {
            return Err(CaseError::Validation(format!(
                "line {lineno}: phase-shifting transformer {}-{} is not supported",
                raw.from, raw.to
            )));
        }
        if find(raw.from).is_none() || find(raw.to).is_none() {
            return Err(CaseError::Validation(format!(
                "line {lineno}: branch {}-{} references unknown bus",
                raw.from, raw.to
            )));
        }
        let denom = raw.r * raw.r + raw.x * raw.x;
        branches.push(BranchRecord {
            from_bus: raw.from,
            to_bus: raw.to,
            resistance: raw.r,
            reactance: raw.x,
            line_charging: raw.b,
            tap_ratio: if raw.tap == 0.0 { 1.0 } else { raw.tap },
            series_conductance: raw.r / denom,
            series_susceptance: -raw.x / denom,
        });
    }

    let (g, b) = build_ybus(&buses, &branches);
    Ok(PowerNetwork {
        buses,
        branches,
        g,
        b,
        slack_index,
        mva_base,
    })
}

/// Assemble the nodal admittance matrix pair (G, B).
///
/// Off-diagonals couple connected buses through the branch series admittance
/// (tap-adjusted); diagonals accumulate series terms, half line charging, and
/// bus shunts.
pub fn build_ybus(buses: &[BusRecord], branches: &[BranchRecord]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = buses.len();
    let mut g = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for (i, bus) in buses.iter().enumerate() {
        g[(i, i)] += bus.shunt_conductance;
        b[(i, i)] += bus.shunt_susceptance;
    }
    let index = |id: usize| buses.iter().position(|bus| bus.id == id).unwrap();
    for branch in branches {
        let f = index(branch.from_bus);
        let t = index(branch.to_bus);
        let adm = branch.admittance();
        g[(f, f)] += adm.g_ff;
        b[(f, f)] += adm.b_ff;
        g[(t, t)] += adm.g_tt;
        b[(t, t)] += adm.b_tt;
        g[(f, t)] += adm.g_ft;
        b[(f, t)] += adm.b_ft;
        g[(t, f)] += adm.g_ft;
        b[(t, f)] += adm.b_ft;
    }
    (g, b)
}

enum Section {
    None,
    Bus,
    Branch,
}

struct RawBranch {
    from: usize,
    to: usize,
    r: f64,
    x: f64,
    b: f64,
    tap: f64,
    phase_shift: f64,
}

fn parse_mva_base(header: &str) -> Option<f64> {
    // Columns 32-37 hold the MVA base; fall back to the first parseable
    // floating token for loosely formatted files.
    if header.len() >= 37 {
        if let Ok(v) = header[31..37].trim().parse::<f64>() {
            return Some(v);
        }
    }
    header
        .split_whitespace()
        .filter_map(|tok| tok.parse::<f64>().ok())
        .find(|v| *v > 0.0)
}

fn parse_bus_line(line: &str, lineno: usize) -> Result<BusRecord, CaseError> {
    if line.len() < 18 {
        return Err(CaseError::parse(lineno, "bus record too short"));
    }
    let id: usize = line[..4]
        .trim()
        .parse()
        .map_err(|_| CaseError::parse(lineno, "invalid bus number"))?;
    // Skip the name field (columns 5-17); the rest is whitespace-delimited.
    let toks: Vec<&str> = line[17..].split_whitespace().collect();
    if toks.len() < 15 {
        return Err(CaseError::parse(lineno, "bus record has too few fields"));
    }
    let fl = |i: usize, what: &str| -> Result<f64, CaseError> {
        toks[i]
            .parse::<f64>()
            .map_err(|_| CaseError::parse(lineno, format!("invalid {what}")))
    };
    let type_code: u32 = toks[2]
        .parse()
        .map_err(|_| CaseError::parse(lineno, "invalid bus type"))?;
    let bus_type = match type_code {
        0 | 1 => BusType::Pq,
        2 => BusType::Pv,
        3 => BusType::Slack,
        other => {
            return Err(CaseError::parse(
                lineno,
                format!("unknown bus type code {other}"),
            ))
        }
    };
    let magnitude = fl(3, "final voltage")?;
    if magnitude <= 0.0 {
        return Err(CaseError::parse(lineno, "final voltage must be positive"));
    }
    let angle_deg = fl(4, "final angle")?;
    // The archive files leave base kV at 0.0; everything is per unit anyway.
    let base_kv = fl(9, "base kV")?;
    let shunt_g = fl(13, "shunt conductance")?;
    let shunt_b = fl(14, "shunt susceptance")?;
    Ok(BusRecord {
        id,
        base_voltage_kv: if base_kv > 0.0 { base_kv } else { 1.0 },
        bus_type,
        shunt_conductance: shunt_g,
        shunt_susceptance: shunt_b,
        initial_magnitude: magnitude,
        initial_phase: angle_deg.to_radians(),
    })
}

fn parse_branch_line(line: &str, lineno: usize) -> Result<RawBranch, CaseError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 9 {
        return Err(CaseError::parse(lineno, "branch record has too few fields"));
    }
    let int = |i: usize, what: &str| -> Result<usize, CaseError> {
        toks[i]
            .parse::<usize>()
            .map_err(|_| CaseError::parse(lineno, format!("invalid {what}")))
    };
    let fl = |i: usize, what: &str| -> Result<f64, CaseError> {
        toks[i]
            .parse::<f64>()
            .map_err(|_| CaseError::parse(lineno, format!("invalid {what}")))
    };
    Ok(RawBranch {
        from: int(0, "from bus")?,
        to: int(1, "to bus")?,
        r: fl(6, "resistance")?,
        x: fl(7, "reactance")?,
        b: fl(8, "line charging")?,
        tap: if toks.len() > 14 { fl(14, "tap ratio")? } else { 0.0 },
        phase_shift: if toks.len() > 15 { fl(15, "phase shift")? } else { 0.0 },
    })
}
