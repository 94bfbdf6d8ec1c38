//! Experiment configuration: a JSON document with SI values whose keys carry
//! their unit (`_s`, `_m`, `_rad_s`, `_j_m`, ...).
//!
//! All frequencies are angular (rad/s). A value quoted in Hz or kHz must be
//! multiplied by `2 pi` before it goes into the file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use ctap_core::analysis::SweepVariable;
use ctap_core::units::{AtomSpecies, HalfInteger};

/// Invalid configuration, reported with the offending field path.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub species: SpeciesConfig,
    pub field: FieldConfig,
    pub comb: CombConfig,
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub interaction: InteractionConfig,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub three_level: Option<ThreeLevelConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    pub mass_kg: f64,
    pub g_f: f64,
    /// Spin quantum numbers as multiples of 1/2.
    pub f: f64,
    pub m_f: f64,
    pub m_f_prime: f64,
}

impl Default for SpeciesConfig {
    fn default() -> Self {
        let rb = AtomSpecies::rubidium87();
        SpeciesConfig {
            mass_kg: rb.mass,
            g_f: rb.g_f,
            f: rb.f.value(),
            m_f: rb.m_f.value(),
            m_f_prime: rb.m_f_prime.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub gradient_t_per_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombConfig {
    /// Initial frequencies `omega_1 .. omega_6`.
    pub omegas_rad_s: Vec<f64>,
    pub rabi_rad_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    CounterIntuitive,
    Intuitive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub total_s: f64,
    pub tau_s: f64,
    pub mode: Mode,
    /// Frequency gap between neighbouring comb lines at closest approach.
    pub min_gap_rad_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<DetuningConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningConfig {
    pub kappa_per_s: f64,
    pub delta_omega0_rad_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionConfig {
    /// One-dimensional coupling `g_1D`; 0 for a single atom.
    #[serde(default)]
    pub g1d_j_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min_m: f64,
    pub x_max_m: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt_s: f64,
    #[serde(default = "default_gs_tolerance")]
    pub ground_state_tolerance: f64,
    #[serde(default = "default_edge_tolerance")]
    pub edge_tolerance: f64,
    /// Trap (0, 1, 2 from the left) holding the initial state.
    #[serde(default)]
    pub initial_well: usize,
}

fn default_gs_tolerance() -> f64 {
    1e-7
}

fn default_edge_tolerance() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Wavefunction snapshots; empty means `0, T/2, T`.
    #[serde(default)]
    pub snapshot_times_s: Vec<f64>,
    /// Time of the `potential` snapshot.
    #[serde(default)]
    pub potential_time_s: f64,
    /// Also write the comb frequencies at every sample of a `ctap` run.
    #[serde(default = "default_true")]
    pub schedule_trace: bool,
}

fn default_samples() -> usize {
    500
}

fn default_true() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            samples: default_samples(),
            snapshot_times_s: Vec::new(),
            potential_time_s: 0.0,
            schedule_trace: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `g_1d` (J m), `kappa` (1/s), `T` (s) or `delta_omega0` (rad/s).
    pub variable: String,
    pub values: Vec<f64>,
}

impl SweepConfig {
    pub fn variable(&self) -> Result<SweepVariable, ConfigError> {
        self.variable
            .parse()
            .map_err(|e| ConfigError::new("sweep.variable", format!("{e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeLevelConfig {
    pub peak_coupling_rad_s: f64,
    pub total_s: f64,
    /// Centre-to-centre delay of the two pulses.
    pub delay_s: f64,
    /// Full width of each raised-cosine pulse.
    pub width_s: f64,
    pub mode: Mode,
    pub dt_s: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Bare on-site energies `(L, M, R)` divided by `hbar`.
    #[serde(default)]
    pub on_site_rad_s: [f64; 3],
    /// Chemical potentials of the left and right clouds divided by `hbar`.
    #[serde(default)]
    pub mu_rad_s: [f64; 2],
    /// Population-weighted mean-field shifts `U_i |c_i|^2` divided by `hbar`.
    #[serde(default)]
    pub self_consistent_rad_s: Option<[f64; 3]>,
}

impl ExperimentConfig {
    /// Reads `path` and applies `key.path=value` overrides before validating.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_with_overrides(&text, overrides)
    }

    pub fn from_str_with_overrides(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut value: Value =
            serde_json::from_str(text).map_err(|e| ConfigError::new("<document>", format!("{e}")))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let de = value;
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn species(&self) -> Result<AtomSpecies, ConfigError> {
        let half = |v: f64, key: &str| {
            HalfInteger::try_from_f64(v).map_err(|e| ConfigError::new(format!("species.{key}"), format!("{e}")))
        };
        AtomSpecies::new(
            self.species.mass_kg,
            self.species.g_f,
            half(self.species.f, "f")?,
            half(self.species.m_f, "m_f")?,
            half(self.species.m_f_prime, "m_f_prime")?,
        )
        .map_err(|e| ConfigError::new("species", format!("{e}")))
    }

    /// Checks everything that does not need the potential to be built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.species()?;
        positive("field.gradient_t_per_m", self.field.gradient_t_per_m)?;
        let c = &self.comb;
        if c.omegas_rad_s.len() != 6 {
            return Err(ConfigError::new(
                "comb.omegas_rad_s",
                format!("need six frequencies, got {}", c.omegas_rad_s.len()),
            ));
        }
        for (i, w) in c.omegas_rad_s.iter().enumerate() {
            positive(&format!("comb.omegas_rad_s[{i}]"), *w)?;
        }
        if let Some(i) = c.omegas_rad_s.windows(2).position(|w| w[1] <= w[0]) {
            return Err(ConfigError::new(
                format!("comb.omegas_rad_s[{}]", i + 1),
                "frequencies must increase",
            ));
        }
        positive("comb.rabi_rad_s", c.rabi_rad_s)?;
        let s = &self.schedule;
        positive("schedule.total_s", s.total_s)?;
        if !(s.tau_s > 0.0 && s.tau_s < s.total_s) {
            return Err(ConfigError::new("schedule.tau_s", "must lie in (0, total_s)"));
        }
        positive("schedule.min_gap_rad_s", s.min_gap_rad_s)?;
        if s.min_gap_rad_s <= 2.0 * c.rabi_rad_s {
            return Err(ConfigError::new(
                "schedule.min_gap_rad_s",
                "must exceed twice the Rabi frequency",
            ));
        }
        if let Some(d) = &s.detuning {
            positive("schedule.detuning.kappa_per_s", d.kappa_per_s)?;
            finite("schedule.detuning.delta_omega0_rad_s", d.delta_omega0_rad_s)?;
        }
        finite("interaction.g1d_j_m", self.interaction.g1d_j_m)?;
        if self.interaction.g1d_j_m < 0.0 {
            return Err(ConfigError::new("interaction.g1d_j_m", "must not be negative"));
        }
        let g = &self.grid;
        finite("grid.x_min_m", g.x_min_m)?;
        finite("grid.x_max_m", g.x_max_m)?;
        if g.x_max_m <= g.x_min_m {
            return Err(ConfigError::new("grid.x_max_m", "must exceed x_min_m"));
        }
        if !g.points.is_power_of_two() || g.points < 256 {
            return Err(ConfigError::new("grid.points", "must be a power of two >= 256"));
        }
        positive("solver.dt_s", self.solver.dt_s)?;
        positive("solver.ground_state_tolerance", self.solver.ground_state_tolerance)?;
        positive("solver.edge_tolerance", self.solver.edge_tolerance)?;
        if self.solver.initial_well > 2 {
            return Err(ConfigError::new("solver.initial_well", "must be 0, 1 or 2"));
        }
        if self.output.samples < 2 {
            return Err(ConfigError::new("output.samples", "need at least 2"));
        }
        for (i, t) in self.output.snapshot_times_s.iter().enumerate() {
            if !(0.0..=s.total_s).contains(t) {
                return Err(ConfigError::new(
                    format!("output.snapshot_times_s[{i}]"),
                    "must lie in [0, total_s]",
                ));
            }
        }
        if !(0.0..=s.total_s).contains(&self.output.potential_time_s) {
            return Err(ConfigError::new("output.potential_time_s", "must lie in [0, total_s]"));
        }
        if let Some(sw) = &self.sweep {
            sw.variable()?;
            if sw.values.is_empty() {
                return Err(ConfigError::new("sweep.values", "must not be empty"));
            }
            for (i, v) in sw.values.iter().enumerate() {
                finite(&format!("sweep.values[{i}]"), *v)?;
            }
            if sw.values.windows(2).any(|w| w[1] < w[0]) {
                return Err(ConfigError::new("sweep.values", "must be sorted"));
            }
        }
        if let Some(t) = &self.three_level {
            positive("three_level.peak_coupling_rad_s", t.peak_coupling_rad_s)?;
            positive("three_level.total_s", t.total_s)?;
            positive("three_level.width_s", t.width_s)?;
            positive("three_level.dt_s", t.dt_s)?;
            if !(t.delay_s >= 0.0 && t.delay_s + t.width_s <= t.total_s) {
                return Err(ConfigError::new(
                    "three_level.delay_s",
                    "delay + width must fit in total_s",
                ));
            }
            if t.samples < 2 {
                return Err(ConfigError::new("three_level.samples", "need at least 2"));
            }
            for (i, e) in t.on_site_rad_s.iter().enumerate() {
                finite(&format!("three_level.on_site_rad_s[{i}]"), *e)?;
            }
            for (i, e) in t.mu_rad_s.iter().enumerate() {
                finite(&format!("three_level.mu_rad_s[{i}]"), *e)?;
            }
            if let Some(u) = &t.self_consistent_rad_s {
                for (i, e) in u.iter().enumerate() {
                    finite(&format!("three_level.self_consistent_rad_s[{i}]"), *e)?;
                }
            }
        }
        Ok(())
    }
}

fn finite(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(path, format!("{v} is not finite")))
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    finite(path, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(path, format!("{v} must be positive")))
    }
}

/// Applies `a.b.c=value`; `value` is parsed as JSON and falls back to a
/// plain string. Array elements are addressed by index (`comb.omegas_rad_s.2`).
pub fn apply_override(root: &mut Value, spec: &str) -> Result<(), ConfigError> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| ConfigError::new(spec, "override must look like key.path=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::new(spec, "empty override key"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        let here = parts[..=i].join(".");
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert((*part).to_string(), value);
                    return Ok(());
                }
                map.entry((*part).to_string())
                    .or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| ConfigError::new(&here, "expected an array index"))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| ConfigError::new(&here, format!("index out of range (length {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(ConfigError::new(&here, "cannot descend into a scalar")),
        };
    }
    Ok(())
}
