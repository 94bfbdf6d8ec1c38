//! Transfer metrics, sensitivity probes, parameter sweeps and the
//! Landau-Zener diagnostic.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::evolution::RunRecord;
use crate::schedule::CtapSchedule;
use crate::{Error, Result};

/// Final population of the right trap.
pub fn transfer_fidelity(record: &RunRecord) -> f64 {
    record.final_populations()[2]
}

/// Largest change of the final `P_R` when the duration is scaled by
/// `1 - delta` and `1 + delta`.
///
/// `run` maps a duration scale factor to the final `P_R`.
pub fn sensitivity_probe<F>(mut run: F, delta: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(0.0..=0.2).contains(&delta) {
        return Err(Error::Domain {
            what: "sensitivity perturbation",
            value: delta,
        });
    }
    let base = run(1.0)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    let minus = run(1.0 - delta)?;
    let plus = run(1.0 + delta)?;
    Ok((minus - base).abs().max((plus - base).abs()))
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    G1d,
    Kappa,
    TotalTime,
    DeltaOmega0,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::G1d => "g_1d",
            SweepVariable::Kappa => "kappa",
            SweepVariable::TotalTime => "T",
            SweepVariable::DeltaOmega0 => "delta_omega0",
        }
    }
}

impl core::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g_1d" | "g1d" => Ok(SweepVariable::G1d),
            "kappa" => Ok(SweepVariable::Kappa),
            "T" | "total_time" => Ok(SweepVariable::TotalTime),
            "delta_omega0" => Ok(SweepVariable::DeltaOmega0),
            _ => Err(Error::InvalidSweep(alloc::format!("unknown sweep variable '{s}'"))),
        }
    }
}

/// Values of one variable to run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSweep("no sweep values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSweep("sweep values must be finite".into()));
        }
        if values.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidSweep("sweep values must be sorted".into()));
        }
        Ok(SweepSpec { variable, values })
    }

    /// `n` evenly spaced values from `lo` to `hi` inclusive.
    pub fn linear(variable: SweepVariable, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let values = match n {
            0 => Vec::new(),
            1 => alloc::vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        };
        Self::new(variable, values)
    }
}

/// Outcome of a single sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Final `(P_L, P_M, P_R)`, or the error message of a failed run.
    pub outcome: core::result::Result<[f64; 3], String>,
}

impl SweepRow {
    /// `1 - P_R`
    pub fn loss(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|p| 1.0 - p[2])
    }
}

/// Rows ordered by value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Row with the largest `P_R`.
    pub fn best(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.outcome.is_ok())
            .max_by(|a, b| {
                let pa = a.outcome.as_ref().map(|p| p[2]).unwrap_or(f64::NEG_INFINITY);
                let pb = b.outcome.as_ref().map(|p| p[2]).unwrap_or(f64::NEG_INFINITY);
                pa.total_cmp(&pb)
            })
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// Whether the losses of the successful rows never decrease by more than
    /// `band` from their running maximum.
    pub fn loss_non_decreasing_within(&self, band: f64) -> bool {
        let mut running = f64::NEG_INFINITY;
        for loss in self.rows.iter().filter_map(SweepRow::loss) {
            if loss < running - band {
                return false;
            }
            running = running.max(loss);
        }
        true
    }
}

/// Runs `run` for each value in order; failures are recorded per row.
pub fn run_sweep<F>(spec: &SweepSpec, mut run: F) -> SweepResult
where
    F: FnMut(f64) -> Result<[f64; 3]>,
{
    let rows = spec
        .values
        .iter()
        .map(|&value| SweepRow {
            value,
            outcome: run(value).map_err(|e| alloc::format!("{e}")),
        })
        .collect();
    SweepResult {
        variable: spec.variable,
        rows,
    }
}

/// Adiabaticity figure for one comb frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityEntry {
    /// 0-based comb index.
    pub index: usize,
    /// Smallest `Omega^2 / |d omega_n / dt|`; infinite for a static line.
    pub ratio: f64,
    /// Time of the smallest ratio.
    pub time: f64,
    pub flagged: bool,
}

/// Ratios below this are flagged.
pub const LANDAU_ZENER_THRESHOLD: f64 = 10.0;

/// `Omega^2 / |d omega_n / dt|` minimised over `samples` uniform times for
/// each comb frequency (units of `schedule` and `rabi` must agree).
pub fn landau_zener_diagnostic(schedule: &CtapSchedule, rabi: f64, samples: usize) -> Vec<AdiabaticityEntry> {
    let samples = samples.max(2);
    let total = schedule.total();
    let mut entries: Vec<AdiabaticityEntry> = (0..6)
        .map(|index| AdiabaticityEntry {
            index,
            ratio: f64::INFINITY,
            time: 0.0,
            flagged: false,
        })
        .collect();
    for i in 0..samples {
        let t = total * i as f64 / (samples - 1) as f64;
        for (e, rate) in entries.iter_mut().zip(schedule.rates_at(t)) {
            if rate != 0.0 {
                let ratio = rabi * rabi / rate.abs();
                if ratio < e.ratio {
                    e.ratio = ratio;
                    e.time = t;
                }
            }
        }
    }
    for e in entries.iter_mut() {
        e.flagged = e.ratio < LANDAU_ZENER_THRESHOLD;
    }
    entries
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::RunMetadata;
    use crate::grid::{Grid1D, Wavefunction};
    use crate::schedule::TransportMode;
    use core::f64::consts::PI;
    use std::vec;

    fn record(pops: Vec<[f64; 3]>) -> RunRecord {
        let grid = Grid1D::new(0.0, 1.0, 256).unwrap();
        let psi = Wavefunction::gaussian(grid, 0.5, 0.1, 0.0);
        RunRecord {
            times: (0..pops.len()).map(|i| i as f64).collect(),
            norms: vec![1.0; pops.len()],
            chemical_potentials: vec![0.0; pops.len()],
            populations: pops,
            snapshots: vec![],
            final_state: psi,
            fallback_samples: vec![],
            metadata: RunMetadata {
                method: String::new(),
                dt: 1.0,
                steps: 1,
                n_points: 256,
                x_min: 0.0,
                x_max: 1.0,
                kinetic: 0.5,
                g: 0.0,
                max_phase: 0.0,
            },
        }
    }

    #[test]
    fn fidelity_of_simple_records() {
        assert_eq!(transfer_fidelity(&record(vec![[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])), 1.0);
        assert_eq!(transfer_fidelity(&record(vec![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])), 0.0);
    }

    #[test]
    fn sensitivity() {
        assert_eq!(sensitivity_probe(|s| Ok(s * s), 0.0).unwrap(), 0.0);
        let d = sensitivity_probe(|s| Ok(s * s), 0.1).unwrap();
        assert!((d - 0.21).abs() < 1e-12);
        assert!(sensitivity_probe(|s| Ok(s), 0.3).is_err());
        assert!(sensitivity_probe(|_| Err(Error::UndefinedAngle), 0.1).is_err());
    }

    #[test]
    fn sweep_keeps_order_and_failures() {
        let spec = SweepSpec::new(SweepVariable::Kappa, vec![1.0, 2.0, 3.0]).unwrap();
        let r = run_sweep(&spec, |v| {
            if v == 2.0 {
                Err(Error::UndefinedAngle)
            } else {
                Ok([0.0, 0.0, v / 3.0])
            }
        });
        assert_eq!(r.rows.iter().map(|r| r.value).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0]);
        assert_eq!(r.failures(), 1);
        assert_eq!(r.best().unwrap().value, 3.0);
        assert!(SweepSpec::new(SweepVariable::Kappa, vec![]).is_err());
        assert!(SweepSpec::new(SweepVariable::Kappa, vec![2.0, 1.0]).is_err());
        assert!(SweepSpec::new(SweepVariable::Kappa, vec![f64::NAN]).is_err());
        assert_eq!(SweepSpec::linear(SweepVariable::G1d, 0.0, 1.0, 3).unwrap().values, vec![0.0, 0.5, 1.0]);
        assert_eq!("kappa".parse::<SweepVariable>().unwrap(), SweepVariable::Kappa);
        assert!("x".parse::<SweepVariable>().is_err());
    }

    #[test]
    fn single_value_sweep_equals_run() {
        let spec = SweepSpec::new(SweepVariable::G1d, vec![0.5]).unwrap();
        let r = run_sweep(&spec, |v| Ok([v, 0.0, 1.0 - v]));
        assert_eq!(r.rows[0].outcome, Ok([0.5, 0.0, 0.5]));
    }

    #[test]
    fn monotone_band() {
        let mk = |losses: &[f64]| SweepResult {
            variable: SweepVariable::G1d,
            rows: losses
                .iter()
                .enumerate()
                .map(|(i, l)| SweepRow {
                    value: i as f64,
                    outcome: Ok([0.0, 0.0, 1.0 - l]),
                })
                .collect(),
        };
        assert!(mk(&[0.0, 0.1, 0.09, 0.2]).loss_non_decreasing_within(0.02));
        assert!(!mk(&[0.0, 0.1, 0.05, 0.2]).loss_non_decreasing_within(0.02));
    }

    fn published_schedule(total: f64) -> CtapSchedule {
        let w = |n: f64| 2.0 * PI * n * 1e7;
        let initial = [2.0 * PI * 1e6, w(2.0), w(3.0), w(4.0), w(5.0), w(6.0)];
        CtapSchedule::from_closest_approach(
            initial,
            0.05 * total,
            total,
            TransportMode::CounterIntuitive,
            2.0 * PI * 2e5,
            None,
        )
        .unwrap()
    }

    #[test]
    fn landau_zener_ratios() {
        let rabi = 2.0 * PI * 5e4;
        let published = landau_zener_diagnostic(&published_schedule(0.11), rabi, 2001);
        // w1 and w2 never move
        assert!(published[0].ratio.is_infinite() && published[1].ratio.is_infinite());
        assert!(published.iter().all(|e| !e.flagged), "{published:?}");
        let fast = landau_zener_diagnostic(&published_schedule(0.0011), rabi, 2001);
        assert!(fast.iter().any(|e| e.flagged));
        // the figure scales with the duration
        assert!((fast[5].ratio * 100.0 - published[5].ratio).abs() < 1e-3 * published[5].ratio);
    }
}
