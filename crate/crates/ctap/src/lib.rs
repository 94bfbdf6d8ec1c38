//! Configuration files, CSV output and the command-line runner for
//! `ctap-core`.

pub mod config;
pub mod experiment;
pub mod output;

use rayon::prelude::*;

use ctap_core::analysis::{SweepResult, SweepRow, SweepSpec};

pub use config::{ConfigError, ExperimentConfig};
pub use experiment::Experiment;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("solver: {0}")]
    Solver(#[from] ctap_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    /// Process exit code: 2 for configuration errors, 3 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) => 2,
            AppError::Solver(_) | AppError::Io(_) => 3,
        }
    }
}

/// Final populations of one full run.
pub fn run_final(config: &ExperimentConfig) -> Result<[f64; 3], AppError> {
    Ok(Experiment::new(config.clone())?.run_ctap()?.final_populations())
}

/// Runs every sweep value in parallel; rows keep the order of `spec`.
pub fn run_sweep(config: &ExperimentConfig, spec: &SweepSpec) -> SweepResult {
    let rows = spec
        .values
        .par_iter()
        .map(|&value| SweepRow {
            value,
            outcome: Experiment::config_with(config, spec.variable, value)
                .and_then(|c| run_final(&c))
                .map_err(|e| e.to_string()),
        })
        .collect();
    SweepResult {
        variable: spec.variable,
        rows,
    }
}

/// Largest change of the final `P_R` when `T` is scaled by `1 ± delta`.
pub fn sensitivity(config: &ExperimentConfig, delta: f64) -> Result<f64, AppError> {
    let mut err = None;
    let probe = ctap_core::analysis::sensitivity_probe(
        |factor| {
            let run = Experiment::config_with(
                config,
                ctap_core::analysis::SweepVariable::TotalTime,
                config.schedule.total_s * factor,
            )
            .and_then(|c| run_final(&c));
            match run {
                Ok(p) => Ok(p[2]),
                Err(AppError::Solver(e)) => Err(e),
                Err(e) => {
                    let msg = e.to_string();
                    err = Some(e);
                    Err(ctap_core::Error::InvalidSchedule(msg))
                }
            }
        },
        delta,
    );
    match (probe, err) {
        (Ok(v), _) => Ok(v),
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(e.into()),
    }
}

/// Whether a population trace swings back by more than `swing` after a
/// local maximum, or the middle trap takes up more than `swing`.
pub fn is_oscillatory(populations: &[[f64; 3]], swing: f64) -> bool {
    if populations.iter().any(|p| p[1] > swing) {
        return true;
    }
    let mut peak = f64::NEG_INFINITY;
    for p in populations {
        peak = peak.max(p[2]);
        if peak - p[2] > swing {
            return true;
        }
    }
    false
}
