use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid rf comb: {0}")]
    InvalidComb(String),

    #[error("off-resonant denominator {denominator:e} for frequency {index} at x = {position} is below the floor {floor:e} (comb too dense)")]
    Singularity {
        index: usize,
        position: f64,
        denominator: f64,
        floor: f64,
    },

    #[error("potential jumps by {jump:e} at the window boundary between frequencies {boundary} and {} (x = {position}), tolerance {tolerance:e}", boundary + 1)]
    Stitching {
        boundary: usize,
        position: f64,
        jump: f64,
        tolerance: f64,
    },

    #[error("found {found} trap minima, {requested} requested")]
    Geometry { found: usize, requested: usize },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("radio frequencies {index} and {} cross at t = {time}", index + 1)]
    CombCrossing { time: f64, index: usize },

    #[error("a_perp = {a_perp:e} does not exceed C*a_s = {c_a_s:e} (confinement-induced resonance)")]
    ConfinementResonance { a_perp: f64, c_a_s: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("ground state did not converge after {iterations} iterations (residual {residual:e}, tolerance {tolerance:e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("time step {dt:e} violates the stability rule (phase {phase:.3} rad per step, limit {limit})")]
    Stability { dt: f64, phase: f64, limit: f64 },

    #[error("non-finite amplitude after step {step}")]
    NonFinite { step: usize },

    #[error("density {density:e} at the domain edge exceeds {tolerance:e} at step {step}")]
    BoundaryLeak {
        step: usize,
        density: f64,
        tolerance: f64,
    },

    #[error("norm drifted by {drift:e} (limit {limit:e})")]
    NormDrift { drift: f64, limit: f64 },

    #[error("mixing angle undefined: both couplings vanish")]
    UndefinedAngle,

    #[error("tunnelling extraction failed: {0}")]
    Extraction(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
