//! Ground states and time evolution on a periodic grid.
//!
//! Real-time propagation uses Strang split-step Fourier stepping: half a
//! kinetic step in momentum space, the potential (plus the mean-field term
//! `g |psi|^2`) evaluated at the step midpoint in position space, and
//! another half kinetic step. Adjacent half kinetic steps are fused between
//! samples. Ground states come from the same splitting in imaginary time with
//! renormalisation after every step.
//!
//! All quantities are dimensionless with `hbar = 1`; the kinetic energy is
//! `c k^2` with `c = 1 / 2m`.

mod split_step;

pub use split_step::SplitStep;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{Grid1D, Wavefunction};
use crate::rf::{trap_geometry, Branch, DressedPotential, GeometryOptions, PotentialSnapshot, TrapGeometry};
use crate::schedule::CtapSchedule;
use crate::units::{AtomSpecies, HBAR};
use crate::{Error, Result};

/// Transverse confinement constant `C = |zeta(1/2)| / sqrt(2)`.
pub const CONFINEMENT_CONSTANT: f64 = 1.4603;

/// Largest kinetic phase per step at the grid cutoff, `dt c (pi / dx)^2`.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Microscopic parameters of the one-dimensional interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionParams {
    pub n_atoms: f64,
    /// s-wave scattering length (m)
    pub a_s: f64,
    /// transverse oscillator length (m)
    pub a_perp: f64,
}

impl InteractionParams {
    /// Effective coupling in J m.
    pub fn g1d(&self, species: &AtomSpecies) -> Result<f64> {
        g1d_from_atoms(species, self.n_atoms, self.a_s, self.a_perp)
    }
}

/// `g_1D = 4 N hbar^2 a_s / (m a_perp (a_perp - C a_s))` in J m.
pub fn g1d_from_atoms(species: &AtomSpecies, n_atoms: f64, a_s: f64, a_perp: f64) -> Result<f64> {
    if !(n_atoms >= 0.0) || !n_atoms.is_finite() {
        return Err(Error::Domain {
            what: "atom number",
            value: n_atoms,
        });
    }
    if !(a_perp > 0.0) || !a_s.is_finite() {
        return Err(Error::Domain {
            what: "transverse length",
            value: a_perp,
        });
    }
    let denominator = a_perp - CONFINEMENT_CONSTANT * a_s;
    if !(denominator > 0.0) {
        return Err(Error::ConfinementResonance {
            a_perp,
            c_a_s: CONFINEMENT_CONSTANT * a_s,
        });
    }
    Ok(4.0 * n_atoms * HBAR * HBAR * a_s / (species.mass * a_perp * denominator))
}

/// Source of the (possibly time-dependent) potential on the grid.
pub trait PotentialFactory {
    /// Writes `V(t)` at `positions` into `out`.
    fn fill(&mut self, t: f64, positions: &[f64], out: &mut [f64]) -> Result<()>;
}

impl<F> PotentialFactory for F
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn fill(&mut self, t: f64, positions: &[f64], out: &mut [f64]) -> Result<()> {
        self(t, positions, out)
    }
}

/// Time-independent potential sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticPotential(pub Vec<f64>);

impl PotentialFactory for StaticPotential {
    fn fill(&mut self, _t: f64, positions: &[f64], out: &mut [f64]) -> Result<()> {
        if positions.len() != self.0.len() {
            return Err(Error::InvalidGrid("static potential does not match the grid".into()));
        }
        out.copy_from_slice(&self.0);
        Ok(())
    }
}

/// Dressed potential driven by a (dimensionless) schedule.
#[derive(Debug, Clone)]
pub struct CombPotential {
    potential: DressedPotential,
    schedule: CtapSchedule,
    branch: Branch,
}

impl CombPotential {
    /// `potential` supplies slope and Rabi frequency; its comb is replaced
    /// by the schedule's frequencies at every evaluation.
    pub fn new(potential: DressedPotential, schedule: CtapSchedule, branch: Branch) -> Self {
        CombPotential {
            potential,
            schedule,
            branch,
        }
    }

    pub fn schedule(&self) -> &CtapSchedule {
        &self.schedule
    }

    pub fn potential(&self) -> &DressedPotential {
        &self.potential
    }

    /// Dressed potential with the comb of time `t` installed.
    pub fn at(&self, t: f64) -> Result<DressedPotential> {
        let mut p = self.potential.clone();
        p.set_frequencies(&self.schedule.frequencies_at(t.clamp(0.0, self.schedule.total()))?)?;
        Ok(p)
    }
}

impl PotentialFactory for CombPotential {
    fn fill(&mut self, t: f64, positions: &[f64], out: &mut [f64]) -> Result<()> {
        let w = self.schedule.frequencies_at(t.clamp(0.0, self.schedule.total()))?;
        self.potential.set_frequencies(&w)?;
        self.potential.fill(positions, self.branch, out)?;
        if let (Some(lo), Some(hi)) = (positions.first(), positions.last()) {
            for (boundary, position, jump, tolerance) in self.potential.stitching_jumps(*lo, *hi)? {
                if jump > tolerance {
                    return Err(Error::Stitching {
                        boundary,
                        position,
                        jump,
                        tolerance,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Options for [`ground_state_imaginary_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    /// Initial imaginary time step; halved whenever progress stalls.
    pub dtau: f64,
    /// Target for `||(H - mu) psi||`.
    pub tolerance: f64,
    /// Cap on the total number of imaginary time steps.
    pub max_steps: usize,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            dtau: 1e-2,
            tolerance: 1e-7,
            max_steps: 400_000,
        }
    }
}

/// Converged stationary state.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub psi: Wavefunction,
    /// `<psi| -c d^2/dx^2 + V + g |psi|^2 |psi>`
    pub mu: f64,
    pub residual: f64,
    pub steps: usize,
}

/// Lowest stationary state of `-c d^2/dx^2 + V + g |psi|^2` by imaginary
/// time evolution from `guess`.
pub fn ground_state_imaginary_time(
    guess: &Wavefunction,
    potential: &[f64],
    kinetic: f64,
    g: f64,
    options: &GroundStateOptions,
) -> Result<GroundState> {
    let grid = guess.grid;
    if potential.len() != grid.len() {
        return Err(Error::InvalidGrid("potential does not match the grid".into()));
    }
    if potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    if !(options.tolerance > 0.0) || !(options.dtau > 0.0) {
        return Err(Error::Domain {
            what: "imaginary time options",
            value: options.tolerance.min(options.dtau),
        });
    }
    let mut stepper = SplitStep::new(grid, kinetic)?;
    let mut psi = guess.clone();
    psi.normalize();
    let mut dtau = options.dtau;
    let min_dtau = options.dtau * 1e-4;
    let mut steps = 0;
    let (mut mu, mut residual) = stepper.residual(&psi.amplitudes, potential, g);
    loop {
        if residual <= options.tolerance {
            return Ok(GroundState {
                psi,
                mu,
                residual,
                steps,
            });
        }
        if steps >= options.max_steps {
            return Err(Error::Convergence {
                iterations: steps,
                residual,
                tolerance: options.tolerance,
            });
        }
        // check every half unit of imaginary time
        let chunk = ((0.5 / dtau).ceil() as usize).max(10);
        let chunk = chunk.min(options.max_steps - steps);
        stepper.imaginary_steps(&mut psi, potential, g, dtau, chunk);
        steps += chunk;
        let previous = residual;
        (mu, residual) = stepper.residual(&psi.amplitudes, potential, g);
        if !residual.is_finite() {
            return Err(Error::NonFinite { step: steps });
        }
        // the splitting leaves a bias of order dtau^2; refine when stalled
        if residual > 0.9 * previous && dtau > min_dtau {
            dtau *= 0.5;
        }
    }
}

/// Guess for a trap at `x0` with local harmonic frequency `omega`.
pub fn harmonic_guess(grid: Grid1D, x0: f64, omega: f64, mass: f64) -> Wavefunction {
    Wavefunction::gaussian(grid, x0, (0.5 / (mass * omega)).sqrt(), 0.0)
}

/// Potential of well `k` alone: `V` between the neighbouring barrier maxima,
/// continued as `V(b) + m omega^2 (x - b)^2 / 2` beyond them.
pub fn isolated_well(potential: &[f64], positions: &[f64], geometry: &TrapGeometry, k: usize, mass: f64) -> Vec<f64> {
    let lo = if k == 0 { f64::NEG_INFINITY } else { geometry.barrier_positions[k - 1] };
    let hi = geometry
        .barrier_positions
        .get(k)
        .copied()
        .unwrap_or(f64::INFINITY);
    let omega = geometry.curvatures[k];
    let stiffness = 0.5 * mass * omega * omega;
    let first = positions.iter().position(|x| *x >= lo).unwrap_or(0);
    let last = positions.iter().rposition(|x| *x <= hi).unwrap_or(positions.len() - 1);
    let (v_lo, x_lo) = (potential[first], positions[first]);
    let (v_hi, x_hi) = (potential[last], positions[last]);
    positions
        .iter()
        .zip(potential)
        .map(|(x, v)| {
            if *x < x_lo {
                v_lo + stiffness * (x - x_lo) * (x - x_lo)
            } else if *x > x_hi {
                v_hi + stiffness * (x - x_hi) * (x - x_hi)
            } else {
                *v
            }
        })
        .collect()
}

/// Geometry of a grid potential.
pub fn grid_geometry(grid: &Grid1D, potential: &[f64], mass: f64, expected_minima: usize) -> Result<TrapGeometry> {
    let snapshot = PotentialSnapshot {
        positions: grid.positions(),
        values: potential.to_vec(),
        branch: Branch::Upper,
    };
    trap_geometry(
        &snapshot,
        mass,
        &GeometryOptions {
            expected_minima,
            min_prominence: None,
        },
    )
}

/// Ground state of trap `well` of `factory`'s potential at `t`, computed
/// with the other traps masked off.
pub fn isolated_ground_state(
    factory: &mut dyn PotentialFactory,
    t: f64,
    grid: Grid1D,
    kinetic: f64,
    g: f64,
    well: usize,
    options: &GroundStateOptions,
) -> Result<GroundState> {
    let positions = grid.positions();
    let mut v = vec![0.0; grid.len()];
    factory.fill(t, &positions, &mut v)?;
    let mass = 0.5 / kinetic;
    let geometry = grid_geometry(&grid, &v, mass, well + 1)?;
    let masked = isolated_well(&v, &positions, &geometry, well, mass);
    let guess = harmonic_guess(grid, geometry.minima_positions[well], geometry.curvatures[well], mass);
    ground_state_imaginary_time(&guess, &masked, kinetic, g, options)
}

/// Probabilities `(P_L, P_M, P_R)` in the regions separated by the two
/// barrier maxima of a three-well geometry.
pub fn trap_populations(psi: &Wavefunction, geometry: &TrapGeometry) -> Result<[f64; 3]> {
    if geometry.len() != 3 {
        return Err(Error::Geometry {
            found: geometry.len(),
            requested: 3,
        });
    }
    Ok(populations_between(psi, geometry.barrier_positions[0], geometry.barrier_positions[1]))
}

fn populations_between(psi: &Wavefunction, b0: f64, b1: f64) -> [f64; 3] {
    let dx = psi.grid.spacing();
    let mut p = [0.0; 3];
    for (i, z) in psi.amplitudes.iter().enumerate() {
        let x = psi.grid.position(i);
        let region = if x < b0 {
            0
        } else if x < b1 {
            1
        } else {
            2
        };
        p[region] += z.norm_sqr();
    }
    p.map(|v| v * dx)
}

/// Options for [`propagate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationOptions {
    /// Requested time step; reduced so that it divides the duration.
    pub dt: f64,
    /// Number of uniformly spaced records including both endpoints.
    pub samples: usize,
    /// Times at which the full wavefunction is stored.
    pub snapshot_times: Vec<f64>,
    /// Mean-field coupling `g` (0 for the linear equation).
    pub g: f64,
    /// Largest admissible density at the outermost grid points.
    pub edge_tolerance: f64,
    /// Outermost points checked on each side.
    pub edge_width: usize,
    /// Admissible final norm drift; `None` picks 1e-9 (linear) or 1e-6.
    pub norm_limit: Option<f64>,
    /// Fixed region boundaries for the populations; `None` tracks the
    /// barrier maxima of the instantaneous potential.
    pub region_boundaries: Option<(f64, f64)>,
}

impl PropagationOptions {
    /// Defaults: 500 samples, snapshots at `0`, `T/2` and `T`.
    pub fn new(dt: f64, total: f64) -> Self {
        PropagationOptions {
            dt,
            samples: 500,
            snapshot_times: vec![0.0, 0.5 * total, total],
            g: 0.0,
            edge_tolerance: 1e-12,
            edge_width: 4,
            norm_limit: None,
            region_boundaries: None,
        }
    }
}

/// Numerical settings of a run, kept for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub method: String,
    pub dt: f64,
    pub steps: usize,
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub kinetic: f64,
    pub g: f64,
    pub max_phase: f64,
}

/// Time series of a propagation (dimensionless units).
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub times: Vec<f64>,
    /// `(P_L, P_M, P_R)` per sample
    pub populations: Vec<[f64; 3]>,
    pub norms: Vec<f64>,
    /// `<psi| -c d^2/dx^2 + V + g |psi|^2 |psi> / <psi|psi>`
    pub chemical_potentials: Vec<f64>,
    pub snapshots: Vec<(f64, Wavefunction)>,
    pub final_state: Wavefunction,
    /// Samples whose populations used the last valid region boundaries.
    pub fallback_samples: Vec<usize>,
    pub metadata: RunMetadata,
}

impl RunRecord {
    pub fn final_populations(&self) -> [f64; 3] {
        *self.populations.last().expect("records always hold the initial sample")
    }

    /// Largest middle-trap population over all samples.
    pub fn max_middle(&self) -> f64 {
        self.populations.iter().map(|p| p[1]).fold(0.0, f64::max)
    }
}

/// Propagates `psi0` from `t = 0` to `total` under `factory`.
pub fn propagate(
    psi0: &Wavefunction,
    factory: &mut dyn PotentialFactory,
    kinetic: f64,
    total: f64,
    options: &PropagationOptions,
) -> Result<RunRecord> {
    let grid = psi0.grid;
    if !(total > 0.0) || !(options.dt > 0.0) {
        return Err(Error::Domain {
            what: "propagation time step",
            value: options.dt,
        });
    }
    let steps = (total / options.dt).ceil().max(1.0) as usize;
    let dt = total / steps as f64;
    let k_max = core::f64::consts::PI / grid.spacing();
    let phase = dt * kinetic * k_max * k_max;
    if phase >= STABILITY_LIMIT {
        return Err(Error::Stability {
            dt,
            phase,
            limit: STABILITY_LIMIT,
        });
    }
    let norm_limit = options
        .norm_limit
        .unwrap_or(if options.g == 0.0 { 1e-9 } else { 1e-6 });
    let samples = options.samples.clamp(2, steps + 1);
    let sample_steps: Vec<usize> = (0..samples).map(|j| j * steps / (samples - 1)).collect();
    let mut snapshot_steps: Vec<usize> = options
        .snapshot_times
        .iter()
        .map(|t| ((t / dt).round().max(0.0) as usize).min(steps))
        .collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();

    let positions = grid.positions();
    let mass = 0.5 / kinetic;
    let mut stepper = SplitStep::new(grid, kinetic)?;
    let mut psi = psi0.clone();
    let mut v = vec![0.0; grid.len()];
    let norm0 = psi.norm();

    let mut record = RunRecord {
        times: Vec::with_capacity(samples),
        populations: Vec::with_capacity(samples),
        norms: Vec::with_capacity(samples),
        chemical_potentials: Vec::with_capacity(samples),
        snapshots: Vec::new(),
        final_state: psi0.clone(),
        fallback_samples: Vec::new(),
        metadata: RunMetadata {
            method: "Strang split-step Fourier, potential at step midpoint".into(),
            dt,
            steps,
            n_points: grid.len(),
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            kinetic,
            g: options.g,
            max_phase: phase,
        },
    };
    let mut boundaries: Option<(f64, f64)> = None;
    let mut next_sample = 0;
    let mut next_snapshot = 0;
    let mut step = 0;
    // true while psi holds a state after a half kinetic step
    let mut pending_half = false;
    loop {
        if sample_steps[next_sample] == step || snapshot_steps.get(next_snapshot) == Some(&step) {
            if pending_half {
                stepper.kinetic(&mut psi.amplitudes, dt, 0.5);
                pending_half = false;
            }
            let t = step as f64 * dt;
            if snapshot_steps.get(next_snapshot) == Some(&step) {
                record.snapshots.push((t, psi.clone()));
                next_snapshot += 1;
            }
            if sample_steps[next_sample] == step {
                let norm = psi.norm();
                if !norm.is_finite() {
                    return Err(Error::NonFinite { step });
                }
                let edge = psi.edge_density(options.edge_width);
                if edge > options.edge_tolerance {
                    return Err(Error::BoundaryLeak {
                        step,
                        density: edge,
                        tolerance: options.edge_tolerance,
                    });
                }
                factory.fill(t, &positions, &mut v)?;
                let tracked = match options.region_boundaries {
                    Some(b) => Ok(b),
                    None => grid_geometry(&grid, &v, mass, 3).and_then(|geo| {
                        if geo.len() == 3 {
                            Ok((geo.barrier_positions[0], geo.barrier_positions[1]))
                        } else {
                            Err(Error::Geometry {
                                found: geo.len(),
                                requested: 3,
                            })
                        }
                    }),
                };
                let b = match (tracked, boundaries) {
                    (Ok(b), _) => b,
                    (Err(_), Some(last)) => {
                        record.fallback_samples.push(record.times.len());
                        last
                    }
                    (Err(e), None) => return Err(e),
                };
                boundaries = Some(b);
                let pops = populations_between(&psi, b.0, b.1);
                let (mu, _) = stepper.energy(&psi.amplitudes, &v, options.g);
                record.times.push(t);
                record.populations.push(pops);
                record.norms.push(norm);
                record.chemical_potentials.push(mu / norm);
                next_sample += 1;
                if next_sample == samples {
                    break;
                }
            }
        }
        if step == steps {
            break;
        }
        // one Strang step, fusing the leading half with a pending one
        if pending_half {
            stepper.kinetic(&mut psi.amplitudes, dt, 1.0);
        } else {
            stepper.kinetic(&mut psi.amplitudes, dt, 0.5);
        }
        factory.fill((step as f64 + 0.5) * dt, &positions, &mut v)?;
        stepper.potential(&mut psi.amplitudes, &v, options.g, dt);
        pending_half = true;
        step += 1;
    }
    let drift = (psi.norm() - norm0).abs();
    if drift > norm_limit {
        return Err(Error::NormDrift {
            drift,
            limit: norm_limit,
        });
    }
    record.final_state = psi;
    Ok(record)
}
