//! Multi-frequency rf-dressed adiabatic potentials in a linear magnetic
//! field gradient.
//!
//! Each comb frequency `omega_n` is resonant at the position where the Zeeman
//! splitting `mu_B |g_F| b x` equals `hbar omega_n`. Locally only the nearest
//! resonance is treated exactly; the others contribute a summed Stark shift
//! `L_n(x)`. The adiabatic potential is stitched across the resonance windows
//! with alternating signs and the cumulative offsets of the lower
//! frequencies, which produces alternating maxima (odd frequencies, counting
//! from 1) and minima (even frequencies) on the [`Branch::Upper`] branch.
//!
//! Sign convention: the resonance condition uses `|g_F|`, so traps sit at
//! positive `x` regardless of the sign of `g_F`. [`Branch::Lower`] is the exact
//! negative of [`Branch::Upper`].
//!
//! Window boundaries sit halfway (in detuning) between adjacent resonances.
//! The stitching is continuous only to leading order in `Omega / spacing`;
//! the exact two-level remainder at a boundary with half-spacing `D` is
//! `sqrt(D^2 + Omega^4 / 4D^2) - D`, see [`StitchPolicy`].

mod geometry;

pub use geometry::{trap_geometry, GeometryOptions, TrapGeometry};

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::units::{AtomSpecies, QuantityKind, UnitScaling, BOHR_MAGNETON, HBAR};
use crate::{Error, Result};

/// Linear field `B(x) = b x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticField {
    /// T/m
    pub gradient: f64,
}

impl MagneticField {
    pub fn new(gradient: f64) -> Result<Self> {
        if !(gradient > 0.0) || !gradient.is_finite() {
            return Err(Error::Domain {
                what: "field gradient",
                value: gradient,
            });
        }
        Ok(MagneticField { gradient })
    }

    /// Gradient given in G/cm.
    pub fn from_gauss_per_cm(gradient: f64) -> Result<Self> {
        Self::new(gradient * 1e-4 / 1e-2)
    }
}

/// Ordered radio frequencies with a common Rabi frequency (all rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct RfComb {
    omegas: Vec<f64>,
    rabi: f64,
}

impl RfComb {
    pub fn new(omegas: Vec<f64>, rabi: f64) -> Result<Self> {
        validate_comb(&omegas, rabi)?;
        Ok(RfComb { omegas, rabi })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }
}

fn validate_comb(omegas: &[f64], rabi: f64) -> Result<()> {
    if omegas.is_empty() {
        return Err(Error::InvalidComb("empty comb".into()));
    }
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(Error::InvalidComb(format!("Rabi frequency {rabi} must be positive")));
    }
    if let Some(w) = omegas.iter().find(|w| !w.is_finite() || **w <= 0.0) {
        return Err(Error::InvalidComb(format!("frequency {w} must be positive")));
    }
    for (i, pair) in omegas.windows(2).enumerate() {
        let spacing = pair[1] - pair[0];
        if spacing <= 2.0 * rabi {
            return Err(Error::InvalidComb(format!(
                "spacing {spacing:e} between frequencies {i} and {} must exceed twice the Rabi frequency {rabi:e}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Which dressed eigenvalue branch to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Trapping branch: minima at the 2nd, 4th, 6th... resonance.
    Upper,
    Lower,
}

/// Rabi frequency (rad/s) of the rf coupling between `m_F` and `m_F'`.
///
/// `b_rf` is the rf amplitude vector in T, `e_b` the unit vector of the
/// static field.
pub fn rabi_frequency(species: &AtomSpecies, b_rf: [f64; 3], e_b: [f64; 3]) -> Result<f64> {
    let norm = (e_b[0] * e_b[0] + e_b[1] * e_b[1] + e_b[2] * e_b[2]).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Domain {
            what: "|e_B| (must be a unit vector)",
            value: norm,
        });
    }
    let cross = [
        b_rf[1] * e_b[2] - b_rf[2] * e_b[1],
        b_rf[2] * e_b[0] - b_rf[0] * e_b[2],
        b_rf[0] * e_b[1] - b_rf[1] * e_b[0],
    ];
    let perp = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    Ok(BOHR_MAGNETON * species.g_f.abs() / (4.0 * HBAR) * perp * spin_factor(species))
}

/// rf amplitude (T) perpendicular to the static field that produces `rabi`.
pub fn rf_amplitude_for_rabi(species: &AtomSpecies, rabi: f64) -> f64 {
    4.0 * HBAR * rabi / (BOHR_MAGNETON * species.g_f.abs() * spin_factor(species))
}

fn spin_factor(species: &AtomSpecies) -> f64 {
    let f = species.f.value();
    (f * (f + 1.0) - species.m_f.value() * species.m_f_prime.value()).sqrt()
}

/// Position (m) at which `omega` (rad/s) is resonant.
pub fn resonance_position(species: &AtomSpecies, field: &MagneticField, omega: f64) -> f64 {
    HBAR * omega / (BOHR_MAGNETON * species.g_f.abs() * field.gradient)
}

/// How strictly [`DressedPotential::adiabatic_potential`] checks continuity
/// across window boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StitchPolicy {
    /// Allowed jump in units of `hbar Omega`.
    pub relative_tolerance: f64,
    /// Also allow `2 Omega (Omega / D)^3`, which bounds the remainder the
    /// nearest-resonance construction leaves at a boundary with half-spacing
    /// `D`.
    pub allow_model_remainder: bool,
}

impl Default for StitchPolicy {
    fn default() -> Self {
        StitchPolicy {
            relative_tolerance: 1e-6,
            allow_model_remainder: true,
        }
    }
}

impl StitchPolicy {
    pub fn strict(relative_tolerance: f64) -> Self {
        StitchPolicy {
            relative_tolerance,
            allow_model_remainder: false,
        }
    }
}

/// Potential values on a set of (ascending, uniformly spaced) positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSnapshot {
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
    pub branch: Branch,
}

impl PotentialSnapshot {
    pub fn spacing(&self) -> f64 {
        if self.positions.len() < 2 {
            return 0.0;
        }
        (self.positions[self.positions.len() - 1] - self.positions[0])
            / (self.positions.len() - 1) as f64
    }
}

/// Dimensionless evaluator for the dressed potential (`hbar = 1`).
///
/// Positions are in units of the length scale, the Zeeman slope in energy
/// per length, frequencies and energies in units of `1 / time_scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedPotential {
    slope: f64,
    omegas: Vec<f64>,
    rabi: f64,
    /// `prefix[m] = sum_{k=1}^{m} (-1)^k omega_k` (1-based k)
    prefix: Vec<f64>,
    /// Smallest admissible off-resonant detuning, in units of `Omega`.
    floor_ratio: f64,
    stitch: StitchPolicy,
}

impl DressedPotential {
    /// Converts SI inputs with `scaling`.
    pub fn new(
        species: &AtomSpecies,
        field: &MagneticField,
        comb: &RfComb,
        scaling: &UnitScaling,
    ) -> Result<Self> {
        let slope_si = BOHR_MAGNETON * species.g_f.abs() * field.gradient;
        let slope = slope_si * scaling.length / scaling.energy;
        let omegas = comb
            .omegas()
            .iter()
            .map(|w| scaling.to_dimensionless(*w, QuantityKind::Frequency))
            .collect();
        let rabi = scaling.to_dimensionless(comb.rabi(), QuantityKind::Frequency);
        Self::from_dimensionless(slope, omegas, rabi)
    }

    /// Builds directly from dimensionless parameters.
    pub fn from_dimensionless(slope: f64, omegas: Vec<f64>, rabi: f64) -> Result<Self> {
        if !(slope > 0.0) || !slope.is_finite() {
            return Err(Error::Domain {
                what: "Zeeman slope",
                value: slope,
            });
        }
        validate_comb(&omegas, rabi)?;
        let mut p = DressedPotential {
            slope,
            omegas: Vec::new(),
            rabi,
            prefix: Vec::new(),
            floor_ratio: 1.0,
            stitch: StitchPolicy::default(),
        };
        p.install(&omegas);
        Ok(p)
    }

    pub fn with_stitch_policy(mut self, policy: StitchPolicy) -> Self {
        self.stitch = policy;
        self
    }

    /// Off-resonant detunings below `ratio * Omega` are rejected as
    /// singular (default 1, which valid combs never reach).
    pub fn with_singularity_floor(mut self, ratio: f64) -> Self {
        self.floor_ratio = ratio;
        self
    }

    fn install(&mut self, omegas: &[f64]) {
        self.omegas.clear();
        self.omegas.extend_from_slice(omegas);
        self.prefix.clear();
        self.prefix.push(0.0);
        let mut acc = 0.0;
        for (i, w) in omegas.iter().enumerate() {
            let k = i + 1;
            acc += if k % 2 == 0 { *w } else { -*w };
            self.prefix.push(acc);
        }
    }

    /// Replaces the comb frequencies (dimensionless), keeping `Omega`.
    pub fn set_frequencies(&mut self, omegas: &[f64]) -> Result<()> {
        validate_comb(omegas, self.rabi)?;
        self.install(omegas);
        Ok(())
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    /// Position of the `n`-th resonance (0-based).
    pub fn resonance_position(&self, n: usize) -> f64 {
        self.omegas[n] / self.slope
    }

    /// Detuning `mu_B |g_F| B(x) - hbar omega_n`.
    #[inline]
    pub fn detuning(&self, x: f64, n: usize) -> f64 {
        self.slope * x - self.omegas[n]
    }

    /// Index of the closest resonance; ties go to the lower index.
    pub fn nearest_resonance_index(&self, x: f64) -> usize {
        let mut best = 0;
        let mut best_abs = self.detuning(x, 0).abs();
        for n in 1..self.omegas.len() {
            let d = self.detuning(x, n).abs();
            if d < best_abs {
                best = n;
                best_abs = d;
            }
        }
        best
    }

    /// Summed Stark shift `L_n(x)` of all frequencies other than `n`.
    pub fn stark_sum(&self, x: f64, n: usize) -> Result<f64> {
        if n >= self.omegas.len() {
            return Err(Error::Domain {
                what: "resonance index",
                value: n as f64,
            });
        }
        let a2 = self.rabi * self.rabi;
        let floor = self.floor_ratio * self.rabi;
        let mut sum = 0.0;
        for j in 0..self.omegas.len() {
            if j == n {
                continue;
            }
            let d = self.detuning(x, j);
            if d.abs() < floor {
                return Err(Error::Singularity {
                    index: j,
                    position: x,
                    denominator: d,
                    floor,
                });
            }
            sum += a2 / (4.0 * d);
        }
        Ok(sum)
    }

    /// `(E_plus, E_minus)` of the Stark-corrected two-level problem for
    /// resonance `n`.
    pub fn dressed_eigenvalues(&self, x: f64, n: usize) -> Result<(f64, f64)> {
        let shift = self.stark_sum(x, n)?;
        let e = 0.5 * self.rabi.hypot(self.detuning(x, n) + 2.0 * shift);
        Ok((e, -e))
    }

    /// Potential using window `n` regardless of whether it is the nearest.
    pub fn value_in_window(&self, x: f64, n: usize, branch: Branch) -> Result<f64> {
        let (e_plus, _) = self.dressed_eigenvalues(x, n)?;
        let k = n + 1;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let upper = sign * (e_plus - 0.5 * self.omegas[n]) - self.prefix[k - 1];
        Ok(match branch {
            Branch::Upper => upper,
            Branch::Lower => -upper,
        })
    }

    /// Adiabatic potential at `x`.
    pub fn value(&self, x: f64, branch: Branch) -> Result<f64> {
        self.value_in_window(x, self.nearest_resonance_index(x), branch)
    }

    /// Fills `out` with the potential on ascending `positions`, without the
    /// stitching check.
    pub fn fill(&self, positions: &[f64], branch: Branch, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(positions.len(), out.len());
        let last = self.omegas.len() - 1;
        let mut n = 0;
        for (x, v) in positions.iter().zip(out.iter_mut()) {
            // windows are monotone in x for ascending positions
            while n < last && self.detuning(*x, n + 1).abs() < self.detuning(*x, n).abs() {
                n += 1;
            }
            if n > 0 && self.detuning(*x, n - 1).abs() <= self.detuning(*x, n).abs() {
                n = self.nearest_resonance_index(*x);
            }
            *v = self.value_in_window(*x, n, branch)?;
        }
        Ok(())
    }

    /// Window boundary between resonances `n` and `n + 1`.
    pub fn window_boundary(&self, n: usize) -> f64 {
        0.5 * (self.omegas[n] + self.omegas[n + 1]) / self.slope
    }

    /// Jump of the potential at each window boundary inside `[lo, hi]`, as
    /// `(boundary index, position, jump, allowed)`.
    pub fn stitching_jumps(&self, lo: f64, hi: f64) -> Result<Vec<(usize, f64, f64, f64)>> {
        let mut out = Vec::new();
        for n in 0..self.omegas.len().saturating_sub(1) {
            let xb = self.window_boundary(n);
            if xb < lo || xb > hi {
                continue;
            }
            let left = self.value_in_window(xb, n, Branch::Upper)?;
            let right = self.value_in_window(xb, n + 1, Branch::Upper)?;
            out.push((n, xb, (left - right).abs(), self.allowed_jump(n)));
        }
        Ok(out)
    }

    fn allowed_jump(&self, n: usize) -> f64 {
        let mut allowed = self.stitch.relative_tolerance * self.rabi;
        if self.stitch.allow_model_remainder {
            let half = 0.5 * (self.omegas[n + 1] - self.omegas[n]);
            let ratio = self.rabi / half;
            allowed += 2.0 * self.rabi * ratio * ratio * ratio;
        }
        allowed
    }

    /// Potential on `positions`, rejecting discontinuities at window
    /// boundaries beyond the [`StitchPolicy`].
    pub fn adiabatic_potential(&self, positions: &[f64], branch: Branch) -> Result<PotentialSnapshot> {
        if positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("positions must be strictly ascending".into()));
        }
        let mut values = alloc::vec![0.0; positions.len()];
        self.fill(positions, branch, &mut values)?;
        if let (Some(lo), Some(hi)) = (positions.first(), positions.last()) {
            for (boundary, position, jump, tolerance) in self.stitching_jumps(*lo, *hi)? {
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
        Ok(PotentialSnapshot {
            positions: positions.to_vec(),
            values,
            branch,
        })
    }

    /// Closed-form trap frequency at an isolated resonance:
    /// `omega^2 = slope^2 / (2 Omega m)`.
    pub fn resonance_trap_frequency(&self, mass: f64) -> f64 {
        (self.slope * self.slope / (2.0 * self.rabi * mass)).sqrt()
    }
}

/// Harmonic frequency (rad/s) of the first trap (resonance of the second
/// comb frequency), measured from the numerically evaluated potential.
pub fn reference_trap_frequency(
    species: &AtomSpecies,
    field: &MagneticField,
    comb: &RfComb,
) -> Result<f64> {
    if comb.omegas().len() < 2 {
        return Err(Error::InvalidComb("need at least two frequencies for a trap".into()));
    }
    let slope_si = BOHR_MAGNETON * species.g_f.abs() * field.gradient;
    let guess = slope_si / (2.0 * HBAR * comb.rabi() * species.mass).sqrt();
    let scaling = crate::units::default_scaling(species, guess)?;
    let potential = DressedPotential::new(species, field, comb, &scaling)?;
    let center = potential.resonance_position(1);
    // harmonic core of the hyperbolic well: sqrt(Omega / 2 omega) lengths
    let half_width = 0.05 * (0.5 * potential.rabi()).sqrt();
    let n = 401;
    let positions: Vec<f64> = (0..n)
        .map(|i| center - half_width + 2.0 * half_width * i as f64 / (n - 1) as f64)
        .collect();
    let mut values = alloc::vec![0.0; n];
    potential.fill(&positions, Branch::Upper, &mut values)?;
    let snapshot = PotentialSnapshot {
        positions,
        values,
        branch: Branch::Upper,
    };
    let mass = scaling.dimensionless_mass(species);
    let geometry = trap_geometry(
        &snapshot,
        mass,
        &GeometryOptions {
            expected_minima: 1,
            min_prominence: Some(0.0),
        },
    )?;
    Ok(geometry.curvatures[0] / scaling.time)
}
