//! Reduced three-mode model of the triple well.
//!
//! One mode per trap (`L`, `M`, `R`), coupled by the tunnelling rates
//! `J_LM` and `J_MR` with no direct `L`-`R` coupling:
//!
//! ```text
//!     | eps_L   -J_LM    0    |
//! H = | -J_LM   eps_M   -J_MR |
//!     |  0      -J_MR   eps_R |
//! ```
//!
//! With vanishing on-site energies `H` has the zero-energy dark state
//! `cos(theta) |L> - sin(theta) |R>`, `tan(theta) = J_LM / J_MR`, which
//! carries the population from `L` to `R` when `J_MR` is switched on
//! before `J_LM`. Interacting clouds add their chemical potentials to
//! `eps_L` and `eps_R`.
//!
//! The module also extracts the tunnelling rates of a continuum potential
//! from the splitting of the lowest doublet of two neighbouring wells.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::evolution::{grid_geometry, PotentialFactory};
use crate::grid::Grid1D;
use crate::rf::TrapGeometry;
use crate::{Error, Result, C64};

/// Tunnelling rates (angular frequencies, `hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Couplings {
    pub j_lm: f64,
    pub j_mr: f64,
}

/// Diagonal of the three-mode Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OnSiteEnergies {
    pub eps_l: f64,
    pub eps_m: f64,
    pub eps_r: f64,
}

impl OnSiteEnergies {
    /// `(omega_L + mu_L, omega_M, omega_R + mu_R)`.
    pub fn with_chemical_potentials(omega: [f64; 3], mu_l: f64, mu_r: f64) -> Self {
        OnSiteEnergies {
            eps_l: omega[0] + mu_l,
            eps_m: omega[1],
            eps_r: omega[2] + mu_r,
        }
    }
}

/// Amplitudes `(c_L, c_M, c_R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeState(pub [C64; 3]);

impl ThreeState {
    pub fn left() -> Self {
        ThreeState([C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)])
    }

    pub fn populations(&self) -> [f64; 3] {
        self.0.map(|c| c.norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.populations().iter().sum()
    }
}

pub type Matrix3 = [[f64; 3]; 3];

pub fn hamiltonian(c: &Couplings, e: &OnSiteEnergies) -> Matrix3 {
    [
        [e.eps_l, -c.j_lm, 0.0],
        [-c.j_lm, e.eps_m, -c.j_mr],
        [0.0, -c.j_mr, e.eps_r],
    ]
}

fn apply(h: &Matrix3, s: &[C64; 3]) -> [C64; 3] {
    let mut out = [C64::new(0.0, 0.0); 3];
    for (i, row) in h.iter().enumerate() {
        out[i] = row[0] * s[0] + row[1] * s[1] + row[2] * s[2];
    }
    out
}

/// `||H psi||` for a real matrix and complex vector.
pub fn residual_norm(h: &Matrix3, s: &ThreeState) -> f64 {
    apply(h, &s.0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `theta = atan2(J_LM, J_MR)` in `[0, pi / 2]`.
pub fn mixing_angle(c: &Couplings) -> Result<f64> {
    if c.j_lm < 0.0 || c.j_mr < 0.0 {
        return Err(Error::Domain {
            what: "tunnelling rate",
            value: c.j_lm.min(c.j_mr),
        });
    }
    if c.j_lm == 0.0 && c.j_mr == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok(c.j_lm.atan2(c.j_mr))
}

/// `cos(theta) |L> - sin(theta) |R>`
pub fn dark_state(c: &Couplings) -> Result<ThreeState> {
    let theta = mixing_angle(c)?;
    Ok(ThreeState([
        C64::new(theta.cos(), 0.0),
        C64::new(0.0, 0.0),
        C64::new(-theta.sin(), 0.0),
    ]))
}

/// Raised-cosine pulse `peak / 2 (1 - cos(2 pi (t - start) / width))` on
/// `[start, start + width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaisedCosine {
    pub peak: f64,
    pub start: f64,
    pub width: f64,
}

impl RaisedCosine {
    pub fn value(&self, t: f64) -> f64 {
        let u = t - self.start;
        if !(0.0..=self.width).contains(&u) {
            return 0.0;
        }
        0.5 * self.peak * (1.0 - (2.0 * PI * u / self.width).cos())
    }
}

/// Pulse pair of equal `width` centred on `total / 2`, with the second
/// pulse's centre `delay` after the first.
///
/// Counter-intuitive order switches `J_MR` on first. Returns
/// `(J_LM, J_MR)`.
pub fn pulse_pair(peak: f64, total: f64, width: f64, delay: f64, counter_intuitive: bool) -> (RaisedCosine, RaisedCosine) {
    let centre = 0.5 * total;
    let first = RaisedCosine {
        peak,
        start: centre - 0.5 * delay - 0.5 * width,
        width,
    };
    let second = RaisedCosine {
        peak,
        start: centre + 0.5 * delay - 0.5 * width,
        width,
    };
    if counter_intuitive {
        (second, first)
    } else {
        (first, second)
    }
}

/// Mean-field shifts `U_i |c_i|^2` added to the on-site energies.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SelfConsistent {
    pub u: [f64; 3],
}

impl SelfConsistent {
    pub fn shift(&self, base: OnSiteEnergies, s: &ThreeState) -> OnSiteEnergies {
        let p = s.populations();
        OnSiteEnergies {
            eps_l: base.eps_l + self.u[0] * p[0],
            eps_m: base.eps_m + self.u[1] * p[1],
            eps_r: base.eps_r + self.u[2] * p[2],
        }
    }
}

/// Result of [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelRun {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
    pub couplings: Vec<Couplings>,
    pub final_state: ThreeState,
}

impl ThreeLevelRun {
    pub fn final_populations(&self) -> [f64; 3] {
        self.final_state.populations()
    }

    pub fn max_middle(&self) -> f64 {
        self.populations.iter().map(|p| p[1]).fold(0.0, f64::max)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.populations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Largest `dt ||H||` allowed per step.
pub const RK4_STABILITY_LIMIT: f64 = 0.1;

fn row_sum_norm(h: &Matrix3) -> f64 {
    h.iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Classic fourth-order Runge-Kutta integration of `i dc/dt = H(t, c) c`
/// from 0 to `total`, recording `samples` uniformly spaced populations.
///
/// `energies` may depend on the state (see [`SelfConsistent`]).
pub fn integrate<C, E>(
    couplings: C,
    energies: E,
    psi0: ThreeState,
    total: f64,
    dt: f64,
    samples: usize,
) -> Result<ThreeLevelRun>
where
    C: Fn(f64) -> Couplings,
    E: Fn(f64, &ThreeState) -> OnSiteEnergies,
{
    if !(total > 0.0) || !(dt > 0.0) {
        return Err(Error::Domain {
            what: "integration time step",
            value: dt,
        });
    }
    let steps = (total / dt).ceil() as usize;
    let dt = total / steps as f64;
    let samples = samples.clamp(2, steps + 1);
    let rhs = |t: f64, s: &[C64; 3]| -> Result<[C64; 3]> {
        let state = ThreeState(*s);
        let h = hamiltonian(&couplings(t), &energies(t, &state));
        let phase = dt * row_sum_norm(&h);
        if phase > RK4_STABILITY_LIMIT {
            return Err(Error::Stability {
                dt,
                phase,
                limit: RK4_STABILITY_LIMIT,
            });
        }
        let hs = apply(&h, s);
        // -i H c
        Ok(hs.map(|z| C64::new(z.im, -z.re)))
    };
    let axpy = |a: &[C64; 3], k: &[C64; 3], f: f64| -> [C64; 3] {
        [a[0] + k[0] * f, a[1] + k[1] * f, a[2] + k[2] * f]
    };
    let mut run = ThreeLevelRun {
        times: Vec::with_capacity(samples),
        populations: Vec::with_capacity(samples),
        couplings: Vec::with_capacity(samples),
        final_state: psi0,
    };
    let mut s = psi0.0;
    let mut next = 0;
    for step in 0..=steps {
        if next < samples && step == next * steps / (samples - 1) {
            let t = step as f64 * dt;
            run.times.push(t);
            run.populations.push(ThreeState(s).populations());
            run.couplings.push(couplings(t));
            next += 1;
        }
        if step == steps {
            break;
        }
        let t = step as f64 * dt;
        let k1 = rhs(t, &s)?;
        let k2 = rhs(t + 0.5 * dt, &axpy(&s, &k1, 0.5 * dt))?;
        let k3 = rhs(t + 0.5 * dt, &axpy(&s, &k2, 0.5 * dt))?;
        let k4 = rhs(t + dt, &axpy(&s, &k3, dt))?;
        for i in 0..3 {
            s[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step });
        }
    }
    run.final_state = ThreeState(s);
    Ok(run)
}

/// Lowest levels of a two-well restriction and the implied tunnelling rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubletSplitting {
    /// Three lowest eigenvalues.
    pub energies: [f64; 3],
    /// `(E1 - E0) / 2`
    pub j: f64,
}

/// Three lowest eigenvalues of the finite-difference Hamiltonian
/// `-c d^2/dx^2 + V` with hard walls just outside the given points.
pub fn lowest_levels(potential: &[f64], dx: f64, kinetic: f64) -> Result<[f64; 3]> {
    let n = potential.len();
    if n < 3 {
        return Err(Error::Extraction(alloc::format!("{n} points cannot hold three levels")));
    }
    let off = -kinetic / (dx * dx);
    let diag: Vec<f64> = potential.iter().map(|v| v - 2.0 * off).collect();
    // Gershgorin bounds
    let lo = diag.iter().fold(f64::INFINITY, |m, d| m.min(*d)) + 2.0 * off;
    let hi = diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(*d)) - 2.0 * off;
    let count_below = |x: f64| -> usize {
        // Sturm sequence via the LDL^T pivots
        let mut count = 0;
        let mut q = diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for d in &diag[1..] {
            let q_prev = if q == 0.0 { f64::EPSILON * off.abs() } else { q };
            q = d - x - off * off / q_prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut out = [0.0; 3];
    for (k, e) in out.iter_mut().enumerate() {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if count_below(mid) > k {
                b = mid;
            } else {
                a = mid;
            }
        }
        *e = 0.5 * (a + b);
    }
    Ok(out)
}

/// Splitting of the lowest doublet of `potential` restricted to
/// `[lo, hi)`.
pub fn doublet_splitting(positions: &[f64], potential: &[f64], lo: f64, hi: f64, kinetic: f64) -> Result<DoubletSplitting> {
    let first = positions.iter().position(|x| *x >= lo).unwrap_or(positions.len());
    let last = positions.iter().rposition(|x| *x < hi).map_or(0, |i| i + 1);
    if last <= first + 3 {
        return Err(Error::Extraction(alloc::format!("empty region [{lo}, {hi})")));
    }
    let dx = positions[1] - positions[0];
    let energies = lowest_levels(&potential[first..last], dx, kinetic)?;
    let split = energies[1] - energies[0];
    if !(energies[2] - energies[1] > split) {
        return Err(Error::Extraction(alloc::format!(
            "doublet splitting {split} not separated from the next level ({})",
            energies[2] - energies[1]
        )));
    }
    Ok(DoubletSplitting { energies, j: 0.5 * split })
}

/// `J_LM` and `J_MR` of a three-well potential, each from the two-well
/// restriction bounded by the outer barrier maxima (or the grid ends).
pub fn tunneling_extract(positions: &[f64], potential: &[f64], geometry: &TrapGeometry, kinetic: f64) -> Result<Couplings> {
    if geometry.len() != 3 {
        return Err(Error::Geometry {
            found: geometry.len(),
            requested: 3,
        });
    }
    let b = &geometry.barrier_positions;
    let lm = doublet_splitting(positions, potential, f64::NEG_INFINITY, b[1], kinetic)?;
    let mr = doublet_splitting(positions, potential, b[0], f64::INFINITY, kinetic)?;
    Ok(Couplings { j_lm: lm.j, j_mr: mr.j })
}

/// `(t, couplings)` at each of `times` for a time-dependent potential.
pub fn coupling_trace(
    factory: &mut dyn PotentialFactory,
    grid: &Grid1D,
    kinetic: f64,
    times: &[f64],
) -> Result<Vec<(f64, Couplings)>> {
    let positions = grid.positions();
    let mut v = vec![0.0; grid.len()];
    let mass = 0.5 / kinetic;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        factory.fill(t, &positions, &mut v)?;
        let geometry = grid_geometry(grid, &v, mass, 3)?;
        out.push((t, tunneling_extract(&positions, &v, &geometry, kinetic)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn eigenvalues(h: &Matrix3) -> [f64; 3] {
        let m = nalgebra::Matrix3::from_fn(|i, j| h[i][j]);
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        [e[0], e[1], e[2]]
    }

    #[test]
    fn zero_hamiltonian() {
        let h = hamiltonian(&Couplings::default(), &OnSiteEnergies::default());
        assert_eq!(h, [[0.0; 3]; 3]);
    }

    #[test]
    fn symmetric_couplings_spectrum() {
        let j = 0.7;
        let h = hamiltonian(&Couplings { j_lm: j, j_mr: j }, &OnSiteEnergies::default());
        let e = eigenvalues(&h);
        let s = j * 2f64.sqrt();
        assert_relative_eq!(e[0], -s, max_relative = 1e-12);
        assert!(e[1].abs() < 1e-12);
        assert_relative_eq!(e[2], s, max_relative = 1e-12);
    }

    #[test]
    fn diagonal_is_placed_as_written() {
        let e = OnSiteEnergies::with_chemical_potentials([1.0, 2.0, 3.0], 0.25, 0.5);
        let h = hamiltonian(&Couplings { j_lm: 0.1, j_mr: 0.2 }, &e);
        assert_eq!(h[0][0], 1.25);
        assert_eq!(h[1][1], 2.0);
        assert_eq!(h[2][2], 3.5);
        assert_eq!(h[0][2], 0.0);
        assert_eq!(h[2][0], 0.0);
        assert_eq!(h[0][1], -0.1);
        assert_eq!(h[2][1], -0.2);
    }

    #[test]
    fn mixing_angles() {
        let j = 1.3;
        assert_eq!(mixing_angle(&Couplings { j_lm: 0.0, j_mr: j }).unwrap(), 0.0);
        assert_relative_eq!(mixing_angle(&Couplings { j_lm: j, j_mr: 0.0 }).unwrap(), PI / 2.0);
        assert_relative_eq!(mixing_angle(&Couplings { j_lm: j, j_mr: j }).unwrap(), PI / 4.0);
        assert_eq!(mixing_angle(&Couplings::default()), Err(Error::UndefinedAngle));
        assert!(dark_state(&Couplings::default()).is_err());
    }

    #[test]
    fn dark_states() {
        let d = dark_state(&Couplings { j_lm: 0.0, j_mr: 2.0 }).unwrap();
        assert_eq!(d.populations(), [1.0, 0.0, 0.0]);
        let d = dark_state(&Couplings { j_lm: 2.0, j_mr: 2.0 }).unwrap();
        let s = 0.5f64.sqrt();
        assert_relative_eq!(d.0[0].re, s, max_relative = 1e-15);
        assert_eq!(d.0[1], C64::new(0.0, 0.0));
        assert_relative_eq!(d.0[2].re, -s, max_relative = 1e-15);
    }

    #[test]
    fn resonant_chemical_potentials_restore_a_dark_state() {
        // hbar omega_L + mu_L = hbar omega_M = hbar omega_R + mu_R
        let e = OnSiteEnergies::with_chemical_potentials([0.4, 1.0, 0.7], 0.6, 0.3);
        let c = Couplings { j_lm: 0.3, j_mr: 0.8 };
        let h = hamiltonian(&c, &e);
        let shifted = hamiltonian(
            &c,
            &OnSiteEnergies {
                eps_l: e.eps_l - 1.0,
                eps_m: e.eps_m - 1.0,
                eps_r: e.eps_r - 1.0,
            },
        );
        let d = dark_state(&c).unwrap();
        assert!(residual_norm(&shifted, &d) < 1e-12);
        // the state is an eigenvector of the unshifted H with eigenvalue eps_M
        let hd = apply(&h, &d.0);
        for i in 0..3 {
            assert!((hd[i] - d.0[i] * 1.0).norm() < 1e-12);
        }
        assert!(eigenvalues(&h).iter().any(|v| (v - 1.0).abs() < 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn dark_state_is_annihilated(j_lm in 0.0f64..10.0, j_mr in 1e-9f64..10.0) {
            let c = Couplings { j_lm, j_mr };
            let h = hamiltonian(&c, &OnSiteEnergies::default());
            prop_assert!(residual_norm(&h, &dark_state(&c).unwrap()) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn spectrum_matches_brute_force(j_lm in 0.0f64..5.0, j_mr in 0.0f64..5.0) {
            let h = hamiltonian(&Couplings { j_lm, j_mr }, &OnSiteEnergies::default());
            let e = eigenvalues(&h);
            let s = j_lm.hypot(j_mr);
            prop_assert!((e[0] + s).abs() < 1e-12);
            prop_assert!(e[1].abs() < 1e-12);
            prop_assert!((e[2] - s).abs() < 1e-12);
        }
    }

    /// Fixed peak `J`, width `0.4 T`, delay `0.1 T`.
    fn ctap(peak: f64, total: f64, counter_intuitive: bool, dt: f64) -> ThreeLevelRun {
        let (lm, mr) = pulse_pair(peak, total, 0.4 * total, 0.1 * total, counter_intuitive);
        integrate(
            |t| Couplings { j_lm: lm.value(t), j_mr: mr.value(t) },
            |_, _| OnSiteEnergies::default(),
            ThreeState::left(),
            total,
            dt,
            2001,
        )
        .unwrap()
    }

    #[test]
    fn constant_zero_hamiltonian_leaves_state() {
        let s = ThreeState([C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)]);
        let run = integrate(|_| Couplings::default(), |_, _| OnSiteEnergies::default(), s, 3.0, 0.01, 10).unwrap();
        assert_eq!(run.final_state, s);
    }

    #[test]
    fn counter_intuitive_transfer() {
        let peak = 2.0 * PI * 50.0;
        let run = ctap(peak, 1.0, true, 1e-4);
        let p = run.final_populations();
        assert!(p[2] > 0.999, "P_R = {}", p[2]);
        assert!(run.max_middle() < 1e-3, "max P_M = {}", run.max_middle());
        assert!(run.max_norm_drift() < 1e-9);
        let fine = ctap(peak, 1.0, true, 5e-5).final_populations();
        assert!((fine[2] - p[2]).abs() < 1e-9);
    }

    #[test]
    fn intuitive_order_is_sensitive_to_duration() {
        let peak = 2.0 * PI * 50.0;
        let p: Vec<f64> = [0.95, 1.0, 1.05]
            .iter()
            .map(|s| ctap(peak, *s, false, 1e-4).final_populations()[2])
            .collect();
        let swing = (p[0] - p[1]).abs().max((p[2] - p[1]).abs());
        assert!(swing > 0.1, "P_R over T: {p:?}");
    }

    #[test]
    fn pulse_order() {
        let (lm, mr) = pulse_pair(1.0, 10.0, 4.0, 1.0, true);
        assert!(mr.value(3.0) > 0.0 && lm.value(3.0) == 0.0);
        assert_eq!(lm.value(5.5), 1.0);
        assert_eq!(mr.value(4.5), 1.0);
        assert_eq!(mr.value(6.6), 0.0);
        let (lm, mr) = pulse_pair(1.0, 10.0, 4.0, 1.0, false);
        assert_eq!(lm.value(4.5), 1.0);
        assert_eq!(mr.value(5.5), 1.0);
    }

    #[test]
    fn self_consistent_shift() {
        let sc = SelfConsistent { u: [1.0, 2.0, 3.0] };
        let s = ThreeState([C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::new(0.0, 0.0)]);
        let e = sc.shift(OnSiteEnergies::default(), &s);
        assert_relative_eq!(e.eps_l, 0.36, max_relative = 1e-15);
        assert_relative_eq!(e.eps_m, 1.28, max_relative = 1e-15);
        assert_eq!(e.eps_r, 0.0);
    }

    #[test]
    fn stability_violation_is_reported() {
        let r = integrate(
            |_| Couplings { j_lm: 100.0, j_mr: 0.0 },
            |_, _| OnSiteEnergies::default(),
            ThreeState::left(),
            1.0,
            0.01,
            2,
        );
        assert!(matches!(r, Err(Error::Stability { .. })));
    }

    #[test]
    fn harmonic_levels() {
        let n = 8000;
        let dx = 20.0 / n as f64;
        let v: Vec<f64> = (0..n).map(|i| {
            let x = -10.0 + (i as f64 + 0.5) * dx;
            0.5 * x * x
        }).collect();
        let e = lowest_levels(&v, dx, 0.5).unwrap();
        assert_relative_eq!(e[0], 0.5, max_relative = 1e-5);
        assert_relative_eq!(e[1], 1.5, max_relative = 1e-5);
        assert_relative_eq!(e[2], 2.5, max_relative = 1e-5);
    }

    fn double_well(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
        let dx = 16.0 / n as f64;
        let x: Vec<f64> = (0..n).map(|i| -8.0 + i as f64 * dx).collect();
        // quartic double well with minima at +-a and barrier a^4 / 16
        let v = x.iter().map(|x| (x * x - a * a).powi(2) / 16.0).collect();
        (x, v)
    }

    #[test]
    fn doublet_against_dense_diagonalisation() {
        let (x, v) = double_well(400, 3.0);
        let d = doublet_splitting(&x, &v, f64::NEG_INFINITY, f64::INFINITY, 0.5).unwrap();
        let dx = x[1] - x[0];
        let n = x.len();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                v[i] + 1.0 / (dx * dx)
            } else if i.abs_diff(j) == 1 {
                -0.5 / (dx * dx)
            } else {
                0.0
            }
        });
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(d.energies[0], e[0], epsilon = 1e-10);
        assert_relative_eq!(d.energies[1], e[1], epsilon = 1e-10);
        assert_relative_eq!(d.j, 0.5 * (e[1] - e[0]), max_relative = 1e-6);
        // grid refinement changes the rate by less than 1 %
        let (x2, v2) = double_well(800, 3.0);
        let fine = doublet_splitting(&x2, &v2, f64::NEG_INFINITY, f64::INFINITY, 0.5).unwrap();
        assert!((fine.j - d.j).abs() < 0.01 * fine.j, "{} vs {}", d.j, fine.j);
    }

    #[test]
    fn separation_suppresses_tunnelling() {
        let js: Vec<f64> = [2.5, 3.0, 3.5]
            .iter()
            .map(|a| {
                let (x, v) = double_well(800, *a);
                doublet_splitting(&x, &v, f64::NEG_INFINITY, f64::INFINITY, 0.5).unwrap().j
            })
            .collect();
        assert!(js[0] > js[1] && js[1] > js[2]);
        assert!(js[2] < 0.1 * js[0]);
    }

    #[test]
    fn single_well_is_rejected() {
        let n = 400;
        let x: Vec<f64> = (0..n).map(|i| -8.0 + i as f64 * 0.04).collect();
        let v: Vec<f64> = x.iter().map(|x| 0.5 * x * x).collect();
        assert!(matches!(
            doublet_splitting(&x, &v, f64::NEG_INFINITY, f64::INFINITY, 0.5),
            Err(Error::Extraction(_))
        ));
    }
}
