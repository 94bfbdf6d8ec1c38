//! Time-dependent radio frequencies for the transport sequence.
//!
//! Six frequencies `w1..w6` are used: `w2`, `w4` and `w6` are the left,
//! middle and right traps, `w3` and `w5` the barriers between them and `w1`
//! the outer wall. A raised-cosine ramp `f(t)` pulls the right pair
//! (`w5`, `w6`) towards the middle, and after a delay `tau` the pair
//! (`w3`, `w4`) towards the left:
//!
//! ```text
//! w1(t) = w1(0)
//! w2(t) = w2(0) - dw2(t)
//! w3(t) = w3(0) - f(t - tau) / 2
//! w4(t) = w4(0) - f(t - tau)
//! w5(t) = w5(0) - f(t) / 2 - f(t - tau)
//! w6(t) = w6(0) - f(t) - f(t - tau) + dw6(t)
//! ```
//!
//! so that `w3` and `w5` stay exactly halfway between their neighbours and
//! the bare trap minima stay degenerate. The optional tanh-shaped shifts
//! `dw2`, `dw6` lower the left trap early and the right trap late; they
//! compensate the chemical potential of an interacting cloud.
//!
//! In [`TransportMode::Intuitive`] the two pulse pairs swap their timing,
//! so the left-middle gap closes first.
//!
//! The schedule is unit-agnostic: times and frequencies only have to be
//! consistent (SI, or dimensionless after [`CtapSchedule::scaled`]).

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::units::{QuantityKind, UnitScaling};
use crate::{Error, Result};

/// Shape of the frequency ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampShape {
    /// `f(t) = peak / 2 * (1 - cos(2 pi t / duration))` on `[0, duration]`.
    #[default]
    Cosine,
}

/// Ramp `f(t)` applied to the moving frequency pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampFunction {
    pub peak: f64,
    pub duration: f64,
    pub shape: RampShape,
}

impl RampFunction {
    pub fn new(peak: f64, duration: f64) -> Result<Self> {
        if !(peak >= 0.0) || !peak.is_finite() {
            return Err(Error::InvalidSchedule(alloc::format!("ramp peak {peak} must be >= 0")));
        }
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::InvalidSchedule(alloc::format!(
                "ramp duration {duration} must be > 0"
            )));
        }
        Ok(RampFunction {
            peak,
            duration,
            shape: RampShape::Cosine,
        })
    }

    /// `f(t)`, zero outside `[0, duration]`.
    pub fn value(&self, t: f64) -> f64 {
        if !(0.0..=self.duration).contains(&t) {
            return 0.0;
        }
        match self.shape {
            RampShape::Cosine => 0.5 * self.peak * (1.0 - (2.0 * PI * t / self.duration).cos()),
        }
    }

    /// `df/dt`, zero outside `[0, duration]`.
    pub fn rate(&self, t: f64) -> f64 {
        if !(0.0..=self.duration).contains(&t) {
            return 0.0;
        }
        match self.shape {
            RampShape::Cosine => {
                let k = 2.0 * PI / self.duration;
                0.5 * self.peak * k * (k * t).sin()
            }
        }
    }
}

/// Order in which the two trap pairs are moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransportMode {
    /// Middle-right gap closes first (`tau` later for left-middle).
    #[default]
    CounterIntuitive,
    /// Left-middle gap closes first.
    Intuitive,
}

/// Complementary tanh shifts of `w2` and `w6` centred on `T / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningProfile {
    /// Steepness (1 / time).
    pub kappa: f64,
    /// Total shift (angular frequency).
    pub delta_omega0: f64,
}

impl DetuningProfile {
    pub fn new(kappa: f64, delta_omega0: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidSchedule(alloc::format!("kappa {kappa} must be >= 0")));
        }
        if !delta_omega0.is_finite() {
            return Err(Error::InvalidSchedule("delta_omega0 must be finite".into()));
        }
        Ok(DetuningProfile {
            kappa,
            delta_omega0,
        })
    }

    /// `(dw2, dw6)` at time `t` of a sequence of length `total`.
    ///
    /// `dw6` is computed as `delta_omega0 - dw2`, so the two always add up to
    /// `delta_omega0` exactly.
    pub fn values(&self, t: f64, total: f64) -> (f64, f64) {
        let tt = t - 0.5 * total;
        let dw2 = 0.5 * (1.0 - (self.kappa * tt).tanh()) * self.delta_omega0;
        (dw2, self.delta_omega0 - dw2)
    }

    /// `(d dw2 / dt, d dw6 / dt)`.
    pub fn rates(&self, t: f64, total: f64) -> (f64, f64) {
        let c = (self.kappa * (t - 0.5 * total)).cosh();
        let r = 0.5 * self.kappa * self.delta_omega0 / (c * c);
        (-r, r)
    }
}

/// Frequency trajectories of the six-frequency comb.
#[derive(Debug, Clone, PartialEq)]
pub struct CtapSchedule {
    initial: [f64; 6],
    tau: f64,
    total: f64,
    mode: TransportMode,
    ramp: RampFunction,
    detuning: Option<DetuningProfile>,
}

impl CtapSchedule {
    /// `peak` is the ramp amplitude; the ramp lasts `total - tau`.
    pub fn new(
        initial: [f64; 6],
        tau: f64,
        total: f64,
        mode: TransportMode,
        peak: f64,
        detuning: Option<DetuningProfile>,
    ) -> Result<Self> {
        if initial.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidSchedule("initial frequencies must be finite".into()));
        }
        if let Some(i) = initial.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidSchedule(alloc::format!(
                "initial frequencies must increase (w{} >= w{})",
                i + 1,
                i + 2
            )));
        }
        let spacing = initial[2] - initial[1];
        for k in 2..5 {
            let d = initial[k + 1] - initial[k];
            if (d - spacing).abs() > 1e-9 * spacing.abs() {
                return Err(Error::InvalidSchedule(alloc::format!(
                    "w2..w6 must be uniformly spaced (w{}-w{} = {d}, expected {spacing})",
                    k + 2,
                    k + 1
                )));
            }
        }
        if !(tau > 0.0 && tau < total) || !total.is_finite() {
            return Err(Error::InvalidSchedule(alloc::format!(
                "need 0 < tau < T (tau = {tau}, T = {total})"
            )));
        }
        if peak >= 2.0 * spacing {
            return Err(Error::InvalidSchedule(alloc::format!(
                "ramp peak {peak} closes the gaps completely (spacing {spacing})"
            )));
        }
        let ramp = RampFunction::new(peak, total - tau)?;
        Ok(CtapSchedule {
            initial,
            tau,
            total,
            mode,
            ramp,
            detuning,
        })
    }

    /// Chooses the ramp peak so that the trap spacing dips to `min_gap`.
    ///
    /// The gaps are `spacing - f / 2`, hence `peak = 2 (spacing - min_gap)`.
    pub fn from_closest_approach(
        initial: [f64; 6],
        tau: f64,
        total: f64,
        mode: TransportMode,
        min_gap: f64,
        detuning: Option<DetuningProfile>,
    ) -> Result<Self> {
        let spacing = initial[2] - initial[1];
        if !(min_gap > 0.0 && min_gap <= spacing) {
            return Err(Error::InvalidSchedule(alloc::format!(
                "closest approach {min_gap} must lie in (0, {spacing}]"
            )));
        }
        Self::new(initial, tau, total, mode, 2.0 * (spacing - min_gap), detuning)
    }

    pub fn initial(&self) -> &[f64; 6] {
        &self.initial
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mode(&self) -> TransportMode {
        self.mode
    }

    pub fn ramp(&self) -> &RampFunction {
        &self.ramp
    }

    pub fn detuning(&self) -> Option<&DetuningProfile> {
        self.detuning.as_ref()
    }

    /// Uniform spacing of `w2..w6` at `t = 0`.
    pub fn spacing(&self) -> f64 {
        self.initial[2] - self.initial[1]
    }

    /// Smallest gap reached during the sequence.
    pub fn min_gap(&self) -> f64 {
        self.spacing() - 0.5 * self.ramp.peak
    }

    /// Same sequence with another detuning profile.
    pub fn with_detuning(&self, detuning: Option<DetuningProfile>) -> Self {
        CtapSchedule {
            detuning,
            ..self.clone()
        }
    }

    /// Same sequence with another mode.
    pub fn with_mode(&self, mode: TransportMode) -> Self {
        CtapSchedule {
            mode,
            ..self.clone()
        }
    }

    /// Same sequence stretched to `total`, keeping `tau / T` fixed.
    pub fn with_total(&self, total: f64) -> Result<Self> {
        let tau = self.tau * total / self.total;
        Self::new(
            self.initial,
            tau,
            total,
            self.mode,
            self.ramp.peak,
            self.detuning,
        )
    }

    /// Ramp values `(f_first, f_second)`: the first pair moves from `t = 0`,
    /// the second after `tau`.
    fn pulses(&self, t: f64) -> (f64, f64) {
        let first = self.ramp.value(t);
        let second = if t >= self.tau {
            self.ramp.value(t - self.tau)
        } else {
            0.0
        };
        (first, second)
    }

    fn pulse_rates(&self, t: f64) -> (f64, f64) {
        let first = self.ramp.rate(t);
        let second = if t >= self.tau {
            self.ramp.rate(t - self.tau)
        } else {
            0.0
        };
        (first, second)
    }

    /// Ramp values `(f_mr, f_lm)` driving the middle-right and the
    /// left-middle gaps.
    fn gap_pulses(&self, t: f64) -> (f64, f64) {
        let (first, second) = self.pulses(t);
        match self.mode {
            TransportMode::CounterIntuitive => (first, second),
            TransportMode::Intuitive => (second, first),
        }
    }

    fn combine(w: &[f64; 6], f_mr: f64, f_lm: f64, d2: f64, d6: f64) -> [f64; 6] {
        [
            w[0],
            w[1] - d2,
            w[2] - 0.5 * f_lm,
            w[3] - f_lm,
            w[4] - 0.5 * f_mr - f_lm,
            w[5] - f_mr - f_lm + d6,
        ]
    }

    /// Unchecked frequencies at `t`.
    pub fn frequencies_unchecked(&self, t: f64) -> [f64; 6] {
        let (f_mr, f_lm) = self.gap_pulses(t);
        let (d2, d6) = match &self.detuning {
            Some(d) => d.values(t, self.total),
            None => (0.0, 0.0),
        };
        Self::combine(&self.initial, f_mr, f_lm, d2, d6)
    }

    /// The six frequencies at `t` in `[0, T]`.
    pub fn frequencies_at(&self, t: f64) -> Result<[f64; 6]> {
        if !(t >= 0.0 && t <= self.total) {
            return Err(Error::InvalidSchedule(alloc::format!(
                "time {t} outside [0, {}]",
                self.total
            )));
        }
        let w = self.frequencies_unchecked(t);
        if let Some(i) = w.windows(2).position(|p| !(p[1] > p[0])) {
            return Err(Error::CombCrossing { time: t, index: i });
        }
        Ok(w)
    }

    /// Time derivatives of the six frequencies.
    pub fn rates_at(&self, t: f64) -> [f64; 6] {
        let (r_first, r_second) = self.pulse_rates(t);
        let (r_mr, r_lm) = match self.mode {
            TransportMode::CounterIntuitive => (r_first, r_second),
            TransportMode::Intuitive => (r_second, r_first),
        };
        let (d2, d6) = match &self.detuning {
            Some(d) => d.rates(t, self.total),
            None => (0.0, 0.0),
        };
        Self::combine(&[0.0; 6], r_mr, r_lm, d2, d6)
    }

    /// `(w4 - w2, w6 - w4)`: distances between the left and middle, and the
    /// middle and right trap resonances.
    pub fn trap_separations(&self, t: f64) -> (f64, f64) {
        let w = self.frequencies_unchecked(t);
        (w[3] - w[1], w[5] - w[3])
    }

    /// Converts an SI schedule (s, rad/s) to internal units.
    pub fn scaled(&self, scaling: &UnitScaling) -> Result<Self> {
        let freq = |w: f64| scaling.to_dimensionless(w, QuantityKind::Frequency);
        let time = |t: f64| scaling.to_dimensionless(t, QuantityKind::Time);
        let detuning = match &self.detuning {
            Some(d) => Some(DetuningProfile::new(d.kappa * scaling.time, freq(d.delta_omega0))?),
            None => None,
        };
        Self::new(
            self.initial.map(freq),
            time(self.tau),
            time(self.total),
            self.mode,
            freq(self.ramp.peak),
            detuning,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::vec::Vec;

    fn published_initial() -> [f64; 6] {
        let w = |n: f64| 2.0 * PI * n * 1e7;
        [2.0 * PI * 1e6, w(2.0), w(3.0), w(4.0), w(5.0), w(6.0)]
    }

    fn published_schedule(mode: TransportMode) -> CtapSchedule {
        CtapSchedule::from_closest_approach(published_initial(), 0.0055, 0.11, mode, 2.0 * PI * 2e5, None)
            .unwrap()
    }

    #[test]
    fn ramp_endpoints_and_peak() {
        let r = RampFunction::new(3.0, 2.0).unwrap();
        assert_eq!(r.value(0.0), 0.0);
        assert_eq!(r.value(1.0), 3.0);
        assert!(r.value(2.0).abs() < 1e-15);
        assert_eq!(r.value(-0.1), 0.0);
        assert_eq!(r.value(2.1), 0.0);
        for i in 0..=200 {
            assert!(r.value(i as f64 * 0.01) >= 0.0);
        }
        // derivative against a central difference
        let h = 1e-6;
        for t in [0.3, 0.9, 1.7] {
            let fd = (r.value(t + h) - r.value(t - h)) / (2.0 * h);
            assert_relative_eq!(r.rate(t), fd, max_relative = 1e-8);
        }
    }

    #[test]
    fn peak_for_two_hundred_kilohertz() {
        let s = published_schedule(TransportMode::CounterIntuitive);
        assert_relative_eq!(s.ramp().peak, 2.0 * (1e7 - 2e5) * 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(s.ramp().duration, 0.11 - 0.0055, max_relative = 1e-15);
    }

    #[test]
    fn starts_at_initial_comb() {
        let s = published_schedule(TransportMode::CounterIntuitive);
        assert_eq!(s.frequencies_at(0.0).unwrap(), published_initial());
    }

    #[test]
    fn only_right_pair_moves_before_delay() {
        let s = published_schedule(TransportMode::CounterIntuitive);
        let w0 = published_initial();
        let w = s.frequencies_at(0.003).unwrap();
        assert_eq!(w[0], w0[0]);
        assert_eq!(w[1], w0[1]);
        assert_eq!(w[2], w0[2]);
        assert_eq!(w[3], w0[3]);
        assert!(w[4] < w0[4]);
        assert!(w[5] < w0[5]);
    }

    #[test]
    fn closest_approach_at_ramp_midpoint() {
        let s = published_schedule(TransportMode::CounterIntuitive);
        let t = 0.5 * (0.11 - 0.0055);
        let w = s.frequencies_at(t).unwrap();
        assert_relative_eq!(w[4] - w[3], 2.0 * PI * 2e5, max_relative = 1e-6);
        assert_relative_eq!(w[5] - w[4], 2.0 * PI * 2e5, max_relative = 1e-6);
        // and it never gets closer
        for i in 0..=1000 {
            let w = s.frequencies_at(0.11 * i as f64 / 1000.0).unwrap();
            for k in 1..5 {
                assert!(w[k + 1] - w[k] >= 2.0 * PI * 2e5 * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn right_gap_trace_leads_left_gap_trace_by_tau() {
        let s = published_schedule(TransportMode::CounterIntuitive);
        let tau = s.tau();
        for i in 0..=500 {
            let t = (0.11 - tau) * i as f64 / 500.0;
            let a = s.frequencies_at(t).unwrap();
            let b = s.frequencies_at(t + tau).unwrap();
            // w6 - w5 at t equals w4 - w3 at t + tau
            assert_relative_eq!(a[5] - a[4], b[3] - b[2], max_relative = 1e-9);
        }
    }

    #[test]
    fn intuitive_mode_closes_left_gap_first() {
        let s = published_schedule(TransportMode::Intuitive);
        let w0 = published_initial();
        let w = s.frequencies_at(0.003).unwrap();
        assert!(w[3] - w[1] < w0[3] - w0[1]);
        assert_relative_eq!(w[5] - w[3], w0[5] - w0[3], max_relative = 1e-12);
        let t = 0.5 * (0.11 - 0.0055);
        let w = s.frequencies_at(t).unwrap();
        assert_relative_eq!(w[3] - w[2], 2.0 * PI * 2e5, max_relative = 1e-6);
    }

    #[test]
    fn comb_stays_ordered() {
        for mode in [TransportMode::CounterIntuitive, TransportMode::Intuitive] {
            let d = DetuningProfile::new(100.0, 2.0 * PI * 1.5e3).unwrap();
            let s = published_schedule(mode).with_detuning(Some(d));
            for i in 0..=20_000 {
                s.frequencies_at(0.11 * i as f64 / 20_000.0).unwrap();
            }
        }
    }

    #[test]
    fn crossing_is_reported_with_time() {
        // a large detuning pushes w2 below w1 at the start
        let d = DetuningProfile::new(100.0, 2.0 * PI * 5e7).unwrap();
        let s = published_schedule(TransportMode::CounterIntuitive).with_detuning(Some(d));
        match s.frequencies_at(0.0) {
            Err(Error::CombCrossing { time, index }) => {
                assert_eq!(time, 0.0);
                assert_eq!(index, 0);
            }
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn detuning_values() {
        let d = DetuningProfile::new(100.0, 1.0).unwrap();
        assert_eq!(d.values(0.055, 0.11), (0.5, 0.5));
        let (a, b) = d.values(0.0, 0.11);
        // 0.5 * (1 + tanh(5.5)) evaluated with mpmath
        assert_relative_eq!(a, 0.999_983_298_578_152_5, max_relative = 1e-14);
        assert_eq!(a + b, 1.0);
        let steep = DetuningProfile::new(1e6, 1.0).unwrap();
        let (a, b) = steep.values(0.0551, 0.11);
        assert!(a < 1e-12 && (b - 1.0).abs() < 1e-12);
        let h = 1e-7;
        let (r2, r6) = d.rates(0.05, 0.11);
        let fd = (d.values(0.05 + h, 0.11).0 - d.values(0.05 - h, 0.11).0) / (2.0 * h);
        assert_relative_eq!(r2, fd, max_relative = 1e-6);
        assert_eq!(r2, -r6);
    }

    #[test]
    fn zero_detuning_reduces_to_plain_schedule() {
        let plain = published_schedule(TransportMode::CounterIntuitive);
        let zero = plain.with_detuning(Some(DetuningProfile::new(100.0, 0.0).unwrap()));
        for i in 0..=100 {
            let t = 0.11 * i as f64 / 100.0;
            let a = plain.frequencies_at(t).unwrap();
            let b = zero.frequencies_at(t).unwrap();
            for k in 0..6 {
                assert_eq!(a[k].to_bits(), b[k].to_bits());
            }
        }
    }

    #[test]
    fn detuning_shifts_outer_traps_only() {
        let d = DetuningProfile::new(100.0, 7.0).unwrap();
        let plain = published_schedule(TransportMode::CounterIntuitive);
        let det = plain.with_detuning(Some(d));
        let t = 0.03;
        let a = plain.frequencies_at(t).unwrap();
        let b = det.frequencies_at(t).unwrap();
        let (d2, d6) = d.values(t, 0.11);
        assert_relative_eq!(a[1] - b[1], d2, max_relative = 1e-6);
        assert_relative_eq!(b[5] - a[5], d6, max_relative = 1e-6);
        for k in [0, 2, 3, 4] {
            assert_eq!(a[k], b[k]);
        }
    }

    #[test]
    fn rates_match_finite_differences() {
        let d = DetuningProfile::new(300.0, 2.0 * PI * 1.5e3).unwrap();
        for mode in [TransportMode::CounterIntuitive, TransportMode::Intuitive] {
            let s = published_schedule(mode).with_detuning(Some(d));
            for t in [0.004, 0.02, 0.06, 0.1] {
                let h = 1e-7;
                let a = s.frequencies_at(t + h).unwrap();
                let b = s.frequencies_at(t - h).unwrap();
                let r = s.rates_at(t);
                for k in 0..6 {
                    let fd = (a[k] - b[k]) / (2.0 * h);
                    assert!((r[k] - fd).abs() <= 1e-5 * fd.abs().max(1e3), "k={k}: {} vs {fd}", r[k]);
                }
            }
        }
    }

    #[test]
    fn validation() {
        let w = published_initial();
        let m = TransportMode::CounterIntuitive;
        assert!(CtapSchedule::new(w, 0.0, 0.11, m, 1.0, None).is_err());
        assert!(CtapSchedule::new(w, 0.2, 0.11, m, 1.0, None).is_err());
        let mut uneven = w;
        uneven[5] += 1e3;
        assert!(CtapSchedule::new(uneven, 0.01, 0.11, m, 1.0, None).is_err());
        let mut unordered = w;
        unordered[0] = unordered[2];
        assert!(CtapSchedule::new(unordered, 0.01, 0.11, m, 1.0, None).is_err());
        assert!(CtapSchedule::from_closest_approach(w, 0.01, 0.11, m, 0.0, None).is_err());
        let s = published_schedule(m);
        assert!(s.frequencies_at(-1e-9).is_err());
        assert!(s.frequencies_at(0.11 + 1e-9).is_err());
    }

    #[test]
    fn scaling_preserves_shape() {
        let s = published_schedule(TransportMode::CounterIntuitive)
            .with_detuning(Some(DetuningProfile::new(100.0, 2.0 * PI * 1.5e3).unwrap()));
        let scaling = UnitScaling::new(1e-6, 4e-6).unwrap();
        let d = s.scaled(&scaling).unwrap();
        assert_relative_eq!(d.total(), 0.11 / 4e-6, max_relative = 1e-14);
        let ts: Vec<f64> = (0..=10).map(|i| 0.011 * i as f64).collect();
        for t in ts {
            let a = s.frequencies_at(t).unwrap();
            let b = d.frequencies_at(t / 4e-6).unwrap();
            for k in 0..6 {
                assert_relative_eq!(a[k] * 4e-6, b[k], max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn stretching_keeps_delay_fraction() {
        let s = published_schedule(TransportMode::CounterIntuitive);
        let l = s.with_total(0.11 * 1.05).unwrap();
        assert_relative_eq!(l.tau() / l.total(), s.tau() / s.total(), max_relative = 1e-14);
        assert_eq!(l.ramp().peak, s.ramp().peak);
    }
}
