use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::fft::{wavenumbers, Fft};
use crate::grid::{Grid1D, Wavefunction};
use crate::{Result, C64};

/// Kinetic and potential sub-steps on a fixed grid.
#[derive(Debug, Clone)]
pub struct SplitStep {
    fft: Fft,
    /// `c k^2` per FFT bin
    kinetic_energy: Vec<f64>,
    dx: f64,
    buffer: Vec<C64>,
    /// cached `exp(-i c k^2 dt s)` for the last `(dt, s)`
    phases: Vec<C64>,
    phase_key: (f64, f64),
}

impl SplitStep {
    pub fn new(grid: Grid1D, kinetic: f64) -> Result<Self> {
        let fft = Fft::new(grid.len())?;
        let kinetic_energy = wavenumbers(grid.len(), grid.spacing())
            .into_iter()
            .map(|k| kinetic * k * k)
            .collect();
        Ok(SplitStep {
            fft,
            kinetic_energy,
            dx: grid.spacing(),
            buffer: vec![C64::new(0.0, 0.0); grid.len()],
            phases: vec![C64::new(1.0, 0.0); grid.len()],
            phase_key: (f64::NAN, f64::NAN),
        })
    }

    /// `psi <- exp(-i T dt fraction) psi`
    pub fn kinetic(&mut self, psi: &mut [C64], dt: f64, fraction: f64) {
        if self.phase_key != (dt, fraction) {
            for (p, e) in self.phases.iter_mut().zip(&self.kinetic_energy) {
                *p = C64::from_polar(1.0, -e * dt * fraction);
            }
            self.phase_key = (dt, fraction);
        }
        self.fft.forward(psi);
        for (z, p) in psi.iter_mut().zip(&self.phases) {
            *z *= p;
        }
        self.fft.inverse(psi);
    }

    /// `psi <- exp(-i (V + g |psi|^2) dt) psi`
    pub fn potential(&self, psi: &mut [C64], v: &[f64], g: f64, dt: f64) {
        for (z, v) in psi.iter_mut().zip(v) {
            let angle = -(v + g * z.norm_sqr()) * dt;
            *z *= C64::new(angle.cos(), angle.sin());
        }
    }

    /// `dtau` imaginary time Strang steps, renormalising after each.
    pub fn imaginary_steps(&mut self, psi: &mut Wavefunction, v: &[f64], g: f64, dtau: f64, steps: usize) {
        let half: Vec<f64> = self
            .kinetic_energy
            .iter()
            .map(|e| (-0.5 * e * dtau).exp())
            .collect();
        for _ in 0..steps {
            let a = &mut psi.amplitudes;
            self.fft.forward(a);
            for (z, h) in a.iter_mut().zip(&half) {
                *z *= *h;
            }
            self.fft.inverse(a);
            for (z, v) in a.iter_mut().zip(v) {
                *z *= (-(v + g * z.norm_sqr()) * dtau).exp();
            }
            self.fft.forward(a);
            for (z, h) in a.iter_mut().zip(&half) {
                *z *= *h;
            }
            self.fft.inverse(a);
            psi.normalize();
        }
    }

    /// `H psi` with `H = -c d^2/dx^2 + V + g |psi|^2`.
    pub fn apply_hamiltonian(&mut self, psi: &[C64], v: &[f64], g: f64, out: &mut [C64]) {
        self.buffer.copy_from_slice(psi);
        self.fft.forward(&mut self.buffer);
        for (z, e) in self.buffer.iter_mut().zip(&self.kinetic_energy) {
            *z *= *e;
        }
        self.fft.inverse(&mut self.buffer);
        for (((o, t), z), v) in out.iter_mut().zip(&self.buffer).zip(psi).zip(v) {
            *o = t + z * (v + g * z.norm_sqr());
        }
    }

    /// `(<psi|H|psi>, <psi|psi>)` with the grid measure.
    pub fn energy(&mut self, psi: &[C64], v: &[f64], g: f64) -> (f64, f64) {
        self.buffer.copy_from_slice(psi);
        self.fft.forward(&mut self.buffer);
        let n = psi.len() as f64;
        let kinetic: f64 = self
            .buffer
            .iter()
            .zip(&self.kinetic_energy)
            .map(|(z, e)| e * z.norm_sqr())
            .sum::<f64>()
            / n;
        let mut rest = 0.0;
        let mut norm = 0.0;
        for (z, v) in psi.iter().zip(v) {
            let d = z.norm_sqr();
            rest += (v + g * d) * d;
            norm += d;
        }
        ((kinetic + rest) * self.dx, norm * self.dx)
    }

    /// `(mu, ||(H - mu) psi||)` for a normalised `psi`.
    pub fn residual(&mut self, psi: &[C64], v: &[f64], g: f64) -> (f64, f64) {
        let mut h = vec![C64::new(0.0, 0.0); psi.len()];
        self.apply_hamiltonian(psi, v, g, &mut h);
        let mu = psi
            .iter()
            .zip(&h)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>()
            * self.dx;
        let r = h
            .iter()
            .zip(psi)
            .map(|(hz, z)| (hz - z * mu).norm_sqr())
            .sum::<f64>()
            * self.dx;
        (mu, r.sqrt())
    }
}
