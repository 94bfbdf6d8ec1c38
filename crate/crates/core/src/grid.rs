//! Uniform periodic grids and wavefunctions on them.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Uniform grid `x_i = x_min + i dx`, `dx = (x_max - x_min) / n`, periodic
/// with period `x_max - x_min` (so `x_max` itself is not a grid point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 256;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(alloc::format!(
                "need x_min < x_max (got {x_min}, {x_max})"
            )));
        }
        if n < Self::MIN_POINTS || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!(
                "point count {n} must be a power of two >= {}",
                Self::MIN_POINTS
            )));
        }
        Ok(Grid1D { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn position(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.position(i)).collect()
    }

    /// Index of the last grid point at or left of `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.spacing()).floor();
        if i < 0.0 {
            0
        } else {
            (i as usize).min(self.n - 1)
        }
    }
}

/// Complex amplitudes on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: Grid1D,
    pub amplitudes: Vec<C64>,
}

impl Wavefunction {
    pub fn new(grid: Grid1D, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidGrid(alloc::format!(
                "{} amplitudes for {} grid points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Wavefunction { grid, amplitudes })
    }

    /// Normalised Gaussian `exp(-(x - x0)^2 / (4 sigma^2) + i k0 x)`, so that
    /// the density has standard deviation `sigma`.
    pub fn gaussian(grid: Grid1D, x0: f64, sigma: f64, k0: f64) -> Self {
        let amplitudes = grid
            .positions()
            .iter()
            .map(|x| {
                let u = x - x0;
                C64::from_polar((-u * u / (4.0 * sigma * sigma)).exp(), k0 * x)
            })
            .collect();
        let mut psi = Wavefunction { grid, amplitudes };
        psi.normalize();
        psi
    }

    /// `sum |psi|^2 dx`
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let s = 1.0 / n.sqrt();
            for z in self.amplitudes.iter_mut() {
                *z *= s;
            }
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `<self | other>` with the grid measure.
    pub fn overlap(&self, other: &Wavefunction) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.spacing()
    }

    /// `|<self | other>|^2` for normalised states.
    pub fn fidelity(&self, other: &Wavefunction) -> f64 {
        self.overlap(other).norm_sqr()
    }

    /// Largest density among the `width` outermost points on either side.
    pub fn edge_density(&self, width: usize) -> f64 {
        let n = self.amplitudes.len();
        let w = width.clamp(1, n / 2);
        self.amplitudes[..w]
            .iter()
            .chain(&self.amplitudes[n - w..])
            .map(|z| z.norm_sqr())
            .fold(0.0, f64::max)
    }

    /// `sum |psi|^2 dx` over the grid points with `lo <= x < hi`.
    pub fn probability_between(&self, lo: f64, hi: f64) -> f64 {
        let dx = self.grid.spacing();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let x = self.grid.position(*i);
                x >= lo && x < hi
            })
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            * dx
    }

    /// `<x>` and the standard deviation of the density.
    pub fn position_moments(&self) -> (f64, f64) {
        let dx = self.grid.spacing();
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, z) in self.amplitudes.iter().enumerate() {
            let x = self.grid.position(i);
            let p = z.norm_sqr() * dx;
            m0 += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / m0;
        (mean, (m2 / m0 - mean * mean).max(0.0).sqrt())
    }
}
