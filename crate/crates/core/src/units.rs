//! Physical constants, atomic species and the SI <-> dimensionless scaling.
//!
//! All numerics in this crate run in units where `hbar = 1`: energies are
//! measured in `hbar / time_scale`, frequencies in `1 / time_scale`. With the
//! default (harmonic-oscillator) scaling the atomic mass is 1 as well.

use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Bohr magneton, J/T.
    pub mu_b: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        mu_b: 9.274_010_078_3e-24,
    };
}

pub const HBAR: f64 = PhysicalConstants::CODATA.hbar;
pub const BOHR_MAGNETON: f64 = PhysicalConstants::CODATA.mu_b;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(i32);

impl HalfInteger {
    pub const fn from_twice(twice: i32) -> Self {
        HalfInteger(twice)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Parses the nearest half-integer; fails if `value` is not one.
    pub fn try_from_f64(value: f64) -> Result<Self> {
        let twice = (2.0 * value).round();
        if !value.is_finite() || (2.0 * value - twice).abs() > 1e-9 {
            return Err(Error::Domain {
                what: "half-integer quantum number",
                value,
            });
        }
        Ok(HalfInteger(twice as i32))
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Atomic species: mass and the hyperfine sublevels coupled by the rf field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpecies {
    /// kg
    pub mass: f64,
    /// Landé g-factor of the hyperfine level (signed).
    pub g_f: f64,
    pub f: HalfInteger,
    pub m_f: HalfInteger,
    pub m_f_prime: HalfInteger,
}

impl AtomSpecies {
    pub fn new(
        mass: f64,
        g_f: f64,
        f: HalfInteger,
        m_f: HalfInteger,
        m_f_prime: HalfInteger,
    ) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Domain {
                what: "atomic mass",
                value: mass,
            });
        }
        if !g_f.is_finite() || g_f == 0.0 {
            return Err(Error::Domain {
                what: "g-factor",
                value: g_f,
            });
        }
        if f.twice() < 0 {
            return Err(Error::Domain {
                what: "total spin F",
                value: f.value(),
            });
        }
        for m in [m_f, m_f_prime] {
            if m.twice().abs() > f.twice() || (m.twice() - f.twice()) % 2 != 0 {
                return Err(Error::Domain {
                    what: "magnetic quantum number",
                    value: m.value(),
                });
            }
        }
        Ok(AtomSpecies {
            mass,
            g_f,
            f,
            m_f,
            m_f_prime,
        })
    }

    /// ⁸⁷Rb treated as an effective spin-1/2 with `g_F = -1/2`.
    pub fn rubidium87() -> Self {
        AtomSpecies {
            mass: 86.909_180_531 * ATOMIC_MASS_UNIT,
            g_f: -0.5,
            f: HalfInteger::from_twice(1),
            m_f: HalfInteger::from_twice(1),
            m_f_prime: HalfInteger::from_twice(-1),
        }
    }
}

impl Default for AtomSpecies {
    fn default() -> Self {
        Self::rubidium87()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuantityKind {
    Length,
    Time,
    Energy,
    Frequency,
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "length" => Ok(QuantityKind::Length),
            "time" => Ok(QuantityKind::Time),
            "energy" => Ok(QuantityKind::Energy),
            "frequency" => Ok(QuantityKind::Frequency),
            _ => Err(Error::Domain {
                what: "quantity kind",
                value: f64::NAN,
            }),
        }
    }
}

/// Scale factors between SI and the internal unit system.
///
/// `energy = hbar / time` always holds, so `hbar` is 1 internally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScaling {
    pub length: f64,
    pub time: f64,
    pub energy: f64,
}

impl UnitScaling {
    pub fn new(length: f64, time: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain {
                what: "length scale",
                value: length,
            });
        }
        if !(time > 0.0) || !time.is_finite() {
            return Err(Error::Domain {
                what: "time scale",
                value: time,
            });
        }
        Ok(UnitScaling {
            length,
            time,
            energy: HBAR / time,
        })
    }

    fn factor(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Length => self.length,
            QuantityKind::Time => self.time,
            QuantityKind::Energy => self.energy,
            QuantityKind::Frequency => 1.0 / self.time,
        }
    }

    pub fn to_dimensionless(&self, value: f64, kind: QuantityKind) -> f64 {
        value / self.factor(kind)
    }

    pub fn from_dimensionless(&self, value: f64, kind: QuantityKind) -> f64 {
        value * self.factor(kind)
    }

    /// Atomic mass in internal units (`hbar = 1`).
    pub fn dimensionless_mass(&self, species: &AtomSpecies) -> f64 {
        species.mass * self.length * self.length / (self.energy * self.time * self.time)
    }

    /// Coefficient `c` of the kinetic energy `c k^2`, i.e. `hbar^2 / 2m`.
    pub fn kinetic_coefficient(&self, species: &AtomSpecies) -> f64 {
        0.5 / self.dimensionless_mass(species)
    }
}

/// Harmonic-oscillator units of a trap with angular frequency `omega_ref`.
pub fn default_scaling(species: &AtomSpecies, omega_ref: f64) -> Result<UnitScaling> {
    if !(omega_ref > 0.0) || !omega_ref.is_finite() {
        return Err(Error::Domain {
            what: "reference frequency",
            value: omega_ref,
        });
    }
    let length = (HBAR / (species.mass * omega_ref)).sqrt();
    UnitScaling::new(length, 1.0 / omega_ref)
}
