//! Builds the dimensionless solver objects described by a configuration
//! and runs them.

use ctap_core::analysis::{landau_zener_diagnostic, AdiabaticityEntry, SweepVariable};
use ctap_core::evolution::{
    grid_geometry, isolated_ground_state, propagate, CombPotential, GroundState, GroundStateOptions,
    PotentialFactory, PropagationOptions, RunRecord,
};
use ctap_core::grid::Grid1D;
use ctap_core::rf::{reference_trap_frequency, Branch, DressedPotential, MagneticField, RfComb, TrapGeometry};
use ctap_core::schedule::{CtapSchedule, DetuningProfile, TransportMode};
use ctap_core::three_level::{self, Couplings, OnSiteEnergies, SelfConsistent, ThreeLevelRun, ThreeState};
use ctap_core::units::{default_scaling, AtomSpecies, QuantityKind, UnitScaling};

use crate::config::{ConfigError, DetuningConfig, ExperimentConfig, Mode};
use crate::AppError;

/// A validated configuration together with its internal representation.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub species: AtomSpecies,
    /// Measured harmonic frequency of the initial left trap (rad/s).
    pub omega_ref: f64,
    pub scaling: UnitScaling,
    pub potential: DressedPotential,
    /// Schedule in internal units.
    pub schedule: CtapSchedule,
    pub grid: Grid1D,
    pub kinetic: f64,
    pub mass: f64,
    /// Internal mean-field coupling.
    pub g: f64,
}

fn config_err(path: &str) -> impl Fn(ctap_core::Error) -> AppError + '_ {
    move |e| AppError::Config(ConfigError::new(path, e.to_string()))
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, AppError> {
        config.validate()?;
        let species = config.species()?;
        let field = MagneticField::new(config.field.gradient_t_per_m).map_err(config_err("field"))?;
        let comb = RfComb::new(config.comb.omegas_rad_s.clone(), config.comb.rabi_rad_s).map_err(config_err("comb"))?;
        let omega_ref = reference_trap_frequency(&species, &field, &comb).map_err(config_err("comb"))?;
        let scaling = default_scaling(&species, omega_ref).map_err(config_err("comb"))?;
        let potential = DressedPotential::new(&species, &field, &comb, &scaling).map_err(config_err("comb"))?;
        let initial: [f64; 6] = config.comb.omegas_rad_s[..]
            .try_into()
            .expect("validated comb length");
        let mode = match config.schedule.mode {
            Mode::CounterIntuitive => TransportMode::CounterIntuitive,
            Mode::Intuitive => TransportMode::Intuitive,
        };
        let detuning = match &config.schedule.detuning {
            Some(DetuningConfig {
                kappa_per_s,
                delta_omega0_rad_s,
            }) => Some(DetuningProfile::new(*kappa_per_s, *delta_omega0_rad_s).map_err(config_err("schedule.detuning"))?),
            None => None,
        };
        let schedule_si = CtapSchedule::from_closest_approach(
            initial,
            config.schedule.tau_s,
            config.schedule.total_s,
            mode,
            config.schedule.min_gap_rad_s,
            detuning,
        )
        .map_err(config_err("schedule"))?;
        let schedule = schedule_si.scaled(&scaling).map_err(config_err("schedule"))?;
        let grid = Grid1D::new(
            scaling.to_dimensionless(config.grid.x_min_m, QuantityKind::Length),
            scaling.to_dimensionless(config.grid.x_max_m, QuantityKind::Length),
            config.grid.points,
        )
        .map_err(config_err("grid"))?;
        let mass = scaling.dimensionless_mass(&species);
        let kinetic = scaling.kinetic_coefficient(&species);
        let g = config.interaction.g1d_j_m / (scaling.energy * scaling.length);
        Ok(Experiment {
            config,
            species,
            omega_ref,
            scaling,
            potential,
            schedule,
            grid,
            kinetic,
            mass,
            g,
        })
    }

    pub fn factory(&self) -> CombPotential {
        CombPotential::new(self.potential.clone(), self.schedule.clone(), Branch::Upper)
    }

    pub fn time_to_internal(&self, t_s: f64) -> f64 {
        self.scaling.to_dimensionless(t_s, QuantityKind::Time)
    }

    pub fn time_to_si(&self, t: f64) -> f64 {
        self.scaling.from_dimensionless(t, QuantityKind::Time)
    }

    pub fn total(&self) -> f64 {
        self.schedule.total()
    }

    /// Potential on the grid at internal time `t`.
    pub fn potential_at(&self, t: f64) -> Result<Vec<f64>, AppError> {
        let mut v = vec![0.0; self.grid.len()];
        self.factory().fill(t, &self.grid.positions(), &mut v)?;
        Ok(v)
    }

    /// Trap geometry at internal time `t`.
    pub fn geometry_at(&self, t: f64) -> Result<TrapGeometry, AppError> {
        let v = self.potential_at(t)?;
        Ok(grid_geometry(&self.grid, &v, self.mass, 3)?)
    }

    pub fn ground_state_options(&self) -> GroundStateOptions {
        GroundStateOptions {
            tolerance: self.config.solver.ground_state_tolerance,
            ..GroundStateOptions::default()
        }
    }

    /// Ground state of the configured initial trap at `t = 0`.
    pub fn ground_state(&self) -> Result<GroundState, AppError> {
        Ok(isolated_ground_state(
            &mut self.factory(),
            0.0,
            self.grid,
            self.kinetic,
            self.g,
            self.config.solver.initial_well,
            &self.ground_state_options(),
        )?)
    }

    pub fn propagation_options(&self) -> PropagationOptions {
        let total = self.total();
        let mut o = PropagationOptions::new(self.time_to_internal(self.config.solver.dt_s), total);
        o.samples = self.config.output.samples;
        if !self.config.output.snapshot_times_s.is_empty() {
            o.snapshot_times = self
                .config
                .output
                .snapshot_times_s
                .iter()
                .map(|t| self.time_to_internal(*t).min(total))
                .collect();
        }
        o.g = self.g;
        o.edge_tolerance = self.config.solver.edge_tolerance;
        o
    }

    /// Ground-state preparation followed by the transport sequence.
    pub fn run_ctap(&self) -> Result<RunRecord, AppError> {
        let gs = self.ground_state()?;
        Ok(propagate(
            &gs.psi,
            &mut self.factory(),
            self.kinetic,
            self.total(),
            &self.propagation_options(),
        )?)
    }

    /// Adiabaticity figures of the comb sweep (internal units).
    pub fn landau_zener(&self) -> Vec<AdiabaticityEntry> {
        landau_zener_diagnostic(&self.schedule, self.potential.rabi(), 2001)
    }

    /// Configuration with one sweep variable replaced.
    pub fn config_with(config: &ExperimentConfig, variable: SweepVariable, value: f64) -> Result<ExperimentConfig, AppError> {
        let mut c = config.clone();
        match variable {
            SweepVariable::G1d => c.interaction.g1d_j_m = value,
            SweepVariable::Kappa => match &mut c.schedule.detuning {
                Some(d) => d.kappa_per_s = value,
                None => {
                    return Err(ConfigError::new("schedule.detuning", "a kappa sweep needs a detuning block").into())
                }
            },
            SweepVariable::DeltaOmega0 => match &mut c.schedule.detuning {
                Some(d) => d.delta_omega0_rad_s = value,
                None => {
                    return Err(ConfigError::new("schedule.detuning", "a delta_omega0 sweep needs a detuning block").into())
                }
            },
            SweepVariable::TotalTime => {
                let ratio = value / c.schedule.total_s;
                c.schedule.tau_s *= ratio;
                c.schedule.total_s = value;
                for t in c.output.snapshot_times_s.iter_mut() {
                    *t *= ratio;
                }
                c.output.potential_time_s *= ratio;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

/// Standalone three-mode run described by the `three_level` block.
pub fn run_three_level(config: &ExperimentConfig) -> Result<ThreeLevelRun, AppError> {
    let t = config
        .three_level
        .as_ref()
        .ok_or_else(|| ConfigError::new("three_level", "missing section"))?;
    let (lm, mr) = three_level::pulse_pair(
        t.peak_coupling_rad_s,
        t.total_s,
        t.width_s,
        t.delay_s,
        t.mode == Mode::CounterIntuitive,
    );
    let base = OnSiteEnergies::with_chemical_potentials(t.on_site_rad_s, t.mu_rad_s[0], t.mu_rad_s[1]);
    let sc = t.self_consistent_rad_s.map(|u| SelfConsistent { u });
    let couplings = |s: f64| Couplings {
        j_lm: lm.value(s),
        j_mr: mr.value(s),
    };
    Ok(three_level::integrate(
        couplings,
        |_, state: &ThreeState| match &sc {
            Some(sc) => sc.shift(base, state),
            None => base,
        },
        ThreeState::left(),
        t.total_s,
        t.dt_s,
        t.samples,
    )?)
}
