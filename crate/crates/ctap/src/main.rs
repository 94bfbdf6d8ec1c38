use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ctap::config::{ConfigError, Mode};
use ctap::experiment::run_three_level;
use ctap::output::{self, Header};
use ctap::{is_oscillatory, AppError, Experiment, ExperimentConfig};
use ctap_core::analysis::SweepSpec;
use ctap_core::units::QuantityKind;

#[derive(Parser)]
#[command(name = "ctap", version, about = "Transport of atoms through rf-dressed triple-well traps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dressed potential at `output.potential_time_s`.
    Potential(Common),
    /// Ground state of the initial trap.
    GroundState(Common),
    /// Full transport run with populations, snapshots and comb trace.
    Ctap(Common),
    /// Final populations over the `sweep` block.
    Sweep(Common),
    /// Three-mode model from the `three_level` block.
    ThreeLevel(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// `key.path=value`, applied before validation; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, AppError> {
        let config = ExperimentConfig::load(&self.config, &self.overrides)?;
        std::fs::create_dir_all(&self.out)?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                AppError::Config(c) => eprintln!("config error at {}: {}", c.path, c.message),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Potential(c) => potential(&c),
        Command::GroundState(c) => ground_state(&c),
        Command::Ctap(c) => ctap(&c),
        Command::Sweep(c) => sweep(&c),
        Command::ThreeLevel(c) => three_level(&c),
    }
}

fn header(command: &str, exp: &Experiment) -> Header {
    let mut h = Header::new(command, &exp.config.hash());
    h.experiment(exp);
    h
}

fn potential(c: &Common) -> Result<(), AppError> {
    let exp = Experiment::new(c.load()?)?;
    let t = exp.time_to_internal(exp.config.output.potential_time_s);
    let v = exp.potential_at(t)?;
    let geometry = exp.geometry_at(t)?;
    let mut h = header("potential", &exp);
    h.num("t_s", exp.config.output.potential_time_s);
    output::write_potential(&c.out.join("potential.csv"), &h, &exp, &v)?;
    let s = &exp.scaling;
    let minima: Vec<String> = geometry
        .minima_positions
        .iter()
        .map(|x| format!("{:e}", s.from_dimensionless(*x, QuantityKind::Length)))
        .collect();
    let depths: Vec<String> = geometry
        .minima_values
        .iter()
        .map(|v| format!("{:e}", s.from_dimensionless(*v, QuantityKind::Energy)))
        .collect();
    let barriers: Vec<String> = geometry
        .barrier_heights
        .iter()
        .map(|b| format!("{:e}", s.from_dimensionless(*b, QuantityKind::Energy)))
        .collect();
    eprintln!(
        "minima={} positions_m=[{}] minima_J=[{}] barrier_heights_J=[{}]",
        geometry.len(),
        minima.join(", "),
        depths.join(", "),
        barriers.join(", ")
    );
    Ok(())
}

fn ground_state(c: &Common) -> Result<(), AppError> {
    let exp = Experiment::new(c.load()?)?;
    let gs = exp.ground_state()?;
    let geometry = exp.geometry_at(0.0)?;
    let floor = geometry.minima_values[exp.config.solver.initial_well];
    let mu = exp.scaling.from_dimensionless(gs.mu, QuantityKind::Energy);
    let mut h = header("ground-state", &exp);
    h.num("mu_J", mu).num("residual", gs.residual).push("iterations", gs.steps);
    output::write_wavefunction(&c.out.join("ground_state.csv"), &h, &exp, &gs.psi)?;
    println!(
        "mu_J={mu:e} mu_above_minimum_over_hbar_omega={:.6} residual={:e}",
        gs.mu - floor,
        gs.residual
    );
    Ok(())
}

fn ctap(c: &Common) -> Result<(), AppError> {
    let exp = Experiment::new(c.load()?)?;
    let record = exp.run_ctap()?;
    let m = &record.metadata;
    let mut h = header("ctap", &exp);
    h.push("method", &m.method)
        .num("dt_s", exp.time_to_si(m.dt))
        .push("steps", m.steps)
        .num("g1d_J_m", exp.config.interaction.g1d_j_m)
        .num("max_phase_per_step", m.max_phase);
    if !record.fallback_samples.is_empty() {
        let list: Vec<String> = record.fallback_samples.iter().map(|i| i.to_string()).collect();
        h.push("region_fallback_samples", list.join(" "));
    }
    output::write_run(&c.out.join("populations.csv"), &h, &exp, &record)?;
    for (i, (t, psi)) in record.snapshots.iter().enumerate() {
        let mut hs = h.clone();
        hs.num("t_s", exp.time_to_si(*t));
        output::write_wavefunction(&output::snapshot_path(&c.out, i), &hs, &exp, psi)?;
    }
    if exp.config.output.schedule_trace {
        output::write_schedule(&c.out.join("schedule.csv"), &h, &exp, &record.times)?;
    }
    let p = record.final_populations();
    let flagged = exp.landau_zener().iter().filter(|e| e.flagged).count();
    let outcome = if is_oscillatory(&record.populations, 0.1) {
        "oscillatory"
    } else {
        "adiabatic"
    };
    println!(
        "final P_R={:.6} P_L={:.6} P_M={:.6} max_P_M={:.6} outcome={outcome} lz_flagged={flagged}",
        p[2],
        p[0],
        p[1],
        record.max_middle()
    );
    if exp.config.schedule.mode == Mode::Intuitive && outcome == "oscillatory" {
        eprintln!("intuitive ordering: population oscillates between neighbouring traps");
    }
    Ok(())
}

fn sweep(c: &Common) -> Result<(), AppError> {
    let config = c.load()?;
    let block = config
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::new("sweep", "missing section"))?;
    let variable = block.variable()?;
    let spec = SweepSpec::new(variable, block.values.clone()).map_err(|e| ConfigError::new("sweep.values", e.to_string()))?;
    let exp = Experiment::new(config.clone())?;
    let result = ctap::run_sweep(&config, &spec);
    let mut h = header("sweep", &exp);
    h.push("variable", variable.name());
    output::write_sweep(&c.out.join("sweep.csv"), &h, &result)?;
    for row in &result.rows {
        match &row.outcome {
            Ok(p) => println!("{}={:e} P_R={:.6}", variable.name(), row.value, p[2]),
            Err(e) => eprintln!("{}={:e} failed: {e}", variable.name(), row.value),
        }
    }
    if result.failures() == result.rows.len() {
        return Err(ctap_core::Error::InvalidSweep("every sweep row failed".into()).into());
    }
    let best = result
        .rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|p| (r.value, p[2])))
        .fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    println!(
        "best {}={:e} P_R={:.6} failed={}",
        variable.name(),
        best.0,
        best.1,
        result.failures()
    );
    Ok(())
}

fn three_level(c: &Common) -> Result<(), AppError> {
    let config = c.load()?;
    let run = run_three_level(&config)?;
    let mut h = Header::new("three-level", &config.hash());
    if let Some(t) = &config.three_level {
        h.num("dt", t.dt_s).push("method", "rk4");
    }
    write_pair(&c.out, &h, &run)?;
    let p = run.final_populations();
    println!("final P_R={:.6} P_L={:.6} P_M={:.6} max_P_M={:.6}", p[2], p[0], p[1], run.max_middle());
    Ok(())
}

fn write_pair(dir: &Path, h: &Header, run: &ctap_core::three_level::ThreeLevelRun) -> Result<(), AppError> {
    output::write_three_level(&dir.join("three_level.csv"), h, run)?;
    output::write_couplings(&dir.join("couplings.csv"), h, run)?;
    Ok(())
}
