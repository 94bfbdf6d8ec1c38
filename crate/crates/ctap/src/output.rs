//! CSV files with a `#` comment header carrying provenance.
//!
//! Numbers are written in the shortest round-trip scientific form, so
//! identical runs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ctap_core::analysis::SweepResult;
use ctap_core::evolution::RunRecord;
use ctap_core::grid::Wavefunction;
use ctap_core::three_level::ThreeLevelRun;
use ctap_core::units::QuantityKind;

use crate::experiment::Experiment;

/// Comment lines written above the column header.
#[derive(Debug, Clone, Default)]
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command: &str, config_hash: &str) -> Self {
        Header {
            lines: vec![format!("ctap {command}"), format!("config_sha256={config_hash}")],
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, format_args!("{value:e}"))
    }

    /// Scaling and grid of `exp`.
    pub fn experiment(&mut self, exp: &Experiment) -> &mut Self {
        self.num("omega_ref_rad_s", exp.omega_ref)
            .num("length_scale_m", exp.scaling.length)
            .num("time_scale_s", exp.scaling.time)
            .push("grid_points", exp.grid.len())
            .num("x_min_m", exp.config.grid.x_min_m)
            .num("x_max_m", exp.config.grid.x_max_m)
    }
}

pub fn write_csv<R, I>(path: &Path, header: &Header, columns: &[&str], rows: I) -> std::io::Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut out = BufWriter::new(File::create(path)?);
    for line in &header.lines {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.as_ref().iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()
}

pub fn write_potential(path: &Path, header: &Header, exp: &Experiment, values: &[f64]) -> std::io::Result<()> {
    let s = &exp.scaling;
    let rows = (0..exp.grid.len()).map(|i| {
        [
            s.from_dimensionless(exp.grid.position(i), QuantityKind::Length),
            s.from_dimensionless(values[i], QuantityKind::Energy),
        ]
    });
    write_csv(path, header, &["x_m", "V_J"], rows)
}

/// `psi` in SI (`m^-1/2`).
pub fn write_wavefunction(path: &Path, header: &Header, exp: &Experiment, psi: &Wavefunction) -> std::io::Result<()> {
    let s = &exp.scaling;
    let amp = 1.0 / s.length.sqrt();
    let rows = psi.amplitudes.iter().enumerate().map(|(i, z)| {
        [
            s.from_dimensionless(psi.grid.position(i), QuantityKind::Length),
            z.re * amp,
            z.im * amp,
            z.norm_sqr() / s.length,
        ]
    });
    write_csv(path, header, &["x_m", "re_psi", "im_psi", "density"], rows)
}

pub fn write_run(path: &Path, header: &Header, exp: &Experiment, record: &RunRecord) -> std::io::Result<()> {
    let s = &exp.scaling;
    let rows = (0..record.times.len()).map(|i| {
        let p = record.populations[i];
        [
            s.from_dimensionless(record.times[i], QuantityKind::Time),
            p[0],
            p[1],
            p[2],
            record.norms[i],
            s.from_dimensionless(record.chemical_potentials[i], QuantityKind::Energy),
        ]
    });
    write_csv(path, header, &["t_s", "P_L", "P_M", "P_R", "norm", "mu_J"], rows)
}

/// Comb frequencies at the sample times of `record`.
pub fn write_schedule(path: &Path, header: &Header, exp: &Experiment, times: &[f64]) -> std::io::Result<()> {
    let s = &exp.scaling;
    let rows = times.iter().map(|t| {
        let w = exp.schedule.frequencies_unchecked(*t);
        let mut row = [0.0; 7];
        row[0] = s.from_dimensionless(*t, QuantityKind::Time);
        for k in 0..6 {
            row[k + 1] = s.from_dimensionless(w[k], QuantityKind::Frequency);
        }
        row
    });
    write_csv(
        path,
        header,
        &["t_s", "w1_rad_s", "w2_rad_s", "w3_rad_s", "w4_rad_s", "w5_rad_s", "w6_rad_s"],
        rows,
    )
}

/// Failed rows hold NaN and are listed in the header.
pub fn write_sweep(path: &Path, header: &Header, result: &SweepResult) -> std::io::Result<()> {
    let mut header = header.clone();
    for (i, row) in result.rows.iter().enumerate() {
        if let Err(e) = &row.outcome {
            header.push(&format!("failed_row_{i}"), e);
        }
    }
    let rows = result.rows.iter().map(|r| match &r.outcome {
        Ok(p) => [r.value, p[0], p[1], p[2], 1.0 - p[2]],
        Err(_) => [r.value, f64::NAN, f64::NAN, f64::NAN, f64::NAN],
    });
    write_csv(path, &header, &["value", "P_L", "P_M", "P_R", "loss"], rows)
}

pub fn write_three_level(path: &Path, header: &Header, run: &ThreeLevelRun) -> std::io::Result<()> {
    let rows = run
        .times
        .iter()
        .zip(&run.populations)
        .map(|(t, p)| [*t, p[0], p[1], p[2]]);
    write_csv(path, header, &["t", "P_L", "P_M", "P_R"], rows)
}

pub fn write_couplings(path: &Path, header: &Header, run: &ThreeLevelRun) -> std::io::Result<()> {
    let rows = run.times.iter().zip(&run.couplings).map(|(t, c)| [*t, c.j_lm, c.j_mr]);
    write_csv(path, header, &["t", "J_LM", "J_MR"], rows)
}

pub fn snapshot_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("snapshot_{index:02}.csv"))
}
