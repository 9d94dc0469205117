//! CSV and manifest writers. All CSVs are UTF-8, comma-separated, one header
//! row, scientific notation with 9 significant digits.

use crate::config::ScenarioConfig;
use anyhow::Context;
use chiralprop_core::{EnvelopeGrid, ResponseCoefficients, C64};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

pub struct CsvWriter {
    path: PathBuf,
    buffer: String,
}

impl CsvWriter {
    pub fn new(path: PathBuf, header: &str) -> Self {
        let mut buffer = String::new();
        buffer.push_str(header);
        buffer.push('\n');
        CsvWriter { path, buffer }
    }

    pub fn row(&mut self, values: &[f64]) {
        let mut first = true;
        for v in values {
            if !first {
                self.buffer.push(',');
            }
            first = false;
            self.buffer.push_str(&fmt(*v));
        }
        self.buffer.push('\n');
    }

    pub fn finish(self) -> anyhow::Result<PathBuf> {
        fs::write(&self.path, self.buffer.as_bytes())
            .with_context(|| format!("writing {}", self.path.display()))?;
        Ok(self.path)
    }
}

/// Response-sweep rows: one per (detuning, phase) grid point.
pub fn write_response_csv(
    path: PathBuf,
    rows: &[ResponseCoefficients<f64>],
) -> anyhow::Result<PathBuf> {
    let mut w = CsvWriter::new(
        path,
        "dp,phi0,re_chi_e,im_chi_e,re_chi_h,im_chi_h,re_xi_eh,im_xi_eh,re_xi_he,im_xi_he",
    );
    for r in rows {
        w.row(&[
            r.detuning, r.phi0, r.chi_e.re, r.chi_e.im, r.chi_h.re, r.chi_h.im, r.xi_eh.re,
            r.xi_eh.im, r.xi_he.re, r.xi_he.im,
        ]);
    }
    w.finish()
}

/// Refractive-index sweep rows.
pub fn write_index_csv(path: PathBuf, rows: &[(f64, C64, C64)]) -> anyhow::Result<PathBuf> {
    let mut w = CsvWriter::new(path, "dp,re_n,im_n,re_eta,im_eta");
    for (dp, n, eta) in rows {
        w.row(&[*dp, n.re, n.im, eta.re, eta.im]);
    }
    w.finish()
}

/// Beta-sweep rows.
pub fn write_beta_csv(path: PathBuf, rows: &[(f64, C64)]) -> anyhow::Result<PathBuf> {
    let mut w = CsvWriter::new(path, "phi0,re_beta,im_beta");
    for (phi0, beta) in rows {
        w.row(&[*phi0, beta.re, beta.im]);
    }
    w.finish()
}

/// Full envelope grid at one depth.
pub fn write_snapshot_csv(path: PathBuf, grid: &EnvelopeGrid<f64>) -> anyhow::Result<PathBuf> {
    let mut w = CsvWriter::new(
        path,
        "tau,re_omega_e,im_omega_e,abs_omega_e,phase_omega_e,re_omega_b,im_omega_b",
    );
    for j in 0..grid.len() {
        let e = grid.omega_e[j];
        let b = grid.omega_b[j];
        w.row(&[grid.tau(j), e.re, e.im, e.norm(), e.arg(), b.re, b.im]);
    }
    w.finish()
}

/// One pulse-metrics row per recorded depth, with the analytic reference
/// overlay (frozen-coefficient delay, phase and gain model).
pub struct MetricsRow {
    pub z: f64,
    pub peak: f64,
    pub centroid: f64,
    pub phase: f64,
    pub energy: f64,
    pub peak_ref: f64,
    pub centroid_ref: f64,
    pub phase_ref: f64,
}

pub fn write_metrics_csv(path: PathBuf, rows: &[MetricsRow]) -> anyhow::Result<PathBuf> {
    let mut w = CsvWriter::new(
        path,
        "z,peak,centroid,phase,energy,peak_ref,centroid_ref,phase_ref",
    );
    for r in rows {
        w.row(&[
            r.z,
            r.peak,
            r.centroid,
            r.phase,
            r.energy,
            r.peak_ref,
            r.centroid_ref,
            r.phase_ref,
        ]);
    }
    w.finish()
}

/// Writes the run manifest: code version, resolved configuration, produced
/// files. The manifest is the only output allowed to carry wall-clock data.
pub fn write_manifest(
    out_dir: &Path,
    prefix: &str,
    cfg: &ScenarioConfig,
    outputs: &[PathBuf],
    elapsed_seconds: f64,
) -> anyhow::Result<PathBuf> {
    let path = out_dir.join(format!("{prefix}_manifest.toml"));
    let mut text = String::new();
    text.push_str(&format!(
        "version = {:?}\nmode = {:?}\nelapsed_seconds = {}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.mode.as_str(),
        elapsed_seconds,
    ));
    text.push_str("outputs = [\n");
    for p in outputs {
        let name = p
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        text.push_str(&format!("    {name:?},\n"));
    }
    text.push_str("]\n\n[config]\n");
    // re-root the resolved config under the [config] table
    let cfg_text = cfg.to_toml()?;
    for line in cfg_text.lines() {
        if let Some(rest) = line.strip_prefix("[[") {
            text.push_str(&format!("[[config.{rest}\n"));
        } else if let Some(rest) = line.strip_prefix('[') {
            text.push_str(&format!("[config.{rest}\n"));
        } else {
            text.push_str(line);
            text.push('\n');
        }
    }
    let mut file =
        fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(text.as_bytes())?;
    Ok(path)
}
