//! Scenario configuration: TOML schema, defaults, validation, and conversion
//! into the core domain types.

use anyhow::{anyhow, bail, Context};
use chiralprop_core as core;
use serde::{Deserialize, Serialize};

/// Experiment family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "response-sweep")]
    ResponseSweep,
    #[serde(rename = "beta-sweep")]
    BetaSweep,
    #[serde(rename = "propagate")]
    Propagate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ResponseSweep => "response-sweep",
            Mode::BetaSweep => "beta-sweep",
            Mode::Propagate => "propagate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationTag {
    Left,
    Right,
}

impl From<PolarizationTag> for core::Polarization {
    fn from(tag: PolarizationTag) -> Self {
        match tag {
            PolarizationTag::Left => core::Polarization::Left,
            PolarizationTag::Right => core::Polarization::Right,
        }
    }
}

fn third() -> f64 {
    1.0 / 3.0
}
fn default_gamma21() -> f64 {
    1e-3
}
fn half() -> f64 {
    0.5
}
fn default_gamma_total_si() -> f64 {
    2.0 * std::f64::consts::PI * 6.0e6
}
fn default_lambda0() -> f64 {
    795e-9
}
fn default_density() -> f64 {
    0.01
}
fn default_alpha() -> f64 {
    7.297_352_569_3e-3
}
fn default_omega_prep() -> f64 {
    10.0
}
fn default_omega_c() -> f64 {
    2.0
}
fn zero() -> f64 {
    0.0
}
fn frac_pi_2() -> f64 {
    std::f64::consts::FRAC_PI_2
}
fn default_pol() -> PolarizationTag {
    PolarizationTag::Left
}
fn default_false() -> bool {
    false
}
fn default_t_ramp() -> f64 {
    5.0
}
fn default_atomic_dt() -> f64 {
    0.05
}
fn default_check_stride() -> usize {
    16
}
fn default_positivity_tol() -> f64 {
    1e-8
}
fn default_trace_tol() -> f64 {
    1e-10
}
fn default_phi0_count() -> usize {
    361
}

/// Medium parameter block; every field has the library default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumBlock {
    #[serde(default = "third")]
    pub gamma31: f64,
    #[serde(default = "third")]
    pub gamma32: f64,
    #[serde(default = "third")]
    pub gamma34: f64,
    #[serde(default = "default_gamma21")]
    pub gamma21: f64,
    #[serde(default = "half")]
    pub gamma51: f64,
    #[serde(default = "half")]
    pub gamma54: f64,
    #[serde(default = "zero")]
    pub gamma_dec: f64,
    #[serde(default = "default_gamma_total_si")]
    pub gamma_total_si: f64,
    #[serde(default = "default_lambda0")]
    pub lambda0: f64,
    #[serde(default = "default_density")]
    pub scaled_density: f64,
    #[serde(default = "default_alpha")]
    pub alpha_fs: f64,
    #[serde(default = "default_omega_prep")]
    pub omega1_mag: f64,
    #[serde(default = "default_omega_prep")]
    pub omega2_mag: f64,
    #[serde(default = "default_omega_c")]
    pub omega_c_mag: f64,
    #[serde(default = "zero")]
    pub phi1: f64,
    #[serde(default = "zero")]
    pub phi2: f64,
    #[serde(default = "frac_pi_2")]
    pub phi_c: f64,
    #[serde(default = "default_pol")]
    pub polarization: PolarizationTag,
    #[serde(default = "default_false")]
    pub lfc_enabled: bool,
}

impl Default for MediumBlock {
    fn default() -> Self {
        toml::from_str("").expect("empty medium block must deserialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseBlock {
    pub sigma: f64,
    pub amplitude: f64,
    pub center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentBlock {
    pub t_start: f64,
    pub phi0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleBlock {
    #[serde(default = "default_t_ramp")]
    pub t_ramp: f64,
    pub segments: Vec<SegmentBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub n_tau: usize,
    pub d_tau: f64,
    pub dz: f64,
    pub depth: f64,
    /// Spacing of full-grid snapshot CSVs; default: depth/4.
    #[serde(default)]
    pub snapshot_interval: Option<f64>,
    /// Spacing of metrics rows; default: depth/20.
    #[serde(default)]
    pub metrics_interval: Option<f64>,
    #[serde(default = "default_atomic_dt")]
    pub atomic_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseBlock {
    #[serde(default = "zero")]
    pub dp_min: f64,
    #[serde(default = "zero")]
    pub dp_max: f64,
    #[serde(default)]
    pub dp_count: Option<usize>,
    /// Closed-loop phases for the response sweep; default: the medium phase.
    #[serde(default)]
    pub phi0_list: Option<Vec<f64>>,
    /// Number of phase samples over [-pi, pi] for the beta sweep.
    #[serde(default = "default_phi0_count")]
    pub phi0_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    #[serde(default = "default_false")]
    pub preparation_fields_active: bool,
    #[serde(default = "default_false")]
    pub couple_control_field: bool,
    #[serde(default = "default_positivity_tol")]
    pub positivity_tolerance: f64,
    #[serde(default = "default_trace_tol")]
    pub trace_tolerance: f64,
    #[serde(default = "default_check_stride")]
    pub check_stride: usize,
}

impl Default for SolverBlock {
    fn default() -> Self {
        toml::from_str("").expect("empty solver block must deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub prefix: Option<String>,
}

/// Parsed scenario configuration with defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mode: Mode,
    #[serde(default)]
    pub medium: MediumBlock,
    #[serde(default)]
    pub pulse: Option<PulseBlock>,
    #[serde(default)]
    pub schedule: Option<ScheduleBlock>,
    #[serde(default)]
    pub grid: Option<GridBlock>,
    #[serde(default)]
    pub response: Option<ResponseBlock>,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: Option<OutputBlock>,
}

impl ScenarioConfig {
    pub fn prefix(&self) -> String {
        self.output
            .as_ref()
            .and_then(|o| o.prefix.clone())
            .unwrap_or_else(|| self.mode.as_str().replace('-', "_"))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        toml::to_string_pretty(self).context("serializing configuration")
    }
}

/// Parses and validates a scenario configuration document.
pub fn parse_config(text: &str) -> anyhow::Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| anyhow!("{e}"))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ScenarioConfig) -> anyhow::Result<()> {
    // medium invariants are enforced by the core validation
    medium_params(cfg).context("medium block")?;

    match cfg.mode {
        Mode::Propagate => {
            let pulse = cfg
                .pulse
                .as_ref()
                .ok_or_else(|| anyhow!("propagate mode requires a [pulse] block"))?;
            if !(pulse.sigma > 0.0) {
                bail!("pulse.sigma must be > 0, got {}", pulse.sigma);
            }
            if !(pulse.amplitude > 0.0) {
                bail!("pulse.amplitude must be > 0, got {}", pulse.amplitude);
            }
            let grid = cfg
                .grid
                .as_ref()
                .ok_or_else(|| anyhow!("propagate mode requires a [grid] block"))?;
            if !(grid.depth >= 0.0) {
                bail!("grid.depth must be >= 0, got {}", grid.depth);
            }
            if grid.n_tau == 0 || grid.n_tau & (grid.n_tau - 1) != 0 {
                bail!("grid.n_tau must be a power of two, got {}", grid.n_tau);
            }
            for (name, v) in [
                ("grid.d_tau", grid.d_tau),
                ("grid.dz", grid.dz),
                ("grid.atomic_dt", grid.atomic_dt),
            ] {
                if !(v > 0.0) {
                    bail!("{name} must be > 0, got {v}");
                }
            }
            for (name, v) in [
                ("grid.snapshot_interval", grid.snapshot_interval),
                ("grid.metrics_interval", grid.metrics_interval),
            ] {
                if let Some(v) = v {
                    if !(v > 0.0) {
                        bail!("{name} must be > 0, got {v}");
                    }
                }
            }
            schedule(cfg).context("schedule block")?;
        }
        Mode::ResponseSweep | Mode::BetaSweep => {
            let resp = cfg
                .response
                .as_ref()
                .ok_or_else(|| anyhow!("{} mode requires a [response] block", cfg.mode.as_str()))?;
            if cfg.mode == Mode::ResponseSweep {
                let count = resp
                    .dp_count
                    .ok_or_else(|| anyhow!("response.dp_count is required for response-sweep"))?;
                if count < 2 {
                    bail!("response.dp_count must be at least 2, got {count}");
                }
                if !(resp.dp_max > resp.dp_min) {
                    bail!(
                        "response.dp_max must exceed response.dp_min, got [{}, {}]",
                        resp.dp_min,
                        resp.dp_max
                    );
                }
            }
            if cfg.mode == Mode::BetaSweep && resp.phi0_count < 3 {
                bail!(
                    "response.phi0_count must be at least 3, got {}",
                    resp.phi0_count
                );
            }
        }
    }
    Ok(())
}

/// Validated core medium parameters.
pub fn medium_params(cfg: &ScenarioConfig) -> anyhow::Result<core::MediumParams<f64>> {
    let m = &cfg.medium;
    core::MediumParams {
        gamma31: m.gamma31,
        gamma32: m.gamma32,
        gamma34: m.gamma34,
        gamma21: m.gamma21,
        gamma51: m.gamma51,
        gamma54: m.gamma54,
        gamma_dec: m.gamma_dec,
        gamma_total_si: m.gamma_total_si,
        lambda0: m.lambda0,
        scaled_density: m.scaled_density,
        alpha_fs: m.alpha_fs,
        omega1_mag: m.omega1_mag,
        omega2_mag: m.omega2_mag,
        omega_c_mag: m.omega_c_mag,
        phi1: m.phi1,
        phi2: m.phi2,
        phi_c: m.phi_c,
        polarization: m.polarization.into(),
        lfc_enabled: m.lfc_enabled,
    }
    .validate()
    .map_err(|e| anyhow!("{e}"))
}

/// Phase schedule; defaults to the constant medium closed-loop phase.
pub fn schedule(cfg: &ScenarioConfig) -> anyhow::Result<core::PhaseSchedule<f64>> {
    match &cfg.schedule {
        None => {
            let m = &cfg.medium;
            Ok(core::PhaseSchedule::constant(m.phi2 - m.phi1 + m.phi_c))
        }
        Some(block) => core::PhaseSchedule::new(
            block
                .segments
                .iter()
                .map(|s| chiralprop_core::schedule::Segment {
                    t_start: s.t_start,
                    phi0: s.phi0,
                })
                .collect(),
            block.t_ramp,
        )
        .map_err(|e| anyhow!("{e}")),
    }
}
