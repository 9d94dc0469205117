//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter failed validation; names the offending field.
    #[error("invalid parameter `{field}`: {message}")]
    InvalidParam {
        field: &'static str,
        message: String,
    },

    /// Dark state is undefined when both preparation fields vanish.
    #[error("dark state undefined: both preparation Rabi frequencies are zero")]
    NoDarkState,

    /// A response denominator or propagation prefactor became singular.
    #[error("singular {what}: |value| = {magnitude:.3e}")]
    Singular { what: &'static str, magnitude: f64 },

    /// Linear system solve failed (singular or badly conditioned matrix).
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// Input envelopes violate the circular-polarization phase relation.
    #[error(
        "input violates the vacuum phase relation cB0 = -/+ i E0: \
         relative residual {residual:.3e} exceeds {tolerance:.1e}"
    )]
    ChiralityViolation { residual: f64, tolerance: f64 },

    /// A non-finite sample appeared during propagation.
    #[error("non-finite field value at depth z = {z:.6e}, tau index {tau_index}")]
    NonFinite { z: f64, tau_index: usize },

    /// Density-matrix positivity drifted beyond the configured bound.
    #[error(
        "density matrix positivity drift at z = {z:.6e}, tau index {tau_index}: \
         min eigenvalue {min_eigenvalue:.3e}"
    )]
    PositivityDrift {
        z: f64,
        tau_index: usize,
        min_eigenvalue: f64,
    },

    /// Trace or Hermiticity of the density matrix drifted beyond its bound.
    #[error("density matrix {what} drift at z = {z:.6e}, tau index {tau_index}: {magnitude:.3e}")]
    StateDrift {
        what: &'static str,
        z: f64,
        tau_index: usize,
        magnitude: f64,
    },

    /// Explicit z-step too large for the current source strength.
    #[error("step-size check failed: dz * max|source| = {product:.3e} >= 0.1")]
    StepSizeCheck { product: f64 },

    /// Pulse metrics of an identically zero envelope are undefined.
    #[error("pulse metrics undefined for an all-zero envelope")]
    AllZeroEnvelope,

    /// Grid description is inconsistent.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Phase schedule description is inconsistent.
    #[error("invalid phase schedule: {0}")]
    InvalidSchedule(String),
}
