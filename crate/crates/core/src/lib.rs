//! Weak-probe pulse propagation through chiral atomic media.
//!
//! The crate models a five-level atom whose electric and magnetic probe
//! transitions are cross-coupled through a closed interaction loop, giving the
//! medium a chiral linear response. It provides
//!
//! * the closed-form response coefficients (χ_E, χ_H, ξ_EH, ξ_HE) of the
//!   medium together with an independent linearized steady-state solver that
//!   cross-checks them ([`response`], [`oracle`]),
//! * the analytic SVEA propagation machinery: chiral refractive index,
//!   propagation eigenvalue, group index, the phase-control coefficient β,
//!   and an FFT-based spectral pulse propagator ([`dispersion`], [`spectral`]),
//! * a full numerical Maxwell–Bloch co-propagation of both probe field
//!   components with a time-dependent closed-loop phase ([`bloch`],
//!   [`solver`]).
//!
//! All rates and Rabi frequencies are expressed in units of the total decay
//! rate γ of the upper probe level, times in 1/γ and propagation depths in
//! c/γ. [`MediumParams::gamma_total_si`] fixes the bridge to SI units.
//!
//! Core numerics are generic over the floating-point scalar through the
//! [`Real`] trait; `f64` aliases for the main types are exported at the crate
//! root.

// `!(x > 0)`-style comparisons deliberately reject NaN; fixed-size matrix
// loops keep index symmetry with the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
pub mod bloch;
pub mod dispersion;
pub mod envelope;
pub mod error;
pub mod oracle;
pub mod params;
pub mod response;
pub mod scalar;
pub mod schedule;
pub mod solver;
pub mod spectral;

pub use error::Error;
pub use scalar::Real;

pub use bloch::{BlochContext, DensityMatrix, FieldSet};
pub use dispersion::{beta, eta, group_index, n_exact, n_linear};
pub use envelope::{pulse_metrics, EnvelopeGrid, PulseMetrics, Snapshot};
pub use oracle::{steady_state_oracle, OracleOptions, OracleResult};
pub use params::{dark_state, number_density, DarkState, MediumParams, Polarization};
pub use response::{
    decoherence_rates, response_coefficients, DecoherenceSet, ResponseCoefficients,
};
pub use schedule::PhaseSchedule;
pub use solver::{run, GridSpec, PropagationScenario, PulseSpec, SolverOptions};
pub use spectral::{apply_spectral_filter, propagate_analytic, CoefficientMode};

/// Complex number over the crate scalar.
pub type Complex<T> = num_complex::Complex<T>;

/// `f64` aliases for the main domain types.
pub type C64 = num_complex::Complex<f64>;
pub type MediumParams64 = MediumParams<f64>;
pub type DarkState64 = DarkState<f64>;
pub type ResponseCoefficients64 = ResponseCoefficients<f64>;
pub type EnvelopeGrid64 = EnvelopeGrid<f64>;
pub type Snapshot64 = Snapshot<f64>;
pub type PhaseSchedule64 = PhaseSchedule<f64>;

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
