//! Fourier-space solution of the SVEA propagation equations.
//!
//! In the retarded frame the envelope spectrum at depth z follows from the
//! input spectrum by multiplication with exp[i k0 (η(Δp) - Δp/ω0) z]; the
//! Δp/ω0 term of the eigenvalue is the frame delay z/c and is absorbed by the
//! retarded-time coordinate. Both envelope components carry the same scalar
//! filter, so the circular-polarization eigenvector structure is preserved
//! exactly.
//!
//! Spectral convention: envelopes decompose as E(τ) = Σ_k Ê(Δp_k) e^{-iΔp_k τ},
//! so a positive-detuning component oscillates as e^{-iΔp t} alongside the
//! carrier e^{-iω0 t}.

use crate::dispersion::{beta, eta_medium, group_index};
use crate::envelope::EnvelopeGrid;
use crate::error::Error;
use crate::params::MediumParams;
use crate::response::response_coefficients;
use crate::scalar::{r, Real};
use crate::Complex;
use rustfft::FftPlanner;

/// How the response coefficients enter the spectral filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientMode {
    /// Evaluate the full frequency-dependent coefficients at every grid
    /// detuning.
    FullDispersion,
    /// Freeze the cross couplings at resonance: group delay from n_g plus the
    /// constant phase factor e^{iβk0z}. This is the approximate analytic
    /// model; its deviations from [`CoefficientMode::FullDispersion`] grow
    /// away from the pulse center.
    FrozenAtResonance,
}

/// Relative tolerance for the input eigenvector (vacuum phase relation) check.
pub const CHIRALITY_INPUT_TOLERANCE: f64 = 1e-9;

/// FFT-ordered detuning grid conjugate to the time grid: Δp_k = 2π f_k/(N Δτ)
/// with f_k = k for k < N/2 and k - N for k ≥ N/2.
pub fn detunings<T: Real>(n: usize, d_tau: T) -> Vec<T> {
    let step = r::<T>(2.0) * T::PI() / (d_tau * r::<T>(n as f64));
    (0..n)
        .map(|k| {
            let f = if k < n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            };
            step * r::<T>(f)
        })
        .collect()
}

fn require_power_of_two(n: usize) -> Result<(), Error> {
    if n == 0 || n & (n - 1) != 0 {
        return Err(Error::InvalidGrid(format!(
            "spectral grid length must be a power of two, got {n}"
        )));
    }
    Ok(())
}

/// Applies a multiplicative spectral filter G(Δp) to both probe envelopes.
/// The control envelope passes through unchanged.
pub fn apply_spectral_filter<T: Real>(
    grid: &EnvelopeGrid<T>,
    filter: impl Fn(T) -> Complex<T>,
) -> Result<EnvelopeGrid<T>, Error> {
    let gains: Vec<Complex<T>> = detunings(grid.len(), grid.d_tau)
        .into_iter()
        .map(filter)
        .collect();
    apply_spectral_gains(grid, &gains)
}

/// Filter application with the gains already evaluated in FFT bin order.
fn apply_spectral_gains<T: Real>(
    grid: &EnvelopeGrid<T>,
    gains: &[Complex<T>],
) -> Result<EnvelopeGrid<T>, Error> {
    let n = grid.len();
    require_power_of_two(n)?;
    debug_assert_eq!(gains.len(), n);
    let mut planner = FftPlanner::new();
    // with the e^{-iΔpτ} decomposition, spectral analysis is the unnormalized
    // inverse FFT and synthesis the forward FFT scaled by 1/N
    let analysis = planner.plan_fft_inverse(n);
    let synthesis = planner.plan_fft_forward(n);
    let norm = T::one() / r::<T>(n as f64);
    let mut out = grid.clone();
    for component in [&mut out.omega_e, &mut out.omega_b] {
        analysis.process(component);
        for (v, g) in component.iter_mut().zip(gains) {
            *v *= *g;
        }
        synthesis.process(component);
        for v in component.iter_mut() {
            *v = v.scale(norm);
        }
    }
    Ok(out)
}

/// Propagates the probe envelopes analytically from the current depth of
/// `input` over an additional depth `depth`.
///
/// The input must satisfy the vacuum phase relation cB0 = ∓iE0 (equivalently
/// Ω_B = ∓iαΩ_E): only then is it an eigenvector of the propagation matrix and
/// the scalar-eigenvalue solution applies.
pub fn propagate_analytic<T: Real>(
    input: &EnvelopeGrid<T>,
    params: &MediumParams<T>,
    phi0: T,
    depth: T,
    mode: CoefficientMode,
) -> Result<EnvelopeGrid<T>, Error> {
    let residual = input.chirality_residual(params);
    let tolerance = r::<T>(CHIRALITY_INPUT_TOLERANCE);
    if residual > tolerance {
        return Err(Error::ChiralityViolation {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tolerance: CHIRALITY_INPUT_TOLERANCE,
        });
    }
    let dark = params.dark_state()?;
    let k0 = params.omega0();
    let pol = params.polarization;
    let i = Complex::new(T::zero(), T::one());

    let mut out = match mode {
        CoefficientMode::FullDispersion => {
            let n = input.len();
            require_power_of_two(n)?;
            let mut gains = Vec::with_capacity(n);
            for dp in detunings(n, input.d_tau) {
                let resp = response_coefficients(params, &dark, dp, phi0)?;
                let eta_med = eta_medium(&resp, pol)?;
                gains.push((i * eta_med * k0 * depth).exp());
            }
            apply_spectral_gains(input, &gains)?
        }
        CoefficientMode::FrozenAtResonance => {
            let (ng, _vg) = group_index(params, &dark)?;
            let b = beta(params, &dark, phi0, pol)?;
            let phase = (i * b * k0 * depth).exp();
            apply_spectral_filter(input, |dp| {
                // e^{+iΔp n_g z} delays the envelope by n_g z in retarded time
                phase * (i * Complex::new(dp * ng * depth, T::zero())).exp()
            })?
        }
    };
    out.z = input.z + depth;
    Ok(out)
}
