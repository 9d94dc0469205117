//! Closed-form linear response coefficients of the chiral medium.
//!
//! The medium response to the weak probe is characterized by the electric and
//! magnetic susceptibilities χ_E, χ_H and the magneto-electric cross couplings
//! ξ_EH, ξ_HE. The closed forms below follow from the steady state of the
//! atomic equations of motion expanded to first order in the probe, with
//! Lorenz-Lorentz local-field corrections optionally included. They are
//! cross-checked against the independent numerical solve in [`crate::oracle`].

use crate::error::Error;
use crate::params::{DarkState, MediumParams};
use crate::scalar::{r, Real};
use crate::Complex;

/// Complex decay rates (including detuning) of the four probe-sector
/// coherences at a given probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceSet<T> {
    /// Electric probe coherence ρ34; carries the LFC detuning shift.
    pub gamma34: Complex<T>,
    /// Magnetic probe coherence ρ21.
    pub gamma21: Complex<T>,
    /// Ground-state coherence ρ24 of the electric EIT Λ-system.
    pub gamma24: Complex<T>,
    /// Two-photon coherence ρ31 of the magnetic ladder system.
    pub gamma31: Complex<T>,
}

/// Decoherence rates of the probe-sector coherences:
///
/// Γ34 = γ/2 + γdec - i(Δp + ρ44 L γ34/2 if LFC is enabled),
/// Γ21 = γ21/2 + γdec - iΔp,
/// Γ24 = γ21/2 - iΔp,
/// Γ31 = γ/2 + 2γdec - iΔp.
pub fn decoherence_rates<T: Real>(
    params: &MediumParams<T>,
    dark: &DarkState<T>,
    detuning: T,
) -> DecoherenceSet<T> {
    let gamma = params.gamma_total();
    let half = r::<T>(0.5);
    let lfc_shift = if params.lfc_enabled {
        dark.rho44 * params.scaled_density * params.gamma34 * half
    } else {
        T::zero()
    };
    DecoherenceSet {
        gamma34: Complex::new(gamma * half + params.gamma_dec, -(detuning + lfc_shift)),
        gamma21: Complex::new(params.gamma21 * half + params.gamma_dec, -detuning),
        gamma24: Complex::new(params.gamma21 * half, -detuning),
        gamma31: Complex::new(gamma * half + r::<T>(2.0) * params.gamma_dec, -detuning),
    }
}

/// The four response coefficients at one detuning and closed-loop phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseCoefficients<T> {
    pub chi_e: Complex<T>,
    pub chi_h: Complex<T>,
    pub xi_eh: Complex<T>,
    pub xi_he: Complex<T>,
    /// Probe detuning Δp the coefficients were evaluated at, in units of γ.
    pub detuning: T,
    /// Closed-loop phase Φ0 in radians.
    pub phi0: T,
}

impl<T: Real> ResponseCoefficients<T> {
    /// Relative permittivity ε = 1 + χ_E.
    pub fn epsilon(&self) -> Complex<T> {
        Complex::new(T::one(), T::zero()) + self.chi_e
    }

    /// Relative permeability μ = 1 + χ_H.
    pub fn mu(&self) -> Complex<T> {
        Complex::new(T::one(), T::zero()) + self.chi_h
    }
}

/// Closed-form response coefficients at detuning `detuning` and closed-loop
/// phase `phi0`.
///
/// With LFC enabled, ξ_HE carries the local-field factor (1 + χ_E/3) and χ_H
/// the compensating ξ_EH e^{-iΦ0} correction term; the latter cancels the
/// apparent Φ0 dependence of χ_H exactly.
pub fn response_coefficients<T: Real>(
    params: &MediumParams<T>,
    dark: &DarkState<T>,
    detuning: T,
    phi0: T,
) -> Result<ResponseCoefficients<T>, Error> {
    let rates = decoherence_rates(params, dark, detuning);
    let alpha = params.alpha_fs;
    let oc = params.omega_c_mag;
    let rho41_mag = dark.rho41.norm();
    let strength = r::<T>(3.0) * params.scaled_density * params.gamma34;
    let quarter = r::<T>(0.25);
    let half_i = Complex::new(T::zero(), r::<T>(0.5));
    let oc2_4 = Complex::new(oc * oc * quarter, T::zero());

    let den_e = rates.gamma34 * rates.gamma24 + oc2_4;
    let den_h = rates.gamma21 * rates.gamma31 + oc2_4;
    let scale_e = rates.gamma34.norm() * rates.gamma24.norm() + oc * oc * quarter;
    let scale_h = rates.gamma21.norm() * rates.gamma31.norm() + oc * oc * quarter;
    let guard = r::<T>(1e4) * T::epsilon();
    if den_e.norm() <= guard * scale_e || !den_e.norm().is_finite() {
        return Err(Error::Singular {
            what: "electric response denominator",
            magnitude: den_e.norm().to_f64().unwrap_or(0.0),
        });
    }
    if den_h.norm() <= guard * scale_h || !den_h.norm().is_finite() {
        return Err(Error::Singular {
            what: "magnetic response denominator",
            magnitude: den_h.norm().to_f64().unwrap_or(0.0),
        });
    }

    let phase = Complex::from_polar(T::one(), phi0);
    let chi_e = half_i * rates.gamma24 * (strength * dark.rho44) / den_e;
    let xi_eh = phase * (strength * alpha * rho41_mag * oc * quarter) / den_e;

    let lfc = params.lfc_enabled;
    let xi_he_lfc = if lfc {
        Complex::new(T::one(), T::zero()) + chi_e / r::<T>(3.0)
    } else {
        Complex::new(T::one(), T::zero())
    };
    let xi_he = phase.conj() * xi_he_lfc * (strength * alpha * rho41_mag * oc * quarter) / den_h;

    // chi_h in expanded form; the correction term is the LFC-induced
    // xi_eh e^{-i phi0} piece, which is independent of phi0.
    let direct = half_i * rates.gamma31 * (strength * alpha * alpha * dark.rho11);
    let correction = if lfc {
        xi_eh
            * phase.conj()
            * (params.scaled_density * params.gamma34 * alpha * rho41_mag * oc * quarter)
    } else {
        Complex::new(T::zero(), T::zero())
    };
    let chi_h = (direct - correction) / den_h;

    Ok(ResponseCoefficients {
        chi_e,
        chi_h,
        xi_eh,
        xi_he,
        detuning,
        phi0,
    })
}
