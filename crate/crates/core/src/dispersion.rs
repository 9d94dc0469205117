//! Analytic dispersion quantities: propagation eigenvalue, chiral refractive
//! index, group index and the resonant phase-control coefficient β.

use crate::error::Error;
use crate::params::{DarkState, MediumParams, Polarization};
use crate::response::ResponseCoefficients;
use crate::scalar::{r, Real};
use crate::{Complex, SPEED_OF_LIGHT};

/// Propagation eigenvalue of the SVEA envelope equations,
///
/// η = Δp/ω0 + (1/2μ)[χ_E μ + χ_H - ξ_EH ξ_HE ∓ i(ξ_EH - ξ_HE)],
///
/// upper sign for left circular polarization. `omega0` is the scaled carrier
/// frequency ω0/γ.
pub fn eta<T: Real>(
    resp: &ResponseCoefficients<T>,
    omega0: T,
    pol: Polarization,
) -> Result<Complex<T>, Error> {
    Ok(Complex::new(resp.detuning / omega0, T::zero()) + eta_medium(resp, pol)?)
}

/// Medium part of the eigenvalue: η without the Δp/ω0 frame term. This is the
/// spectral filter exponent per carrier wavenumber in the retarded frame.
pub fn eta_medium<T: Real>(
    resp: &ResponseCoefficients<T>,
    pol: Polarization,
) -> Result<Complex<T>, Error> {
    let mu = resp.mu();
    if mu.norm() < r::<T>(1e6) * T::epsilon() {
        return Err(Error::Singular {
            what: "relative permeability mu",
            magnitude: mu.norm().to_f64().unwrap_or(0.0),
        });
    }
    let s = pol.sign::<T>();
    let i = Complex::new(T::zero(), T::one());
    let bracket =
        resp.chi_e * mu + resp.chi_h - resp.xi_eh * resp.xi_he - i * s * (resp.xi_eh - resp.xi_he);
    Ok(bracket / (mu * r::<T>(2.0)))
}

/// Part of the eigenvalue that is linear in the response coefficients,
/// relative to the carrier: equals `n_linear` minus one by construction.
pub fn eta_medium_linearized<T: Real>(
    resp: &ResponseCoefficients<T>,
    pol: Polarization,
) -> Complex<T> {
    let s = pol.sign::<T>();
    let i = Complex::new(T::zero(), T::one());
    (resp.chi_e + resp.chi_h - i * s * (resp.xi_eh - resp.xi_he)) / r::<T>(2.0)
}

/// Chiral refractive index from the single-particle susceptibility analysis,
///
/// n± = sqrt(εμ - (ξ_EH + ξ_HE)²/4) ∓ (i/2)(ξ_EH - ξ_HE),
///
/// on the principal square-root branch (Re √ ≥ 0), which is the physical one
/// in the SVEA regime |n± - 1| ≪ 1.
pub fn n_exact<T: Real>(resp: &ResponseCoefficients<T>, pol: Polarization) -> Complex<T> {
    let s = pol.sign::<T>();
    let i = Complex::new(T::zero(), T::one());
    let sum = resp.xi_eh + resp.xi_he;
    let root = (resp.epsilon() * resp.mu() - sum * sum / r::<T>(4.0)).sqrt();
    root - i * s * (resp.xi_eh - resp.xi_he) / r::<T>(2.0)
}

/// Refractive index linearized in the response coefficients:
/// n± = 1 + (χ_E + χ_H)/2 ∓ (i/2)(ξ_EH - ξ_HE).
pub fn n_linear<T: Real>(resp: &ResponseCoefficients<T>, pol: Polarization) -> Complex<T> {
    Complex::new(T::one(), T::zero()) + eta_medium_linearized(resp, pol)
}

/// Group index and group velocity inside the EIT window,
/// n_g = 3 L ω0 γ34 ρ44 / |Ω_C|², v_g = c/(1 + n_g) [m/s].
pub fn group_index<T: Real>(
    params: &MediumParams<T>,
    dark: &DarkState<T>,
) -> Result<(T, T), Error> {
    if !(params.omega_c_mag > T::zero()) {
        return Err(Error::Singular {
            what: "group index control field omega_c",
            magnitude: 0.0,
        });
    }
    let ng = r::<T>(3.0) * params.scaled_density * params.omega0() * params.gamma34 * dark.rho44
        / (params.omega_c_mag * params.omega_c_mag);
    let vg = r::<T>(SPEED_OF_LIGHT) / (T::one() + ng);
    Ok((ng, vg))
}

/// Resonant phase-control coefficient,
///
/// β = ±i α n_g ρ41 |Ω_C| / (2 ω0 ρ44) ·
///     (e^{iΦ0} - |Ω_C|² e^{-iΦ0} / (2 γ_dec γ + 8 γ_dec² + |Ω_C|²)),
///
/// with γ21 neglected. The ρ41 of the formula is the signed value of the
/// symmetric-phase convention, -|ρ41|; phase offsets of the preparation
/// fields are carried by Φ0. The combination n_g ρ41/(ω0 ρ44) is evaluated in
/// the cancelled form 3 L γ34 ρ41 / |Ω_C|², which keeps β finite for ρ44 → 0.
pub fn beta<T: Real>(
    params: &MediumParams<T>,
    dark: &DarkState<T>,
    phi0: T,
    pol: Polarization,
) -> Result<Complex<T>, Error> {
    let oc = params.omega_c_mag;
    if !(oc > T::zero()) {
        return Err(Error::Singular {
            what: "beta control field omega_c",
            magnitude: 0.0,
        });
    }
    let gamma = params.gamma_total();
    let gd = params.gamma_dec;
    let denom = r::<T>(2.0) * gd * gamma + r::<T>(8.0) * gd * gd + oc * oc;
    let ratio = oc * oc / denom;
    let bracket =
        Complex::from_polar(T::one(), phi0) - Complex::from_polar(T::one(), -phi0) * ratio;
    let prefactor = params.alpha_fs
        * r::<T>(3.0)
        * params.scaled_density
        * params.gamma34
        * (-dark.rho41.norm())
        / (r::<T>(2.0) * oc);
    let s = pol.sign::<T>();
    Ok(Complex::new(T::zero(), s * prefactor) * bracket)
}
