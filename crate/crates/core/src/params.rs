//! Physical parameters of the chiral medium and the prepared dark state.
//!
//! Internal unit convention: all rates and Rabi magnitudes are measured in
//! units of the total upper-level decay rate γ = γ31 + γ32 + γ34, times in
//! 1/γ, lengths in c/γ. `gamma_total_si` carries the absolute scale of γ in
//! rad/s and is only needed to form the scaled carrier frequency ω0/γ.

use crate::error::Error;
use crate::scalar::{r, Real};
use crate::{Complex, SPEED_OF_LIGHT};

/// Probe handedness. Left circular polarization selects the upper sign in the
/// dispersion relations, right circular the lower sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Left,
    Right,
}

impl Polarization {
    /// +1 for left circular (upper sign), -1 for right circular (lower sign).
    pub fn sign<T: Real>(self) -> T {
        match self {
            Polarization::Left => T::one(),
            Polarization::Right => -T::one(),
        }
    }
}

/// Complete parameter set of the five-level chiral medium.
///
/// Decay branchings refer to the upper electric probe level |3⟩ decaying into
/// |1⟩, |2⟩, |4⟩; `gamma21` is the linewidth of the magnetic probe transition,
/// `gamma51`/`gamma54` the decay of the preparation level |5⟩, and `gamma_dec`
/// the collisional decoherence rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumParams<T> {
    pub gamma31: T,
    pub gamma32: T,
    pub gamma34: T,
    pub gamma21: T,
    pub gamma51: T,
    pub gamma54: T,
    pub gamma_dec: T,
    /// Absolute scale of γ in rad/s (SI bridge).
    pub gamma_total_si: T,
    /// Carrier wavelength in meters.
    pub lambda0: T,
    /// Scaled density L = N λ³ / 4π².
    pub scaled_density: T,
    /// Fine-structure constant; sets the magnetic/electric coupling ratio
    /// m/d = α c.
    pub alpha_fs: T,
    pub omega1_mag: T,
    pub omega2_mag: T,
    pub omega_c_mag: T,
    pub phi1: T,
    pub phi2: T,
    pub phi_c: T,
    pub polarization: Polarization,
    /// Include Lorenz-Lorentz local-field corrections.
    pub lfc_enabled: bool,
}

impl<T: Real> Default for MediumParams<T> {
    /// Defaults: equal branching γ/3, γ21 = 10⁻³γ, γ51 = γ54 = γ/2, no
    /// collisional decoherence, γ = 2π·6 MHz, λ0 = 795 nm, L = 0.01,
    /// symmetric dark state with Φ0 = π/2, left circular probe, LFC off.
    fn default() -> Self {
        let third = T::one() / r(3.0);
        MediumParams {
            gamma31: third,
            gamma32: third,
            gamma34: third,
            gamma21: r(1e-3),
            gamma51: r(0.5),
            gamma54: r(0.5),
            gamma_dec: T::zero(),
            gamma_total_si: r(2.0 * std::f64::consts::PI * 6.0e6),
            lambda0: r(795e-9),
            scaled_density: r(0.01),
            alpha_fs: r(7.297_352_569_3e-3),
            omega1_mag: r(10.0),
            omega2_mag: r(10.0),
            omega_c_mag: r(2.0),
            phi1: T::zero(),
            phi2: T::zero(),
            phi_c: T::FRAC_PI_2(),
            polarization: Polarization::Left,
            lfc_enabled: false,
        }
    }
}

impl<T: Real> MediumParams<T> {
    /// Total decay rate of |3⟩; equal to 1 after [`MediumParams::validate`].
    pub fn gamma_total(&self) -> T {
        self.gamma31 + self.gamma32 + self.gamma34
    }

    /// Closed-loop phase Φ0 = φ2 - φ1 + φC.
    pub fn closed_loop_phase(&self) -> T {
        self.phi2 - self.phi1 + self.phi_c
    }

    /// Scaled carrier frequency ω0/γ = 2πc/(λ0 γ_SI); also the scaled carrier
    /// wavenumber since lengths are measured in c/γ.
    pub fn omega0(&self) -> T {
        r::<T>(2.0) * T::PI() * r::<T>(SPEED_OF_LIGHT) / (self.lambda0 * self.gamma_total_si)
    }

    pub fn omega1(&self) -> Complex<T> {
        Complex::from_polar(self.omega1_mag, self.phi1)
    }

    pub fn omega2(&self) -> Complex<T> {
        Complex::from_polar(self.omega2_mag, self.phi2)
    }

    pub fn omega_c(&self) -> Complex<T> {
        Complex::from_polar(self.omega_c_mag, self.phi_c)
    }

    /// Dark state prepared by the two control fields.
    pub fn dark_state(&self) -> Result<DarkState<T>, Error> {
        dark_state(self.omega1(), self.omega2())
    }

    /// Number density N = 4π²L/λ³ [m⁻³].
    pub fn number_density(&self) -> Result<T, Error> {
        number_density(self.scaled_density, self.lambda0)
    }

    /// Checks signs and ranges, then rescales all rates and Rabi magnitudes so
    /// that γ31 + γ32 + γ34 = 1. The SI bridge `gamma_total_si` is left
    /// untouched: it defines the absolute size of one γ unit.
    pub fn validate(mut self) -> Result<Self, Error> {
        let nonneg: [(&'static str, T); 10] = [
            ("gamma31", self.gamma31),
            ("gamma32", self.gamma32),
            ("gamma34", self.gamma34),
            ("gamma21", self.gamma21),
            ("gamma51", self.gamma51),
            ("gamma54", self.gamma54),
            ("gamma_dec", self.gamma_dec),
            ("omega1_mag", self.omega1_mag),
            ("omega2_mag", self.omega2_mag),
            ("omega_c_mag", self.omega_c_mag),
        ];
        for (field, value) in nonneg {
            if !(value >= T::zero()) || !value.is_finite() {
                return Err(Error::InvalidParam {
                    field,
                    message: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        if !(self.lambda0 > T::zero()) {
            return Err(Error::InvalidParam {
                field: "lambda0",
                message: format!("must be > 0, got {}", self.lambda0),
            });
        }
        if !(self.gamma_total_si > T::zero()) {
            return Err(Error::InvalidParam {
                field: "gamma_total_si",
                message: format!("must be > 0, got {}", self.gamma_total_si),
            });
        }
        if !(self.scaled_density >= T::zero()) {
            return Err(Error::InvalidParam {
                field: "scaled_density",
                message: format!("must be >= 0, got {}", self.scaled_density),
            });
        }
        if !(self.alpha_fs > T::zero()) {
            return Err(Error::InvalidParam {
                field: "alpha_fs",
                message: format!("must be > 0, got {}", self.alpha_fs),
            });
        }
        let total = self.gamma_total();
        if !(total > T::zero()) {
            return Err(Error::InvalidParam {
                field: "gamma31",
                message: "total decay rate gamma31+gamma32+gamma34 must be > 0".into(),
            });
        }
        self.gamma31 /= total;
        self.gamma32 /= total;
        self.gamma34 /= total;
        self.gamma21 /= total;
        self.gamma51 /= total;
        self.gamma54 /= total;
        self.gamma_dec /= total;
        self.omega1_mag /= total;
        self.omega2_mag /= total;
        self.omega_c_mag /= total;
        Ok(self)
    }
}

/// Dark state of the Λ-system spanned by |1⟩ and |4⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkState<T> {
    pub rho11: T,
    pub rho44: T,
    pub rho41: Complex<T>,
}

/// Populations and coherence of the dark state prepared by complex Rabi
/// frequencies Ω1, Ω2:
///
/// ρ11 = |Ω2|²/(|Ω1|²+|Ω2|²), ρ44 = |Ω1|²/(|Ω1|²+|Ω2|²),
/// ρ41 = -Ω1 Ω2* / (|Ω1|²+|Ω2|²).
pub fn dark_state<T: Real>(omega1: Complex<T>, omega2: Complex<T>) -> Result<DarkState<T>, Error> {
    let s = omega1.norm_sqr() + omega2.norm_sqr();
    if !(s > T::zero()) {
        return Err(Error::NoDarkState);
    }
    Ok(DarkState {
        rho11: omega2.norm_sqr() / s,
        rho44: omega1.norm_sqr() / s,
        rho41: -omega1 * omega2.conj() / s,
    })
}

/// Number density from the scaled density parameter: N = 4π²L/λ³ [m⁻³].
pub fn number_density<T: Real>(scaled_density: T, lambda0: T) -> Result<T, Error> {
    if !(lambda0 > T::zero()) {
        return Err(Error::InvalidParam {
            field: "lambda0",
            message: format!("must be > 0, got {lambda0}"),
        });
    }
    if !(scaled_density >= T::zero()) {
        return Err(Error::InvalidParam {
            field: "scaled_density",
            message: format!("must be >= 0, got {scaled_density}"),
        });
    }
    let four_pi2 = r::<T>(4.0) * T::PI() * T::PI();
    Ok(four_pi2 * scaled_density / (lambda0 * lambda0 * lambda0))
}
