//! Retarded-time envelope grids, pulse metrics, and propagation snapshots.

use crate::error::Error;
use crate::params::MediumParams;
use crate::scalar::{r, Real};
use crate::schedule::PhaseSchedule;
use crate::Complex;

/// Complex probe and control envelopes sampled on a uniform retarded-time
/// grid τ = t - z/c at one propagation depth. Rabi units of γ, times in 1/γ,
/// depth in c/γ.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeGrid<T> {
    pub tau_start: T,
    pub d_tau: T,
    /// Current propagation depth.
    pub z: T,
    pub omega_e: Vec<Complex<T>>,
    pub omega_b: Vec<Complex<T>>,
    pub omega_c: Vec<Complex<T>>,
}

impl<T: Real> EnvelopeGrid<T> {
    pub fn len(&self) -> usize {
        self.omega_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_e.is_empty()
    }

    pub fn tau(&self, index: usize) -> T {
        self.tau_start + self.d_tau * r::<T>(index as f64)
    }

    /// Gaussian probe pulse at z = 0. The electric component is a real
    /// Gaussian of the given width and amplitude; the magnetic component
    /// follows from the vacuum phase relation for circular polarization,
    /// Ω_B = ∓ i α Ω_E; the control envelope carries the scheduled
    /// closed-loop phase. The control phase pattern co-propagates at c, so in
    /// retarded time it is the same at every depth.
    pub fn gaussian_probe(
        params: &MediumParams<T>,
        schedule: &PhaseSchedule<T>,
        n_tau: usize,
        d_tau: T,
        sigma: T,
        amplitude: T,
        center: T,
    ) -> Result<Self, Error> {
        if n_tau < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 tau samples, got {n_tau}"
            )));
        }
        if !(d_tau > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "d_tau must be > 0, got {d_tau}"
            )));
        }
        if !(sigma > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "sigma must be > 0, got {sigma}"
            )));
        }
        let s = params.polarization.sign::<T>();
        let chirality = Complex::new(T::zero(), -s * params.alpha_fs);
        let half = r::<T>(0.5);
        let mut omega_e = Vec::with_capacity(n_tau);
        let mut omega_b = Vec::with_capacity(n_tau);
        let mut omega_c = Vec::with_capacity(n_tau);
        for j in 0..n_tau {
            let tau = d_tau * r::<T>(j as f64);
            let arg = (tau - center) / sigma;
            let env = amplitude * (-half * arg * arg).exp();
            let e = Complex::new(env, T::zero());
            omega_e.push(e);
            omega_b.push(chirality * e);
            let phi_c = schedule.value(tau) - params.phi2 + params.phi1;
            omega_c.push(Complex::from_polar(params.omega_c_mag, phi_c));
        }
        Ok(EnvelopeGrid {
            tau_start: T::zero(),
            d_tau,
            z: T::zero(),
            omega_e,
            omega_b,
            omega_c,
        })
    }

    /// Largest violation of the circular-polarization phase relation
    /// Ω_B = ∓ i α Ω_E, relative to the peak magnetic amplitude.
    pub fn chirality_residual(&self, params: &MediumParams<T>) -> T {
        let s = params.polarization.sign::<T>();
        let factor = Complex::new(T::zero(), -s * params.alpha_fs);
        let mut worst = T::zero();
        let mut scale = T::zero();
        for (e, b) in self.omega_e.iter().zip(&self.omega_b) {
            worst = worst.max((*b - factor * *e).norm());
            scale = scale.max((factor * *e).norm());
        }
        if scale > T::zero() {
            worst / scale
        } else {
            worst
        }
    }
}

/// Scalar pulse diagnostics derived from the electric envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseMetrics<T> {
    /// Peak |Ω_E|, refined by parabolic interpolation around the grid maximum.
    pub peak: T,
    /// |Ω_E|²-weighted mean retarded time.
    pub centroid: T,
    /// Envelope phase at the centroid, unwrapped from the peak outwards.
    pub phase: T,
    /// Σ |Ω_E|² Δτ.
    pub energy: T,
}

/// Computes [`PulseMetrics`] for the electric envelope.
pub fn pulse_metrics<T: Real>(grid: &EnvelopeGrid<T>) -> Result<PulseMetrics<T>, Error> {
    let n = grid.len();
    let mut peak_idx = 0;
    let mut peak_sq = T::zero();
    let mut w_sum = T::zero();
    let mut tw_sum = T::zero();
    for (j, e) in grid.omega_e.iter().enumerate() {
        let w = e.norm_sqr();
        if w > peak_sq {
            peak_sq = w;
            peak_idx = j;
        }
        w_sum += w;
        tw_sum += w * grid.tau(j);
    }
    if !(w_sum > T::zero()) {
        return Err(Error::AllZeroEnvelope);
    }
    let centroid = tw_sum / w_sum;

    let peak = if peak_idx > 0 && peak_idx + 1 < n {
        // parabola through the three samples around the maximum of |E|
        let ym = grid.omega_e[peak_idx - 1].norm();
        let y0 = grid.omega_e[peak_idx].norm();
        let yp = grid.omega_e[peak_idx + 1].norm();
        let denom = ym - r::<T>(2.0) * y0 + yp;
        if denom < T::zero() {
            let shift = r::<T>(0.5) * (ym - yp) / denom;
            y0 - r::<T>(0.25) * (ym - yp) * shift
        } else {
            y0
        }
    } else {
        peak_sq.sqrt()
    };

    // unwrap the phase from the peak to the centroid
    let centroid_pos = (centroid - grid.tau_start) / grid.d_tau;
    let lower = centroid_pos
        .floor()
        .to_f64()
        .map(|v| v as isize)
        .unwrap_or(0)
        .clamp(0, n as isize - 2) as usize;
    let frac = centroid_pos - r::<T>(lower as f64);
    let phase_at = unwrap_to(grid, peak_idx, lower);
    let step = wrap_angle(grid.omega_e[lower + 1].arg() - grid.omega_e[lower].arg());
    let phase = phase_at + step * frac;

    Ok(PulseMetrics {
        peak,
        centroid,
        phase,
        energy: w_sum * grid.d_tau,
    })
}

/// Phase at `target`, unwrapped along the grid starting from the argument at
/// `from` (the peak, where the envelope is far from zero).
fn unwrap_to<T: Real>(grid: &EnvelopeGrid<T>, from: usize, target: usize) -> T {
    let mut phase = grid.omega_e[from].arg();
    if target == from {
        return phase;
    }
    let step: isize = if target > from { 1 } else { -1 };
    let mut j = from as isize;
    while j != target as isize {
        let next = (j + step) as usize;
        phase += wrap_angle(grid.omega_e[next].arg() - grid.omega_e[j as usize].arg());
        j += step;
    }
    phase
}

fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = r::<T>(2.0) * T::PI();
    let mut y = x;
    while y > T::PI() {
        y -= two_pi;
    }
    while y < -T::PI() {
        y += two_pi;
    }
    y
}

/// Propagation state captured at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub z: T,
    pub grid: EnvelopeGrid<T>,
    pub metrics: PulseMetrics<T>,
}
