//! Independent steady-state oracle for the linear response coefficients.
//!
//! Builds the full 25-component density-matrix equation of motion of the
//! five-level system (Hamiltonian couplings, radiative decay channels,
//! collisional dephasing, optional Lorenz-Lorentz local-field substitution),
//! linearizes around the prepared dark state, solves the steady-state linear
//! system for the probe-sector coherences, converts them to polarization and
//! magnetization, and extracts (χ_E, χ_H, ξ_EH, ξ_HE) from the responses to
//! two independent probe drives. Shares no algebra with the closed forms in
//! [`crate::response`].
//!
//! The probe sector — coherences between {|2⟩,|3⟩} and {|1⟩,|4⟩,|5⟩} — closes
//! under the zeroth-order generator: no other density-matrix component feeds
//! back into it at first order in the probe, so the linear solve restricts to
//! those six complex components.
//!
//! By default the preparation fields Ω1, Ω2 are excluded from the response
//! dynamics: the dark state enters as the prepared zeroth-order state and the
//! probe response runs in the remaining four-level system, which is the model
//! behind the closed forms. With `include_preparation_fields` the Λ-drive
//! couplings act on the probe sector too; for γ_dec = 0 the dark combinations
//! decouple exactly and the result is unchanged, while for γ_dec > 0 the
//! asymmetric probe-sector dephasing mixes in the bright coherences and the
//! response acquires corrections that the closed forms do not contain.

use crate::error::Error;
use crate::params::MediumParams;
use crate::response::ResponseCoefficients;
use crate::scalar::{r, Real};
use crate::Complex;

/// Options for [`steady_state_oracle`].
#[derive(Debug, Clone, Copy)]
pub struct OracleOptions<T> {
    /// Keep the Λ-system drive couplings in the response dynamics.
    pub include_preparation_fields: bool,
    /// Probe Rabi amplitude used for the drives, in units of γ.
    pub probe_amplitude: T,
    /// Reject the 2x2 extraction when its condition number exceeds this.
    pub condition_guard: T,
    /// Relative quadratic residual above which the nonlinearity warning fires.
    pub linearity_tolerance: T,
}

impl<T: Real> Default for OracleOptions<T> {
    fn default() -> Self {
        OracleOptions {
            include_preparation_fields: false,
            probe_amplitude: r(1e-6),
            condition_guard: r(1e8),
            linearity_tolerance: r(1e-6),
        }
    }
}

/// Oracle output: extracted coefficients plus the linearity diagnostic from
/// the Richardson check at twice the probe amplitude.
#[derive(Debug, Clone, Copy)]
pub struct OracleResult<T> {
    pub coefficients: ResponseCoefficients<T>,
    pub linearity_residual: T,
    pub nonlinearity_warning: bool,
}

type Mat<T> = [[Complex<T>; 5]; 5];

/// Probe-sector coherences (row, column), zero-based over states |1⟩..|5⟩:
/// ρ21, ρ24, ρ25, ρ31, ρ34, ρ35.
const PAIRS: [(usize, usize); 6] = [(1, 0), (1, 3), (1, 4), (2, 0), (2, 3), (2, 4)];

const IDX_RHO21: usize = 0;
const IDX_RHO34: usize = 4;

/// Full equations of motion of the five-level system.
struct Eom<T: Real> {
    /// Static Hamiltonian couplings: control field and (optionally) the
    /// preparation fields, plus the -Δp diagonal on |2⟩, |3⟩.
    h_static: Mat<T>,
    /// Per-entry damping: half out-rate sums plus dephasing.
    damp: [[T; 5]; 5],
    /// Radiative feeding terms (from, to, rate).
    feeds: [(usize, usize, T); 6],
    lfc: bool,
    /// L γ34 — local-field back-action strength on the electric probe.
    lg34: T,
    /// L γ34 α² — local-field back-action strength on the magnetic probe.
    lg34a2: T,
}

impl<T: Real> Eom<T> {
    fn new(params: &MediumParams<T>, detuning: T, phi0: T, include_prep: bool) -> Self {
        let mut h_static = [[Complex::new(T::zero(), T::zero()); 5]; 5];
        let half = r::<T>(0.5);
        h_static[1][1] = Complex::new(-detuning, T::zero());
        h_static[2][2] = Complex::new(-detuning, T::zero());
        // control field on |3⟩⟨2| with phase chosen so the closed-loop phase
        // equals phi0
        let phi_c = phi0 - params.phi2 + params.phi1;
        let oc = Complex::from_polar(params.omega_c_mag, phi_c);
        h_static[2][1] = -oc * half;
        h_static[1][2] = -(oc.conj()) * half;
        if include_prep {
            let o1 = params.omega1();
            let o2 = params.omega2();
            h_static[4][0] = -o1 * half;
            h_static[0][4] = -(o1.conj()) * half;
            h_static[4][3] = -o2 * half;
            h_static[3][4] = -(o2.conj()) * half;
        }

        let feeds = [
            (2usize, 0usize, params.gamma31),
            (2, 1, params.gamma32),
            (2, 3, params.gamma34),
            (1, 0, params.gamma21),
            (4, 0, params.gamma51),
            (4, 3, params.gamma54),
        ];
        let mut out = [T::zero(); 5];
        for &(from, _, rate) in &feeds {
            out[from] += rate;
        }

        // Collisional dephasing, matching the quoted coherence decay rates:
        // phase baths on |1⟩ and |3⟩ at gamma_dec each; |2⟩ and |4⟩ share a
        // common bath, and the ground manifold {|1⟩,|4⟩,|5⟩} sees only
        // common-mode shifts, so the prepared coherence ρ41 is not dephased.
        let gd = params.gamma_dec;
        let mut deph = [[T::zero(); 5]; 5];
        let mut set = |i: usize, j: usize, v: T| {
            deph[i][j] = v;
            deph[j][i] = v;
        };
        set(0, 1, gd);
        set(0, 2, r::<T>(2.0) * gd);
        set(2, 3, gd);
        set(1, 2, gd);
        set(2, 4, gd);

        let mut damp = [[T::zero(); 5]; 5];
        for (i, row) in damp.iter_mut().enumerate() {
            for (j, d) in row.iter_mut().enumerate() {
                *d = half * (out[i] + out[j]) + deph[i][j];
            }
        }
        // diagonal: total out-rate, no dephasing
        for (i, row) in damp.iter_mut().enumerate() {
            row[i] = out[i];
        }

        Eom {
            h_static,
            damp,
            feeds,
            lfc: params.lfc_enabled,
            lg34: params.scaled_density * params.gamma34,
            lg34a2: params.scaled_density * params.gamma34 * params.alpha_fs * params.alpha_fs,
        }
    }

    /// dρ/dt for the given state and external probe drives. The map is
    /// complex-linear in the entries of `rho`: Hermitian-conjugate field slots
    /// read the transposed entry rather than conjugating.
    fn rhs(&self, rho: &Mat<T>, probe_e: Complex<T>, probe_b: Complex<T>) -> Mat<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let half = r::<T>(0.5);
        let mut h = self.h_static;
        let (oe, oe_conj, ob, ob_conj) = if self.lfc {
            (
                probe_e + rho[2][3] * self.lg34,
                probe_e.conj() + rho[3][2] * self.lg34,
                probe_b + rho[1][0] * self.lg34a2,
                probe_b.conj() + rho[0][1] * self.lg34a2,
            )
        } else {
            (probe_e, probe_e.conj(), probe_b, probe_b.conj())
        };
        h[2][3] -= oe * half;
        h[3][2] -= oe_conj * half;
        h[1][0] -= ob * half;
        h[0][1] -= ob_conj * half;

        // -i [H, rho] - damp .* rho + feeds
        let mut out = [[zero; 5]; 5];
        let minus_i = Complex::new(T::zero(), -T::one());
        for a in 0..5 {
            for b in 0..5 {
                let mut comm = zero;
                for k in 0..5 {
                    comm = comm + h[a][k] * rho[k][b] - rho[a][k] * h[k][b];
                }
                out[a][b] = minus_i * comm - rho[a][b] * self.damp[a][b];
            }
        }
        for &(from, to, rate) in &self.feeds {
            out[to][to] += rho[from][from] * rate;
        }
        out
    }
}

/// Dense EOM evaluation for cross-checking the optimized right-hand side in
/// [`crate::bloch`] against this module's independently coded generator.
#[cfg(test)]
#[allow(clippy::too_many_arguments)]
pub(crate) fn dense_rhs_for_tests<T: Real>(
    params: &MediumParams<T>,
    detuning: T,
    phi0: T,
    include_prep: bool,
    rho: &Mat<T>,
    probe_e: Complex<T>,
    probe_b: Complex<T>,
) -> Mat<T> {
    let eom = Eom::new(params, detuning, phi0, include_prep);
    eom.rhs(rho, probe_e, probe_b)
}

fn dark_matrix<T: Real>(params: &MediumParams<T>) -> Result<Mat<T>, Error> {
    let dark = params.dark_state()?;
    let zero = Complex::new(T::zero(), T::zero());
    let mut rho = [[zero; 5]; 5];
    rho[0][0] = Complex::new(dark.rho11, T::zero());
    rho[3][3] = Complex::new(dark.rho44, T::zero());
    rho[3][0] = dark.rho41;
    rho[0][3] = dark.rho41.conj();
    Ok(rho)
}

fn sector<T: Real>(m: &Mat<T>) -> [Complex<T>; 6] {
    let mut v = [Complex::new(T::zero(), T::zero()); 6];
    for (k, &(a, b)) in PAIRS.iter().enumerate() {
        v[k] = m[a][b];
    }
    v
}

/// Gaussian elimination with partial pivoting for small complex systems.
fn solve_linear<T: Real>(
    mut a: Vec<Vec<Complex<T>>>,
    mut b: Vec<Complex<T>>,
) -> Result<Vec<Complex<T>>, Error> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .norm_sqr()
                    .partial_cmp(&a[j][col].norm_sqr())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot][col].norm_sqr() <= T::zero() {
            return Err(Error::LinearSolve(format!(
                "singular steady-state system at column {col}"
            )));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let sub = a[col][k] * factor;
                a[row][k] -= sub;
            }
            let sub = b[col] * factor;
            b[row] -= sub;
        }
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut x = vec![zero; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Scaled probe response at one drive configuration: returns
/// (3 L γ34 ρ34, 3 L γ34 α ρ21), the polarization and magnetization in the
/// units of the constitutive relation.
pub fn probe_response<T: Real>(
    params: &MediumParams<T>,
    detuning: T,
    phi0: T,
    include_preparation_fields: bool,
    probe_e: Complex<T>,
    probe_b: Complex<T>,
) -> Result<(Complex<T>, Complex<T>), Error> {
    let eom = Eom::new(params, detuning, phi0, include_preparation_fields);
    let rho0 = dark_matrix(params)?;
    let base = eom.rhs(
        &rho0,
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::zero(), T::zero()),
    );
    let jac = jacobian(&eom, &rho0, &base);
    let x = solve_drive(&eom, &rho0, &base, &jac, probe_e, probe_b)?;
    let strength = r::<T>(3.0) * params.scaled_density * params.gamma34;
    Ok((
        x[IDX_RHO34] * strength,
        x[IDX_RHO21] * strength * params.alpha_fs,
    ))
}

fn jacobian<T: Real>(eom: &Eom<T>, rho0: &Mat<T>, base: &Mat<T>) -> [[Complex<T>; 6]; 6] {
    let zero = Complex::new(T::zero(), T::zero());
    let mut jac = [[zero; 6]; 6];
    for (k, &(a, b)) in PAIRS.iter().enumerate() {
        let mut pert = *rho0;
        pert[a][b] += Complex::new(T::one(), T::zero());
        let col = eom.rhs(&pert, zero, zero);
        let col = sector(&col);
        let base_s = sector(base);
        for i in 0..6 {
            jac[i][k] = col[i] - base_s[i];
        }
    }
    jac
}

fn solve_drive<T: Real>(
    eom: &Eom<T>,
    rho0: &Mat<T>,
    base: &Mat<T>,
    jac: &[[Complex<T>; 6]; 6],
    probe_e: Complex<T>,
    probe_b: Complex<T>,
) -> Result<[Complex<T>; 6], Error> {
    let driven = eom.rhs(rho0, probe_e, probe_b);
    let driven = sector(&driven);
    let base_s = sector(base);
    let a: Vec<Vec<Complex<T>>> = (0..6).map(|i| jac[i].to_vec()).collect();
    let b: Vec<Complex<T>> = (0..6).map(|i| -(driven[i] - base_s[i])).collect();
    let x = solve_linear(a, b)?;
    let mut out = [Complex::new(T::zero(), T::zero()); 6];
    out.copy_from_slice(&x);
    Ok(out)
}

/// Numerically extracts the response quadruple from the linearized
/// steady-state solve. The magnetizing field of the drive is taken as
/// H0 = B0/μ0, matching the convention in which the closed forms are derived;
/// in scaled units the (E, H) drive pair is (Ω_E, Ω_B/α).
pub fn steady_state_oracle<T: Real>(
    params: &MediumParams<T>,
    detuning: T,
    phi0: T,
    options: &OracleOptions<T>,
) -> Result<OracleResult<T>, Error> {
    let amp = options.probe_amplitude;
    if !(amp > T::zero()) {
        return Err(Error::InvalidParam {
            field: "probe_amplitude",
            message: "oracle probe amplitude must be > 0".into(),
        });
    }
    let eom = Eom::new(params, detuning, phi0, options.include_preparation_fields);
    let rho0 = dark_matrix(params)?;
    let zero = Complex::new(T::zero(), T::zero());
    let base = eom.rhs(&rho0, zero, zero);
    let jac = jacobian(&eom, &rho0, &base);

    let strength = r::<T>(3.0) * params.scaled_density * params.gamma34;
    let alpha = params.alpha_fs;
    let extract = |amp: T| -> Result<[Complex<T>; 4], Error> {
        let e_drive = Complex::new(amp, T::zero());
        let x_e = solve_drive(&eom, &rho0, &base, &jac, e_drive, zero)?;
        let x_b = solve_drive(&eom, &rho0, &base, &jac, zero, e_drive)?;
        let p1 = x_e[IDX_RHO34] * strength;
        let m1 = x_e[IDX_RHO21] * strength * alpha;
        let p2 = x_b[IDX_RHO34] * strength;
        let m2 = x_b[IDX_RHO21] * strength * alpha;
        // drives in (E, H) form: (amp, 0) and (0, amp/alpha)
        let drives = [
            [Complex::new(amp, T::zero()), zero],
            [zero, Complex::new(amp / alpha, T::zero())],
        ];
        let frob = drives
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b);
        let det = drives[0][0] * drives[1][1] - drives[0][1] * drives[1][0];
        if det.norm() * options.condition_guard < frob {
            return Err(Error::LinearSolve(format!(
                "extraction system condition number exceeds guard ({:e})",
                options.condition_guard
            )));
        }
        let pe = solve_linear(drives.iter().map(|r| r.to_vec()).collect(), vec![p1, p2])?;
        let mh = solve_linear(drives.iter().map(|r| r.to_vec()).collect(), vec![m1, m2])?;
        // P = chi_e E + xi_eh H ; M = xi_he E + chi_h H
        Ok([pe[0], mh[1], pe[1], mh[0]])
    };

    let quad = extract(amp)?;
    let quad2 = extract(amp + amp)?;
    let mut residual = T::zero();
    for k in 0..4 {
        let scale = quad[k].norm().max(quad2[k].norm());
        if scale > T::zero() {
            residual = residual.max((quad[k] - quad2[k]).norm() / scale);
        }
    }

    Ok(OracleResult {
        coefficients: ResponseCoefficients {
            chi_e: quad[0],
            chi_h: quad[1],
            xi_eh: quad[2],
            xi_he: quad[3],
            detuning,
            phi0,
        },
        linearity_residual: residual,
        nonlinearity_warning: residual > options.linearity_tolerance,
    })
}
