//! Atomic density-matrix equations of motion for the five-level system.
//!
//! Basis ordering |1⟩..|5⟩. The Hamiltonian couples Ω_B on |2⟩⟨1|, Ω_E on
//! |3⟩⟨4|, Ω_C on |3⟩⟨2|, Ω_1 on |5⟩⟨1| and Ω_2 on |5⟩⟨4|, with the probe
//! detuning on |2⟩ and |3⟩. Dissipation consists of the radiative decay
//! channels |3⟩→{|1⟩,|2⟩,|4⟩}, |2⟩→|1⟩, |5⟩→{|1⟩,|4⟩} and collisional
//! dephasing with phase baths on |1⟩ and |3⟩; |2⟩ and |4⟩ share a common bath
//! and the ground manifold {|1⟩,|4⟩,|5⟩} sees only common-mode shifts, so the
//! prepared dark-state coherence is collision-protected. This reproduces the
//! probe-sector coherence decay rates of [`crate::response::decoherence_rates`]
//! and leaves the dark state exactly stationary.
//!
//! The hot path ([`bloch_rhs`]) is hand-written against the sparse coupling
//! structure; [`crate::oracle`] carries an independently coded dense version
//! of the same generator, and the two are cross-checked in the tests.

use crate::params::MediumParams;
use crate::scalar::{r, Real};
use crate::Complex;

/// 5x5 complex matrix in row-major fixed-size form.
pub type Matrix5<T> = [[Complex<T>; 5]; 5];

/// Instantaneous local fields driving one atom, in units of γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSet<T> {
    pub omega_e: Complex<T>,
    pub omega_b: Complex<T>,
    pub omega_c: Complex<T>,
    pub omega_1: Complex<T>,
    pub omega_2: Complex<T>,
}

impl<T: Real> FieldSet<T> {
    pub fn probe_free(omega_c: Complex<T>, omega_1: Complex<T>, omega_2: Complex<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        FieldSet {
            omega_e: zero,
            omega_b: zero,
            omega_c,
            omega_1,
            omega_2,
        }
    }
}

/// Precomputed dissipator tables and local-field constants for the equations
/// of motion at a fixed probe detuning.
#[derive(Debug, Clone)]
pub struct BlochContext<T> {
    /// Per-entry damping: half out-rate sums plus dephasing; diagonal carries
    /// the full population out-rates.
    damp: [[T; 5]; 5],
    /// Radiative feeding (from, to, rate).
    feeds: [(usize, usize, T); 6],
    detuning: T,
    lfc: bool,
    /// L γ34 — Lorenz-Lorentz back-action of the polarization on Ω_E.
    lg34: T,
    /// L γ34 α² — back-action of the magnetization on Ω_B.
    lg34a2: T,
}

impl<T: Real> BlochContext<T> {
    pub fn new(params: &MediumParams<T>, detuning: T) -> Self {
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
        let half = r::<T>(0.5);
        for (i, row) in damp.iter_mut().enumerate() {
            for (j, d) in row.iter_mut().enumerate() {
                *d = if i == j {
                    out[i]
                } else {
                    half * (out[i] + out[j]) + deph[i][j]
                };
            }
        }
        BlochContext {
            damp,
            feeds,
            detuning,
            lfc: params.lfc_enabled,
            lg34: params.scaled_density * params.gamma34,
            lg34a2: params.scaled_density * params.gamma34 * params.alpha_fs * params.alpha_fs,
        }
    }

    pub fn detuning(&self) -> T {
        self.detuning
    }
}

/// dρ/dτ = -i[H_I, ρ] + D(ρ) at the given local fields. With local-field
/// corrections enabled, the probe couplings are replaced by their
/// Lorenz-Lorentz local values Ω_E + Lγ34 ρ34 and Ω_B + Lγ34α² ρ21 before the
/// commutator is formed.
pub fn bloch_rhs<T: Real>(
    ctx: &BlochContext<T>,
    rho: &Matrix5<T>,
    fields: &FieldSet<T>,
) -> Matrix5<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let half = r::<T>(0.5);

    let (oe, ob) = if ctx.lfc {
        (
            fields.omega_e + rho[2][3] * ctx.lg34,
            fields.omega_b + rho[1][0] * ctx.lg34a2,
        )
    } else {
        (fields.omega_e, fields.omega_b)
    };

    // commutator accumulated coupling by coupling: for H_pq = g (H_qp = g*),
    // Hρ adds g ρ[q][:] to row p and g* ρ[p][:] to row q; ρH adds ρ[:][p] g to
    // column q and ρ[:][q] g* to column p.
    let couplings: [(usize, usize, Complex<T>); 5] = [
        (1, 0, -ob * half),
        (2, 3, -oe * half),
        (2, 1, -fields.omega_c * half),
        (4, 0, -fields.omega_1 * half),
        (4, 3, -fields.omega_2 * half),
    ];

    let mut comm = [[zero; 5]; 5];
    for &(p, q, g) in &couplings {
        if g == zero {
            continue;
        }
        let gc = g.conj();
        for k in 0..5 {
            comm[p][k] += g * rho[q][k];
            comm[q][k] += gc * rho[p][k];
            comm[k][q] -= rho[k][p] * g;
            comm[k][p] -= rho[k][q] * gc;
        }
    }
    // diagonal part: H_kk = -Δp for k in {1, 2}
    let dp = ctx.detuning;
    if dp != T::zero() {
        for k in 0..5 {
            // (H ρ - ρ H)_{ab} += (h_a - h_b) ρ_{ab}; h = (0, -Δp, -Δp, 0, 0)
            let ha = if k == 1 || k == 2 { -dp } else { T::zero() };
            for b in 0..5 {
                let hb = if b == 1 || b == 2 { -dp } else { T::zero() };
                let factor = ha - hb;
                if factor != T::zero() {
                    comm[k][b] += rho[k][b] * factor;
                }
            }
        }
    }

    let minus_i = Complex::new(T::zero(), -T::one());
    let mut out = [[zero; 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            out[a][b] = minus_i * comm[a][b] - rho[a][b] * ctx.damp[a][b];
        }
    }
    for &(from, to, rate) in &ctx.feeds {
        out[to][to] += rho[from][from] * rate;
    }
    out
}

/// Hermitian unit-trace atomic state with validity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix<T>(pub Matrix5<T>);

impl<T: Real> DensityMatrix<T> {
    /// Dark state over |1⟩, |4⟩ as a full density matrix.
    pub fn dark(dark: &crate::params::DarkState<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let mut rho = [[zero; 5]; 5];
        rho[0][0] = Complex::new(dark.rho11, T::zero());
        rho[3][3] = Complex::new(dark.rho44, T::zero());
        rho[3][0] = dark.rho41;
        rho[0][3] = dark.rho41.conj();
        DensityMatrix(rho)
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for k in 0..5 {
            t += self.0[k][k];
        }
        t
    }

    /// Largest entry of |ρ - ρ†|.
    pub fn hermiticity_error(&self) -> T {
        let mut worst = T::zero();
        for a in 0..5 {
            for b in a..5 {
                worst = worst.max((self.0[a][b] - self.0[b][a].conj()).norm());
            }
        }
        worst
    }

    /// |tr ρ - 1|.
    pub fn trace_error(&self) -> T {
        (self.trace() - Complex::new(T::one(), T::zero())).norm()
    }

    /// True when all eigenvalues exceed `-shift` (checked by an attempted
    /// Cholesky factorization of ρ + shift·I; cheap enough to run on every
    /// sample).
    pub fn is_positive_within(&self, shift: T) -> bool {
        let mut m = self.0;
        for k in 0..5 {
            m[k][k] += Complex::new(shift, T::zero());
        }
        cholesky_check(&m)
    }

    /// Smallest eigenvalue of the Hermitian part, via Jacobi iteration on the
    /// real-symmetric embedding.
    pub fn min_eigenvalue(&self) -> T {
        let mut emb = [[T::zero(); 10]; 10];
        for a in 0..5 {
            for b in 0..5 {
                let x = r::<T>(0.5) * (self.0[a][b].re + self.0[b][a].re);
                let y = r::<T>(0.5) * (self.0[a][b].im - self.0[b][a].im);
                emb[a][b] = x;
                emb[a + 5][b + 5] = x;
                emb[a + 5][b] = y;
                emb[a][b + 5] = -y;
            }
        }
        jacobi_min_eigenvalue(&mut emb)
    }
}

/// Attempted Cholesky factorization of a Hermitian matrix; returns whether it
/// is positive definite.
fn cholesky_check<T: Real>(m: &Matrix5<T>) -> bool {
    let mut l = [[Complex::new(T::zero(), T::zero()); 5]; 5];
    for j in 0..5 {
        let mut d = m[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > T::zero()) {
            return false;
        }
        let dj = d.sqrt();
        l[j][j] = Complex::new(dj, T::zero());
        for i in j + 1..5 {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / dj;
        }
    }
    true
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi sweeps.
fn jacobi_min_eigenvalue<T: Real>(m: &mut [[T; 10]; 10]) -> T {
    let n = 10;
    for _sweep in 0..30 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[p][q].abs());
            }
        }
        if off < r::<T>(1e-14) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() <= off * r::<T>(1e-3) {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (r::<T>(2.0) * m[p][q]);
                let t = if theta >= T::zero() {
                    T::one() / (theta + (T::one() + theta * theta).sqrt())
                } else {
                    -T::one() / (-theta + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut min = m[0][0];
    for k in 1..n {
        min = min.min(m[k][k]);
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::MediumParams;
    use crate::response::decoherence_rates;
    use crate::C64;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params_with_dec() -> MediumParams<f64> {
        MediumParams {
            gamma_dec: 0.5,
            gamma21: 0.0,
            ..MediumParams::default()
        }
        .validate()
        .unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng) -> Matrix5<f64> {
        let mut m = [[C64::new(0.0, 0.0); 5]; 5];
        for a in 0..5 {
            m[a][a] = C64::new(rng.gen_range(0.0..0.4), 0.0);
            for b in a + 1..5 {
                let v = C64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
                m[a][b] = v;
                m[b][a] = v.conj();
            }
        }
        m
    }

    #[test]
    fn dark_state_is_stationary() {
        let p = params_with_dec();
        let ctx = BlochContext::new(&p, 0.0);
        let dark = DensityMatrix::dark(&p.dark_state().unwrap());
        let fields = FieldSet::probe_free(p.omega_c(), p.omega1(), p.omega2());
        let d = bloch_rhs(&ctx, &dark.0, &fields);
        let max = d.iter().flatten().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(max < 1e-15, "|rhs(dark)| = {max:.3e}");
    }

    #[test]
    fn derivative_is_traceless_and_hermitian() {
        let p = params_with_dec();
        let ctx = BlochContext::new(&p, 0.35);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let rho = random_hermitian(&mut rng);
            let fields = FieldSet {
                omega_e: C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)),
                omega_b: C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)),
                omega_c: p.omega_c(),
                omega_1: p.omega1(),
                omega_2: p.omega2(),
            };
            let d = DensityMatrix(bloch_rhs(&ctx, &rho, &fields));
            assert!(d.trace().norm() < 1e-14);
            assert!(d.hermiticity_error() < 1e-14);
        }
    }

    #[test]
    fn matches_oracle_equations_of_motion() {
        // the hand-optimized rhs and the oracle's dense EOM are independent
        // implementations of the same generator
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for lfc in [false, true] {
            let p = MediumParams {
                gamma_dec: 0.31,
                lfc_enabled: lfc,
                scaled_density: 0.4,
                ..MediumParams::default()
            }
            .validate()
            .unwrap();
            let dp = 0.27;
            let ctx = BlochContext::new(&p, dp);
            let fields = FieldSet {
                omega_e: C64::new(0.013, -0.007),
                omega_b: C64::new(-0.003, 0.009),
                omega_c: p.omega_c(),
                omega_1: p.omega1(),
                omega_2: p.omega2(),
            };
            for _ in 0..10 {
                let rho = random_hermitian(&mut rng);
                let fast = bloch_rhs(&ctx, &rho, &fields);
                let dense = crate::oracle::dense_rhs_for_tests(
                    &p,
                    dp,
                    p.closed_loop_phase(),
                    true,
                    &rho,
                    fields.omega_e,
                    fields.omega_b,
                );
                for a in 0..5 {
                    for b in 0..5 {
                        assert!(
                            (fast[a][b] - dense[a][b]).norm() < 1e-13,
                            "mismatch at ({a},{b}): {:?} vs {:?}",
                            fast[a][b],
                            dense[a][b]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn coherence_poles_match_closed_form_rates() {
        // with the control field off, each probe-sector coherence decays
        // independently; the rhs evaluated on a unit coherence exposes the
        // pole, which must match the closed-form decoherence rates
        for lfc in [false, true] {
            let p = MediumParams {
                gamma_dec: 0.4,
                gamma21: 0.002,
                omega_c_mag: 0.0,
                lfc_enabled: lfc,
                scaled_density: 0.05,
                ..MediumParams::default()
            }
            .validate()
            .unwrap();
            let dark = p.dark_state().unwrap();
            let dp = 0.19;
            let ctx = BlochContext::new(&p, dp);
            let fields =
                FieldSet::probe_free(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            let rates = decoherence_rates(&p, &dark, dp);
            let base = DensityMatrix::dark(&dark).0;
            let base_rhs = bloch_rhs(&ctx, &base, &fields);
            // (row, col) of rho_ab for ab in {34, 21, 24, 31}; with LFC on,
            // the magnetization back-action adds an alpha^2-suppressed shift
            // -i L g34 a^2 rho11 / 2 to the rho21 pole that the closed-form
            // Gamma21 (like the analytic treatment) drops
            let gamma21_lfc_shift = if lfc {
                C64::new(
                    0.0,
                    -0.5 * p.scaled_density * p.gamma34 * p.alpha_fs.powi(2) * dark.rho11,
                )
            } else {
                C64::new(0.0, 0.0)
            };
            let probes: [((usize, usize), C64); 4] = [
                ((2, 3), rates.gamma34),
                ((1, 0), rates.gamma21 + gamma21_lfc_shift),
                ((1, 3), rates.gamma24),
                ((2, 0), rates.gamma31),
            ];
            for ((a, b), expected) in probes {
                let mut rho = base;
                rho[a][b] += C64::new(1.0, 0.0);
                rho[b][a] += C64::new(1.0, 0.0);
                let d = bloch_rhs(&ctx, &rho, &fields);
                let pole = -(d[a][b] - base_rhs[a][b]);
                assert!(
                    (pole - expected).norm() < 1e-12,
                    "lfc={lfc} rho({a},{b}): pole {pole:?} vs {expected:?}"
                );
            }
        }
    }

    #[test]
    fn positivity_checks_agree() {
        // the Cholesky-based bound check and the Jacobi eigenvalue agree
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let mut m = random_hermitian(&mut rng);
            let shift = rng.gen_range(-0.2..0.4);
            for k in 0..5 {
                m[k][k] += C64::new(shift, 0.0);
            }
            let dm = DensityMatrix(m);
            let min = dm.min_eigenvalue();
            assert!(dm.is_positive_within(-min + 1e-9));
            assert!(!dm.is_positive_within(-min - 1e-9));
        }
    }

    #[test]
    fn min_eigenvalue_of_known_matrix() {
        let mut m = [[C64::new(0.0, 0.0); 5]; 5];
        for (k, v) in [0.5, 0.3, 0.4, 0.05, 0.02].into_iter().enumerate() {
            m[k][k] = C64::new(v, 0.0);
        }
        m[0][1] = C64::new(0.0, 0.1);
        m[1][0] = C64::new(0.0, -0.1);
        let dm = DensityMatrix(m);
        // the coupled 2x2 block has eigenvalues 0.4 -+ sqrt(0.01 + 0.01);
        // everything else is diagonal, so the minimum is 0.02
        assert_relative_eq!(dm.min_eigenvalue(), 0.02, epsilon = 1e-12);
        m[3][3] = C64::new(-0.05, 0.0);
        assert_relative_eq!(DensityMatrix(m).min_eigenvalue(), -0.05, epsilon = 1e-12);
    }

    #[test]
    fn trace_and_hermiticity_diagnostics() {
        let p = params_with_dec();
        let dark = DensityMatrix::dark(&p.dark_state().unwrap());
        assert!(dark.trace_error() < 1e-15);
        assert!(dark.hermiticity_error() == 0.0);
        assert!(dark.is_positive_within(1e-12));
        let mut bad = dark;
        bad.0[2][0] = C64::new(0.3, 0.0);
        assert!(DensityMatrix(bad.0).hermiticity_error() > 0.29);
    }
}
