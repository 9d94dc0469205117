//! Built-in verification suite: oracle equivalence, spectral round trip,
//! dispersion consistency, symmetry exactness, and solver grid convergence.

use anyhow::anyhow;
use chiralprop_core as core;
use chiralprop_core::{
    apply_spectral_filter, eta, n_exact, n_linear, response_coefficients, steady_state_oracle,
    EnvelopeGrid, MediumParams, OracleOptions, PhaseSchedule, Polarization, ResponseCoefficients,
    C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_params(rng: &mut ChaCha8Rng) -> MediumParams<f64> {
    let total = 3.0;
    MediumParams {
        gamma31: rng.gen_range(0.1..1.0),
        gamma32: rng.gen_range(0.1..1.0),
        gamma34: rng.gen_range(0.1..1.0),
        gamma21: rng.gen_range(0.0..0.01) * total,
        gamma51: rng.gen_range(0.2..1.0) * total,
        gamma54: rng.gen_range(0.2..1.0) * total,
        gamma_dec: rng.gen_range(0.0..1.0) * total,
        scaled_density: rng.gen_range(1e-3..1.0),
        omega1_mag: rng.gen_range(0.5..3.0) * total,
        omega2_mag: rng.gen_range(0.5..3.0) * total,
        omega_c_mag: rng.gen_range(0.5..4.0) * total,
        phi1: rng.gen_range(-3.1..3.1),
        phi2: rng.gen_range(-3.1..3.1),
        phi_c: rng.gen_range(-3.1..3.1),
        polarization: if rng.gen_bool(0.5) {
            Polarization::Left
        } else {
            Polarization::Right
        },
        lfc_enabled: false,
        ..MediumParams::default()
    }
    .validate()
    .expect("random draw is valid")
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Closed forms vs the linearized steady-state oracle over random parameter
/// draws, LFC off.
pub fn oracle_equivalence(seed: u64, sets: usize, detunings: usize) -> anyhow::Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..sets {
        let params = random_params(&mut rng);
        let dark = params.dark_state().map_err(|e| anyhow!("{e}"))?;
        let phi0 = rng.gen_range(-3.1..3.1);
        for _ in 0..detunings {
            let dp = rng.gen_range(-2.0..2.0);
            let closed =
                response_coefficients(&params, &dark, dp, phi0).map_err(|e| anyhow!("{e}"))?;
            let oracle = steady_state_oracle(&params, dp, phi0, &OracleOptions::default())
                .map_err(|e| anyhow!("{e}"))?;
            let o = oracle.coefficients;
            for (a, b) in [
                (closed.chi_e, o.chi_e),
                (closed.chi_h, o.chi_h),
                (closed.xi_eh, o.xi_eh),
                (closed.xi_he, o.xi_he),
            ] {
                worst = worst.max(rel(a, b));
            }
        }
    }
    Ok(CheckResult {
        name: "oracle-equivalence",
        passed: worst < 1e-8,
        detail: format!("{sets} sets x {detunings} detunings, max relative error {worst:.3e}"),
    })
}

/// FFT round trip without a filter.
pub fn spectral_round_trip() -> anyhow::Result<CheckResult> {
    let params = MediumParams::<f64>::default()
        .validate()
        .map_err(|e| anyhow!("{e}"))?;
    let schedule = PhaseSchedule::constant(params.closed_loop_phase());
    let grid = EnvelopeGrid::gaussian_probe(&params, &schedule, 2048, 0.390625, 50.0, 1e-4, 200.0)
        .map_err(|e| anyhow!("{e}"))?;
    let out = apply_spectral_filter(&grid, |_| C64::new(1.0, 0.0)).map_err(|e| anyhow!("{e}"))?;
    let peak = grid.omega_e.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let worst = grid
        .omega_e
        .iter()
        .zip(&out.omega_e)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max)
        / peak;
    Ok(CheckResult {
        name: "spectral-round-trip",
        passed: worst < 1e-12,
        detail: format!("relative residual {worst:.3e}"),
    })
}

/// n_exact -> n_linear second-order convergence and the eigenvalue identity.
pub fn dispersion_consistency(seed: u64) -> anyhow::Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let dir: [C64; 4] =
        std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut points = Vec::new();
    for k in 0..7 {
        let m = 1e-5 * 10f64.powf(0.5 * k as f64);
        let resp = ResponseCoefficients {
            chi_e: dir[0] * m,
            chi_h: dir[1] * m,
            xi_eh: dir[2] * m,
            xi_he: dir[3] * m,
            detuning: 0.0,
            phi0: 0.0,
        };
        let diff =
            (n_exact(&resp, Polarization::Left) - n_linear(&resp, Polarization::Left)).norm();
        points.push((m.ln(), diff.ln()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // eigenvalue vs linearized index identity
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = 1e-3;
        let resp = ResponseCoefficients {
            chi_e: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * m,
            chi_h: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * m,
            xi_eh: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * m,
            xi_he: C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * m,
            detuning: 0.1,
            phi0: 0.0,
        };
        let full = eta(&resp, 1e7, Polarization::Left).map_err(|e| anyhow!("{e}"))?;
        let lin = n_linear(&resp, Polarization::Left);
        worst = worst.max((full + C64::new(1.0 - 0.1 / 1e7, 0.0) - lin).norm());
    }
    let passed = (slope - 2.0).abs() < 0.1 && worst < 1e-5;
    Ok(CheckResult {
        name: "dispersion-consistency",
        passed,
        detail: format!("log-log slope {slope:.3}, eta/n_linear residual {worst:.3e}"),
    })
}

/// Handedness swap and medium inversion are exact symmetries.
pub fn symmetry_exactness(seed: u64) -> anyhow::Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6368_6972);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let params = random_params(&mut rng);
        let dark = params.dark_state().map_err(|e| anyhow!("{e}"))?;
        let dp = rng.gen_range(-1.5..1.5);
        let phi0 = rng.gen_range(-3.1..3.1);
        let resp = response_coefficients(&params, &dark, dp, phi0).map_err(|e| anyhow!("{e}"))?;
        let negated = ResponseCoefficients {
            xi_eh: -resp.xi_eh,
            xi_he: -resp.xi_he,
            ..resp
        };
        let right = eta(&resp, 1e7, Polarization::Right).map_err(|e| anyhow!("{e}"))?;
        let left = eta(&negated, 1e7, Polarization::Left).map_err(|e| anyhow!("{e}"))?;
        if right != left {
            worst = worst.max((right - left).norm());
        }
        // medium inversion: all control fields change sign
        let inverted = MediumParams {
            phi1: params.phi1 + std::f64::consts::PI,
            phi2: params.phi2 + std::f64::consts::PI,
            phi_c: params.phi_c + std::f64::consts::PI,
            ..params.clone()
        };
        let d_inv = inverted.dark_state().map_err(|e| anyhow!("{e}"))?;
        let resp_inv = response_coefficients(&inverted, &d_inv, dp, phi0 + std::f64::consts::PI)
            .map_err(|e| anyhow!("{e}"))?;
        worst = worst.max(rel(resp_inv.xi_eh, -resp.xi_eh));
        worst = worst.max(rel(resp_inv.xi_he, -resp.xi_he));
    }
    Ok(CheckResult {
        name: "symmetry-exactness",
        passed: worst < 1e-12,
        detail: format!("max residual {worst:.3e}"),
    })
}

/// Solver self-convergence on a reduced scenario.
pub fn solver_convergence() -> anyhow::Result<CheckResult> {
    let params = MediumParams::<f64> {
        gamma_dec: 0.5,
        gamma21: 0.0,
        phi_c: std::f64::consts::FRAC_PI_2,
        ..MediumParams::default()
    }
    .validate()
    .map_err(|e| anyhow!("{e}"))?;
    let schedule = PhaseSchedule::constant(params.closed_loop_phase());
    let make = |n_tau: usize, dz: f64, atomic_dt: f64| -> anyhow::Result<core::PulseMetrics<f64>> {
        let scenario = core::PropagationScenario {
            params: params.clone(),
            schedule: schedule.clone(),
            pulse: core::PulseSpec {
                sigma: 25.0,
                amplitude: 5e-8,
                center: 110.0,
            },
            grid: core::GridSpec {
                n_tau,
                d_tau: 400.0 / n_tau as f64,
                dz,
                depth: 1.2e-4,
                snapshot_depths: vec![1.2e-4],
                atomic_dt,
            },
            options: core::SolverOptions::default(),
        };
        Ok(core::run(&scenario)
            .map_err(|e| anyhow!("{e}"))?
            .pop()
            .unwrap()
            .metrics)
    };
    let coarse = make(512, 1.2e-6, 0.2)?;
    let fine = make(1024, 0.6e-6, 0.1)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let worst = rel(coarse.peak, fine.peak)
        .max(rel(coarse.centroid, fine.centroid))
        .max(rel(coarse.phase, fine.phase));
    Ok(CheckResult {
        name: "solver-grid-convergence",
        passed: worst < 5e-3,
        detail: format!("max metric change under refinement {worst:.3e}"),
    })
}

/// Runs the full suite, printing one line per check. Returns whether all
/// checks passed.
pub fn run_all(seed: u64) -> anyhow::Result<bool> {
    let results = vec![
        oracle_equivalence(seed, 100, 5)?,
        spectral_round_trip()?,
        dispersion_consistency(seed)?,
        symmetry_exactness(seed)?,
        solver_convergence()?,
    ];
    let mut all = true;
    for r in &results {
        println!(
            "[{}] {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
        all &= r.passed;
    }
    Ok(all)
}
