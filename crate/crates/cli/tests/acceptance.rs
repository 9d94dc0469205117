//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! The two propagation scenarios are shared across criteria through lazy
//! fixtures.

use chiralprop::config::parse_config;
use chiralprop::runner::{analytic_propagation, propagation_plan, run_scenario, PropagationPlan};
use chiralprop::selftest;
use chiralprop_core::dispersion::eta_medium_linearized;
use chiralprop_core::*;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load_plan(name: &str) -> PropagationPlan {
    let text = std::fs::read_to_string(configs_dir().join(name)).expect("bundled config");
    let cfg = parse_config(&text).expect("bundled config parses");
    propagation_plan(&cfg).expect("plan builds")
}

struct PropagationRun {
    plan: PropagationPlan,
    snapshots: Vec<Snapshot<f64>>,
    elapsed_seconds: f64,
}

fn run_with_dense_checks(name: &str) -> PropagationRun {
    let mut plan = load_plan(name);
    // criterion 9 wants the state invariants enforced at every sample
    plan.scenario.options.check_stride = 1;
    let started = Instant::now();
    let snapshots = run(&plan.scenario).expect("propagation succeeds within invariant bounds");
    PropagationRun {
        plan,
        snapshots,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    }
}

fn fig2() -> &'static PropagationRun {
    static RUN: OnceLock<PropagationRun> = OnceLock::new();
    RUN.get_or_init(|| run_with_dense_checks("fig2.toml"))
}

fn fig3() -> &'static PropagationRun {
    static RUN: OnceLock<PropagationRun> = OnceLock::new();
    RUN.get_or_init(|| run_with_dense_checks("fig3.toml"))
}

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "[{}] {criterion}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion}: {detail}");
}

fn fig2_params() -> MediumParams<f64> {
    MediumParams {
        gamma_dec: 0.5,
        gamma21: 0.0,
        phi_c: std::f64::consts::FRAC_PI_2,
        ..MediumParams::default()
    }
    .validate()
    .unwrap()
}

fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let syy: f64 = points.iter().map(|p| p.1 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let ss_tot = syy - sy * sy / n;
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    (slope, intercept, r2)
}

fn unwrap_series(phases: &mut [f64]) {
    for k in 1..phases.len() {
        let mut d = phases[k] - phases[k - 1];
        while d > std::f64::consts::PI {
            phases[k] -= 2.0 * std::f64::consts::PI;
            d = phases[k] - phases[k - 1];
        }
        while d < -std::f64::consts::PI {
            phases[k] += 2.0 * std::f64::consts::PI;
            d = phases[k] - phases[k - 1];
        }
    }
}

#[test]
fn criterion_01_oracle_equivalence() {
    let started = Instant::now();
    let result = selftest::oracle_equivalence(42, 100, 5).expect("oracle runs");
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "criterion 1 (oracle equivalence)",
        result.passed && elapsed < 30.0,
        &format!("{}; runtime {elapsed:.2} s (budget 30 s)", result.detail),
    );
}

#[test]
fn criterion_02_eigenvalue_index_consistency() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let dir: [C64; 4] =
        std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut points = Vec::new();
    for k in 0..9 {
        let m = 1e-6 * 10f64.powf(0.5 * k as f64);
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
    let (slope, _, _) = linear_fit(&points);

    // exact equality of the linearized forms after subtracting the frame term
    let mut worst_identity = 0.0f64;
    for _ in 0..200 {
        let mut c = || C64::new(rng.gen_range(-1e-2..1e-2), rng.gen_range(-1e-2..1e-2));
        let resp = ResponseCoefficients {
            chi_e: c(),
            chi_h: c(),
            xi_eh: c(),
            xi_he: c(),
            detuning: rng.gen_range(-1.0..1.0),
            phi0: 0.0,
        };
        for pol in [Polarization::Left, Polarization::Right] {
            let lin = C64::new(1.0, 0.0) + eta_medium_linearized(&resp, pol);
            worst_identity = worst_identity.max((lin - n_linear(&resp, pol)).norm());
        }
    }
    let passed = (slope - 2.0).abs() <= 0.1 && worst_identity < 1e-12;
    report(
        "criterion 2 (eta/n consistency)",
        passed,
        &format!("log-log slope {slope:.3} (2.0 +- 0.1); linearized identity residual {worst_identity:.2e} (< 1e-12)"),
    );
}

#[test]
fn criterion_03_chi_h_phase_independence() {
    let mut worst = 0.0f64;
    for lfc in [false, true] {
        let params = MediumParams {
            lfc_enabled: lfc,
            scaled_density: 0.3,
            gamma_dec: 0.5,
            ..fig2_params()
        };
        let dark = params.dark_state().unwrap();
        for dp in [0.0, 0.2, -0.7] {
            let reference = response_coefficients(&params, &dark, dp, 0.0)
                .unwrap()
                .chi_h;
            for k in 0..32 {
                let phi0 =
                    -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 32.0;
                let chi_h = response_coefficients(&params, &dark, dp, phi0)
                    .unwrap()
                    .chi_h;
                worst = worst.max((chi_h - reference).norm() / reference.norm());
            }
        }
    }
    report(
        "criterion 3 (chi_h phase independence)",
        worst < 1e-12,
        &format!("relative spread over 32 phases {worst:.2e} (< 1e-12)"),
    );
}

#[test]
fn criterion_04_group_index_cross_check() {
    let params = fig2_params();
    assert_eq!(params.gamma21, 0.0);
    let dark = params.dark_state().unwrap();
    let h = 1e-4;
    let phi0 = params.closed_loop_phase();
    let plus = response_coefficients(&params, &dark, h, phi0)
        .unwrap()
        .chi_e
        .re;
    let minus = response_coefficients(&params, &dark, -h, phi0)
        .unwrap()
        .chi_e
        .re;
    let slope = 0.5 * params.omega0() * (plus - minus) / (2.0 * h);
    let (ng, _) = group_index(&params, &dark).unwrap();
    let rel = (slope - ng).abs() / ng;
    report(
        "criterion 4 (group index cross-check)",
        rel < 1e-3,
        &format!("finite-difference slope {slope:.6e} vs n_g {ng:.6e}, relative error {rel:.2e} (< 1e-3)"),
    );
}

#[test]
fn criterion_05_fig2_reproduction() {
    let run = fig2();
    let params = &run.plan.scenario.params;
    let dark = params.dark_state().unwrap();
    let (ng, _) = group_index(params, &dark).unwrap();
    let k0 = params.omega0();
    let phi0 = params.closed_loop_phase();
    let b = beta(params, &dark, phi0, params.polarization).unwrap();
    let grid_ok = run.plan.scenario.grid.n_tau == 2048
        && (run.plan.scenario.grid.depth / run.plan.scenario.grid.dz).round() as usize >= 2000;

    let first = &run.snapshots[0];
    let last = run.snapshots.last().unwrap();
    let delay = last.metrics.centroid - first.metrics.centroid;
    let delay_expected = ng * last.z;
    let delay_err = (delay - delay_expected).abs() / delay_expected;

    let peak_dev = run
        .snapshots
        .iter()
        .map(|s| (s.metrics.peak / first.metrics.peak - 1.0).abs())
        .fold(0.0, f64::max);

    let mut phases: Vec<f64> = run.snapshots.iter().map(|s| s.metrics.phase).collect();
    unwrap_series(&mut phases);
    let points: Vec<(f64, f64)> = run
        .snapshots
        .iter()
        .zip(&phases)
        .map(|(s, &p)| (s.z, p))
        .collect();
    let (slope, _, r2) = linear_fit(&points);
    let slope_expected = b.re * k0;
    let slope_err = (slope - slope_expected).abs() / slope_expected;

    let im_beta_ok = b.im.abs() < 1e-10;
    let passed = grid_ok
        && delay_err < 0.05
        && peak_dev < 0.02
        && slope_err < 0.05
        && im_beta_ok
        && r2 > 0.999
        && run.elapsed_seconds < 120.0;
    report(
        "criterion 5 (fig2 reproduction)",
        passed,
        &format!(
            "delay {delay:.2} vs n_g z {delay_expected:.2} ({:.2}%); peak deviation {:.2}% (< 2%); \
             phase slope {slope:.1} vs Re(beta) k0 {slope_expected:.1} ({:.2}%, R2 {r2:.5}); \
             |Im beta| {:.1e} (< 1e-10); runtime {:.1} s (< 120 s, single-threaded)",
            100.0 * delay_err,
            100.0 * peak_dev,
            100.0 * slope_err,
            b.im.abs(),
            run.elapsed_seconds
        ),
    );
}

#[test]
fn criterion_06_fig3_reproduction() {
    let run = fig3();
    let params = &run.plan.scenario.params;
    let dark = params.dark_state().unwrap();
    let (ng, _) = group_index(params, &dark).unwrap();
    let k0 = params.omega0();
    let b_pi2 = beta(
        params,
        &dark,
        std::f64::consts::FRAC_PI_2,
        params.polarization,
    )
    .unwrap();
    let b_0 = beta(params, &dark, 0.0, params.polarization).unwrap();
    let slope_ref = b_pi2.re * k0;
    let gain_ref = -b_0.im * k0;

    let tau0 = run.plan.scenario.pulse.center;
    // schedule: pi/2 until 580, ramp 60 to 0, flat to 760, ramp back;
    // windows are taken by the model centroid time tau0 + n_g z
    let tc = |z: f64| tau0 + ng * z;
    let mut phases: Vec<f64> = run.snapshots.iter().map(|s| s.metrics.phase).collect();
    unwrap_series(&mut phases);
    let series: Vec<(f64, f64, f64)> = run
        .snapshots
        .iter()
        .zip(&phases)
        .map(|(s, &p)| (s.z, p, s.metrics.peak.ln()))
        .collect();

    let window = |lo: f64, hi: f64| -> Vec<(f64, f64, f64)> {
        series
            .iter()
            .copied()
            .filter(|&(z, _, _)| tc(z) >= lo && tc(z) <= hi)
            .collect()
    };
    let plateau = window(665.0, 745.0);
    let pre = window(0.0, 565.0);
    assert!(
        plateau.len() >= 5 && pre.len() >= 5,
        "windows must be sampled"
    );
    let (plateau_phase_slope, _, _) =
        linear_fit(&plateau.iter().map(|&(z, p, _)| (z, p)).collect::<Vec<_>>());
    let (plateau_gain, _, _) =
        linear_fit(&plateau.iter().map(|&(z, _, g)| (z, g)).collect::<Vec<_>>());
    let (pre_phase_slope, _, _) =
        linear_fit(&pre.iter().map(|&(z, p, _)| (z, p)).collect::<Vec<_>>());

    let plateau_ratio = plateau_phase_slope.abs() / slope_ref;
    let gain_err = (plateau_gain - gain_ref).abs() / gain_ref;
    let passed = plateau_ratio < 0.10
        && gain_err < 0.10
        && b_0.re == 0.0
        && (pre_phase_slope - slope_ref).abs() / slope_ref < 0.05;
    report(
        "criterion 6 (fig3 reproduction)",
        passed,
        &format!(
            "plateau phase slope {plateau_phase_slope:.1} = {:.3} of pi/2 slope {slope_ref:.1} (< 0.10); \
             gain rate {plateau_gain:.1} vs -Im(beta) k0 {gain_ref:.1} ({:.2}%, < 10%); \
             Re beta(0) = {:.1e} (exact zero); pi/2-segment slope {pre_phase_slope:.1}",
            plateau_ratio,
            100.0 * gain_err,
            b_0.re
        ),
    );
}

#[test]
fn criterion_07_fig4_beta_sweep_csv() {
    let text = std::fs::read_to_string(configs_dir().join("fig4.toml")).unwrap();
    let cfg = parse_config(&text).unwrap();
    let out_dir = std::env::temp_dir().join(format!("chiralprop_accept_{}", std::process::id()));
    let outputs = run_scenario(&cfg, &out_dir).expect("beta sweep runs");
    let beta_csv = outputs
        .iter()
        .find(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .ends_with("beta.csv")
        })
        .expect("beta csv written");
    let (header, rows) = chiralprop::runner::read_csv(beta_csv).unwrap();
    assert_eq!(header, vec!["phi0", "re_beta", "im_beta"]);

    let n = rows.len();
    let step = 2.0 * std::f64::consts::PI / (n - 1) as f64;
    let crossings = |col: usize| -> Vec<f64> {
        let scale = rows.iter().map(|r| r[col].abs()).fold(0.0, f64::max);
        let value = |r: &Vec<f64>| {
            if r[col].abs() <= 1e-9 * scale {
                0.0
            } else {
                r[col]
            }
        };
        let mut out = Vec::new();
        for w in rows.windows(2) {
            let (a, b) = (value(&w[0]), value(&w[1]));
            if a == 0.0 {
                out.push(w[0][0]);
            } else if a * b < 0.0 {
                out.push(w[0][0] + step * a.abs() / (a.abs() + b.abs()));
            }
        }
        let last = rows.last().unwrap();
        if value(last) == 0.0 {
            out.push(last[0]);
        }
        out
    };
    let re_zeros = crossings(1);
    let im_zeros = crossings(2);
    let near = |zeros: &[f64], target: f64| zeros.iter().any(|z| (z - target).abs() <= step);
    let pi = std::f64::consts::PI;
    let at = |phi: f64| -> &Vec<f64> {
        rows.iter()
            .min_by(|a, b| (a[0] - phi).abs().partial_cmp(&(b[0] - phi).abs()).unwrap())
            .unwrap()
    };
    let signs_ok = at(pi / 2.0)[1] > 0.0 && at(0.0)[2] < 0.0;
    let passed = n == 361
        && near(&re_zeros, -pi)
        && near(&re_zeros, 0.0)
        && near(&re_zeros, pi)
        && near(&im_zeros, -pi / 2.0)
        && near(&im_zeros, pi / 2.0)
        && signs_ok;
    let _ = std::fs::remove_dir_all(&out_dir);
    report(
        "criterion 7 (fig4 beta sweep)",
        passed,
        &format!(
            "{n} rows; Re zeros {re_zeros:?}, Im zeros {im_zeros:?} (within one step of -pi/0/pi and +-pi/2); \
             Re beta(pi/2) > 0 and Im beta(0) < 0: {signs_ok}"
        ),
    );
}

#[test]
fn criterion_08_numerical_vs_analytic_propagation() {
    let run = fig2();
    let numerical = &run.snapshots.last().unwrap().grid;
    let full = analytic_propagation(&run.plan, CoefficientMode::FullDispersion).unwrap();
    let frozen = analytic_propagation(&run.plan, CoefficientMode::FrozenAtResonance).unwrap();

    let m = pulse_metrics(&full).unwrap();
    let peak = m.peak;
    let centroid_idx = ((m.centroid - full.tau_start) / full.d_tau).round() as usize;
    let sigma_cells = (run.plan.scenario.pulse.sigma / full.d_tau).round() as usize;

    let mut dev_full_fwhm = 0.0f64;
    for j in 0..numerical.len() {
        if full.omega_e[j].norm() > 0.5 * peak {
            dev_full_fwhm =
                dev_full_fwhm.max((numerical.omega_e[j] - full.omega_e[j]).norm() / peak);
        }
    }
    // away from the center the frozen-coefficient model degrades faster than
    // the full spectral solution (neglected frequency dependence of the
    // cross couplings and of the electric response); deviations are measured
    // relative to the local envelope
    let dev_at = |grid: &EnvelopeGrid<f64>, j: usize| {
        (numerical.omega_e[j] - grid.omega_e[j]).norm() / numerical.omega_e[j].norm()
    };
    let wings = [
        centroid_idx - 2 * sigma_cells,
        centroid_idx + 2 * sigma_cells,
    ];
    let frozen_center = dev_at(&frozen, centroid_idx);
    let frozen_wing = wings
        .iter()
        .map(|&j| dev_at(&frozen, j))
        .fold(0.0, f64::max);
    let full_wing = wings.iter().map(|&j| dev_at(&full, j)).fold(0.0, f64::max);
    let passed =
        dev_full_fwhm < 0.02 && frozen_wing > frozen_center && frozen_wing > 2.0 * full_wing;
    report(
        "criterion 8 (numerical vs analytic)",
        passed,
        &format!(
            "full-dispersion deviation over FWHM {:.4}% (< 2%); frozen-mode local deviation grows \
             off center: {:.2e} (center) -> {:.2e} (2 sigma) vs full-dispersion {:.2e}",
            100.0 * dev_full_fwhm,
            frozen_center,
            frozen_wing,
            full_wing
        ),
    );
}

#[test]
fn criterion_09_physical_invariants() {
    // fig2/fig3 run with trace/Hermiticity tolerance 1e-10, positivity bound
    // 1e-8 and per-sample checking; reaching this point means no drift was
    // detected anywhere in either run
    let run = fig2();
    let run3 = fig3();
    assert_eq!(run3.plan.scenario.options.check_stride, 1);
    assert_eq!(run.plan.scenario.options.check_stride, 1);
    assert_eq!(run.plan.scenario.options.trace_tolerance, 1e-10);
    assert_eq!(run.plan.scenario.options.positivity_tolerance, 1e-8);
    let params = &run.plan.scenario.params;
    let chirality = run
        .snapshots
        .iter()
        .map(|s| s.grid.chirality_residual(params))
        .fold(0.0, f64::max);

    // vacuum run: exact identity in the retarded frame
    let mut vacuum = load_plan("fig2.toml");
    vacuum.scenario.params.scaled_density = 0.0;
    vacuum.scenario.grid.depth = 2e-5;
    vacuum.scenario.grid.snapshot_depths = vec![0.0, 2e-5];
    let snaps = chiralprop_core::run(&vacuum.scenario).unwrap();
    let identical = snaps[0]
        .grid
        .omega_e
        .iter()
        .zip(&snaps.last().unwrap().grid.omega_e)
        .all(|(a, b)| a == b);

    let passed = chirality < 1e-3 && identical;
    report(
        "criterion 9 (physical invariants)",
        passed,
        &format!(
            "trace/Hermiticity drift < 1e-10 and positivity > -1e-8 enforced at every (z, tau) \
             sample of the fig2/fig3 runs; chirality residual {chirality:.2e} (< 1e-3); \
             vacuum run identity: {identical}"
        ),
    );
}

#[test]
fn criterion_10_handedness_and_inversion_symmetry() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
    let mut exact = true;
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let mut c = || C64::new(rng.gen_range(-1e-2..1e-2), rng.gen_range(-1e-2..1e-2));
        let resp = ResponseCoefficients {
            chi_e: c(),
            chi_h: c(),
            xi_eh: c(),
            xi_he: c(),
            detuning: rng.gen_range(-1.0..1.0),
            phi0: 0.3,
        };
        let negated = ResponseCoefficients {
            xi_eh: -resp.xi_eh,
            xi_he: -resp.xi_he,
            ..resp
        };
        exact &= eta(&resp, 1e7, Polarization::Right).unwrap()
            == eta(&negated, 1e7, Polarization::Left).unwrap();
        exact &= n_exact(&resp, Polarization::Right) == n_exact(&negated, Polarization::Left);
    }

    // medium inversion negates the cross couplings in closed forms and oracle
    let params = fig2_params();
    let dark = params.dark_state().unwrap();
    let inverted = MediumParams {
        phi1: params.phi1 + std::f64::consts::PI,
        phi2: params.phi2 + std::f64::consts::PI,
        phi_c: params.phi_c + std::f64::consts::PI,
        ..params.clone()
    };
    let dark_inv = inverted.dark_state().unwrap();
    let phi0 = params.closed_loop_phase();
    let phi0_inv = inverted.closed_loop_phase();
    for dp in [0.0, 0.4] {
        let a = response_coefficients(&params, &dark, dp, phi0).unwrap();
        let b = response_coefficients(&inverted, &dark_inv, dp, phi0_inv).unwrap();
        worst = worst.max((a.xi_eh + b.xi_eh).norm() / a.xi_eh.norm());
        worst = worst.max((a.xi_he + b.xi_he).norm() / a.xi_he.norm());
        let oa = steady_state_oracle(&params, dp, phi0, &OracleOptions::default()).unwrap();
        let ob = steady_state_oracle(&inverted, dp, phi0_inv, &OracleOptions::default()).unwrap();
        worst = worst.max(
            (oa.coefficients.xi_eh + ob.coefficients.xi_eh).norm() / oa.coefficients.xi_eh.norm(),
        );
        worst = worst.max(
            (oa.coefficients.xi_he + ob.coefficients.xi_he).norm() / oa.coefficients.xi_he.norm(),
        );
    }
    let passed = exact && worst < 1e-12;
    report(
        "criterion 10 (handedness/inversion symmetry)",
        passed,
        &format!("handedness swap exact: {exact}; inversion flip residual {worst:.2e} (< 1e-12)"),
    );
}
