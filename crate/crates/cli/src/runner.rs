//! Scenario dispatch: runs the configured experiment family and writes its
//! output files.

use crate::config::{medium_params, schedule, Mode, ScenarioConfig};
use crate::outputs::{
    write_beta_csv, write_index_csv, write_manifest, write_metrics_csv, write_response_csv,
    write_snapshot_csv, MetricsRow,
};
use anyhow::{anyhow, bail, Context};
use chiralprop_core as core;
use chiralprop_core::{
    beta, eta, group_index, n_exact, response_coefficients, CoefficientMode, EnvelopeGrid,
    PropagationScenario, ResponseCoefficients, Snapshot, C64,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Failure classification for process exit codes.
#[derive(Debug)]
pub enum RunFailure {
    /// Configuration problem (exit code 2).
    Config(anyhow::Error),
    /// Numerical failure during the run (exit code 3).
    Numerical(anyhow::Error),
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunFailure::Config(e) => write!(f, "configuration error: {e:#}"),
            RunFailure::Numerical(e) => write!(f, "numerical failure: {e:#}"),
        }
    }
}

/// Worker-thread cap: CHIRALPROP_THREADS if set, else the available
/// parallelism.
pub fn thread_cap() -> anyhow::Result<usize> {
    match std::env::var("CHIRALPROP_THREADS") {
        Ok(value) => {
            let n: usize = value.trim().parse().map_err(|_| {
                anyhow!("CHIRALPROP_THREADS must be a positive integer, got {value:?}")
            })?;
            if n == 0 {
                bail!("CHIRALPROP_THREADS must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
    }
}

/// Evaluates `f` over the items, splitting across up to `threads` workers;
/// the output order matches the input order regardless of the thread count.
fn parallel_map<T, U, F>(items: Vec<T>, threads: usize, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::new();
    out.resize_with(items.len(), || None);
    let f = &f;
    std::thread::scope(|scope| {
        for (slot_chunk, item_chunk) in out.chunks_mut(chunk).zip(items.chunks(chunk)) {
            scope.spawn(move || {
                for (slot, item) in slot_chunk.iter_mut().zip(item_chunk) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter()
        .map(|x| x.expect("worker filled slot"))
        .collect()
}

/// Runs a scenario, writing all outputs plus the manifest into `out_dir`.
/// Returns the list of written files.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunFailure> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(RunFailure::Config)?;
    let started = Instant::now();
    let prefix = cfg.prefix();
    let result = match cfg.mode {
        Mode::ResponseSweep => response_sweep(cfg, out_dir, &prefix),
        Mode::BetaSweep => beta_sweep(cfg, out_dir, &prefix),
        Mode::Propagate => propagate(cfg, out_dir, &prefix),
    };
    let mut outputs = result?;
    let manifest = write_manifest(
        out_dir,
        &prefix,
        cfg,
        &outputs,
        started.elapsed().as_secs_f64(),
    )
    .map_err(RunFailure::Config)?;
    outputs.push(manifest);
    Ok(outputs)
}

fn response_sweep(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>, RunFailure> {
    let params = medium_params(cfg).map_err(RunFailure::Config)?;
    let dark = params
        .dark_state()
        .map_err(|e| RunFailure::Config(anyhow!("{e}")))?;
    let resp = cfg.response.as_ref().expect("validated");
    let count = resp.dp_count.expect("validated");
    let phi0_list = resp
        .phi0_list
        .clone()
        .unwrap_or_else(|| vec![params.closed_loop_phase()]);
    let threads = thread_cap().map_err(RunFailure::Config)?;

    let step = (resp.dp_max - resp.dp_min) / (count - 1) as f64;
    let mut points = Vec::with_capacity(count * phi0_list.len());
    for k in 0..count {
        let dp = resp.dp_min + step * k as f64;
        for &phi0 in &phi0_list {
            points.push((dp, phi0));
        }
    }
    let rows: Vec<Result<ResponseCoefficients<f64>, core::Error>> =
        parallel_map(points, threads, |&(dp, phi0)| {
            response_coefficients(&params, &dark, dp, phi0)
        });
    let rows: Vec<ResponseCoefficients<f64>> = rows
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| RunFailure::Numerical(anyhow!("{e}")))?;

    // refractive index and eigenvalue along the detuning grid at the first
    // phase of the list
    let phi0 = phi0_list[0];
    let omega0 = params.omega0();
    let index_rows: Vec<(f64, C64, C64)> = rows
        .iter()
        .filter(|r| r.phi0 == phi0)
        .map(|r| {
            let n = n_exact(r, params.polarization);
            let ev = eta(r, omega0, params.polarization)
                .map_err(|e| RunFailure::Numerical(anyhow!("{e}")))?;
            Ok::<_, RunFailure>((r.detuning, n, ev))
        })
        .collect::<Result<_, _>>()?;

    let mut outputs = Vec::new();
    outputs.push(
        write_response_csv(out_dir.join(format!("{prefix}_response.csv")), &rows)
            .map_err(RunFailure::Config)?,
    );
    outputs.push(
        write_index_csv(out_dir.join(format!("{prefix}_index.csv")), &index_rows)
            .map_err(RunFailure::Config)?,
    );
    Ok(outputs)
}

fn beta_sweep(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>, RunFailure> {
    let params = medium_params(cfg).map_err(RunFailure::Config)?;
    let dark = params
        .dark_state()
        .map_err(|e| RunFailure::Config(anyhow!("{e}")))?;
    let count = cfg.response.as_ref().expect("validated").phi0_count;
    let step = 2.0 * std::f64::consts::PI / (count - 1) as f64;
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let phi0 = -std::f64::consts::PI + step * k as f64;
        let b = beta(&params, &dark, phi0, params.polarization)
            .map_err(|e| RunFailure::Numerical(anyhow!("{e}")))?;
        rows.push((phi0, b));
    }
    let path = write_beta_csv(out_dir.join(format!("{prefix}_beta.csv")), &rows)
        .map_err(RunFailure::Config)?;
    Ok(vec![path])
}

/// Snapshot depth layout for a propagation run: metrics rows at
/// `metrics_interval`, full grid CSVs at `snapshot_interval`.
pub struct PropagationPlan {
    pub scenario: PropagationScenario<f64>,
    pub grid_depths: Vec<f64>,
}

/// Builds the core scenario from the configuration.
pub fn propagation_plan(cfg: &ScenarioConfig) -> anyhow::Result<PropagationPlan> {
    let params = medium_params(cfg)?;
    let sched = schedule(cfg)?;
    let pulse = cfg
        .pulse
        .as_ref()
        .ok_or_else(|| anyhow!("missing [pulse]"))?;
    let grid = cfg.grid.as_ref().ok_or_else(|| anyhow!("missing [grid]"))?;

    let metrics_interval = grid.metrics_interval.unwrap_or(grid.depth / 20.0);
    let snapshot_interval = grid.snapshot_interval.unwrap_or(grid.depth / 4.0);
    let mut depths = vec![0.0];
    if grid.depth > 0.0 {
        let mut z = metrics_interval;
        while z < grid.depth - 0.5 * grid.dz {
            depths.push(z);
            z += metrics_interval;
        }
        let mut z = snapshot_interval;
        while z < grid.depth - 0.5 * grid.dz {
            depths.push(z);
            z += snapshot_interval;
        }
        depths.push(grid.depth);
    }
    depths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    depths.dedup();

    let mut grid_depths = vec![0.0];
    if grid.depth > 0.0 {
        let mut z = snapshot_interval;
        while z < grid.depth - 0.5 * grid.dz {
            grid_depths.push(z);
            z += snapshot_interval;
        }
        grid_depths.push(grid.depth);
    }

    Ok(PropagationPlan {
        scenario: PropagationScenario {
            params,
            schedule: sched,
            pulse: core::PulseSpec {
                sigma: pulse.sigma,
                amplitude: pulse.amplitude,
                center: pulse.center,
            },
            grid: core::GridSpec {
                n_tau: grid.n_tau,
                d_tau: grid.d_tau,
                dz: grid.dz,
                depth: grid.depth,
                snapshot_depths: depths,
                atomic_dt: grid.atomic_dt,
            },
            options: core::SolverOptions {
                preparation_fields_active: cfg.solver.preparation_fields_active,
                couple_control_field: cfg.solver.couple_control_field,
                positivity_tolerance: cfg.solver.positivity_tolerance,
                trace_tolerance: cfg.solver.trace_tolerance,
                check_stride: cfg.solver.check_stride,
            },
        },
        grid_depths,
    })
}

/// Analytic reference values (frozen-coefficient model) along the emitted
/// depths: delay from the group index, phase and gain from β integrated over
/// the scheduled phase seen by the model pulse centroid.
pub fn analytic_reference(
    scenario: &PropagationScenario<f64>,
    snapshots: &[Snapshot<f64>],
) -> anyhow::Result<Vec<(f64, f64, f64)>> {
    let params = &scenario.params;
    let dark = params.dark_state().map_err(|e| anyhow!("{e}"))?;
    let (ng, _vg) = group_index(params, &dark).map_err(|e| anyhow!("{e}"))?;
    let k0 = params.omega0();
    let tau0 = scenario.pulse.center;
    let beta_at = |z: f64| -> anyhow::Result<C64> {
        let phi0 = scenario.schedule.value(tau0 + ng * z);
        beta(params, &dark, phi0, params.polarization).map_err(|e| anyhow!("{e}"))
    };
    let mut rows = Vec::with_capacity(snapshots.len());
    let mut phase = 0.0;
    let mut log_gain = 0.0;
    let mut prev_z = 0.0;
    let mut prev_beta = beta_at(0.0)?;
    for snap in snapshots {
        let z = snap.z;
        if z > prev_z {
            // trapezoid over each emitted interval, subdivided so ramps are
            // resolved even with sparse snapshots
            let sub = ((z - prev_z) / 1e-5).ceil().max(1.0) as usize;
            let h = (z - prev_z) / sub as f64;
            for k in 0..sub {
                let z1 = prev_z + h * (k + 1) as f64;
                let b1 = beta_at(z1)?;
                phase += 0.5 * h * k0 * (prev_beta.re + b1.re);
                log_gain += -0.5 * h * k0 * (prev_beta.im + b1.im);
                prev_beta = b1;
            }
            prev_z = z;
        }
        rows.push((tau0 + ng * z, phase, log_gain));
    }
    Ok(rows)
}

fn propagate(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    prefix: &str,
) -> Result<Vec<PathBuf>, RunFailure> {
    let plan = propagation_plan(cfg).map_err(RunFailure::Config)?;
    let snapshots = match core::run(&plan.scenario) {
        Ok(s) => s,
        Err(e) => {
            // leave a diagnostics file next to the outputs before failing
            let path = out_dir.join(format!("{prefix}_diagnostics.txt"));
            let _ = std::fs::write(&path, format!("{e}\n"));
            return Err(RunFailure::Numerical(anyhow!("{e}")));
        }
    };

    let refs = analytic_reference(&plan.scenario, &snapshots).map_err(RunFailure::Numerical)?;
    let input_metrics = snapshots
        .first()
        .map(|s| s.metrics)
        .ok_or_else(|| RunFailure::Numerical(anyhow!("no snapshots emitted")))?;

    let mut outputs = Vec::new();
    let mut metric_rows = Vec::with_capacity(snapshots.len());
    let mut grid_iter = plan.grid_depths.iter().peekable();
    for (k, snap) in snapshots.iter().enumerate() {
        let (centroid_ref, phase_ref, log_gain_ref) = refs[k];
        metric_rows.push(MetricsRow {
            z: snap.z,
            peak: snap.metrics.peak,
            centroid: snap.metrics.centroid,
            phase: snap.metrics.phase,
            energy: snap.metrics.energy,
            peak_ref: input_metrics.peak * log_gain_ref.exp(),
            centroid_ref,
            phase_ref,
        });
        // emit the full grid when this depth is on the snapshot schedule
        if let Some(&&next) = grid_iter.peek() {
            if (snap.z - next).abs() <= 0.5 * plan.scenario.grid.dz {
                grid_iter.next();
                let path = out_dir.join(format!("{prefix}_snapshot_{k:04}.csv"));
                outputs.push(write_snapshot_csv(path, &snap.grid).map_err(RunFailure::Config)?);
            }
        }
    }
    outputs.push(
        write_metrics_csv(out_dir.join(format!("{prefix}_metrics.csv")), &metric_rows)
            .map_err(RunFailure::Config)?,
    );
    Ok(outputs)
}

/// Convenience wrapper used by the acceptance tests: runs the propagation for
/// an already-built plan without touching the file system.
pub fn run_plan(plan: &PropagationPlan) -> Result<Vec<Snapshot<f64>>, core::Error> {
    core::run(&plan.scenario)
}

/// End-to-end analytic propagation of the configured input pulse, for
/// overlay comparisons.
pub fn analytic_propagation(
    plan: &PropagationPlan,
    mode: CoefficientMode,
) -> Result<EnvelopeGrid<f64>, core::Error> {
    let sc = &plan.scenario;
    let input = EnvelopeGrid::gaussian_probe(
        &sc.params,
        &sc.schedule,
        sc.grid.n_tau,
        sc.grid.d_tau,
        sc.pulse.sigma,
        sc.pulse.amplitude,
        sc.pulse.center,
    )?;
    let phi0 = sc.schedule.value(sc.pulse.center);
    core::propagate_analytic(&input, &sc.params, phi0, sc.grid.depth, mode)
}

/// Reads back a CSV written by this crate (used by tests and the self test).
pub fn read_csv(path: &Path) -> anyhow::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("empty CSV {}", path.display()))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        rows.push(
            line.split(',')
                .map(|v| v.parse::<f64>().context("parsing CSV number"))
                .collect::<Result<Vec<f64>, _>>()?,
        );
    }
    Ok((header, rows))
}

/// One-line snapshot summary for terminal output.
pub fn summarize(snapshot: &Snapshot<f64>) -> String {
    let m = &snapshot.metrics;
    format!(
        "z = {:.4e}: peak {:.6e}, centroid {:.3}, phase {:+.5}, energy {:.6e}",
        snapshot.z, m.peak, m.centroid, m.phase, m.energy
    )
}
