//! Full numerical Maxwell-Bloch co-propagation.
//!
//! The probe envelopes live on a retarded-time grid τ = t - z/c where the
//! SVEA equations reduce to pure ∂z equations. At each depth the atomic state
//! is integrated over the τ grid (RK4 on a finer substep), the recorded probe
//! coherences are converted to field sources, and the fields advance in z
//! with an explicit midpoint step. The control phase pattern travels at c, so
//! in retarded time it is depth-independent and the scheduled closed-loop
//! phase is sampled at τ directly.
//!
//! In Rabi/γ units the SVEA source terms read
//!
//! ∂z Ω_E = (3 L γ34 k0 / 2) (i ρ34 ∓ α ρ21),
//! ∂z Ω_B = (3 L γ34 k0 / 2) (i α² ρ21 ± α ρ34),
//!
//! upper signs for left circular polarization. The prefactor is fixed by
//! requiring the weak-probe response to reproduce χ_E, which pins the
//! polarization bridge P0 = 2 N d ρ34 together with γ34 = d²k³/(3πε0ħ).

use crate::bloch::{bloch_rhs, BlochContext, DensityMatrix, FieldSet, Matrix5};
use crate::envelope::{pulse_metrics, EnvelopeGrid, Snapshot};
use crate::error::Error;
use crate::params::MediumParams;
use crate::scalar::{r, Real};
use crate::schedule::PhaseSchedule;
use crate::Complex;

/// Gaussian input pulse description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<T> {
    /// Temporal width σ [1/γ].
    pub sigma: T,
    /// Peak electric Rabi amplitude in units of γ.
    pub amplitude: T,
    /// Pulse center on the τ grid [1/γ].
    pub center: T,
}

/// Discretization of one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    pub n_tau: usize,
    pub d_tau: T,
    /// Field step in z [c/γ].
    pub dz: T,
    /// Total propagation depth [c/γ].
    pub depth: T,
    /// Depths at which snapshots are emitted; rounded to step boundaries.
    pub snapshot_depths: Vec<T>,
    /// Atomic RK4 substep in τ [1/γ].
    pub atomic_dt: T,
}

impl<T: Real> GridSpec<T> {
    pub fn new(n_tau: usize, d_tau: T, dz: T, depth: T) -> Self {
        GridSpec {
            n_tau,
            d_tau,
            dz,
            depth,
            snapshot_depths: Vec::new(),
            atomic_dt: r(0.05),
        }
    }
}

/// Solver behavior toggles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T> {
    /// Keep the preparation drives Ω1, Ω2 active in the atomic evolution.
    /// Off by default: the dark state enters as the prepared state and the
    /// collision-protected ground manifold holds it; active preparation
    /// drives combined with the asymmetric probe-sector dephasing would add
    /// dark-bright mixing absent from the analytic model.
    pub preparation_fields_active: bool,
    /// Propagate the control field with its own medium source (the 3-2
    /// coherence); its transition starts unpopulated, so this is a
    /// robustness toggle rather than a physical necessity.
    pub couple_control_field: bool,
    /// Abort when an atomic eigenvalue drops below -tolerance.
    pub positivity_tolerance: T,
    /// Abort when trace or Hermiticity drift exceeds this bound.
    pub trace_tolerance: T,
    /// Check positivity every this many τ nodes (trace and Hermiticity are
    /// checked at every node).
    pub check_stride: usize,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            preparation_fields_active: false,
            couple_control_field: false,
            positivity_tolerance: r(1e-8),
            trace_tolerance: r(1e-10),
            check_stride: 16,
        }
    }
}

/// Complete description of one propagation run.
#[derive(Debug, Clone)]
pub struct PropagationScenario<T> {
    pub params: MediumParams<T>,
    pub schedule: PhaseSchedule<T>,
    pub pulse: PulseSpec<T>,
    pub grid: GridSpec<T>,
    pub options: SolverOptions<T>,
}

/// Probe coherences recorded along one τ sweep.
#[derive(Debug, Clone)]
pub struct CoherenceRecord<T> {
    pub rho34: Vec<Complex<T>>,
    pub rho21: Vec<Complex<T>>,
    pub rho32: Vec<Complex<T>>,
}

/// Per-τ field derivatives.
#[derive(Debug, Clone)]
pub struct FieldSources<T> {
    pub d_omega_e: Vec<Complex<T>>,
    pub d_omega_b: Vec<Complex<T>>,
    pub d_omega_c: Vec<Complex<T>>,
}

/// Integrates the atomic state across the τ grid at one depth and records the
/// probe coherences at the grid nodes. `z` is used for diagnostics only.
pub fn coherence_sweep<T: Real>(
    params: &MediumParams<T>,
    ctx: &BlochContext<T>,
    grid: &EnvelopeGrid<T>,
    options: &SolverOptions<T>,
    atomic_dt: T,
    z: T,
) -> Result<CoherenceRecord<T>, Error> {
    let n = grid.len();
    let zero = Complex::new(T::zero(), T::zero());
    let dark = params.dark_state()?;
    let mut rho = DensityMatrix::dark(&dark).0;
    let (omega_1, omega_2) = if options.preparation_fields_active {
        (params.omega1(), params.omega2())
    } else {
        (zero, zero)
    };

    let nsub_f = (grid.d_tau / atomic_dt).ceil();
    let nsub = nsub_f.to_f64().map(|v| v as usize).unwrap_or(1).max(1);
    let dta = grid.d_tau / r::<T>(nsub as f64);
    let sixth = dta / r::<T>(6.0);
    let half = dta * r::<T>(0.5);
    let two = r::<T>(2.0);

    let mut rho34 = Vec::with_capacity(n);
    let mut rho21 = Vec::with_capacity(n);
    let mut rho32 = Vec::with_capacity(n);
    let stride = options.check_stride.max(1);
    let z_f = z.to_f64().unwrap_or(f64::NAN);

    for j in 0..n {
        rho34.push(rho[2][3]);
        rho21.push(rho[1][0]);
        rho32.push(rho[2][1]);

        let dm = DensityMatrix(rho);
        let trace_err = dm.trace_error();
        if trace_err > options.trace_tolerance {
            return Err(Error::StateDrift {
                what: "trace",
                z: z_f,
                tau_index: j,
                magnitude: trace_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let herm_err = dm.hermiticity_error();
        if herm_err > options.trace_tolerance {
            return Err(Error::StateDrift {
                what: "hermiticity",
                z: z_f,
                tau_index: j,
                magnitude: herm_err.to_f64().unwrap_or(f64::NAN),
            });
        }
        if j % stride == 0 && !dm.is_positive_within(options.positivity_tolerance) {
            return Err(Error::PositivityDrift {
                z: z_f,
                tau_index: j,
                min_eigenvalue: dm.min_eigenvalue().to_f64().unwrap_or(f64::NAN),
            });
        }

        // advance across the cell [tau_j, tau_{j+1}], linearly interpolating
        // the envelopes between the grid nodes
        let jn = (j + 1).min(n - 1);
        let e0 = grid.omega_e[j];
        let de = grid.omega_e[jn] - e0;
        let b0 = grid.omega_b[j];
        let db = grid.omega_b[jn] - b0;
        let c0 = grid.omega_c[j];
        let dc = grid.omega_c[jn] - c0;
        let at = |x: T| FieldSet {
            omega_e: e0 + de * x,
            omega_b: b0 + db * x,
            omega_c: c0 + dc * x,
            omega_1,
            omega_2,
        };
        for k in 0..nsub {
            let x0 = r::<T>(k as f64) / r::<T>(nsub as f64);
            let xh = (r::<T>(k as f64) + r::<T>(0.5)) / r::<T>(nsub as f64);
            let x1 = r::<T>((k + 1) as f64) / r::<T>(nsub as f64);
            let f0 = at(x0);
            let fh = at(xh);
            let f1 = at(x1);
            let k1 = bloch_rhs(ctx, &rho, &f0);
            let k2 = bloch_rhs(ctx, &add_scaled(&rho, &k1, half), &fh);
            let k3 = bloch_rhs(ctx, &add_scaled(&rho, &k2, half), &fh);
            let k4 = bloch_rhs(ctx, &add_scaled(&rho, &k3, dta), &f1);
            for a in 0..5 {
                for b in 0..5 {
                    rho[a][b] += (k1[a][b] + (k2[a][b] + k3[a][b]) * two + k4[a][b]) * sixth;
                }
            }
        }
    }
    Ok(CoherenceRecord {
        rho34,
        rho21,
        rho32,
    })
}

fn add_scaled<T: Real>(a: &Matrix5<T>, b: &Matrix5<T>, s: T) -> Matrix5<T> {
    let mut out = *a;
    for i in 0..5 {
        for j in 0..5 {
            out[i][j] += b[i][j] * s;
        }
    }
    out
}

/// Converts recorded coherences into per-τ field derivatives.
pub fn assemble_sources<T: Real>(
    params: &MediumParams<T>,
    record: &CoherenceRecord<T>,
    couple_control_field: bool,
) -> FieldSources<T> {
    let k0 = params.omega0();
    let strength = r::<T>(1.5) * params.scaled_density * params.gamma34 * k0;
    let s = params.polarization.sign::<T>();
    let alpha = params.alpha_fs;
    let i = Complex::new(T::zero(), T::one());
    let zero = Complex::new(T::zero(), T::zero());
    let control_strength = r::<T>(1.5) * params.scaled_density * params.gamma32 * k0;

    let n = record.rho34.len();
    let mut d_omega_e = Vec::with_capacity(n);
    let mut d_omega_b = Vec::with_capacity(n);
    let mut d_omega_c = Vec::with_capacity(n);
    for j in 0..n {
        let p = record.rho34[j];
        let m = record.rho21[j];
        d_omega_e.push((i * p - m * (s * alpha)) * strength);
        d_omega_b.push((i * m * (alpha * alpha) + p * (s * alpha)) * strength);
        d_omega_c.push(if couple_control_field {
            i * record.rho32[j] * control_strength
        } else {
            zero
        });
    }
    FieldSources {
        d_omega_e,
        d_omega_b,
        d_omega_c,
    }
}

/// Advances the envelopes by one linear stage Ω → Ω + dz·S. The explicit
/// midpoint scheme in [`run`] applies this twice per z step.
pub fn field_step<T: Real>(
    grid: &EnvelopeGrid<T>,
    sources: &FieldSources<T>,
    dz: T,
) -> Result<EnvelopeGrid<T>, Error> {
    let mut out = grid.clone();
    let z_new = grid.z + dz;
    for j in 0..grid.len() {
        out.omega_e[j] += sources.d_omega_e[j] * dz;
        out.omega_b[j] += sources.d_omega_b[j] * dz;
        out.omega_c[j] += sources.d_omega_c[j] * dz;
        if !(out.omega_e[j].re.is_finite()
            && out.omega_e[j].im.is_finite()
            && out.omega_b[j].re.is_finite()
            && out.omega_b[j].im.is_finite())
        {
            return Err(Error::NonFinite {
                z: z_new.to_f64().unwrap_or(f64::NAN),
                tau_index: j,
            });
        }
    }
    out.z = z_new;
    Ok(out)
}

/// Runs the scenario, emitting snapshots at the requested depths.
pub fn run<T: Real>(scenario: &PropagationScenario<T>) -> Result<Vec<Snapshot<T>>, Error> {
    let grid_spec = &scenario.grid;
    if grid_spec.n_tau < 8 {
        return Err(Error::InvalidGrid(format!(
            "n_tau must be at least 8, got {}",
            grid_spec.n_tau
        )));
    }
    for (name, v) in [
        ("d_tau", grid_spec.d_tau),
        ("dz", grid_spec.dz),
        ("atomic_dt", grid_spec.atomic_dt),
    ] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    if !(grid_spec.depth >= T::zero()) {
        return Err(Error::InvalidGrid(format!(
            "depth must be >= 0, got {}",
            grid_spec.depth
        )));
    }

    let params = &scenario.params;
    let mut grid = EnvelopeGrid::gaussian_probe(
        params,
        &scenario.schedule,
        grid_spec.n_tau,
        grid_spec.d_tau,
        scenario.pulse.sigma,
        scenario.pulse.amplitude,
        scenario.pulse.center,
    )?;

    let n_steps = (grid_spec.depth / grid_spec.dz)
        .round()
        .to_f64()
        .map(|v| v as usize)
        .unwrap_or(0);

    // snapshot schedule as step indices
    let mut emit_steps: Vec<usize> = if grid_spec.snapshot_depths.is_empty() {
        vec![0, n_steps]
    } else {
        grid_spec
            .snapshot_depths
            .iter()
            .map(|&d| {
                (d / grid_spec.dz)
                    .round()
                    .to_f64()
                    .map(|v| (v as usize).min(n_steps))
                    .unwrap_or(0)
            })
            .collect()
    };
    emit_steps.sort_unstable();
    emit_steps.dedup();

    let ctx = BlochContext::new(params, T::zero());
    let mut snapshots = Vec::with_capacity(emit_steps.len());
    let mut emit_idx = 0;
    if emit_steps.first() == Some(&0) {
        emit_idx = 1;
        snapshots.push(Snapshot {
            z: grid.z,
            grid: grid.clone(),
            metrics: pulse_metrics(&grid)?,
        });
    }

    let half_dz = grid_spec.dz * r::<T>(0.5);
    for step in 0..n_steps {
        let record = coherence_sweep(
            params,
            &ctx,
            &grid,
            &scenario.options,
            grid_spec.atomic_dt,
            grid.z,
        )?;
        let sources = assemble_sources(params, &record, scenario.options.couple_control_field);

        // step-size sanity: the per-step relative field change must stay small
        let peak = grid
            .omega_e
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), T::max);
        if peak > T::zero() {
            let max_source = sources
                .d_omega_e
                .iter()
                .map(|v| v.norm())
                .fold(T::zero(), T::max);
            let product = grid_spec.dz * max_source / peak;
            if !(product < r::<T>(0.1)) {
                return Err(Error::StepSizeCheck {
                    product: product.to_f64().unwrap_or(f64::NAN),
                });
            }
        }

        let midpoint = field_step(&grid, &sources, half_dz)?;
        let record_mid = coherence_sweep(
            params,
            &ctx,
            &midpoint,
            &scenario.options,
            grid_spec.atomic_dt,
            midpoint.z,
        )?;
        let sources_mid =
            assemble_sources(params, &record_mid, scenario.options.couple_control_field);
        grid = field_step(&grid, &sources_mid, grid_spec.dz)?;

        if emit_idx < emit_steps.len() && emit_steps[emit_idx] == step + 1 {
            emit_idx += 1;
            snapshots.push(Snapshot {
                z: grid.z,
                grid: grid.clone(),
                metrics: pulse_metrics(&grid)?,
            });
        }
    }

    Ok(snapshots)
}
