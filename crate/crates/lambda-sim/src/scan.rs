//! Steady-state parameter sweeps over probe detuning and relative phase.
//!
//! Grid points are independent solves. They run on a local thread pool and
//! are assembled by index, so the table contents are bitwise identical for
//! any worker count. `LAMBDA_SIM_WORKERS` overrides the pool size (default:
//! available parallelism). Failed points are recorded with an error tag
//! instead of aborting the sweep.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::steady::{coherence, populations, steady_state_of, CoherencePair};

/// Environment variable that overrides the scan worker count.
pub const WORKERS_ENV: &str = "LAMBDA_SIM_WORKERS";

/// Uniform closed grid over one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid1D {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidInput {
                what: format!("grid bounds must be finite, got [{start}, {stop}]"),
            });
        }
        if start >= stop {
            return Err(Error::InvalidInput {
                what: format!("grid start must be below stop, got [{start}, {stop}]"),
            });
        }
        if points < 2 {
            return Err(Error::InvalidInput {
                what: format!("grid needs at least 2 points, got {points}"),
            });
        }
        Ok(Self {
            start,
            stop,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn value(&self, index: usize) -> f64 {
        self.start + (self.stop - self.start) * index as f64 / (self.points - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

/// Default probe-detuning grid: Δ_P ∈ [−20, 20] with 401 points (step 0.1).
pub fn default_detuning_grid() -> Grid1D {
    Grid1D {
        start: -20.0,
        stop: 20.0,
        points: 401,
    }
}

/// Default phase grid: Δφ ∈ [0, 2π] with 201 points; the quarter-period cuts
/// 0, π/2, π and 3π/2 land exactly on grid columns.
pub fn default_phase_grid() -> Grid1D {
    Grid1D {
        start: 0.0,
        stop: 2.0 * std::f64::consts::PI,
        points: 201,
    }
}

/// One solved grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub delta_p: f64,
    pub delta_phi: f64,
    pub rho_ab: C64,
    pub rho_ac: C64,
    pub pop_a: f64,
    pub pop_b: f64,
    pub pop_c: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanPoint {
    Ok(ScanRecord),
    Failed {
        delta_p: f64,
        delta_phi: f64,
        error: &'static str,
    },
}

impl ScanPoint {
    pub fn record(&self) -> Option<&ScanRecord> {
        match self {
            ScanPoint::Ok(r) => Some(r),
            ScanPoint::Failed { .. } => None,
        }
    }

    pub fn delta_p(&self) -> f64 {
        match self {
            ScanPoint::Ok(r) => r.delta_p,
            ScanPoint::Failed { delta_p, .. } => *delta_p,
        }
    }

    pub fn delta_phi(&self) -> f64 {
        match self {
            ScanPoint::Ok(r) => r.delta_phi,
            ScanPoint::Failed { delta_phi, .. } => *delta_phi,
        }
    }
}

/// Gridded steady-state results. For 2D maps the points are stored row-major
/// with Δ_P as the outer (slow) axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub params: SystemParams,
    pub grid_dp: Grid1D,
    pub grid_phi: Option<Grid1D>,
    pub points: Vec<ScanPoint>,
}

impl ScanTable {
    pub fn records(&self) -> impl Iterator<Item = &ScanRecord> {
        self.points.iter().filter_map(ScanPoint::record)
    }

    pub fn failed_count(&self) -> usize {
        self.points.len() - self.records().count()
    }

    pub fn max_residual(&self) -> f64 {
        self.records().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// Record with the largest Im ρ_ab.
    pub fn max_im_ab(&self) -> Option<&ScanRecord> {
        self.records()
            .max_by(|x, y| x.rho_ab.im.partial_cmp(&y.rho_ab.im).expect("finite"))
    }

    /// Record with the smallest Im ρ_ab.
    pub fn min_im_ab(&self) -> Option<&ScanRecord> {
        self.records()
            .min_by(|x, y| x.rho_ab.im.partial_cmp(&y.rho_ab.im).expect("finite"))
    }
}

/// Worker count for scans: `LAMBDA_SIM_WORKERS` if set, otherwise the
/// machine's available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(usize::from)
                .unwrap_or(1)
        })
}

/// Solve one point. `delta_phi` (when given) is applied through the probe
/// phase, φ_P = φ_L + Δφ, leaving the drive phase untouched.
fn solve_point(base: &SystemParams, delta_p: f64, delta_phi: Option<f64>) -> ScanPoint {
    let mut params = *base;
    params.delta_p = delta_p;
    if let Some(dphi) = delta_phi {
        params.phi_p = params.phi_l + dphi;
    }
    let dphi = params.delta_phi();
    match steady_state_of(&params) {
        Ok(ss) => {
            let pops = populations(&ss.rho);
            ScanPoint::Ok(ScanRecord {
                delta_p,
                delta_phi: dphi,
                rho_ab: coherence(&ss.rho, CoherencePair::Ab).value,
                rho_ac: coherence(&ss.rho, CoherencePair::Ac).value,
                pop_a: pops.a,
                pop_b: pops.b,
                pop_c: pops.c,
                residual: ss.residual,
            })
        }
        Err(e) => ScanPoint::Failed {
            delta_p,
            delta_phi: dphi,
            error: e.tag(),
        },
    }
}

fn solve_tasks(
    base: &SystemParams,
    tasks: Vec<(f64, Option<f64>)>,
    workers: usize,
) -> Vec<ScanPoint> {
    if workers <= 1 {
        return tasks
            .into_iter()
            .map(|(dp, dphi)| solve_point(base, dp, dphi))
            .collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| {
            tasks
                .into_par_iter()
                .map(|(dp, dphi)| solve_point(base, dp, dphi))
                .collect()
        }),
        // pool creation can fail in constrained environments; fall back
        Err(_) => tasks
            .into_iter()
            .map(|(dp, dphi)| solve_point(base, dp, dphi))
            .collect(),
    }
}

/// Steady-state sweep over probe detuning with all other parameters fixed.
pub fn sweep_detuning(params: &SystemParams, grid: &Grid1D) -> Result<ScanTable> {
    sweep_detuning_with_workers(params, grid, worker_count())
}

/// `sweep_detuning` with an explicit worker count (used by the determinism
/// tests; the results are identical for any count).
pub fn sweep_detuning_with_workers(
    params: &SystemParams,
    grid: &Grid1D,
    workers: usize,
) -> Result<ScanTable> {
    params.validate()?;
    let tasks = grid.values().into_iter().map(|dp| (dp, None)).collect();
    Ok(ScanTable {
        params: *params,
        grid_dp: *grid,
        grid_phi: None,
        points: solve_tasks(params, tasks, workers),
    })
}

/// 2D steady-state map over (Δ_P, Δφ), row-major with Δ_P outer.
pub fn map_phase_detuning(
    params: &SystemParams,
    grid_dp: &Grid1D,
    grid_phi: &Grid1D,
) -> Result<ScanTable> {
    map_phase_detuning_with_workers(params, grid_dp, grid_phi, worker_count())
}

pub fn map_phase_detuning_with_workers(
    params: &SystemParams,
    grid_dp: &Grid1D,
    grid_phi: &Grid1D,
    workers: usize,
) -> Result<ScanTable> {
    params.validate()?;
    let phis = grid_phi.values();
    let mut tasks = Vec::with_capacity(grid_dp.points * grid_phi.points);
    for dp in grid_dp.values() {
        for &phi in &phis {
            tasks.push((dp, Some(phi)));
        }
    }
    Ok(ScanTable {
        params: *params,
        grid_dp: *grid_dp,
        grid_phi: Some(*grid_phi),
        points: solve_tasks(params, tasks, workers),
    })
}

/// Strong-probe study: the full (Δ_P, Δφ) map at a non-perturbative probe
/// amplitude (4.5 in the reference runs). With the default phase grid the
/// canonical cuts Δφ ∈ {0, π/2, π, 3π/2} are exact grid columns, so the four
/// characteristic line shapes and the flat-top gain surface come out of one
/// table.
pub fn strong_probe_suite(
    params: &SystemParams,
    grid_dp: &Grid1D,
    grid_phi: &Grid1D,
) -> Result<ScanTable> {
    map_phase_detuning(params, grid_dp, grid_phi)
}
