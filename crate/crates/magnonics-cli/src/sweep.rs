//! Sweep execution: expand the configured grid, evaluate every operating
//! point, and assemble the result table. Points are independent, so the grid
//! runs on a worker pool; results keep grid order (outer axis = bias field,
//! inner axis = drive frequency), making output bytes independent of the
//! thread count.

use anyhow::{Context, Result};
use rayon::prelude::*;

use magnonics::{
    backaction_45_from_population, backaction_top, magnon_number_45, magnon_number_direct,
    self_consistent_probe, BackactionResult, DriveSpec, Geometry,
};

use crate::config::{AxisSection, RunContext};
use crate::output::{Cell, Table};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub struct SweepOutcome {
    pub table: Table,
    /// Grid points that failed and were emitted as NaN rows.
    pub warnings: usize,
}

fn linspace(axis: &AxisSection) -> Vec<f64> {
    let n = axis.count;
    (0..n)
        .map(|i| axis.min + (axis.max - axis.min) * i as f64 / (n - 1) as f64)
        .collect()
}

/// One grid point, fully resolved.
#[derive(Debug, Clone, Copy)]
struct Point {
    /// Bias field (T); None in the top-CPW geometry.
    b_field: Option<f64>,
    /// Drive frequency (rad/s).
    omega_d: f64,
    /// Kittel frequency at this point (rad/s).
    omega_m: f64,
}

/// Run the configured sweep. `threads = None` uses all cores.
pub fn run_sweep(
    ctx: &RunContext,
    threads: Option<usize>,
    self_consistent: bool,
) -> Result<SweepOutcome> {
    let sweep = ctx
        .config
        .sweep
        .as_ref()
        .context("the configuration has no [sweep] table")?;

    // Outer axis: bias field (or the single configured point).
    let b_values: Vec<Option<f64>> = match (&sweep.b_field_t, ctx.device.geometry) {
        (Some(axis), Geometry::FortyFive) => linspace(axis).into_iter().map(Some).collect(),
        (None, _) => vec![ctx.b_field],
        (Some(_), Geometry::TopCpw) => unreachable!("rejected at validation"),
    };

    // Inner axis: drive frequency, directly or through the detuning.
    enum Inner {
        DriveFreq(Vec<f64>),
        Detuning(Vec<f64>),
        Fixed(f64),
    }
    let inner = if let Some(axis) = &sweep.drive_freq_hz {
        Inner::DriveFreq(linspace(axis).into_iter().map(|f| TWO_PI * f).collect())
    } else if let Some(axis) = &sweep.detuning_hz {
        Inner::Detuning(linspace(axis).into_iter().map(|d| TWO_PI * d).collect())
    } else {
        Inner::Fixed(ctx.drive.omega_d)
    };

    let mut points = Vec::new();
    for &b in &b_values {
        let omega_m = match b {
            Some(b) => ctx.device.magnet.larmor_frequency(b),
            None => ctx.omega_m,
        };
        match &inner {
            Inner::DriveFreq(freqs) => {
                for &omega_d in freqs {
                    points.push(Point {
                        b_field: b,
                        omega_d,
                        omega_m,
                    });
                }
            }
            Inner::Detuning(deltas) => {
                for &delta in deltas {
                    points.push(Point {
                        b_field: b,
                        omega_d: omega_m + delta,
                        omega_m,
                    });
                }
            }
            Inner::Fixed(omega_d) => points.push(Point {
                b_field: b,
                omega_d: *omega_d,
                omega_m,
            }),
        }
    }

    let with_field = ctx.device.geometry == Geometry::FortyFive;
    let mut columns = vec![
        "detuning_hz",
        "drive_freq_hz",
        "n_m",
        "delta_omega_r1_hz",
        "delta_kappa_r1_hz",
        "weak_coupling_ok",
        "kerr_ok",
        "population_ok",
    ];
    if with_field {
        columns.insert(0, "b_field_t");
    }
    let mut table = Table::new(&columns);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .context("building the worker pool")?;
    let rows: Vec<(Vec<Cell>, bool)> = pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate_point(ctx, p, with_field, self_consistent))
            .collect()
    });

    let mut warnings = 0;
    for (row, failed) in rows {
        warnings += failed as usize;
        table.push(row);
    }
    Ok(SweepOutcome { table, warnings })
}

/// Backaction and population at the configured (non-swept) operating point.
/// `probe` overrides the probe frequency; exclusive with `self_consistent`.
pub fn point_backaction(
    ctx: &RunContext,
    self_consistent: bool,
    probe: Option<f64>,
) -> magnonics::Result<(f64, BackactionResult)> {
    let point = Point {
        b_field: ctx.b_field,
        omega_d: ctx.drive.omega_d,
        omega_m: ctx.omega_m,
    };
    backaction_with_probe(ctx, &point, self_consistent, probe)
}

/// Evaluate one point; failures become NaN cells with the flag set.
fn evaluate_point(
    ctx: &RunContext,
    point: &Point,
    with_field: bool,
    self_consistent: bool,
) -> (Vec<Cell>, bool) {
    let outcome = backaction_at(ctx, point, self_consistent);
    let failed = outcome.is_err();
    let (n_m, result) = match outcome {
        Ok((n_m, r)) => (n_m, Some(r)),
        Err(_) => (f64::NAN, None),
    };

    let mut row: Vec<Cell> = Vec::with_capacity(9);
    if with_field {
        row.push(Cell::Float(point.b_field.unwrap_or(f64::NAN)));
    }
    row.push(Cell::Float((point.omega_d - point.omega_m) / TWO_PI));
    row.push(Cell::Float(point.omega_d / TWO_PI));
    row.push(Cell::Float(n_m));
    match &result {
        Some(r) => {
            row.push(Cell::Float(r.delta_omega_r1 / TWO_PI));
            row.push(Cell::Float(r.delta_kappa_r1 / TWO_PI));
            row.push(Cell::Bool(r.weak_coupling_ok));
            row.push(Cell::Bool(r.kerr_ok));
            row.push(Cell::Bool(r.population_ok));
        }
        None => {
            row.push(Cell::Float(f64::NAN));
            row.push(Cell::Float(f64::NAN));
            row.push(Cell::Bool(false));
            row.push(Cell::Bool(false));
            row.push(Cell::Bool(false));
        }
    }
    (row, failed)
}

fn backaction_at(
    ctx: &RunContext,
    point: &Point,
    self_consistent: bool,
) -> magnonics::Result<(f64, BackactionResult)> {
    backaction_with_probe(ctx, point, self_consistent, None)
}

fn backaction_with_probe(
    ctx: &RunContext,
    point: &Point,
    self_consistent: bool,
    probe: Option<f64>,
) -> magnonics::Result<(f64, BackactionResult)> {
    let dev = &ctx.device;
    let drive = DriveSpec {
        omega_d: point.omega_d,
        ..ctx.drive
    };
    match dev.geometry {
        Geometry::TopCpw => {
            let delta = point.omega_d - point.omega_m;
            let n_m = magnon_number_direct(dev, &drive, point.omega_m);
            let result = if self_consistent {
                self_consistent_probe(dev.resonator.omega_r1(), |probe| {
                    backaction_top(dev, n_m, point.omega_m, delta, Some(probe))
                })
            } else {
                backaction_top(dev, n_m, point.omega_m, delta, probe)
            };
            Ok((n_m, result))
        }
        Geometry::FortyFive => {
            let b = point.b_field.expect("45-degree points carry a field");
            let n_m = magnon_number_45(dev, &drive, b)?;
            // Resolve once so grid-level errors surface; the probe iteration
            // below only re-evaluates with a shifted probe frequency.
            let result = backaction_45_from_population(dev, n_m, b, point.omega_d, probe)?;
            let result = if self_consistent {
                self_consistent_probe(dev.resonator.omega_r1(), |probe| {
                    backaction_45_from_population(dev, n_m, b, point.omega_d, Some(probe))
                        .expect("parameters already resolved")
                })
            } else {
                result
            };
            Ok((n_m, result))
        }
    }
}
