//! One module per experiment; each produces a frozen [`ExperimentReport`].

mod counterexample;
mod delayed;
mod forced;
mod gaussian1d;
mod horo;
mod kernel_checks;
mod mass_lines;
mod radial_converge;

use std::sync::Arc;

use hyperheat_core::{build_grid, Grading, RadialField, RadialGrid};

use crate::{CliError, ExperimentReport, RunConfig};

/// Dispatches an experiment by name. Unknown names are usage errors.
pub fn run_experiment(name: &str, cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    match name {
        "kernel-checks" => kernel_checks::run(cfg),
        "radial-converge" => radial_converge::run(cfg),
        "gaussian1d" => gaussian1d::run(cfg),
        "delayed" => delayed::run(cfg),
        "horo" => horo::run(cfg),
        "counterexample" => counterexample::run(cfg),
        "forced" => forced::run(cfg),
        "mass-lines" => mass_lines::run(cfg),
        other => Err(CliError::Usage(format!("unknown experiment {other:?}"))),
    }
}

/// Unit-mass uniform bump of the given radius, renormalized so its grid
/// mass is exactly one.
pub(crate) fn unit_bump(
    grid: Arc<RadialGrid>,
    radius: f64,
) -> Result<RadialField, CliError> {
    let raw = RadialField::from_fn(Arc::clone(&grid), 0.0, |r| {
        if r <= radius {
            1.0
        } else {
            0.0
        }
    })?;
    let mass = raw.mass();
    if !(mass > 0.0) {
        return Err(CliError::Runtime("bump has no mass on this grid".into()));
    }
    let values = raw.values().iter().map(|v| v / mass).collect();
    Ok(RadialField::new(grid, values, 0.0)?)
}

/// Uniform solver grid sized for runs up to `t_end` in dimension `n`:
/// `r_max` covers the mass line plus the truncation margin.
pub(crate) fn solver_grid(
    n: u32,
    t_end: f64,
    h: f64,
) -> Result<Arc<RadialGrid>, CliError> {
    let r_max = ((n - 1) as f64 * t_end + 14.0 * t_end.sqrt()).max(20.0);
    let nodes = (r_max / h).ceil() as usize + 1;
    Ok(Arc::new(build_grid(n, r_max, nodes, Grading::Uniform)?))
}
