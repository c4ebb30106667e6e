//! Solver order study (kernel-to-kernel propagation) and bump-to-kernel
//! convergence in L1 and weighted sup norm.

use std::sync::Arc;

use hyperheat_core::solver::{distance_metrics, evolve, NormOrder, SolverConfig, TimestepPolicy};
use hyperheat_core::{build_grid, Grading, KernelSpec, RadialField};

use crate::experiments::{solver_grid, unit_bump};
use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

fn propagation_error(h: f64, dt_cap: f64) -> Result<(f64, f64), CliError> {
    let r_max = 22.0;
    let nodes = (r_max / h).round() as usize + 1;
    let grid = Arc::new(build_grid(3, r_max, nodes, Grading::Uniform)?);
    let u0 = RadialField::kernel(Arc::clone(&grid), 1.0)?;
    let config = SolverConfig {
        dt: TimestepPolicy::CflScaled { factor: 0.5, cap: dt_cap },
        ..Default::default()
    };
    let out = evolve(&u0, 1.0, &config, None)?;
    let exact = RadialField::kernel(Arc::clone(out.field.grid()), 2.0)?;
    let err = distance_metrics(&out.field, &exact, NormOrder::L1)?;
    Ok((err, out.mass_drift))
}

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let mut b = ReportBuilder::new("radial-converge", cfg.as_params());
    let spec = KernelSpec::new(3)?;

    // order study at h and h/2
    let h = cfg.r_max.map(|_| 0.005).unwrap_or(0.005);
    let dt_cap = cfg.dt.unwrap_or(1e-2);
    let (err_coarse, drift) = propagation_error(h, dt_cap)?;
    let (err_fine, _) = propagation_error(0.5 * h, dt_cap)?;
    b.metric("l1_err_coarse", err_coarse)?;
    b.metric("l1_err_fine", err_fine)?;
    b.metric("order_factor", err_coarse / err_fine)?;
    b.metric("mass_drift_coarse", drift)?;

    // bump-to-kernel convergence over the time grid
    let t_list = cfg.t_list_or(&[10.0, 25.0, 50.0]);
    let t_end = t_list.iter().cloned().fold(0.0, f64::max);
    let grid = solver_grid(3, t_end, 0.02)?;
    let mut field = unit_bump(Arc::clone(&grid), 1.0)?;
    let mut l1_series = Vec::new();
    let mut wsup_series = Vec::new();
    let mut t_now = 0.0;
    for &t in &t_list {
        let out = evolve(&field, t - t_now, &SolverConfig::default(), None)?;
        field = out.field;
        t_now = t;
        let exact = RadialField::kernel(Arc::clone(field.grid()), t)?;
        let l1 = distance_metrics(&field, &exact, NormOrder::L1)?;
        let sup = distance_metrics(&field, &exact, NormOrder::LInf)?;
        let weighted = sup * t.powf(1.5) * (spec.lambda1() * t).exp();
        l1_series.push((t, l1));
        wsup_series.push((t, weighted));
    }
    let monotone = l1_series.windows(2).all(|w| w[1].1 < w[0].1);
    b.metric("bump_l1_final", l1_series.last().unwrap().1)?;
    b.metric("bump_l1_monotone", if monotone { 1.0 } else { 0.0 })?;
    b.metric(
        "bump_wsup_max",
        wsup_series.iter().map(|&(_, v)| v).fold(0.0, f64::max),
    )?;
    b.series("bump_l1", "t", "l1_error", l1_series)?;
    b.series("bump_weighted_sup", "t", "weighted_sup_error", wsup_series)?;

    Ok(b.build())
}
