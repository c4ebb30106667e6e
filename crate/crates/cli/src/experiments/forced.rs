//! Forced flow: the accumulated-mass law `M = M0 + int int f dmu dt` and
//! the L1 contraction inequality between two forced runs.

use std::sync::Arc;

use hyperheat_core::solver::{
    distance_metrics, evolve, ForcingTerm, NormOrder, SolverConfig, TimestepPolicy,
};
use hyperheat_core::{integrate, AdaptiveConfig, RadialField};

use crate::experiments::solver_grid;
use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let mut b = ReportBuilder::new("forced", cfg.as_params());
    let t_end = 30.0;
    let h = 0.01;
    let grid = solver_grid(3, t_end, h)?;
    let dt = cfg.dt.unwrap_or(0.01);
    let config = SolverConfig {
        dt: TimestepPolicy::Fixed(dt),
        ..Default::default()
    };

    // g(r) = e^{-r^2} / (pi^{3/2} (e - 1)) has int g dmu = 1 exactly in H^3
    let g_norm = std::f64::consts::PI.powf(1.5) * (std::f64::consts::E - 1.0);
    let g = move |r: f64| (-r * r).exp() / g_norm;

    // run 1: kernel-shaped unit mass plus decaying source of total mass 1
    let u0 = RadialField::kernel(Arc::clone(&grid), 1.0)?;
    let u0 = RadialField::new(Arc::clone(&grid), u0.values().to_vec(), 0.0)?;
    let m0 = u0.mass();
    let f1 = ForcingTerm::new(move |r, t| g(r) * (-t).exp())
        .with_declared_total(1.0 - (-t_end as f64).exp());

    let snapshots = [5.0, 10.0, 20.0, 30.0];
    let mut field = u0.clone();
    let mut t_now = 0.0;
    let mut mass_history = Vec::new();
    for &t in &snapshots {
        let out = evolve(&field, t - t_now, &config, Some(&f1))?;
        field = out.field;
        t_now = t;
        mass_history.push((t, field.mass()));
    }
    let final_mass = field.mass();
    let expected = m0 + f1.declared_total().unwrap();
    b.metric("final_mass", final_mass)?;
    b.metric("expected_mass", expected)?;
    b.metric("mass_err", (final_mass - expected).abs())?;
    b.series("mass_history", "t", "mass", mass_history)?;

    // run 2: different data, different forcing; check the contraction
    // inequality along every snapshot
    let v0 = RadialField::from_fn(Arc::clone(&grid), 0.0, |r| 0.5 * (-2.0 * r * r).exp())?;
    let f2 = ForcingTerm::new(move |r, t| 0.3 * g(r) * (-0.5 * t).exp());
    let d0 = distance_metrics(&u0, &v0, NormOrder::L1)?;

    let grid_for_budget = Arc::clone(&grid);
    let fdiff_l1 = move |s: f64| -> f64 {
        grid_for_budget
            .weights()
            .iter()
            .zip(grid_for_budget.nodes())
            .map(|(w, &r)| w * (g(r) * (-s).exp() - 0.3 * g(r) * (-0.5 * s).exp()).abs())
            .sum()
    };

    let mut u = u0;
    let mut v = v0;
    let mut t_now = 0.0;
    let mut dist_series = Vec::new();
    let mut bound_series = Vec::new();
    let mut worst_violation = f64::NEG_INFINITY;
    for &t in &snapshots {
        let out_u = evolve(&u, t - t_now, &config, Some(&f1))?;
        let out_v = evolve(&v, t - t_now, &config, Some(&f2))?;
        u = out_u.field;
        v = out_v.field;
        t_now = t;
        let d = distance_metrics(&u, &v, NormOrder::L1)?;
        let budget =
            integrate(&fdiff_l1, 0.0, t, &AdaptiveConfig { abs_tol: 1e-10, max_depth: 40 })?;
        let bound = d0 + budget;
        dist_series.push((t, d));
        bound_series.push((t, bound));
        worst_violation = worst_violation.max((d - bound) / bound);
    }
    b.metric("contraction_max_violation", worst_violation)?;
    b.metric("contraction_ok", if worst_violation <= 1e-3 { 1.0 } else { 0.0 })?;
    b.series("l1_distance", "t", "distance", dist_series)?;
    b.series("l1_bound", "t", "bound", bound_series)?;

    Ok(b.build())
}
