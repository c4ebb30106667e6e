//! Time-delayed kernel comparisons: L1 distance decay, the center-value
//! ratio and its spectral limit, and the single persistent intersection.

use std::sync::Arc;

use rayon::prelude::*;

use hyperheat_core::solver::intersection_count;
use hyperheat_core::{
    build_grid, integrate, kernel_log, weighted_density_log, AdaptiveConfig, Grading, KernelSpec,
    RadialField,
};

use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

/// `||P_t - P_{t+delay}||_{L1(H^n)} = int |rho_t - rho_{t+delay}| dr`.
fn delayed_l1(spec: &KernelSpec, t: f64, delay: f64) -> Result<f64, CliError> {
    let spec = *spec;
    let t2 = t + delay;
    let hi = spec.drift_speed() * t2 + 12.0 * t2.sqrt();
    let f = move |r: f64| -> f64 {
        let a = weighted_density_log(&spec, r, t).map(|v| v.value()).unwrap_or(0.0);
        let b = weighted_density_log(&spec, r, t2).map(|v| v.value()).unwrap_or(0.0);
        (a - b).abs()
    };
    Ok(integrate(f, 0.0, hi, &AdaptiveConfig { abs_tol: 1e-8, max_depth: 46 })?)
}

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let spec = KernelSpec::new(3)?;
    let t_list = cfg.t_list_or(&[10.0, 25.0, 50.0, 100.0]);
    let mut b = ReportBuilder::new("delayed", cfg.as_params());

    let l1: Result<Vec<(f64, f64)>, CliError> = t_list
        .par_iter()
        .map(|&t| Ok((t, delayed_l1(&spec, t, 1.0)?)))
        .collect();
    let l1 = l1?;
    let monotone = l1.windows(2).all(|w| w[1].1 < w[0].1);
    b.metric("delayed_l1_final", l1.last().unwrap().1)?;
    b.metric("delayed_l1_monotone", if monotone { 1.0 } else { 0.0 })?;
    b.series("delayed_l1", "t", "l1_distance", l1)?;

    // center ratio G_{t+1}(0)/G_t(0) -> e^{-lambda1} (here e^{-1})
    let mut ratio_series = Vec::new();
    for &t in &t_list {
        let ratio = kernel_log(&spec, 0.0, t + 1.0)?.ratio_to(kernel_log(&spec, 0.0, t)?);
        ratio_series.push((t, ratio));
    }
    let (t_last, ratio_last) = *ratio_series.last().unwrap();
    b.metric("center_ratio_final", ratio_last)?;
    b.metric(
        "center_ratio_vs_limit",
        (ratio_last * (spec.lambda1() * 1.0).exp() - 1.0).abs(),
    )?;
    // exact law e^{-lambda1} (t/(t+1))^{3/2}
    let law = (-spec.lambda1()).exp() * (t_last / (t_last + 1.0)).powf(1.5);
    b.metric("center_ratio_vs_exact_law", (ratio_last / law - 1.0).abs())?;
    b.series("center_ratio", "t", "ratio", ratio_series)?;

    // intersections of the delayed pair stay at one
    let mut crossings = Vec::new();
    for &t in &t_list {
        let r_max = spec.drift_speed() * (t + 1.0) + 12.0 * (t + 1.0).sqrt();
        let nodes = ((r_max / 0.02).ceil() as usize + 1).min(40_000);
        let grid = Arc::new(build_grid(3, r_max, nodes, Grading::Uniform)?);
        let u = RadialField::kernel(Arc::clone(&grid), t)?;
        let v = RadialField::kernel(Arc::clone(&grid), t + 1.0)?;
        crossings.push((t, intersection_count(&u, &v)? as f64));
    }
    b.metric(
        "delayed_intersections_max",
        crossings.iter().map(|&(_, c)| c).fold(0.0, f64::max),
    )?;
    b.metric(
        "delayed_intersections_min",
        crossings.iter().map(|&(_, c)| c).fold(f64::INFINITY, f64::min),
    )?;
    b.series("delayed_intersections", "t", "count", crossings)?;

    Ok(b.build())
}
