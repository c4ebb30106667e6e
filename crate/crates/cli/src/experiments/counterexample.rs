//! Displaced-mass comparisons: the quantitative failure of L1 kernel
//! stabilization for nonradial data, plus the two-mass variant.

use rayon::prelude::*;

use hyperheat_core::calibration;
use hyperheat_core::{
    axis_ratio_readings, displaced_total_mass, far_field_delayed_bound, far_field_envelope,
    negative_part_l1, pointwise_gap, positive_part_l1, two_mass_ratio,
};

use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let a = cfg.a;
    let t_list = cfg.t_list_or(&[10.0, 20.0, 40.0]);
    let mut b = ReportBuilder::new("counterexample", cfg.as_params());

    // positive-part L1 plateau over the time grid
    let plateau: Result<Vec<(f64, f64)>, CliError> = t_list
        .par_iter()
        .map(|&t| Ok((t, positive_part_l1(a, t)?)))
        .collect();
    let plateau = plateau?;
    let mut values: Vec<f64> = plateau.iter().map(|&(_, v)| v).collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let min = values[0];
    let median = values[values.len() / 2];
    b.metric("plateau_min", min)?;
    b.metric("plateau_median", median)?;
    b.metric("plateau_rel_spread", (values[values.len() - 1] - min) / median)?;
    if let Some(floor) = calibration::positive_part_floor(a) {
        b.metric("plateau_floor", floor)?;
        b.metric("plateau_above_floor", if min >= floor { 1.0 } else { 0.0 })?;
    }
    b.series("positive_part", "t", "l1_mass", plateau)?;

    // balance of positive and negative parts (both solutions have mass 1)
    let t_bal = t_list[0];
    let pos = positive_part_l1(a, t_bal)?;
    let neg = negative_part_l1(a, t_bal)?;
    b.metric("pos_neg_balance_err", (pos - neg).abs() / pos.max(1e-300))?;

    // displaced solution still carries unit mass
    b.metric("displaced_mass_err", (displaced_total_mass(a, t_bal)? - 1.0).abs())?;

    // pointwise weighted gap at r = 2 toward its analytic limit
    let mut gap_series = Vec::new();
    for &t in &[10.0, 25.0, 50.0, 100.0, 200.0] {
        let g = pointwise_gap(a, 2.0, t)?;
        gap_series.push((t, g.weighted_gap));
    }
    let final_gap = pointwise_gap(a, 2.0, 200.0)?;
    b.metric("pointwise_gap_t200", final_gap.weighted_gap)?;
    b.metric("pointwise_gap_limit", final_gap.analytic_limit)?;
    b.metric(
        "pointwise_gap_vs_limit",
        (final_gap.weighted_gap - final_gap.analytic_limit).abs() / final_gap.analytic_limit,
    )?;
    b.series("pointwise_gap", "t", "weighted_gap", gap_series)?;

    // axis section at t = 50, both denominator readings
    let t_axis = 50.0;
    let mut same_radius = Vec::new();
    let mut displacement_radius = Vec::new();
    let mut r = a + 0.5;
    while r <= 3.0 * t_axis {
        let readings = axis_ratio_readings(a, r, t_axis)?;
        same_radius.push((r, readings.vs_same_radius));
        displacement_radius.push((r, readings.vs_displacement_radius));
        r += 2.5;
    }
    let at_mass_line = axis_ratio_readings(a, 2.0 * t_axis, t_axis)?;
    b.metric("axis_ratio_mass_line_t50", at_mass_line.vs_same_radius)?;
    b.metric(
        "axis_ratio_vs_e2a",
        (at_mass_line.vs_same_radius / (2.0 * a).exp() - 1.0).abs(),
    )?;
    // the two readings are genuinely different quantities; recorded side by
    // side rather than silently choosing one
    b.metric(
        "axis_readings_log_gap_at_mass_line",
        (at_mass_line.vs_same_radius.ln() - at_mass_line.vs_displacement_radius.ln()).abs(),
    )?;
    b.series("axis_ratio", "r", "ratio_same_radius", same_radius)?;
    b.series("axis_ratio_alt", "r", "ratio_displacement_radius", displacement_radius)?;

    // two-mass variant
    let ratio = two_mass_ratio(a, 2.0 * t_axis, t_axis)?;
    b.metric("two_mass_ratio_t50", ratio)?;
    b.metric("two_mass_vs_cosh2a", (ratio / (2.0 * a).cosh() - 1.0).abs())?;

    // far-field control against the delayed kernel
    let eps = 0.5;
    let t_far = 20.0;
    let threshold = (2.0 * a / eps) * t_far;
    let mut worst_ratio = 0.0_f64;
    let mut env_ok = 1.0;
    for &mult in &[1.0, 1.5, 2.0, 3.0] {
        let r = mult * threshold;
        let ratio = far_field_delayed_bound(a, eps, r, t_far)?;
        worst_ratio = worst_ratio.max(ratio);
        if ratio > far_field_envelope(a, eps, r, t_far) {
            env_ok = 0.0;
        }
    }
    b.metric("far_field_max_ratio", worst_ratio)?;
    b.metric("far_field_env_ok", env_ok)?;

    Ok(b.build())
}
