//! Mass-line geometry: solver-based half-mass radii in dimensions 2 and 3,
//! the sign-change line, and annulus concentration.

use std::sync::Arc;

use hyperheat_core::solver::{evolve, SolverConfig};
use hyperheat_core::{
    annulus_mass_fraction, half_mass_radius, kernel_mass_profile, mass_function,
    sign_change_radius, KernelSpec,
};

use crate::experiments::{solver_grid, unit_bump};
use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let t_list = cfg.t_list_or(&[5.0, 10.0, 20.0]);
    let t_end = t_list.iter().cloned().fold(0.0, f64::max);
    let mut b = ReportBuilder::new("mass-lines", cfg.as_params());

    // solver-based half-mass lines for n = 2 and n = 3
    for &n in &[2u32, 3] {
        let grid = solver_grid(n, t_end, 0.02)?;
        let mut field = unit_bump(Arc::clone(&grid), 0.5)?;
        let mut t_now = 0.0;
        let mut series = Vec::new();
        for &t in &t_list {
            let out = evolve(&field, t - t_now, &SolverConfig::default(), None)?;
            field = out.field;
            t_now = t;
            let profile = mass_function(&field);
            series.push((t, half_mass_radius(&profile)?));
        }
        let (t_last, rm_last) = *series.last().unwrap();
        b.metric(
            &format!("half_mass_dev_n{n}_t{t_last}"),
            (rm_last - (n - 1) as f64 * t_last).abs(),
        )?;
        b.series(&format!("half_mass_n{n}"), "t", "r_m", series)?;
        b.series(
            &format!("mass_line_n{n}"),
            "t",
            "r",
            t_list.iter().map(|&t| (t, (n - 1) as f64 * t)).collect(),
        )?;
    }

    // kernel-based half-mass for an odd dimension requested via --n
    if cfg.n % 2 == 1 && cfg.n >= 5 {
        let spec = KernelSpec::new(cfg.n)?;
        let mut series = Vec::new();
        for &t in &t_list {
            let profile = kernel_mass_profile(&spec, t, 4000)?;
            series.push((t, half_mass_radius(&profile)?));
        }
        b.series(&format!("half_mass_n{}", cfg.n), "t", "r_m", series)?;
    }

    // sign-change line in dimension 3: exact closed form
    let sign_series: Vec<(f64, f64)> = {
        let mut pts = vec![(1.0, sign_change_radius(3, 1.0)?)];
        for &t in &t_list {
            if t != 1.0 {
                pts.push((t, sign_change_radius(3, t)?));
            }
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pts
    };
    b.metric("sign_change_t1", sign_change_radius(3, 1.0)?)?;
    b.metric(
        "sign_change_t1_err",
        (sign_change_radius(3, 1.0)? - 10.0_f64.sqrt()).abs(),
    )?;
    b.series("sign_change_n3", "t", "r_s", sign_series)?;

    // annulus concentration at t = 25, k = 4, for n = 3 and n = 5
    let spec3 = KernelSpec::new(3)?;
    let spec5 = KernelSpec::new(5)?;
    b.metric("annulus_fraction_n3_t25_k4", annulus_mass_fraction(&spec3, 25.0, 4.0)?)?;
    b.metric("annulus_fraction_n5_t25_k4", annulus_mass_fraction(&spec5, 25.0, 4.0)?)?;

    Ok(b.build())
}
