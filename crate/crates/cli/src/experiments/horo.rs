//! Horospheric class: self-similar error decay, measured drift speed, and
//! 1D mass conservation, in dimensions 2 and 3.

use hyperheat_core::horo::{exact_drift_solution, horo_error, HoroField};
use hyperheat_core::kernel::gaussian1d;

use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let t_list = cfg.t_list_or(&[10.0, 25.0, 50.0, 100.0]);
    let mut b = ReportBuilder::new("horo", cfg.as_params());

    for &n in &[2u32, 3] {
        // unit-mass Gaussian data
        let z = HoroField::linspace(-10.0, 10.0, 1001);
        let v0 = HoroField::from_fn(n, z, 0.0, |zz| gaussian1d(zz, 1.0).unwrap())?;

        let mut err_series = Vec::new();
        let mut mass_drift = 0.0_f64;
        for &t in &t_list {
            let v = exact_drift_solution(&v0, t)?;
            err_series.push((t, horo_error(&v)));
            mass_drift = mass_drift.max((v.mass() - v0.mass()).abs());
        }
        let monotone = err_series.windows(2).all(|w| w[1].1 < w[0].1);
        b.metric(&format!("err_final_n{n}"), err_series.last().unwrap().1)?;
        b.metric(&format!("err_monotone_n{n}"), if monotone { 1.0 } else { 0.0 })?;
        b.metric(&format!("mass_drift_n{n}"), mass_drift)?;
        b.series(&format!("error_n{n}"), "t", "sup_error", err_series)?;

        // drift speed from a compactly supported bump, between t and 2t
        let z = HoroField::linspace(-6.0, 6.0, 1201);
        let bump = HoroField::from_fn(n, z, 0.0, |zz| {
            if zz.abs() <= 1.0 {
                0.5
            } else {
                0.0
            }
        })?;
        let t_probe = 25.0;
        let p1 = exact_drift_solution(&bump, t_probe)?.argmax_z();
        let p2 = exact_drift_solution(&bump, 2.0 * t_probe)?.argmax_z();
        let speed = (p2 - p1) / t_probe;
        let target = (n - 1) as f64;
        b.metric(&format!("drift_speed_n{n}"), speed)?;
        b.metric(&format!("drift_speed_err_n{n}"), (speed - target).abs() / target)?;
    }

    // rescaled section at the final time, n = 3
    let z = HoroField::linspace(-10.0, 10.0, 1001);
    let v0 = HoroField::from_fn(3, z, 0.0, |zz| gaussian1d(zz, 1.0).unwrap())?;
    let t_max = t_list.iter().cloned().fold(0.0, f64::max);
    let v = exact_drift_solution(&v0, t_max)?;
    let st = t_max.sqrt();
    let c = 2.0 * t_max;
    let mut section = Vec::new();
    let mut reference = Vec::new();
    for (&zz, &val) in v.z().iter().zip(v.values()) {
        let xi = (zz - c) / st;
        if (-6.0..=6.0).contains(&xi) {
            section.push((xi, st * val));
            reference.push((xi, gaussian1d(xi, 1.0)?));
        }
    }
    b.series("rescaled_n3", "xi", "sqrt_t_v", section)?;
    b.series("rescaled_reference", "xi", "e1", reference)?;

    Ok(b.build())
}
