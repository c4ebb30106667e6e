//! Drift-corrected Gaussian limit: the weighted L1 error against the
//! drifted 1D kernel and the rescaled profile sections.

use rayon::prelude::*;

use hyperheat_core::{gaussian1d, gaussian_l1_error, rescaled_profile, KernelSpec};

use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let spec = KernelSpec::new(cfg.n)?;
    if !spec.is_odd() {
        return Err(CliError::Validation(format!(
            "the Gaussian-limit diagnostics need an odd dimension, got n = {}",
            cfg.n
        )));
    }
    let t_list = cfg.t_list_or(&[10.0, 25.0, 50.0, 100.0]);
    let mut b = ReportBuilder::new("gaussian1d", cfg.as_params());

    let errs: Result<Vec<(f64, f64)>, CliError> = t_list
        .par_iter()
        .map(|&t| Ok((t, gaussian_l1_error(&spec, t)?)))
        .collect();
    let errs = errs?;
    let monotone = errs.windows(2).all(|w| w[1].1 < w[0].1);
    b.metric("err_final", errs.last().unwrap().1)?;
    b.metric("err_monotone", if monotone { 1.0 } else { 0.0 })?;
    b.series("l1_error", "t", "l1_error", errs)?;

    // rescaled density section at the largest time
    let t_max = t_list.iter().cloned().fold(0.0, f64::max);
    let xi: Vec<f64> = (0..=128).map(|i| -8.0 + 16.0 * i as f64 / 128.0).collect();
    let vals = rescaled_profile(&spec, t_max, &xi)?;
    let profile: Vec<(f64, f64)> = xi.iter().cloned().zip(vals.iter().cloned()).collect();
    let reference: Vec<(f64, f64)> = xi
        .iter()
        .map(|&x| Ok((x, gaussian1d(x, 1.0)?)))
        .collect::<Result<_, CliError>>()?;
    b.metric("rescaled_at_0", vals[64])?;
    b.series("rescaled_profile", "xi", "rho_bar", profile)?;
    b.series("gaussian_reference", "xi", "e1", reference)?;

    // first moment and total mass of the rescaled density over the cone
    let st = t_max.sqrt();
    let xi0 = -spec.drift_speed() * st;
    let count = 4000;
    let hi = 12.0;
    let wide: Vec<f64> = (0..=count).map(|i| xi0 + (hi - xi0) * i as f64 / count as f64).collect();
    let dens = rescaled_profile(&spec, t_max, &wide)?;
    let h = (hi - xi0) / count as f64;
    let mut mass = 0.0;
    let mut moment = 0.0;
    for i in 1..dens.len() {
        mass += 0.5 * (dens[i - 1] + dens[i]) * h;
        moment += 0.5 * (wide[i - 1] * dens[i - 1] + wide[i] * dens[i]) * h;
    }
    b.metric("rescaled_mass_err", (mass - 1.0).abs())?;
    b.metric("rescaled_mean_abs", (moment / mass).abs())?;

    Ok(b.build())
}
