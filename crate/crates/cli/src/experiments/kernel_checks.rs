//! Kernel-level checks: mass conservation across dimensions and times,
//! recurrence consistency against the closed form, the Davies sandwich,
//! and the sup-norm decay law.

use rayon::prelude::*;

use hyperheat_core::{
    davies_log, kernel_log, kernel_log_from_base, kernel_mass, DaviesEnvelope, KernelSpec,
};

use crate::{CliError, ExperimentReport, ReportBuilder, RunConfig};

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

pub fn run(cfg: &RunConfig) -> Result<ExperimentReport, CliError> {
    let t_list = cfg.t_list_or(&[0.5, 1.0, 5.0, 20.0]);
    let mut b = ReportBuilder::new("kernel-checks", cfg.as_params());

    // conservation for n = 3 and n = 5 over the time grid
    for &n in &[3u32, 5] {
        let spec = KernelSpec::new(n)?;
        let errs: Result<Vec<(f64, f64, f64)>, CliError> = t_list
            .par_iter()
            .map(|&t| {
                let r_max = spec.drift_speed() * t + 12.0 * t.sqrt();
                let m = kernel_mass(&spec, t, r_max)?;
                Ok((t, (m.mass - 1.0).abs(), m.tail_bound.unwrap_or(0.0)))
            })
            .collect();
        let errs = errs?;
        let mut worst = 0.0_f64;
        let mut worst_tail = 0.0_f64;
        for &(t, err, tail) in &errs {
            b.metric(&format!("mass_err_n{n}_t{t}"), err)?;
            worst = worst.max(err);
            worst_tail = worst_tail.max(tail);
        }
        b.metric(&format!("mass_err_max_n{n}"), worst)?;
        b.metric(&format!("mass_tail_bound_max_n{n}"), worst_tail)?;
    }

    // recurrence from the 1D Gaussian base reproduces G_3
    let rs = log_spaced(1e-3, 40.0, 60);
    let mut recurrence_worst = 0.0_f64;
    for &t in &[0.5, 2.0, 10.0] {
        for &r in &rs {
            let direct = kernel_log_from_base(3, 3, r, t)?;
            let via = kernel_log_from_base(1, 3, r, t)?;
            let rel = ((via.log_mag() - direct.log_mag()).exp() - 1.0).abs();
            recurrence_worst = recurrence_worst.max(rel);
        }
    }
    b.metric("recurrence_max_rel_err", recurrence_worst)?;

    // Davies sandwich in dimension 3: computed ratio against the analytic
    // form 2r/((1+r)(1-e^{-2r}))
    let spec3 = KernelSpec::new(3)?;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    let mut identity_err = 0.0_f64;
    let mut davies_series = Vec::new();
    for &t in &[0.5, 2.0, 10.0] {
        for &r in &rs {
            let ratio = kernel_log(&spec3, r, t)?.ratio_to(davies_log(&spec3, r, t)?);
            let analytic = 2.0 * r / ((1.0 + r) * (-(-2.0 * r).exp_m1()));
            identity_err = identity_err.max((ratio - analytic).abs() / analytic);
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
            if t == 2.0 {
                davies_series.push((r, ratio));
            }
        }
    }
    b.metric("davies_ratio_min", ratio_min)?;
    b.metric("davies_ratio_max", ratio_max)?;
    b.metric("davies_identity_max_err", identity_err)?;
    b.series("davies_ratio", "r", "ratio", davies_series)?;

    // Davies envelope in dimension 5 over the calibrated region
    let spec5 = KernelSpec::new(5)?;
    let env5 = DaviesEnvelope::calibrated(spec5)?;
    let mut lo5 = f64::INFINITY;
    let mut hi5 = f64::NEG_INFINITY;
    for &t in &[0.5, 2.0, 10.0, 50.0] {
        for &r in &log_spaced(0.1, 10.0 * spec5.drift_speed() * t, 40) {
            let ratio = kernel_log(&spec5, r, t)?.ratio_to(davies_log(&spec5, r, t)?);
            lo5 = lo5.min(ratio);
            hi5 = hi5.max(ratio);
        }
    }
    b.metric("davies_n5_ratio_min", lo5)?;
    b.metric("davies_n5_ratio_max", hi5)?;
    b.metric("davies_n5_c_lower", env5.c_lower())?;
    b.metric("davies_n5_c_upper", env5.c_upper())?;
    b.metric(
        "davies_n5_in_envelope",
        if lo5 >= env5.c_lower() && hi5 <= env5.c_upper() { 1.0 } else { 0.0 },
    )?;

    // sup-norm law: t^{3/2} e^{lambda1 t} G(0, t) converges to a constant
    for &n in &[3u32, 5] {
        let spec = KernelSpec::new(n)?;
        let pts: Result<Vec<(f64, f64)>, CliError> = log_spaced(1.0, 100.0, 13)
            .into_iter()
            .map(|t| {
                let w = 1.5 * t.ln() + spec.lambda1() * t + kernel_log(&spec, 0.0, t)?.log_mag();
                Ok((t, w.exp()))
            })
            .collect();
        let pts = pts?;
        let f = |t: f64| -> Result<f64, CliError> {
            Ok((1.5 * t.ln() + spec.lambda1() * t + kernel_log(&spec, 0.0, t)?.log_mag()).exp())
        };
        let drift = (f(100.0)? / f(50.0)? - 1.0).abs();
        b.metric(&format!("supnorm_law_drift_n{n}"), drift)?;
        if n == 3 {
            b.series("supnorm_law", "t", "weighted_sup", pts)?;
        }
    }

    // exponent identity spot check across dimensions
    let mut exp_err = 0.0_f64;
    for n in 2u32..=7 {
        let spec = KernelSpec::new(n)?;
        for &(r, t) in &[(0.3, 0.7), (5.0, 2.0), (60.0, 13.0), (200.0, 80.0)] {
            let c = (n - 1) as f64 * t;
            let lhs = -spec.lambda1() * t - 0.5 * (n - 1) as f64 * r - r * r / (4.0 * t);
            let rhs = -(r + c) * (r + c) / (4.0 * t);
            exp_err = exp_err.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    b.metric("exponent_identity_max_err", exp_err)?;

    Ok(b.build())
}
