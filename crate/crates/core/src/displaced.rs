//! Displaced-mass comparisons in H^3: the quantitative obstruction to
//! kernel stabilization for nonradial data.
//!
//! A unit mass displaced to distance `a` from the pole evolves as
//! `u(x,t) = G_t(L)` with `cosh L = cosh r cosh a - sinh r sinh a cos theta`.
//! Along the axis the ratio to the centered kernel approaches `e^{2a} > 1`
//! in the mass region `r ~ 2t`, the weighted pointwise gap converges to
//! `Q(r-a) - Q(r) > 0`, and the positive part of the difference keeps an
//! `a`-dependent amount of L1 mass for all large times. All computations
//! here are exact kernel evaluations plus 2D quadrature (tensor in the
//! angle, adaptive in radius); no nonradial PDE solve is involved.

use crate::error::{Error, Result};
use crate::kernel::{geodesic_distance, geodesic_from_sin_sq_half, kernel_log_dim, q_profile, KernelSpec};
use crate::logscalar::{log_sinh, LogScalar};
use crate::quadrature::{integrate_log, AdaptiveConfig};

/// Displacement setup: pole offset `a` along the first axis, observation
/// time, and section grids for reporting. Asymptotic claims assume `a`
/// small against `t` (acceptance runs keep `a <= t/10`).
#[derive(Debug, Clone)]
pub struct DisplacedConfig {
    a: f64,
    t: f64,
    theta_grid: Vec<f64>,
    r_grid: Vec<f64>,
}

impl DisplacedConfig {
    pub fn new(a: f64, t: f64, theta_grid: Vec<f64>, r_grid: Vec<f64>) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("displacement must be nonnegative, got {a}")));
        }
        if !(t > 0.0) {
            return Err(Error::NonpositiveTime { t });
        }
        if theta_grid.windows(2).any(|w| !(w[1] > w[0]))
            || theta_grid.iter().any(|&th| !(0.0..=std::f64::consts::PI).contains(&th))
        {
            return Err(Error::Domain("theta grid must increase within [0, pi]".into()));
        }
        if r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid.iter().any(|&r| !(r >= 0.0)) {
            return Err(Error::Domain("r grid must be increasing and nonnegative".into()));
        }
        Ok(DisplacedConfig { a, t, theta_grid, r_grid })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn theta_grid(&self) -> &[f64] {
        &self.theta_grid
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r_grid
    }
}

/// Log of the displaced solution `G_t(L(r, a, theta))` at a field point.
pub fn displaced_value_log(cfg: &DisplacedConfig, r: f64, theta: f64) -> Result<LogScalar> {
    let l = geodesic_distance(r, cfg.a, theta)?;
    kernel_log_dim(3, l, cfg.t)
}

/// Both readings of the on-axis comparison of the displaced kernel:
/// against the centered kernel at the same radius (`G_t(r-a)/G_t(r)`, the
/// quantity controlling the mass region) and against the kernel value at
/// the displacement radius (`G_t(r-a)/G_t(a)`).
#[derive(Debug, Clone, Copy)]
pub struct AxisRatioReadings {
    pub vs_same_radius: f64,
    pub vs_displacement_radius: f64,
}

pub fn axis_ratio_readings(a: f64, r: f64, t: f64) -> Result<AxisRatioReadings> {
    if !(r > a) {
        return Err(Error::Domain(format!("axis comparison needs r > a, got r={r}, a={a}")));
    }
    let num = kernel_log_dim(3, r - a, t)?;
    let den_same = kernel_log_dim(3, r, t)?;
    let den_disp = kernel_log_dim(3, a.max(0.0), t)?;
    Ok(AxisRatioReadings {
        vs_same_radius: num.ratio_to(den_same),
        vs_displacement_radius: num.ratio_to(den_disp),
    })
}

/// On-axis ratio `G_t(r-a)/G_t(r)`; exact, `> 1` in the mass region, with
/// limit `e^{2a}` as `t -> infinity` along `r = 2t`.
pub fn axis_ratio(a: f64, r: f64, t: f64) -> Result<f64> {
    Ok(axis_ratio_readings(a, r, t)?.vs_same_radius)
}

/// The weighted pointwise gap at finite time together with its analytic
/// limit `Q_3(r-a) - Q_3(r)`.
#[derive(Debug, Clone, Copy)]
pub struct PointwiseGap {
    /// `t^{3/2} e^{lambda1 t} |G_t(r-a) - G_t(r)|`
    pub weighted_gap: f64,
    pub analytic_limit: f64,
}

pub fn pointwise_gap(a: f64, r: f64, t: f64) -> Result<PointwiseGap> {
    if !(r > a) {
        return Err(Error::Domain(format!("pointwise gap needs r > a, got r={r}, a={a}")));
    }
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("pointwise gap needs t >= 1, got {t}")));
    }
    let spec = KernelSpec::new(3)?;
    let weight = 1.5 * t.ln() + spec.lambda1() * t;
    let near = (weight + kernel_log_dim(3, r - a, t)?.log_mag()).exp();
    let far = (weight + kernel_log_dim(3, r, t)?.log_mag()).exp();
    let limit = q_profile(&spec, r - a)? - q_profile(&spec, r)?;
    Ok(PointwiseGap { weighted_gap: (near - far).abs(), analytic_limit: limit })
}

/// On-axis value of the symmetric two-mass solution,
/// `u(r,t) = (G_t(r-a) + G_t(r+a))/2`.
pub fn two_mass_value(a: f64, r: f64, t: f64) -> Result<f64> {
    if !(r > a) {
        return Err(Error::Domain(format!("two-mass value needs r > a, got r={r}, a={a}")));
    }
    let near = kernel_log_dim(3, r - a, t)?;
    let far = kernel_log_dim(3, r + a, t)?;
    Ok(0.5 * (near.value() + far.value()))
}

/// Ratio of the two-mass solution to the centered kernel; approaches
/// `cosh(2a)` in the mass region.
pub fn two_mass_ratio(a: f64, r: f64, t: f64) -> Result<f64> {
    if !(r > a) {
        return Err(Error::Domain(format!("two-mass ratio needs r > a, got r={r}, a={a}")));
    }
    let near = kernel_log_dim(3, r - a, t)?;
    let far = kernel_log_dim(3, r + a, t)?;
    let center = kernel_log_dim(3, r, t)?;
    Ok(0.5 * (near.ratio_to(center) + far.ratio_to(center)))
}

/// Exact far-field ratio against a delayed kernel, `G_t(r-a)/G_{t+eps}(r)`;
/// uniformly bounded for `r > (2a/eps) t`.
pub fn far_field_delayed_bound(a: f64, eps: f64, r: f64, t: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("delay must be positive, got {eps}")));
    }
    if !(r > a) {
        return Err(Error::Domain(format!("far-field ratio needs r > a, got r={r}, a={a}")));
    }
    let num = kernel_log_dim(3, r - a, t)?;
    let den = kernel_log_dim(3, r, t + eps)?;
    Ok(num.ratio_to(den))
}

/// Envelope for the far-field delayed ratio,
/// `2 e^{a + lambda1 eps} e^{-r(eps r - 2 a t)/(4 t^2)}`. The
/// `e^{lambda1 eps}` factor carries the kernel's spectral decay across the
/// delay; the constant 2 absorbs the remaining bounded prefactors for large
/// `t`.
pub fn far_field_envelope(a: f64, eps: f64, r: f64, t: f64) -> f64 {
    let lambda1 = 1.0; // dimension 3
    2.0 * (a + lambda1 * eps).exp() * (-r * (eps * r - 2.0 * a * t) / (4.0 * t * t)).exp()
}

/// Angle cosine at which the displaced distance equals the radius:
/// `u* = tanh(a/2) coth(r)`; for `u > u*` the displaced kernel dominates.
fn crossing_cosine(a: f64, r: f64) -> f64 {
    (0.5 * a).tanh() / r.tanh()
}

/// Log-domain area element `2 pi sinh^2 r` times a kernel difference.
fn shell_weight_log(r: f64) -> f64 {
    (2.0 * std::f64::consts::PI).ln() + 2.0 * log_sinh(r)
}

fn inner_cfg() -> AdaptiveConfig {
    AdaptiveConfig { abs_tol: 1e-9, max_depth: 36 }
}

fn outer_cfg() -> AdaptiveConfig {
    AdaptiveConfig { abs_tol: 1e-9, max_depth: 40 }
}

/// `|| (u - G_t)_+ ||_{L1(H^3)}` for the displaced solution, by 2D
/// quadrature in `(r, u = cos theta)` with a log-domain integrand. The
/// angular integral runs over the cap `u in (u*, 1]` where the displaced
/// kernel exceeds the centered one; it is empty below `r = a/2`.
pub fn positive_part_l1(a: f64, t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("positive-part mass needs t >= 1, got {t}")));
    }
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("displacement must be nonnegative, got {a}")));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let r_hi = 2.0 * t + a + 12.0 * t.sqrt();
    let radial = |r: f64| -> LogScalar {
        if r <= 0.5 * a {
            return LogScalar::ZERO;
        }
        let u_star = crossing_cosine(a, r).min(1.0);
        if u_star >= 1.0 {
            return LogScalar::ZERO;
        }
        let center = kernel_log_dim(3, r, t).unwrap_or(LogScalar::ZERO);
        let angular = |u: f64| -> LogScalar {
            let l = geodesic_from_sin_sq_half(r, a, 0.5 * (1.0 - u));
            let displaced = kernel_log_dim(3, l, t).unwrap_or(LogScalar::ZERO);
            displaced.sub_positive(center)
        };
        match integrate_log(angular, u_star, 1.0, &inner_cfg()) {
            Ok(v) => v * LogScalar::from_log(shell_weight_log(r)),
            Err(_) => LogScalar::ZERO,
        }
    };
    Ok(integrate_log(radial, 0.5 * a, r_hi, &outer_cfg())?.value())
}

/// `|| (G_t - u)_+ ||_{L1(H^3)}`, the complementary negative part; by mass
/// conservation it balances the positive part.
pub fn negative_part_l1(a: f64, t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("negative-part mass needs t >= 1, got {t}")));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let r_hi = 2.0 * t + a + 12.0 * t.sqrt();
    let radial = |r: f64| -> LogScalar {
        if r <= 0.0 {
            return LogScalar::ZERO;
        }
        let u_star = crossing_cosine(a, r).min(1.0);
        let center = kernel_log_dim(3, r, t).unwrap_or(LogScalar::ZERO);
        let angular = |u: f64| -> LogScalar {
            let l = geodesic_from_sin_sq_half(r, a, 0.5 * (1.0 - u));
            let displaced = kernel_log_dim(3, l, t).unwrap_or(LogScalar::ZERO);
            center.sub_positive(displaced)
        };
        match integrate_log(angular, -1.0, u_star, &inner_cfg()) {
            Ok(v) => v * LogScalar::from_log(shell_weight_log(r)),
            Err(_) => LogScalar::ZERO,
        }
    };
    Ok(integrate_log(radial, 0.0, r_hi, &outer_cfg())?.value())
}

/// Total mass of the displaced solution,
/// `int int G_t(L) 2 pi sinh^2 r sin theta dtheta dr`; conservation makes
/// it 1 and validates the law-of-cosines evaluation in H^3.
pub fn displaced_total_mass(a: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    let r_hi = 2.0 * t + a + 12.0 * t.sqrt();
    let radial = |r: f64| -> LogScalar {
        if r <= 0.0 {
            return LogScalar::ZERO;
        }
        let angular = |u: f64| -> LogScalar {
            let l = geodesic_from_sin_sq_half(r, a, 0.5 * (1.0 - u));
            kernel_log_dim(3, l, t).unwrap_or(LogScalar::ZERO)
        };
        match integrate_log(angular, -1.0, 1.0, &inner_cfg()) {
            Ok(v) => v * LogScalar::from_log(shell_weight_log(r)),
            Err(_) => LogScalar::ZERO,
        }
    };
    Ok(integrate_log(radial, 0.0, r_hi, &outer_cfg())?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn displaced_value_reduces_on_the_axis() {
        let cfg = DisplacedConfig::new(1.0, 5.0, vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        // theta = 0: collinear, L = r - a
        let v = displaced_value_log(&cfg, 3.0, 0.0).unwrap();
        let k = kernel_log_dim(3, 2.0, 5.0).unwrap();
        assert_relative_eq!(v.log_mag(), k.log_mag(), max_relative = 1e-12);
        // theta = pi: L = r + a
        let v = displaced_value_log(&cfg, 3.0, std::f64::consts::PI).unwrap();
        let k = kernel_log_dim(3, 4.0, 5.0).unwrap();
        assert_relative_eq!(v.log_mag(), k.log_mag(), max_relative = 1e-12);
        // a = 0: recovers the centered kernel at any angle
        let cfg0 = DisplacedConfig::new(0.0, 5.0, vec![0.0], vec![0.0]).unwrap();
        let v = displaced_value_log(&cfg0, 3.0, 1.234).unwrap();
        let k = kernel_log_dim(3, 3.0, 5.0).unwrap();
        assert_relative_eq!(v.log_mag(), k.log_mag(), max_relative = 1e-12);
    }

    #[test]
    fn axis_ratio_values() {
        // a=1, r=2t, t=20: about 7.115, approaching e^2 as t grows
        let r = axis_ratio(1.0, 40.0, 20.0).unwrap();
        assert_relative_eq!(r, 7.1148360756601408, max_relative = 1e-10);
        let r50 = axis_ratio(1.0, 100.0, 50.0).unwrap();
        let e2 = (2.0_f64).exp();
        assert!((r50 - e2).abs() / e2 < 0.05, "ratio {r50} vs e^2 {e2}");
        // a = 0 is exactly 1
        assert_relative_eq!(axis_ratio(0.0, 10.0, 5.0).unwrap(), 1.0, max_relative = 1e-13);
        assert!(axis_ratio(2.0, 1.0, 5.0).is_err());
        // bounded by c e^{(1+k/2)a} along r = kt
        let k = 3.0;
        let ratio = axis_ratio(1.0, k * 20.0, 20.0).unwrap();
        assert!(ratio <= 2.0 * (1.0_f64 + k / 2.0).exp(), "ratio {ratio}");
    }

    #[test]
    fn pointwise_gap_approaches_q_difference() {
        let g = pointwise_gap(1.0, 2.0, 200.0).unwrap();
        assert_relative_eq!(g.analytic_limit, 0.0067227765423066154, max_relative = 1e-10);
        assert!((g.weighted_gap - g.analytic_limit).abs() / g.analytic_limit < 0.05);
        // a = 0: no gap
        let g0 = pointwise_gap(0.0, 2.0, 10.0).unwrap();
        assert_abs_diff_eq!(g0.weighted_gap, 0.0, epsilon = 1e-18);
        assert!(pointwise_gap(1.0, 0.5, 10.0).is_err());
    }

    #[test]
    fn two_mass_ratio_approaches_cosh() {
        let ratio = two_mass_ratio(1.0, 100.0, 50.0).unwrap();
        let c2 = (2.0_f64).cosh();
        assert_relative_eq!(ratio, 3.7073439481321650, max_relative = 1e-10);
        assert!((ratio - c2).abs() / c2 < 0.05);
        // a = 0: exactly the kernel
        assert_relative_eq!(two_mass_ratio(0.0, 10.0, 5.0).unwrap(), 1.0, max_relative = 1e-13);
        // small-a expansion: ratio - 1 ~ cosh(2a) - 1 ~ 2 a^2
        let small = two_mass_ratio(0.1, 100.0, 50.0).unwrap();
        assert_abs_diff_eq!(small - 1.0, 0.0201, epsilon = 2e-3);
    }

    #[test]
    fn far_field_ratio_within_envelope() {
        let (a, eps, t) = (1.0, 0.5, 20.0);
        let r = 2.0 * (2.0 * a / eps) * t; // twice the threshold radius
        let ratio = far_field_delayed_bound(a, eps, r, t).unwrap();
        assert_relative_eq!(ratio, 0.10161046543337515, max_relative = 1e-9);
        assert!(ratio <= far_field_envelope(a, eps, r, t), "{ratio}");
        // a = 0 beyond the bulk: the delayed kernel dominates
        for &rr in &[50.0, 60.0, 80.0] {
            let q = far_field_delayed_bound(1e-12, eps, rr, t).unwrap();
            assert!(q <= 1.0, "ratio {q} at r = {rr}");
        }
        // at the threshold radius the Gaussian factor of the envelope is 1
        let r_th = (2.0 * a / eps) * t;
        let env = far_field_envelope(a, eps, r_th, t);
        assert_relative_eq!(env, 2.0 * (a + eps).exp(), max_relative = 1e-12);
        assert!(far_field_delayed_bound(a, eps, 0.5, t).is_err());
    }

    #[test]
    fn displaced_mass_is_conserved() {
        let m = displaced_total_mass(1.0, 5.0).unwrap();
        assert_abs_diff_eq!(m, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn positive_part_levels_at_tanh() {
        // the plateau sits at tanh(a/2)
        let p = positive_part_l1(1.0, 20.0).unwrap();
        assert_abs_diff_eq!(p, 0.5_f64.tanh(), epsilon = 2e-4);
        assert_eq!(positive_part_l1(0.0, 20.0).unwrap(), 0.0);
        // monotone in the displacement
        let p2 = positive_part_l1(2.0, 20.0).unwrap();
        assert!(p2 > p);
    }

    #[test]
    fn positive_and_negative_parts_balance() {
        let p = positive_part_l1(1.0, 10.0).unwrap();
        let n = negative_part_l1(1.0, 10.0).unwrap();
        assert_relative_eq!(p, n, max_relative = 1e-3);
    }
}
