//! Mass geometry of radial profiles: cumulative mass, half-mass and
//! sign-change radii, annulus concentration, and the drift-corrected
//! rescaling onto the 1D Gaussian.
//!
//! The mass function of a radial distribution is
//! `M(r) = omega_n int_0^r sinh^{n-1}(s) u(s) ds`; for the heat kernel its
//! bulk travels outward along the mass line `r = (n-1) t` with Gaussian
//! spread `O(sqrt t)`. In the moving frame `s = r - (n-1)t`, rescaled by
//! `xi = s / sqrt t`, the weighted density `rho = omega_n sinh^{n-1} G`
//! converges to `E_1(xi, 1)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::kernel::{
    gaussian1d_log, kernel_log_dt, weighted_density_log, DaviesEnvelope, KernelSpec,
};
use crate::logscalar::log_sinh;
use crate::quadrature::{integrate, integrate_log, AdaptiveConfig};

/// Cumulative mass samples `M(r_i, t)` on a grid.
#[derive(Debug, Clone)]
pub struct MassProfile {
    grid: Arc<RadialGrid>,
    cumulative: Vec<f64>,
    time: f64,
}

impl MassProfile {
    pub fn new(grid: Arc<RadialGrid>, cumulative: Vec<f64>, time: f64) -> Result<Self> {
        if cumulative.len() != grid.len() {
            return Err(Error::DegenerateGrid("cumulative length != grid length".into()));
        }
        if cumulative.first() != Some(&0.0) {
            return Err(Error::Domain("mass function must start at M(0) = 0".into()));
        }
        Ok(MassProfile { grid, cumulative, time })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

/// Cumulative trapezoid mass function of a radial field,
/// `M(r_i) = omega_n int_0^{r_i} sinh^{n-1} u ds`. Densities are assembled
/// in log form so huge volume factors cannot overflow against tiny values.
pub fn mass_function(u: &RadialField) -> MassProfile {
    let grid = Arc::clone(u.grid());
    let nm1 = (grid.n() - 1) as f64;
    let omega = grid.omega_n();
    let rho: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(u.values())
        .map(|(&r, &v)| {
            if r == 0.0 || v == 0.0 {
                0.0
            } else {
                v.signum() * (omega.ln() + nm1 * log_sinh(r) + v.abs().ln()).exp()
            }
        })
        .collect();
    let mut cumulative = Vec::with_capacity(grid.len());
    cumulative.push(0.0);
    let mut acc = 0.0;
    for i in 1..grid.len() {
        let h = grid.nodes()[i] - grid.nodes()[i - 1];
        acc += 0.5 * (rho[i - 1] + rho[i]) * h;
        cumulative.push(acc);
    }
    MassProfile { grid, cumulative, time: u.time() }
}

/// Exact-kernel mass profile on a fresh uniform grid covering the bulk,
/// for odd dimensions where no solver run is needed.
pub fn kernel_mass_profile(spec: &KernelSpec, t: f64, nodes: usize) -> Result<MassProfile> {
    if spec.n() % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n: spec.n() });
    }
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    let r_max = spec.drift_speed() * t + 12.0 * t.sqrt();
    let grid = Arc::new(crate::grid::build_grid(spec.n(), r_max, nodes, crate::grid::Grading::Uniform)?);
    let mut cumulative = Vec::with_capacity(grid.len());
    cumulative.push(0.0);
    let mut acc = 0.0;
    let rho = |r: f64| -> Result<f64> { Ok(weighted_density_log(spec, r, t)?.value()) };
    let mut prev = 0.0;
    for i in 1..grid.len() {
        let r = grid.nodes()[i];
        let cur = rho(r)?;
        acc += 0.5 * (prev + cur) * (r - grid.nodes()[i - 1]);
        cumulative.push(acc);
        prev = cur;
    }
    MassProfile::new(grid, cumulative, t)
}

/// The moving-frame coordinates attached to one observation time:
/// `s = r - (n-1)t` and `xi = s / sqrt t`.
#[derive(Debug, Clone)]
pub struct DriftFrame {
    n: u32,
    t: f64,
    s_samples: Vec<f64>,
    xi_samples: Vec<f64>,
}

impl DriftFrame {
    pub fn new(n: u32, t: f64, xi_samples: Vec<f64>) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NonpositiveTime { t });
        }
        let st = t.sqrt();
        let s_samples = xi_samples.iter().map(|&xi| xi * st).collect();
        Ok(DriftFrame { n, t, s_samples, xi_samples })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s_samples(&self) -> &[f64] {
        &self.s_samples
    }

    pub fn xi_samples(&self) -> &[f64] {
        &self.xi_samples
    }

    /// Radii corresponding to the samples, `r = (n-1)t + s`.
    pub fn radii(&self) -> Vec<f64> {
        let c = (self.n - 1) as f64 * self.t;
        self.s_samples.iter().map(|&s| c + s).collect()
    }
}

/// Radius enclosing half the total mass, by linear interpolation of the
/// cumulative samples.
pub fn half_mass_radius(profile: &MassProfile) -> Result<f64> {
    let total = profile.total();
    if total < 0.9 {
        return Err(Error::MassDeficit { total });
    }
    let target = 0.5 * total;
    let m = profile.cumulative();
    let r = profile.grid().nodes();
    let idx = match m.iter().position(|&v| v >= target) {
        Some(0) | None => return Err(Error::Domain("mass function never crosses half".into())),
        Some(i) => i,
    };
    let (m0, m1) = (m[idx - 1], m[idx]);
    let (r0, r1) = (r[idx - 1], r[idx]);
    if m1 == m0 {
        return Ok(r1);
    }
    Ok(r0 + (target - m0) / (m1 - m0) * (r1 - r0))
}

/// Radius where `d/dt G(r, t)` changes sign. In dimension 3 this is exactly
/// `sqrt(6t + 4t^2)`; other odd dimensions bracket the root of the exact
/// time derivative of the log kernel.
pub fn sign_change_radius(n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    if n % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n });
    }
    if n == 3 {
        return Ok((6.0 * t + 4.0 * t * t).sqrt());
    }
    let g = |r: f64| kernel_log_dt(n, r, t);
    // dG/dt < 0 at the pole, > 0 far out; expand until bracketed
    let mut lo = 1e-6;
    let mut hi = ((n - 1) as f64) * (t + 1.0) + 10.0;
    if g(lo)? >= 0.0 {
        return Err(Error::Domain("time derivative not negative at the pole".into()));
    }
    while g(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::Domain("failed to bracket the sign-change radius".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fraction of the kernel mass inside the annulus
/// `|r - (n-1)t| <= k sqrt t`, by quadrature of the weighted density.
pub fn annulus_mass_fraction(spec: &KernelSpec, t: f64, k: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("annulus diagnostics need t >= 1, got {t}")));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("annulus width k must be positive, got {k}")));
    }
    let spec = *spec;
    let c = spec.drift_speed() * t;
    let st = t.sqrt();
    let lo = (c - k * st).max(0.0);
    let hi = c + k * st;
    let outer = (c + 12.0 * st).max(hi);
    let cfg = AdaptiveConfig::default();
    let f = |r: f64| {
        weighted_density_log(&spec, r, t).unwrap_or(crate::logscalar::LogScalar::ZERO)
    };
    let inside = integrate_log(&f, lo, hi, &cfg)?.value();
    let total = integrate_log(&f, 0.0, outer, &cfg)?.value();
    Ok(inside / total)
}

/// Drift-corrected, rescaled density `rho_bar(xi, t) = sqrt(t) rho((n-1)t + xi sqrt t, t)`
/// sampled on a `xi` grid. `xi` below the cone boundary `-(n-1) sqrt t`
/// (radius zero) is rejected.
pub fn rescaled_profile(spec: &KernelSpec, t: f64, xi_grid: &[f64]) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    let st = t.sqrt();
    let xi0 = -spec.drift_speed() * st;
    let c = spec.drift_speed() * t;
    xi_grid
        .iter()
        .map(|&xi| {
            if xi < xi0 {
                return Err(Error::OutOfCone { xi, xi0 });
            }
            let r = (c + xi * st).max(0.0);
            Ok(st * weighted_density_log(spec, r, t)?.value())
        })
        .collect()
}

/// Weighted L1 distance between the kernel density and the drifted 1D
/// Gaussian: `int_0^inf |rho(r,t) - E_1(r-(n-1)t, t)| dr`, truncated at
/// `(n-1)t + 12 sqrt t` with the tails added back as analytic estimates.
pub fn gaussian_l1_error(spec: &KernelSpec, t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("the Gaussian limit diagnostics need t >= 1, got {t}")));
    }
    if spec.n() % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n: spec.n() });
    }
    let spec = *spec;
    let c = spec.drift_speed() * t;
    let hi = c + 12.0 * t.sqrt();
    let f = |r: f64| -> f64 {
        let rho = weighted_density_log(&spec, r, t)
            .map(|v| v.value())
            .unwrap_or(0.0);
        let e1 = gaussian1d_log(r - c, t).map(|v| v.value()).unwrap_or(0.0);
        (rho - e1).abs()
    };
    // the integrand has kinks at crossings; a looser panel tolerance with
    // deep bisection is the right trade
    let cfg = AdaptiveConfig { abs_tol: 1e-8, max_depth: 46 };
    let bulk = integrate(f, 0.0, hi, &cfg)?;
    // Gaussian tail beyond the truncation: erfc(6)/2 of unit mass
    let gauss_tail = 0.5 * erfc_proxy(6.0);
    // kernel tail via the Davies envelope where calibrated
    let kernel_tail = DaviesEnvelope::calibrated(spec)
        .ok()
        .and_then(|env| env.tail_mass_bound(t, hi).ok())
        .unwrap_or(0.0);
    Ok(bulk + gauss_tail + kernel_tail)
}

/// `erfc(x)` for the tail bookkeeping; Abramowitz-Stegun 7.1.26 style
/// rational approximation is more than enough for error-bar terms.
fn erfc_proxy(x: f64) -> f64 {
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    poly * (-x * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Grading};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn mass_function_of_kernel_reaches_one() {
        let grid = Arc::new(build_grid(3, 16.0, 1600, Grading::Uniform).unwrap());
        let u = RadialField::kernel(Arc::clone(&grid), 1.0).unwrap();
        let p = mass_function(&u);
        assert_eq!(p.cumulative()[0], 0.0);
        assert!(p.cumulative().windows(2).all(|w| w[1] >= w[0]));
        assert_relative_eq!(p.total(), 1.0, max_relative = 1e-5);
    }

    #[test]
    fn mass_function_of_zero_field() {
        let grid = Arc::new(build_grid(3, 10.0, 100, Grading::Uniform).unwrap());
        let u = RadialField::new(Arc::clone(&grid), vec![0.0; grid.len()], 0.0).unwrap();
        let p = mass_function(&u);
        assert!(p.cumulative().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn half_mass_of_step_profile() {
        // symmetric jump at r = 5
        let grid = Arc::new(build_grid(3, 10.0, 101, Grading::Uniform).unwrap());
        let cumulative: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| {
                if r < 4.95 {
                    0.0
                } else if r > 5.05 {
                    1.0
                } else {
                    (r - 4.95) * 10.0
                }
            })
            .collect();
        let p = MassProfile::new(grid, cumulative, 0.0).unwrap();
        assert_abs_diff_eq!(half_mass_radius(&p).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn half_mass_requires_mass() {
        let grid = Arc::new(build_grid(3, 10.0, 32, Grading::Uniform).unwrap());
        let cumulative: Vec<f64> = (0..32).map(|i| 0.5 * i as f64 / 31.0).collect();
        let p = MassProfile::new(grid, cumulative, 0.0).unwrap();
        assert!(matches!(half_mass_radius(&p), Err(Error::MassDeficit { .. })));
    }

    #[test]
    fn kernel_half_mass_sits_on_the_mass_line() {
        let spec = KernelSpec::new(3).unwrap();
        let p = kernel_mass_profile(&spec, 20.0, 4000).unwrap();
        let rm = half_mass_radius(&p).unwrap();
        assert!((rm - 40.0).abs() <= 2.0, "r_m(20) = {rm}");

        let spec5 = KernelSpec::new(5).unwrap();
        let p = kernel_mass_profile(&spec5, 10.0, 4000).unwrap();
        let rm = half_mass_radius(&p).unwrap();
        assert!((rm - 40.0).abs() <= 3.0, "n=5 r_m(10) = {rm}");
    }

    #[test]
    fn sign_change_closed_form_and_root() {
        assert_relative_eq!(sign_change_radius(3, 1.0).unwrap(), 10.0_f64.sqrt());
        assert_relative_eq!(sign_change_radius(3, 0.01).unwrap(), 0.24576411454889015, max_relative = 1e-12);
        assert_relative_eq!(
            sign_change_radius(3, 100.0).unwrap(),
            40600.0_f64.sqrt(),
            max_relative = 1e-12
        );
        // n = 5: root of the exact time derivative; cross-check against the
        // n=5 closed form d/dt log G5 = 0 solved by bisection on finite
        // differences of log G5
        let t = 2.0;
        let rs = sign_change_radius(5, t).unwrap();
        let d = kernel_log_dt(5, rs, t).unwrap();
        assert!(d.abs() < 1e-9, "derivative at root is {d}");
        // and the root scales like (n-1)t + O(sqrt t)
        let rs50 = sign_change_radius(5, 50.0).unwrap();
        assert!((rs50 - 200.0).abs() < 3.0 * 50.0_f64.sqrt(), "rs(50) = {rs50}");
        assert!(matches!(sign_change_radius(2, 1.0), Err(Error::EvenDimensionUnsupported { .. })));
    }

    #[test]
    fn annulus_concentration() {
        let spec = KernelSpec::new(3).unwrap();
        let f4 = annulus_mass_fraction(&spec, 25.0, 4.0).unwrap();
        assert!(f4 >= 0.95, "fraction {f4}");
        let f_all = annulus_mass_fraction(&spec, 25.0, 40.0).unwrap();
        assert_abs_diff_eq!(f_all, 1.0, epsilon = 1e-6);
        assert!(annulus_mass_fraction(&spec, 0.5, 4.0).is_err());
    }

    #[test]
    fn rescaled_profile_matches_gaussian_at_large_time() {
        let spec = KernelSpec::new(3).unwrap();
        let vals = rescaled_profile(&spec, 100.0, &[0.0, 2.0]).unwrap();
        // exact finite-t values from the factorized density
        assert_abs_diff_eq!(vals[0], 0.28209479177387814, epsilon = 1e-4);
        assert_abs_diff_eq!(vals[1], 0.11415456179066354, epsilon = 1e-10);
        // the spec'd limit E_1(2,1) = 0.10378 is approached at O(1/sqrt t)
        assert_abs_diff_eq!(vals[1], 0.10377687435514868, epsilon = 0.011);
        // below the cone
        let err = rescaled_profile(&spec, 4.0, &[-4.1]);
        assert!(matches!(err, Err(Error::OutOfCone { .. })));
    }

    #[test]
    fn rescaled_profile_integrates_to_one() {
        let spec = KernelSpec::new(3).unwrap();
        for &t in &[10.0_f64, 100.0] {
            let st = t.sqrt();
            let xi0 = -spec.drift_speed() * st;
            let n = 4000;
            let hi = 12.0;
            let xis: Vec<f64> = (0..=n).map(|i| xi0 + (hi - xi0) * i as f64 / n as f64).collect();
            let vals = rescaled_profile(&spec, t, &xis).unwrap();
            let h = (hi - xi0) / n as f64;
            let mass: f64 =
                vals.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-4);
        }
    }

    #[test]
    fn gaussian_l1_error_small_and_decreasing() {
        let spec = KernelSpec::new(3).unwrap();
        let e100 = gaussian_l1_error(&spec, 100.0).unwrap();
        assert!(e100 <= 0.12, "error at t=100 is {e100}");
        let e25 = gaussian_l1_error(&spec, 25.0).unwrap();
        assert!(e25 > e100);
    }
}
