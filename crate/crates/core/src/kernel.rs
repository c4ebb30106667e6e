//! Heat kernels on hyperbolic space, their envelopes, and geometry primitives.
//!
//! In geodesic polar coordinates around a pole the radial heat kernel in
//! dimension 3 has the closed form
//!
//! ```text
//! G(r,t) = (4 pi)^{-3/2} t^{-3/2} e^{-t} (r / sinh r) e^{-r^2/4t},
//! ```
//!
//! and every higher odd dimension follows from the descent relation
//! `2 pi G_{n+2} = -e^{-n t} (sinh r)^{-1} d/dr G_n`. The radial derivative in
//! that relation is taken exactly, by forward-mode differentiation of the
//! expression (one Taylor order per recurrence step); no numerical
//! differencing is involved. Everything is evaluated in log-domain: the
//! kernel itself decays like `t^{-3/2} e^{-lambda1 t}` while the volume
//! weight grows like `e^{(n-1)r}`, and both factors individually leave f64
//! range long before their product does.

use std::f64::consts::PI;

use crate::autodiff::{Dual, Jet, Scalar};
use crate::calibration;
use crate::error::{Error, Result};
use crate::logscalar::{log_add_exp, log_sinh, LogScalar};
use crate::quadrature::{integrate_log, AdaptiveConfig};

const LN_2: f64 = std::f64::consts::LN_2;

/// Below this radius `sinh r / r` is evaluated by series; the direct
/// `log r - log sinh r` route starts to cancel.
const SINHC_SERIES_THRESHOLD: f64 = 0.02;

/// Radii are clamped to this floor before jet evaluation; the kernel is
/// continuous at the pole and the induced relative error is O(1e-24).
const POLE_CLAMP: f64 = 1e-12;

/// Dimension together with its derived spectral and surface constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    n: u32,
    lambda1: f64,
    omega_n: f64,
}

impl KernelSpec {
    pub fn new(n: u32) -> Result<Self> {
        let omega_n = sphere_area(n)?;
        let nm1 = (n - 1) as f64;
        Ok(KernelSpec { n, lambda1: nm1 * nm1 / 4.0, omega_n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Bottom of the Laplace-Beltrami spectrum, `(n-1)^2/4`.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// Surface measure of the unit (n-1)-sphere.
    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    /// Asymptotic drift speed of the mass bulk, `n - 1`.
    pub fn drift_speed(&self) -> f64 {
        (self.n - 1) as f64
    }

    pub fn is_odd(&self) -> bool {
        self.n % 2 == 1
    }
}

/// `Gamma(n/2)` for integer `n >= 1`, exact by the half-integer recursion.
fn gamma_of_half(n: u32) -> f64 {
    if n % 2 == 0 {
        (1..n / 2).fold(1.0, |acc, j| acc * j as f64)
    } else {
        (1..=(n - 1) / 2).fold(PI.sqrt(), |acc, j| acc * (2 * j - 1) as f64 / 2.0)
    }
}

/// Surface measure of the unit (n-1)-sphere, `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::DimensionOutOfRange { n });
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_of_half(n))
}

/// Hyperbolic distance between points at radii `r`, `a` subtending angle
/// `theta` at the pole (law of cosines):
/// `cosh L = cosh r cosh a - sinh r sinh a cos theta`.
///
/// Evaluated through the cancellation-free rearrangement
/// `cosh L - 1 = 2 sinh^2((r-a)/2) + 2 sinh r sinh a sin^2(theta/2)`,
/// which stays exact near `theta = 0` and switches to log form when the
/// product of sinh factors would overflow.
pub fn geodesic_distance(r: f64, a: f64, theta: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() || !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("radii must be finite and nonnegative, got r={r}, a={a}")));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("angle {theta} outside [0, pi]")));
    }
    if theta == 0.0 || r == 0.0 || a == 0.0 {
        return Ok(if theta == 0.0 { (r - a).abs() } else if r == 0.0 { a } else { r });
    }
    let sh = (theta / 2.0).sin();
    Ok(geodesic_from_sin_sq_half(r, a, sh * sh))
}

/// Core of the law-of-cosines evaluation with `sin^2(theta/2)` supplied
/// directly (the 2D quadratures integrate in `u = cos theta`, where
/// `sin^2(theta/2) = (1-u)/2` is exact).
pub(crate) fn geodesic_from_sin_sq_half(r: f64, a: f64, sin_sq_half: f64) -> f64 {
    let d = (r - a).abs();
    if r + a < 700.0 {
        let sd = (d / 2.0).sinh();
        let w = 2.0 * sd * sd + 2.0 * r.sinh() * a.sinh() * sin_sq_half;
        // acosh(1 + w), stable for all w >= 0
        (w + (w * (w + 2.0)).sqrt()).ln_1p()
    } else {
        let t1 = if d > 0.0 { LN_2 + 2.0 * log_sinh(d / 2.0) } else { f64::NEG_INFINITY };
        let t2 = if sin_sq_half > 0.0 && r > 0.0 && a > 0.0 {
            LN_2 + log_sinh(r) + log_sinh(a) + sin_sq_half.ln()
        } else {
            f64::NEG_INFINITY
        };
        let logw = log_add_exp(t1, t2);
        if logw > 40.0 {
            // acosh(1 + w) = ln(2w) + O(1/w)
            LN_2 + logw
        } else {
            let w = logw.exp();
            (w + (w * (w + 2.0)).sqrt()).ln_1p()
        }
    }
}

/// `log(omega_n sinh^{n-1} r)`, the polar volume weight. Zero at the pole.
pub fn log_volume_weight(spec: &KernelSpec, r: f64) -> Result<LogScalar> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        return Ok(LogScalar::ZERO);
    }
    Ok(LogScalar::from_log(spec.omega_n.ln() + (spec.n - 1) as f64 * log_sinh(r)))
}

/// Log of the 1D heat kernel `E_1(x,t) = (4 pi t)^{-1/2} e^{-x^2/4t}`.
pub fn gaussian1d_log(x: f64, t: f64) -> Result<LogScalar> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    Ok(LogScalar::from_log(-0.5 * (4.0 * PI * t).ln() - x * x / (4.0 * t)))
}

/// Plain value of `E_1(x,t)`.
pub fn gaussian1d(x: f64, t: f64) -> Result<f64> {
    Ok(gaussian1d_log(x, t)?.value())
}

// ---------------------------------------------------------------------------
// Jet evaluation of log G
// ---------------------------------------------------------------------------

/// `sinh x / x` as a truncated series; valid (and used) only for small `x`.
fn sinhc_jet(x: &Jet<f64>) -> Jet<f64> {
    let y = x.mul(x);
    // 1 + y/6 + y^2/120 + y^3/5040 + y^4/362880 + y^5/39916800
    let mut acc = Jet::constant(1.0 / 39_916_800.0, y.order());
    for &c in &[1.0 / 362_880.0, 1.0 / 5040.0, 1.0 / 120.0, 1.0 / 6.0, 1.0] {
        acc = y.mul(&acc).add_scalar(c);
    }
    acc
}

/// Jet of `log sinh x` at `x0 > 0` via `x - log 2 + log(1 - e^{-2x})`, with
/// the value coefficient recomputed through `expm1` to keep full precision.
fn log_sinh_jet(x: &Jet<f64>, x0: f64) -> Jet<f64> {
    let w = x.scale(-2.0).exp();
    let u = w.neg().add_scalar(1.0).with_value(-(-2.0 * x0).exp_m1());
    x.add(&u.ln()).add_scalar(-LN_2)
}

/// Jet of `log(r / sinh r)`.
fn log_r_over_sinh_jet(x: &Jet<f64>, x0: f64) -> Jet<f64> {
    if x0 < SINHC_SERIES_THRESHOLD {
        sinhc_jet(x).ln().neg()
    } else {
        x.ln().sub(&log_sinh_jet(x, x0))
    }
}

/// Scalar `log(r / sinh r)` with the same branch policy.
pub(crate) fn log_r_over_sinh(r: f64) -> f64 {
    if r < SINHC_SERIES_THRESHOLD {
        let y = r * r;
        let sinhc = 1.0
            + y * (1.0 / 6.0
                + y * (1.0 / 120.0
                    + y * (1.0 / 5040.0 + y * (1.0 / 362_880.0 + y / 39_916_800.0))));
        -sinhc.ln()
    } else {
        r.ln() - log_sinh(r)
    }
}

/// Taylor jet (in r) of `log G_{(3)}(r, t)`.
fn g3_log_jet<S: Scalar>(r0: f64, t: S, order: usize) -> Jet<S> {
    let x = Jet::<f64>::variable(r0, order);
    let lrs = log_r_over_sinh_jet(&x, r0);
    let x2 = x.mul(&x);
    let ln_c3 = -1.5 * (4.0 * PI).ln();
    let quarter_t_inv = S::from_f64(1.0) / (S::from_f64(4.0) * t);
    let const_term =
        S::from_f64(ln_c3) - S::from_f64(1.5) * t.ln() - t;
    lrs.lift::<S>()
        .sub(&x2.lift::<S>().scale(quarter_t_inv))
        .add_scalar(const_term)
}

/// Taylor jet (in r) of `log E_1(r, t)`, the dimension-1 base.
fn gauss_log_jet<S: Scalar>(r0: f64, t: S, order: usize) -> Jet<S> {
    let x = Jet::<f64>::variable(r0, order);
    let x2 = x.mul(&x);
    let quarter_t_inv = S::from_f64(1.0) / (S::from_f64(4.0) * t);
    let const_term =
        (S::from_f64(4.0 * PI) * t).ln() * S::from_f64(-0.5);
    x2.lift::<S>().scale(quarter_t_inv).neg().add_scalar(const_term)
}

/// Jet of `log G_{(n)}` built from the closed form in dimension `base`
/// (1 or 3) by repeated application of the descent relation. Each step uses
/// one exact radial derivative of the previous log-kernel:
/// `log G_{n} = -(n-2) t - log 2 pi - log sinh r + log G_{n-2} + log(-d/dr log G_{n-2})`.
fn log_kernel_jet<S: Scalar>(base: u32, n: u32, r0: f64, t: S, order: usize) -> Jet<S> {
    debug_assert!(base == 1 || base == 3);
    debug_assert!(n >= base && (n - base) % 2 == 0);
    if n == base {
        return if base == 1 { gauss_log_jet(r0, t, order) } else { g3_log_jet(r0, t, order) };
    }
    let inner = log_kernel_jet(base, n - 2, r0, t, order + 1);
    let m = (n - 2) as f64;
    let neg_dl = inner.derivative().neg();
    let x = Jet::<f64>::variable(r0, order);
    let log_sinh_r = log_sinh_jet(&x, r0).lift::<S>();
    let const_term = -(S::from_f64(m) * t) - S::from_f64((2.0 * PI).ln());
    inner
        .truncated(order)
        .add(&neg_dl.ln())
        .sub(&log_sinh_r)
        .add_scalar(const_term)
}

fn check_time_radius(r: f64, t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveTime { t });
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    Ok(())
}

/// Log of the radial heat kernel `G_{(n)}(r, t)` for odd `n` (n = 1 is the
/// 1D Gaussian base). Even dimensions have no exact kernel here; use
/// [`davies_log`].
pub fn kernel_log_dim(n: u32, r: f64, t: f64) -> Result<LogScalar> {
    check_time_radius(r, t)?;
    if n == 0 {
        return Err(Error::DimensionOutOfRange { n });
    }
    if n % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n });
    }
    if n == 1 {
        return gaussian1d_log(r, t);
    }
    let r0 = r.max(POLE_CLAMP);
    Ok(LogScalar::from_log(log_kernel_jet::<f64>(3, n, r0, t, 0).value()))
}

/// Log kernel evaluated through the descent relation starting from the
/// closed form in dimension `base`. `base = 1` exercises the full chain and
/// is the consistency route checked (to 1e-8 relative) against the direct
/// `base = 3` evaluation.
pub fn kernel_log_from_base(base: u32, n: u32, r: f64, t: f64) -> Result<LogScalar> {
    check_time_radius(r, t)?;
    if base != 1 && base != 3 {
        return Err(Error::Domain(format!("recurrence base must be 1 or 3, got {base}")));
    }
    if n < base || (n - base) % 2 != 0 {
        return Err(Error::Domain(format!("cannot reach n={n} from base {base}")));
    }
    let r0 = r.max(POLE_CLAMP);
    Ok(LogScalar::from_log(log_kernel_jet::<f64>(base, n, r0, t, 0).value()))
}

/// Log kernel for the spec's dimension (odd only).
pub fn kernel_log(spec: &KernelSpec, r: f64, t: f64) -> Result<LogScalar> {
    kernel_log_dim(spec.n, r, t)
}

/// Exact time derivative of `log G_{(n)}(r, t)`, obtained by seeding a dual
/// number in `t` through the same jet expression. For n = 3 this equals
/// `-3/(2t) - 1 + r^2/(4t^2)`.
pub fn kernel_log_dt(n: u32, r: f64, t: f64) -> Result<f64> {
    check_time_radius(r, t)?;
    if n % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n });
    }
    let r0 = r.max(POLE_CLAMP);
    let td = Dual::variable(t);
    if n == 1 {
        return Ok(gauss_log_jet::<Dual>(r0, td, 0).value().du);
    }
    Ok(log_kernel_jet::<Dual>(3, n, r0, td, 0).value().du)
}

/// Log of the Davies comparison profile
/// `h_n(r,t) = (4 pi t)^{-n/2} e^{-(r+(n-1)t)^2/4t} (1+r+t)^{(n-3)/2} (1+r)`,
/// defined for every `n >= 2`. The exponent is the compact rewriting of
/// `-lambda1 t - (n-1)r/2 - r^2/4t`.
pub fn davies_log(spec: &KernelSpec, r: f64, t: f64) -> Result<LogScalar> {
    check_time_radius(r, t)?;
    let n = spec.n as f64;
    let c = (spec.n - 1) as f64 * t;
    let log_h = -0.5 * n * (4.0 * PI * t).ln() - (r + c) * (r + c) / (4.0 * t)
        + 0.5 * (n - 3.0) * (r + t).ln_1p()
        + r.ln_1p();
    Ok(LogScalar::from_log(log_h))
}

/// Two-sided envelope constants for `G` against the Davies profile:
/// `c_lower h_n <= G <= c_upper h_n` over the working region.
#[derive(Debug, Clone, Copy)]
pub struct DaviesEnvelope {
    spec: KernelSpec,
    c_lower: f64,
    c_upper: f64,
}

impl DaviesEnvelope {
    pub fn new(spec: KernelSpec, c_lower: f64, c_upper: f64) -> Result<Self> {
        if !(c_lower > 0.0) || !(c_upper >= c_lower) || !c_upper.is_finite() {
            return Err(Error::Domain(format!(
                "envelope constants must satisfy 0 < c_lower <= c_upper, got [{c_lower}, {c_upper}]"
            )));
        }
        Ok(DaviesEnvelope { spec, c_lower, c_upper })
    }

    /// Frozen, empirically calibrated envelope for the supported odd
    /// dimensions (n = 3 is analytic: the exact ratio lies in [1, 2]).
    pub fn calibrated(spec: KernelSpec) -> Result<Self> {
        for &(n, lo, hi) in calibration::DAVIES_ENVELOPES {
            if n == spec.n {
                return DaviesEnvelope::new(spec, lo, hi);
            }
        }
        Err(Error::NoCalibratedEnvelope { n: spec.n })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn c_lower(&self) -> f64 {
        self.c_lower
    }

    pub fn c_upper(&self) -> f64 {
        self.c_upper
    }

    pub fn contains_ratio(&self, ratio: f64) -> bool {
        ratio >= self.c_lower && ratio <= self.c_upper
    }

    /// Upper bound on the kernel mass beyond `from`, by integrating the
    /// envelope density `c_upper omega_n sinh^{n-1} r h_n(r,t)`. The
    /// integrand beyond `from + 30 sqrt(t)` is below f64 resolution.
    pub fn tail_mass_bound(&self, t: f64, from: f64) -> Result<f64> {
        let spec = self.spec;
        let hi = from + 30.0 * t.sqrt();
        let cfg = AdaptiveConfig { abs_tol: 1e-8, max_depth: 40 };
        let f = |r: f64| -> LogScalar {
            if r <= 0.0 {
                return LogScalar::ZERO;
            }
            let vw = spec.omega_n.ln() + (spec.n - 1) as f64 * log_sinh(r);
            let n = spec.n as f64;
            let c = (spec.n - 1) as f64 * t;
            let log_h = -0.5 * n * (4.0 * PI * t).ln() - (r + c) * (r + c) / (4.0 * t)
                + 0.5 * (n - 3.0) * (r + t).ln_1p()
                + r.ln_1p();
            LogScalar::from_log(vw + log_h + self.c_upper.ln())
        };
        Ok(integrate_log(f, from, hi, &cfg)?.value())
    }
}

/// Spatial profile of the long-time limit `Q_n(r) = lim t^{3/2} e^{lambda1 t} G(r,t)`.
///
/// In dimension 3 this is exactly `(4 pi)^{-3/2} r / sinh r`; other odd
/// dimensions are evaluated as the numerically converged limit at `t = 1e4`
/// with one Richardson step in `1/t`.
pub fn q_profile(spec: &KernelSpec, r: f64) -> Result<f64> {
    if spec.n % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n: spec.n });
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be nonnegative, got {r}")));
    }
    let ln_c3 = -1.5 * (4.0 * PI).ln();
    if spec.n == 3 {
        return Ok((ln_c3 + log_r_over_sinh(r.max(POLE_CLAMP))).exp());
    }
    let weighted_log = |t: f64| -> Result<f64> {
        Ok(1.5 * t.ln() + spec.lambda1 * t + kernel_log(spec, r, t)?.log_mag())
    };
    let t_big = 1e4;
    let f1 = weighted_log(t_big)?.exp();
    let f2 = weighted_log(2.0 * t_big)?.exp();
    // leading correction is O(1/t): eliminate it
    Ok(2.0 * f2 - f1)
}

/// Log of the radial mass density `rho(r,t) = omega_n sinh^{n-1}(r) G_{(n)}(r,t)`.
pub fn weighted_density_log(spec: &KernelSpec, r: f64, t: f64) -> Result<LogScalar> {
    check_time_radius(r, t)?;
    if r == 0.0 {
        return Ok(LogScalar::ZERO);
    }
    Ok(kernel_log(spec, r, t)? * log_volume_weight(spec, r)?)
}

/// Result of a kernel mass quadrature: the integral over `[0, r_max]` plus
/// the Davies-envelope estimate of the truncated remainder (absent when no
/// calibrated envelope exists for the dimension).
#[derive(Debug, Clone, Copy)]
pub struct KernelMass {
    pub mass: f64,
    pub tail_bound: Option<f64>,
}

/// Total mass of the kernel over `[0, r_max]` by adaptive log-domain
/// quadrature; conservation makes the expected value 1.
pub fn kernel_mass(spec: &KernelSpec, t: f64, r_max: f64) -> Result<KernelMass> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    let needed = spec.drift_speed() * t + 12.0 * t.sqrt();
    if r_max < needed {
        return Err(Error::Domain(format!(
            "r_max = {r_max} below the required horizon (n-1)t + 12 sqrt(t) = {needed}"
        )));
    }
    if spec.n % 2 == 0 {
        return Err(Error::EvenDimensionUnsupported { n: spec.n });
    }
    let spec = *spec;
    let f = move |r: f64| -> LogScalar {
        if r <= 0.0 {
            return LogScalar::ZERO;
        }
        let vw = spec.omega_n.ln() + (spec.n - 1) as f64 * log_sinh(r);
        let kl = log_kernel_jet::<f64>(3, spec.n, r, t, 0).value();
        LogScalar::from_log(vw + kl)
    };
    let mass = integrate_log(f, 0.0, r_max, &AdaptiveConfig::default())?.value();
    let tail_bound = DaviesEnvelope::calibrated(spec)
        .ok()
        .and_then(|env| env.tail_mass_bound(t, r_max).ok());
    Ok(KernelMass { mass, tail_bound })
}
