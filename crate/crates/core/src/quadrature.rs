//! Adaptive composite Gauss-Legendre quadrature.
//!
//! 15-point panels with recursive bisection: a panel is accepted when its
//! integral agrees with the sum over its two halves to within the tolerance
//! share allotted to that panel. Log-valued integrands go through
//! [`integrate_log`], which first normalizes by the sampled peak so the
//! panels work in a sane dynamic range regardless of the absolute scale.

use crate::error::{Error, Result};
use crate::logscalar::LogScalar;

/// Gauss-Legendre abscissae and weights on [-1, 1], 15 points (exact through
/// degree 29).
const GL15: [(f64, f64); 15] = [
    (-0.98799251802048542849, 0.030753241996117268355),
    (-0.93727339240070590431, 0.070366047488108124709),
    (-0.8482065834104272162, 0.10715922046717193501),
    (-0.72441773136017004742, 0.13957067792615431445),
    (-0.57097217260853884754, 0.16626920581699393355),
    (-0.3941513470775633699, 0.18616100001556221103),
    (-0.2011940939974345223, 0.19843148532711157646),
    (0.0, 0.20257824192556127288),
    (0.2011940939974345223, 0.19843148532711157646),
    (0.3941513470775633699, 0.18616100001556221103),
    (0.57097217260853884754, 0.16626920581699393355),
    (0.72441773136017004742, 0.13957067792615431445),
    (0.8482065834104272162, 0.10715922046717193501),
    (0.93727339240070590431, 0.070366047488108124709),
    (0.98799251802048542849, 0.030753241996117268355),
];

/// Tolerance / recursion-depth policy for the adaptive scheme.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    /// Absolute tolerance on the (peak-normalized, for log integrands)
    /// integral.
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig { abs_tol: 1e-10, max_depth: 48 }
    }
}

fn gl15_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in GL15.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    cfg: &AdaptiveConfig,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = gl15_panel(f, a, mid);
    let right = gl15_panel(f, mid, b);
    let halves = left + right;
    if (halves - whole).abs() <= tol || b - a < 1e-14 * (1.0 + mid.abs()) {
        return Ok(halves);
    }
    if depth >= cfg.max_depth {
        return Err(Error::QuadratureNonconvergence { a, b, tol, depth });
    }
    let lt = 0.5 * tol;
    Ok(refine(f, a, mid, left, lt, depth + 1, cfg)?
        + refine(f, mid, b, right, lt, depth + 1, cfg)?)
}

/// Adaptive integral of a plain-valued integrand over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: &AdaptiveConfig) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let whole = gl15_panel(&f, a, b);
    refine(&f, a, b, whole, cfg.abs_tol, 0, cfg)
}

/// Adaptive integral of a nonnegative log-domain integrand.
///
/// The integrand is sampled coarsely to locate its peak log-magnitude, the
/// whole integral is then computed on `exp(log f - peak)` and the result is
/// returned in log form with the peak restored.
pub fn integrate_log(
    f: impl Fn(f64) -> LogScalar,
    a: f64,
    b: f64,
    cfg: &AdaptiveConfig,
) -> Result<LogScalar> {
    if b <= a {
        return Ok(LogScalar::ZERO);
    }
    const SCAN: usize = 257;
    let mut peak = f64::NEG_INFINITY;
    for i in 0..SCAN {
        let r = a + (b - a) * (i as f64 + 0.5) / SCAN as f64;
        let lg = f(r).log_mag();
        if lg > peak {
            peak = lg;
        }
    }
    if peak == f64::NEG_INFINITY {
        return Ok(LogScalar::ZERO);
    }
    let g = |r: f64| {
        let v = f(r);
        if v.is_zero() {
            0.0
        } else {
            (v.log_mag() - peak).exp()
        }
    };
    let normalized = integrate(g, a, b, cfg)?;
    if normalized <= 0.0 {
        return Ok(LogScalar::ZERO);
    }
    Ok(LogScalar::from_log(normalized.ln() + peak))
}
