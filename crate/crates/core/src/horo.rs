//! Horospheric solutions: heat flow depending only on the half-space height.
//!
//! In the upper half-space model a solution `u(y, t)` of the heat equation
//! turns, under `z = log y` (the geodesic coordinate across horospheres),
//! into a solution of the constant-drift 1D equation
//! `v_t = v_zz - (n-1) v_z`. Solutions here are therefore computed by exact
//! Gaussian convolution against `E_1(z - (n-1)T - zeta, T)`, never by time
//! stepping, which makes them an independent oracle for the radial solver's
//! drift handling. The bulk travels at speed `n - 1` and decays like
//! `t^{-1/2}`: the exponential time factor of the radial class is absent.

use crate::error::{Error, Result};
use crate::kernel::gaussian1d;

/// A horospheric profile `v(z, t)` on an increasing `z` grid.
#[derive(Debug, Clone)]
pub struct HoroField {
    n: u32,
    z: Vec<f64>,
    values: Vec<f64>,
    time: f64,
}

impl HoroField {
    pub fn new(n: u32, z: Vec<f64>, values: Vec<f64>, time: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionOutOfRange { n });
        }
        if z.len() < 8 || z.len() != values.len() {
            return Err(Error::DegenerateGrid(format!(
                "{} z-nodes against {} values",
                z.len(),
                values.len()
            )));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateGrid("z grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("horospheric values must be finite".into()));
        }
        Ok(HoroField { n, z, values, time })
    }

    pub fn from_fn(n: u32, z: Vec<f64>, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = z.iter().map(|&zz| f(zz)).collect();
        HoroField::new(n, z, values, time)
    }

    /// Uniform grid helper.
    pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
        (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// 1D mass `int v dz` (trapezoid).
    pub fn mass(&self) -> f64 {
        self.z
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(zw, vw)| 0.5 * (vw[0] + vw[1]) * (zw[1] - zw[0]))
            .sum()
    }

    /// Height coordinate of each node in the half-space model, `y = e^z`.
    pub fn heights(&self) -> Vec<f64> {
        self.z.iter().map(|&z| z.exp()).collect()
    }

    /// Location of the maximum, refined by parabolic interpolation through
    /// the three nodes around the discrete argmax.
    pub fn argmax_z(&self) -> f64 {
        let (mut k, mut best) = (0usize, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best {
                best = v;
                k = i;
            }
        }
        if k == 0 || k + 1 == self.values.len() {
            return self.z[k];
        }
        let (zl, zc, zr) = (self.z[k - 1], self.z[k], self.z[k + 1]);
        let (vl, vc, vr) = (self.values[k - 1], self.values[k], self.values[k + 1]);
        let denom = vl - 2.0 * vc + vr;
        if denom == 0.0 {
            return zc;
        }
        // uniform-spacing parabola is adequate; grids here are uniform
        let h = 0.5 * (zr - zl);
        zc - 0.5 * h * (vr - vl) / denom
    }
}

/// The exact solution spreading a point mass at `z0`: a drifting Gaussian
/// `mass * E_1(z - z0 - (n-1)t, t)`, sampled around its bulk.
pub fn point_source_solution(n: u32, z0: f64, mass: f64, t: f64) -> Result<HoroField> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTime { t });
    }
    if n < 2 {
        return Err(Error::DimensionOutOfRange { n });
    }
    let center = z0 + (n - 1) as f64 * t;
    let w = 10.0 * t.sqrt().max(1.0);
    let z = HoroField::linspace(center - w, center + w, 2001);
    let values: Result<Vec<f64>> =
        z.iter().map(|&zz| Ok(mass * gaussian1d(zz - center, t)?)).collect();
    HoroField::new(n, z, values?, t)
}

/// Relative tail level above which initial data is rejected as not
/// integrable on its grid.
const TAIL_REJECT: f64 = 1e-7;

/// Advances a horospheric profile by `total_time` through the exact drifted
/// Gaussian convolution
/// `v(z, t0 + T) = int v0(zeta) E_1(z - (n-1)T - zeta, T) dzeta`.
///
/// The data must be integrable on its grid: the end values have to be
/// negligible against the peak, otherwise the convolution misses mass.
pub fn exact_drift_solution(v0: &HoroField, total_time: f64) -> Result<HoroField> {
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(Error::Domain(format!("evolution time must be positive, got {total_time}")));
    }
    let peak = v0.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        // zero stays zero, on a shifted copy of the grid
        return HoroField::new(v0.n, v0.z.clone(), v0.values.clone(), v0.time + total_time);
    }
    let head = v0.values.first().unwrap().abs();
    let tail = v0.values.last().unwrap().abs();
    if head > TAIL_REJECT * peak || tail > TAIL_REJECT * peak {
        return Err(Error::NonintegrableData(format!(
            "grid tails carry {:.3e} / {:.3e} of the peak",
            head / peak,
            tail / peak
        )));
    }
    if !v0.mass().is_finite() {
        return Err(Error::NonintegrableData("declared mass is not finite".into()));
    }

    let drift = (v0.n - 1) as f64 * total_time;
    let spread = 10.0 * total_time.sqrt();
    let z_lo = v0.z.first().unwrap() + drift - spread;
    let z_hi = v0.z.last().unwrap() + drift + spread;
    let h_in = (v0.z.last().unwrap() - v0.z.first().unwrap()) / (v0.z.len() - 1) as f64;
    let count = (((z_hi - z_lo) / h_in).ceil() as usize + 1).clamp(256, 16_384);
    let z_out = HoroField::linspace(z_lo, z_hi, count);

    // trapezoid weights of the input grid
    let m = v0.z.len();
    let wts: Vec<f64> = (0..m)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { v0.z[i] - v0.z[i - 1] };
            let right = if i + 1 == m { 0.0 } else { v0.z[i + 1] - v0.z[i] };
            0.5 * (left + right)
        })
        .collect();

    let norm = 1.0 / (4.0 * std::f64::consts::PI * total_time).sqrt();
    let inv4t = 1.0 / (4.0 * total_time);
    let values: Vec<f64> = z_out
        .iter()
        .map(|&z| {
            let c = z - drift;
            let mut acc = 0.0;
            for i in 0..m {
                let d = c - v0.z[i];
                let e = -d * d * inv4t;
                if e > -745.0 {
                    acc += wts[i] * v0.values[i] * e.exp();
                }
            }
            acc * norm
        })
        .collect();
    HoroField::new(v0.n, z_out, values, v0.time + total_time)
}

/// Sup-distance to the self-similar limit:
/// `sup_z |sqrt(t) v(z, t) - E_1((z - (n-1)t)/sqrt(t), 1)|`.
pub fn horo_error(v: &HoroField) -> f64 {
    let t = v.time;
    let st = t.sqrt();
    let c = (v.n - 1) as f64 * t;
    let norm = (4.0 * std::f64::consts::PI).sqrt().recip();
    v.z.iter()
        .zip(&v.values)
        .map(|(&z, &val)| {
            let xi = (z - c) / st;
            let e1 = norm * (-0.25 * xi * xi).exp();
            (st * val - e1).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn point_source_is_exactly_self_similar() {
        for &n in &[2u32, 3] {
            for &t in &[2.0, 37.5] {
                let v = point_source_solution(n, 0.0, 1.0, t).unwrap();
                assert!(horo_error(&v) <= 1e-10, "n={n}, t={t}: {}", horo_error(&v));
                assert_relative_eq!(v.mass(), 1.0, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn gaussian_semigroup_under_convolution() {
        // data E_1(z, 1) evolved T: exactly E_1(z - (n-1)T, T+1)
        let z = HoroField::linspace(-14.0, 14.0, 1401);
        let v0 = HoroField::from_fn(3, z, 0.0, |zz| gaussian1d(zz, 1.0).unwrap()).unwrap();
        let v = exact_drift_solution(&v0, 5.0).unwrap();
        let mut worst = 0.0_f64;
        for (&zz, &val) in v.z().iter().zip(v.values()) {
            let exact = gaussian1d(zz - 10.0, 6.0).unwrap();
            worst = worst.max((val - exact).abs());
        }
        assert!(worst < 1e-8, "semigroup defect {worst}");
        assert_relative_eq!(v.mass(), 1.0, max_relative = 1e-8);
    }

    #[test]
    fn indicator_bump_drifts_at_speed_n_minus_one() {
        let z = HoroField::linspace(-6.0, 6.0, 1201);
        let v0 = HoroField::from_fn(2, z, 0.0, |zz| {
            if zz.abs() <= 1.0 {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let v = exact_drift_solution(&v0, 100.0).unwrap();
        let peak = v.argmax_z();
        assert_abs_diff_eq!(peak, 100.0, epsilon = 0.5);
        // the convolution conserves the grid-sampled 1D mass
        assert_relative_eq!(v.mass(), v0.mass(), max_relative = 1e-8);
    }

    #[test]
    fn nonintegrable_data_rejected() {
        let z = HoroField::linspace(-3.0, 3.0, 101);
        let v0 = HoroField::from_fn(3, z, 0.0, |_| 1.0).unwrap();
        assert!(matches!(
            exact_drift_solution(&v0, 1.0),
            Err(Error::NonintegrableData(_))
        ));
    }

    #[test]
    fn error_decreases_with_time_for_bump_data() {
        let z = HoroField::linspace(-10.0, 10.0, 1001);
        let v0 = HoroField::from_fn(3, z, 0.0, |zz| gaussian1d(zz, 1.0).unwrap()).unwrap();
        let e10 = horo_error(&exact_drift_solution(&v0, 10.0).unwrap());
        let e100 = horo_error(&exact_drift_solution(&v0, 100.0).unwrap());
        assert!(e10 > e100, "{e10} vs {e100}");
        assert!(e100 <= 0.01, "error at t=100 is {e100}");
    }

    #[test]
    fn pde_residual_is_second_order_in_spacing() {
        // central-difference residual of v_t - v_zz + (n-1) v_z on the
        // exact solution
        let n = 3u32;
        let t = 4.0;
        let dt = 1e-3;
        let residual_at = |h: f64| -> f64 {
            let z0 = 8.0; // near the bulk center (n-1)t = 8
            let v = |z: f64, tt: f64| gaussian1d(z - 2.0 * tt, tt).unwrap();
            let vt = (v(z0, t + dt) - v(z0, t - dt)) / (2.0 * dt);
            let vzz = (v(z0 + h, t) - 2.0 * v(z0, t) + v(z0 - h, t)) / (h * h);
            let vz = (v(z0 + h, t) - v(z0 - h, t)) / (2.0 * h);
            (vt - vzz + (n - 1) as f64 * vz).abs()
        };
        let r1 = residual_at(0.1);
        let r2 = residual_at(0.05);
        assert!(r1 / r2 > 3.0, "residual ratio {} not O(h^2)", r1 / r2);
    }

    #[test]
    fn heights_match_log_transform() {
        let z = HoroField::linspace(-1.0, 1.0, 9);
        let v = HoroField::from_fn(2, z.clone(), 0.0, |_| 0.1).unwrap();
        for (zz, y) in z.iter().zip(v.heights()) {
            assert_relative_eq!(y.ln(), *zz, epsilon = 1e-14);
        }
    }
}
