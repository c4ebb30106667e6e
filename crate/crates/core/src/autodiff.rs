//! Forward-mode automatic differentiation: first-order duals and Taylor jets.
//!
//! The dimension recurrence for the heat kernel consumes one exact radial
//! derivative per step. Nesting a dual number once per step is equivalent to
//! carrying a truncated Taylor expansion whose order equals the remaining
//! number of steps, which is what [`Jet`] does. `Jet` is generic over its
//! coefficient scalar so that a [`Dual`] seeded in `t` rides through the same
//! expression and delivers exact time derivatives of the final log-kernel.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar admitted as a jet coefficient: plain `f64` or a [`Dual`] in some
/// auxiliary parameter.
pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Primal (value) part.
    fn primal(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn primal(self) -> f64 {
        self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
}

/// First-order dual number `re + eps*du`, `eps^2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub du: f64,
}

impl Dual {
    pub fn constant(x: f64) -> Self {
        Dual { re: x, du: 0.0 }
    }

    /// Seeds the variable of differentiation.
    pub fn variable(x: f64) -> Self {
        Dual { re: x, du: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, r: Dual) -> Dual {
        Dual { re: self.re + r.re, du: self.du + r.du }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, r: Dual) -> Dual {
        Dual { re: self.re - r.re, du: self.du - r.du }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, r: Dual) -> Dual {
        Dual { re: self.re * r.re, du: self.du * r.re + self.re * r.du }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, r: Dual) -> Dual {
        let re = self.re / r.re;
        Dual { re, du: (self.du - re * r.du) / r.re }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { re: -self.re, du: -self.du }
    }
}

impl Scalar for Dual {
    fn from_f64(x: f64) -> Self {
        Dual::constant(x)
    }
    fn primal(self) -> f64 {
        self.re
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual { re: e, du: self.du * e }
    }
    fn ln(self) -> Self {
        Dual { re: self.re.ln(), du: self.du / self.re }
    }
}

/// Truncated Taylor expansion `sum_k c[k] (x - x0)^k` of runtime-chosen order.
#[derive(Debug, Clone)]
pub struct Jet<S: Scalar> {
    c: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    /// Constant jet of the given order (order = highest retained power).
    pub fn constant(value: S, order: usize) -> Self {
        let mut c = vec![S::from_f64(0.0); order + 1];
        c[0] = value;
        Jet { c }
    }

    /// The expansion variable itself: `x0 + (x - x0)`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![S::from_f64(0.0); order + 1];
        c[0] = S::from_f64(x0);
        if order >= 1 {
            c[1] = S::from_f64(1.0);
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> S {
        self.c[k]
    }

    /// Value part (coefficient 0).
    pub fn value(&self) -> S {
        self.c[0]
    }

    pub fn add(&self, rhs: &Jet<S>) -> Jet<S> {
        assert_eq!(self.c.len(), rhs.c.len());
        Jet { c: self.c.iter().zip(&rhs.c).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, rhs: &Jet<S>) -> Jet<S> {
        assert_eq!(self.c.len(), rhs.c.len());
        Jet { c: self.c.iter().zip(&rhs.c).map(|(&a, &b)| a - b).collect() }
    }

    pub fn neg(&self) -> Jet<S> {
        Jet { c: self.c.iter().map(|&a| -a).collect() }
    }

    pub fn scale(&self, s: S) -> Jet<S> {
        Jet { c: self.c.iter().map(|&a| a * s).collect() }
    }

    pub fn add_scalar(&self, s: S) -> Jet<S> {
        let mut c = self.c.clone();
        c[0] = c[0] + s;
        Jet { c }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, rhs: &Jet<S>) -> Jet<S> {
        assert_eq!(self.c.len(), rhs.c.len());
        let n = self.c.len();
        let mut c = vec![S::from_f64(0.0); n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] = c[i + j] + self.c[i] * rhs.c[j];
            }
        }
        Jet { c }
    }

    /// `exp` via the standard recurrence `k h_k = sum_{i=1..k} i f_i h_{k-i}`.
    pub fn exp(&self) -> Jet<S> {
        let n = self.c.len();
        let mut h = vec![S::from_f64(0.0); n];
        h[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = S::from_f64(0.0);
            for i in 1..=k {
                acc = acc + S::from_f64(i as f64) * self.c[i] * h[k - i];
            }
            h[k] = acc / S::from_f64(k as f64);
        }
        Jet { c: h }
    }

    /// `ln`; requires a positive value part.
    pub fn ln(&self) -> Jet<S> {
        let n = self.c.len();
        debug_assert!(self.c[0].primal() > 0.0, "ln of nonpositive jet value");
        let mut g = vec![S::from_f64(0.0); n];
        g[0] = self.c[0].ln();
        for k in 1..n {
            // k f_k = sum_{i=1..k} i g_i f_{k-i}  =>  solve for g_k
            let mut acc = S::from_f64(k as f64) * self.c[k];
            for i in 1..k {
                acc = acc - S::from_f64(i as f64) * g[i] * self.c[k - i];
            }
            g[k] = acc / (S::from_f64(k as f64) * self.c[0]);
        }
        Jet { c: g }
    }

    /// Derivative with respect to the expansion variable; drops one order.
    pub fn derivative(&self) -> Jet<S> {
        assert!(self.c.len() >= 2, "cannot differentiate an order-0 jet");
        let c = (1..self.c.len()).map(|k| S::from_f64(k as f64) * self.c[k]).collect();
        Jet { c }
    }

    /// Truncation to a lower (or equal) order.
    pub fn truncated(&self, order: usize) -> Jet<S> {
        assert!(order < self.c.len());
        Jet { c: self.c[..=order].to_vec() }
    }

    /// Replaces the value coefficient, keeping all derivative structure.
    /// Used to re-inject a more precisely computed value part.
    pub fn with_value(mut self, v: S) -> Jet<S> {
        self.c[0] = v;
        self
    }
}

impl Jet<f64> {
    /// Lifts an `f64` jet into a richer scalar (coefficients become constants).
    pub fn lift<S: Scalar>(&self) -> Jet<S> {
        Jet { c: self.c.iter().map(|&a| S::from_f64(a)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dual_chain_rule() {
        // d/dx [exp(x^2)] = 2x exp(x^2) at x = 0.7
        let x = Dual::variable(0.7);
        let y = (x * x).exp();
        assert_relative_eq!(y.re, (0.49_f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(y.du, 1.4 * (0.49_f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn dual_ln_div() {
        // d/dx [ln(x)/x] = (1 - ln x)/x^2 at x = 3
        let x = Dual::variable(3.0);
        let y = x.ln() / x;
        assert_relative_eq!(y.du, (1.0 - 3.0_f64.ln()) / 9.0, max_relative = 1e-14);
    }

    fn jet_derivs(j: &Jet<f64>) -> Vec<f64> {
        // k! * c_k
        let mut fac = 1.0;
        (0..=j.order())
            .map(|k| {
                if k > 0 {
                    fac *= k as f64;
                }
                j.coeff(k) * fac
            })
            .collect()
    }

    #[test]
    fn jet_exp_ln_roundtrip() {
        let x = Jet::<f64>::variable(1.3, 4);
        let y = x.exp().ln();
        for k in 0..=4 {
            assert_relative_eq!(y.coeff(k), x.coeff(k), epsilon = 1e-13);
        }
    }

    #[test]
    fn jet_matches_analytic_derivatives() {
        // f(x) = ln(x) * exp(-x^2) at x0 = 0.9, derivatives up to order 3
        let x0 = 0.9_f64;
        let x = Jet::<f64>::variable(x0, 3);
        let f = x.ln().mul(&x.mul(&x).neg().exp());
        let d = jet_derivs(&f);

        let g = |x: f64| x.ln() * (-x * x).exp();
        // high-order central differences as the independent check
        let h = 1e-3;
        let d1 = (g(x0 + h) - g(x0 - h)) / (2.0 * h);
        let d2 = (g(x0 + h) - 2.0 * g(x0) + g(x0 - h)) / (h * h);
        let d3 = (g(x0 + 2.0 * h) - 2.0 * g(x0 + h) + 2.0 * g(x0 - h) - g(x0 - 2.0 * h))
            / (2.0 * h * h * h);
        assert_relative_eq!(d[0], g(x0), max_relative = 1e-14);
        assert_relative_eq!(d[1], d1, max_relative = 1e-5);
        assert_relative_eq!(d[2], d2, max_relative = 1e-5);
        assert_relative_eq!(d[3], d3, max_relative = 1e-3);
    }

    #[test]
    fn jet_over_dual_mixes_parameters() {
        // f(x; t) = exp(-x^2 / (4 t)); check d/dt of df/dx at (x, t) = (1.5, 2)
        let t = Dual::variable(2.0);
        let x = Jet::<Dual>::variable(1.5, 1);
        let inv4t = Dual::constant(1.0) / (Dual::constant(4.0) * t);
        let f = x.mul(&x).neg().scale(inv4t).exp();
        let dfdx = f.derivative().value();
        // df/dx = -x/(2t) exp(-x^2/4t); d/dt of that at (1.5, 2):
        let analytic = |t: f64| -1.5 / (2.0 * t) * (-1.5 * 1.5 / (4.0 * t)).exp();
        let h = 1e-6;
        let fd = (analytic(2.0 + h) - analytic(2.0 - h)) / (2.0 * h);
        assert_relative_eq!(dfdx.re, analytic(2.0), max_relative = 1e-14);
        assert_relative_eq!(dfdx.du, fd, max_relative = 1e-8);
    }
}
