//! Radial grids with hyperbolic volume weights, and fields living on them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{kernel_log, KernelSpec};
use crate::logscalar::log_sinh;

/// Node placement policy for [`build_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    Uniform,
    /// Concentrates nodes toward both ends of the domain (the pole, where
    /// the profile is curved, and the outer region containing the moving
    /// mass bulk).
    Graded,
}

/// Spatial discretization of `[0, r_max]` carrying trapezoid-consistent
/// volume weights `w_i ~ omega_n sinh^{n-1}(r_i) dr`.
///
/// The weight at the pole is exactly zero (`sinh 0 = 0`). Note the weights
/// overflow f64 once `(n-1) r` exceeds ~709; the desk-scale experiments stay
/// far below that, and the mass diagnostics recompute densities in log
/// domain where it matters.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    n: u32,
    omega_n: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// Builds a grid from explicit nodes (must start at 0, strictly
    /// increase).
    pub fn from_nodes(n: u32, nodes: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionOutOfRange { n });
        }
        if nodes.len() < 16 {
            return Err(Error::DegenerateGrid(format!("{} nodes (need >= 16)", nodes.len())));
        }
        if nodes[0] != 0.0 {
            return Err(Error::DegenerateGrid("first node must be r = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::DegenerateGrid("nodes must be strictly increasing".into()));
        }
        let omega_n = crate::kernel::sphere_area(n)?;
        let weights = trapezoid_weights(n, omega_n, &nodes);
        Ok(RadialGrid { n, omega_n, nodes, weights })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Total weight, a trapezoid approximation of the ball volume
    /// `mu(B_{r_max})`.
    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Extends the grid to at least `new_r_max`, appending nodes at the
    /// trailing spacing. Used by the moving truncation of the solver.
    pub fn extended(&self, new_r_max: f64) -> Self {
        let m = self.nodes.len();
        let h = self.nodes[m - 1] - self.nodes[m - 2];
        let mut nodes = self.nodes.clone();
        let mut r = self.r_max();
        while r < new_r_max {
            r += h;
            nodes.push(r);
        }
        let weights = trapezoid_weights(self.n, self.omega_n, &nodes);
        RadialGrid { n: self.n, omega_n: self.omega_n, nodes, weights }
    }

    /// Grids are the same when they share storage or agree node-for-node.
    pub fn same_as(&self, other: &RadialGrid) -> bool {
        std::ptr::eq(self, other) || (self.n == other.n && self.nodes == other.nodes)
    }
}

fn trapezoid_weights(n: u32, omega_n: f64, nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let sigma = |r: f64| -> f64 {
        if r == 0.0 {
            0.0
        } else {
            (((n - 1) as f64) * log_sinh(r)).exp()
        }
    };
    (0..m)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { nodes[i] - nodes[i - 1] };
            let right = if i + 1 == m { 0.0 } else { nodes[i + 1] - nodes[i] };
            omega_n * sigma(nodes[i]) * 0.5 * (left + right)
        })
        .collect()
}

/// Builds a grid over `[0, r_max]` with `n_nodes` nodes.
pub fn build_grid(n: u32, r_max: f64, n_nodes: usize, grading: Grading) -> Result<RadialGrid> {
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::DegenerateGrid(format!("r_max = {r_max}")));
    }
    if n_nodes < 16 {
        return Err(Error::DegenerateGrid(format!("{n_nodes} nodes (need >= 16)")));
    }
    let m = n_nodes - 1;
    let nodes: Vec<f64> = match grading {
        Grading::Uniform => (0..=m).map(|i| r_max * i as f64 / m as f64).collect(),
        Grading::Graded => (0..=m)
            .map(|i| {
                let s = i as f64 / m as f64;
                // monotone map with density boosted at both ends
                r_max * (s - 0.5 * (2.0 * std::f64::consts::PI * s).sin() / (2.0 * std::f64::consts::PI))
            })
            .collect(),
    };
    RadialGrid::from_nodes(n, nodes)
}

/// A radial profile: values per grid node plus the time they refer to.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    time: f64,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DegenerateGrid(format!(
                "{} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field values must be finite".into()));
        }
        if !(time >= 0.0) {
            return Err(Error::Domain(format!("field time must be nonnegative, got {time}")));
        }
        Ok(RadialField { grid, values, time })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        RadialField::new(grid, values, time)
    }

    /// Samples the exact kernel `G_{(n)}(., t)` on the grid (odd n only).
    pub fn kernel(grid: Arc<RadialGrid>, t: f64) -> Result<Self> {
        let spec = KernelSpec::new(grid.n())?;
        let values: Result<Vec<f64>> =
            grid.nodes().iter().map(|&r| Ok(kernel_log(&spec, r, t)?.value())).collect();
        RadialField::new(grid, values?, t)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Total mass `int u dmu` by the grid weights.
    pub fn mass(&self) -> f64 {
        self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_grid_weights() {
        let g = build_grid(3, 10.0, 1001, Grading::Uniform).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(g.weights()[0], 0.0);
        // interior weight ~ 4 pi sinh^2(r) h
        let h = 0.01;
        let r = g.nodes()[500];
        let expected = 4.0 * std::f64::consts::PI * r.sinh().powi(2) * h;
        assert_relative_eq!(g.weights()[500], expected, max_relative = 1e-10);
        // total weight approximates the ball volume pi (sinh 2R - 2R)
        let exact = std::f64::consts::PI * ((20.0_f64).sinh() - 20.0);
        assert_relative_eq!(g.volume(), exact, max_relative = 1e-3);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(matches!(build_grid(3, 10.0, 8, Grading::Uniform), Err(Error::DegenerateGrid(_))));
        assert!(matches!(build_grid(3, -1.0, 100, Grading::Uniform), Err(Error::DegenerateGrid(_))));
        assert!(RadialGrid::from_nodes(3, vec![0.0, 1.0, 0.5]).is_err());
        assert!(RadialGrid::from_nodes(3, vec![0.1; 20]).is_err());
    }

    #[test]
    fn graded_grid_is_monotone_and_end_heavy() {
        let g = build_grid(3, 10.0, 257, Grading::Graded).unwrap();
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(g.r_max(), 10.0, max_relative = 1e-12);
        let first_gap = g.nodes()[1] - g.nodes()[0];
        let mid_gap = g.nodes()[129] - g.nodes()[128];
        let last_gap = g.nodes()[256] - g.nodes()[255];
        assert!(first_gap < mid_gap && last_gap < mid_gap);
    }

    #[test]
    fn extension_appends_at_trailing_spacing() {
        let g = build_grid(3, 5.0, 101, Grading::Uniform).unwrap();
        let e = g.extended(6.0);
        assert!(e.r_max() >= 6.0);
        let h: Vec<f64> = e.nodes().windows(2).map(|w| w[1] - w[0]).collect();
        assert_relative_eq!(h[h.len() - 1], 0.05, max_relative = 1e-9);
        assert_eq!(&e.nodes()[..101], g.nodes());
    }

    #[test]
    fn kernel_field_has_unit_mass() {
        let g = Arc::new(build_grid(3, 16.0, 3201, Grading::Uniform).unwrap());
        let f = RadialField::kernel(g, 1.0).unwrap();
        assert_relative_eq!(f.mass(), 1.0, max_relative = 1e-5);
        assert_eq!(f.time(), 1.0);
    }
}
