//! Numerical laboratory for the heat equation on hyperbolic space.
//!
//! The crate evaluates exact radial heat kernels in odd dimensions (closed
//! form in dimension 3, exact descent recurrence above), Davies two-sided
//! envelopes in every dimension, a conservative Crank-Nicolson integrator
//! for the radial flow with optional forcing, mass-geometry diagnostics
//! (mass line, half-mass and sign-change radii, drift-corrected Gaussian
//! rescaling), exact horospheric solutions, and the displaced-mass
//! comparisons that obstruct L1 stabilization for nonradial data.
//!
//! All kernel arithmetic is log-domain; see [`logscalar::LogScalar`].

pub mod autodiff;
pub mod calibration;
pub mod displaced;
pub mod error;
pub mod grid;
pub mod horo;
pub mod io;
pub mod kernel;
pub mod logscalar;
pub mod mass;
pub mod quadrature;
pub mod solver;

pub use displaced::{
    axis_ratio, axis_ratio_readings, displaced_total_mass, displaced_value_log,
    far_field_delayed_bound, far_field_envelope, negative_part_l1, pointwise_gap,
    positive_part_l1, two_mass_ratio, two_mass_value, AxisRatioReadings, DisplacedConfig,
    PointwiseGap,
};
pub use error::{Error, Result};
pub use grid::{build_grid, Grading, RadialField, RadialGrid};
pub use horo::{exact_drift_solution, horo_error, point_source_solution, HoroField};
pub use kernel::{
    davies_log, gaussian1d, gaussian1d_log, geodesic_distance, kernel_log, kernel_log_dim,
    kernel_log_dt, kernel_log_from_base, kernel_mass, log_volume_weight, q_profile, sphere_area,
    weighted_density_log, DaviesEnvelope, KernelMass, KernelSpec,
};
pub use logscalar::LogScalar;
pub use mass::{
    annulus_mass_fraction, gaussian_l1_error, half_mass_radius, kernel_mass_profile,
    mass_function, rescaled_profile, sign_change_radius, DriftFrame, MassProfile,
};
pub use quadrature::{integrate, integrate_log, AdaptiveConfig};
pub use solver::{
    distance_metrics, evolve, harnack_check, intersection_count, EvolveOutcome, ForcingTerm,
    NormOrder, Scheme, SolverConfig, TimestepPolicy,
};
