//! Numerical thresholds shared across modules.

/// `|c^eta|` at or below this makes chart `eta` singular.
pub const CHART_SINGULAR: f64 = 1e-8;

/// The automatic patch policy leaves a chart once its component drops below this.
pub const AUTO_PATCH_SWITCH: f64 = 0.1;

/// Below this norm a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-300;

/// Normalization tolerance for state vectors.
pub const NORMALIZATION: f64 = 1e-12;

/// Allowed norm error of trajectory samples.
pub const TRAJECTORY_NORMALIZATION: f64 = 1e-10;

/// `|H - H^dagger|` above this is rejected.
pub const HERMITICITY: f64 = 1e-10;

/// Relative closure tolerance for closed loops in `CP^N`.
pub const CLOSURE: f64 = 1e-6;

/// `|cos(beta)|` below this is degenerate for the rotating-field angles.
pub const DEGENERATE_BETA: f64 = 1e-10;

/// Largest supported spin multiplet.
pub const MAX_SPIN_DIMENSION: usize = 64;
