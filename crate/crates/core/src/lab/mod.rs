//! Brute-force propagation, error-propagator extraction, commutant distances
//! and power-law fits over duration grids.

mod fit;
mod propagate;
mod sweep;

pub use fit::{fit_power_law, log_space, FitResult, DEFAULT_FLOOR};
pub use propagate::{
    bath_propagator, error_propagator, interaction_error_propagator, propagate,
    time_ordered_exponential, Propagation, PropagationSettings, UNITARITY_LIMIT,
};
pub use sweep::{
    commutant_distance, expansion_sweep, sweep_and_fit, validate_grid, ScalingPoint, ScalingRun,
};

/// Default sweep grid: ten log-spaced durations from 0.05 to 0.5.
pub fn default_grid() -> Vec<f64> {
    log_space(0.05, 0.5, 10)
}
