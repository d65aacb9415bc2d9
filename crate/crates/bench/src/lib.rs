//! Fixtures shared by the benchmarks.

use udw_eur::stationary::{gamma_from_temperature, stationary_xstate};
use udw_eur::{InitialCorrelation, XState};

/// Stationary states at unit gap for the three reference correlations.
pub fn reference_states(temperature: f64) -> Vec<XState> {
    let gamma = gamma_from_temperature(1.0, temperature).expect("valid temperature");
    [-1.0, 0.5, 1.0]
        .into_iter()
        .map(|d| stationary_xstate(InitialCorrelation::new(d).unwrap(), gamma).unwrap())
        .collect()
}
