//! Reference values computed independently at 30+ digits and frozen here.

#![allow(clippy::excessive_precision)]

use approx::assert_abs_diff_eq;

use udw_eur::eur::{self, closed_form};
use udw_eur::lindblad::{default_wightman, KossakowskiParams};
use udw_eur::pipeline::evaluate_point;
use udw_eur::qstate::binary_entropy;
use udw_eur::stationary::{gamma_from_temperature, stationary_xstate, temperature_from_acceleration};
use udw_eur::{correlations, InitialCorrelation, UnruhParams};

fn state(delta0: f64, t: f64) -> udw_eur::XState {
    let g = gamma_from_temperature(1.0, t).unwrap();
    stationary_xstate(InitialCorrelation::new(delta0).unwrap(), g).unwrap()
}

#[test]
fn scalar_anchors() {
    assert_abs_diff_eq!(binary_entropy(0.25).unwrap(), 0.811278124459132864, epsilon = 1e-15);
    assert_abs_diff_eq!(gamma_from_temperature(1.0, 1.0).unwrap(), 0.462117157260009758, epsilon = 1e-15);
    assert_abs_diff_eq!(
        temperature_from_acceleration(1.0).unwrap(),
        0.159154943091895336,
        epsilon = 1e-15
    );
    let p = UnruhParams::from_acceleration(1.0, 2.0 * std::f64::consts::PI).unwrap();
    assert_abs_diff_eq!(p.temperature, 1.0, epsilon = 1e-15);
}

#[test]
fn wightman_and_rates() {
    let beta = 2.0 * std::f64::consts::PI;
    let (g1, g0) = default_wightman(1.0, beta).unwrap();
    assert_abs_diff_eq!(g1, 0.159452711899783715, epsilon = 1e-15);
    assert_abs_diff_eq!(g0, 0.0253302959105844429, epsilon = 1e-15);
    let k = KossakowskiParams::thermal(1.0, beta).unwrap();
    assert_abs_diff_eq!(k.ratio(), (beta / 2.0).tanh(), epsilon = 1e-14);
}

#[test]
fn uncertainty_at_half_correlation_unit_temperature() {
    let s = state(0.5, 1.0);
    let e = eur::evaluate(&s).unwrap();
    assert_abs_diff_eq!(e.s_x_given_b, 0.9936836108665468, epsilon = 1e-12);
    assert_abs_diff_eq!(e.s_z_given_b, 0.802800862728977, epsilon = 1e-12);
    assert_abs_diff_eq!(e.s_ab, 1.5943457989306642, epsilon = 1e-12);
    assert_abs_diff_eq!(e.uncertainty, 1.7964844735955237, epsilon = 1e-12);
    assert_abs_diff_eq!(e.bound, 1.7857006093779793, epsilon = 1e-12);
    assert_abs_diff_eq!(closed_form::s_x_given_b(&s), e.s_x_given_b, epsilon = 1e-12);
}

#[test]
fn correlations_at_reference_points() {
    let c = correlations::evaluate(&state(0.5, 1.0).to_density()).unwrap();
    assert_abs_diff_eq!(c.missing_info, 0.8023288004192316, epsilon = 1e-10);
    assert_abs_diff_eq!(c.discord, 0.016628191041252377, epsilon = 1e-10);

    let m = correlations::missing_information(&state(0.5, 0.5).to_density()).unwrap();
    assert_abs_diff_eq!(m.value, 0.5506730358211535, epsilon = 1e-10);
}

#[test]
fn full_row_at_anticorrelated_point() {
    let r = evaluate_point(1.0, 1.0, -1.0).unwrap();
    assert_abs_diff_eq!(r.uncertainty, 1.7295256682134195, epsilon = 1e-12);
    assert_abs_diff_eq!(r.bound, 1.660965080924182, epsilon = 1e-12);
    assert_abs_diff_eq!(r.missing_info, 0.8307304171868618, epsilon = 1e-10);
    assert_abs_diff_eq!(r.discord, 0.16976533626267973, epsilon = 1e-10);
    assert_abs_diff_eq!(r.tightness, r.uncertainty - r.bound, epsilon = 1e-15);
}
