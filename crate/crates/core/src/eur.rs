//! Entropic uncertainty with quantum memory: U = S(X|B) + S(Z|B) for Pauli X
//! and Z measurements on detector A, the bound log2(1/c) + S(A|B), and the
//! gap between them.
//!
//! Two routes are provided. The generic route dephases the full density
//! matrix and diagonalizes it; the closed forms in [`closed_form`] use the
//! X-state block structure. They must agree.

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qstate::{
    dephase, partial_trace, von_neumann_entropy, BlochProjector, PauliBasis, Subsystem,
    TwoQubitOperator, C64,
};
use crate::stationary::XState;

/// Lowest admissible tightness before the relation counts as violated.
pub const TIGHTNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EurPoint {
    pub uncertainty: f64,
    pub bound: f64,
    pub tightness: f64,
    pub s_x_given_b: f64,
    pub s_z_given_b: f64,
    pub s_ab: f64,
    pub s_b: f64,
    pub s_a_given_b: f64,
    pub c: f64,
}

/// S(M|B) = S(rho_MB) - S(rho_B) for a measurement of A in `basis`.
pub fn conditional_entropy_after_measurement(
    rho: &TwoQubitOperator,
    basis: PauliBasis,
) -> Result<f64> {
    let s_mb = von_neumann_entropy(&dephase(rho, Subsystem::A, basis))?;
    let s_b = von_neumann_entropy(&partial_trace(rho, Subsystem::B))?;
    Ok(s_mb - s_b)
}

/// Closed-form entropies of X-states.
pub mod closed_form {
    use super::*;
    use crate::qstate::entropy_of_spectrum;

    pub fn s_b(s: &XState) -> f64 {
        let (p0, p1) = s.marginal_populations();
        entropy_of_spectrum(&[p0, p1])
    }

    /// S(rho_AB) from the spectrum {x, z, y + d, y - d}.
    pub fn joint_entropy(s: &XState) -> f64 {
        entropy_of_spectrum(&s.eigenvalues())
    }

    pub fn conditional_entropy_ab(s: &XState) -> f64 {
        joint_entropy(s) - s_b(s)
    }

    /// After a Z measurement on A the dephased state has spectrum {x, y, y, z}.
    pub fn s_z_given_b(s: &XState) -> f64 {
        entropy_of_spectrum(&[s.x, s.y, s.y, s.z]) - s_b(s)
    }

    /// Both X outcomes occur with probability 1/2 and leave B in
    /// [[x+y, +-d], [+-d, y+z]], whose eigenvalues are (1 +- r)/2 with
    /// r = sqrt((x - z)^2 + 4 d^2).
    pub fn s_x_given_b(s: &XState) -> f64 {
        let r = ((s.x - s.z).powi(2) + 4.0 * s.d * s.d).sqrt();
        let hi = 0.5 * (1.0 + r);
        // accurate small eigenvalue: det / hi
        let det = (s.x + s.y) * (s.y + s.z) - s.d * s.d;
        let lo = if hi > 0.0 { det / hi } else { 0.5 * (1.0 - r) };
        1.0 + entropy_of_spectrum(&[hi, lo]) - s_b(s)
    }
}

/// S(rho_AB) of an X-state, closed form.
pub fn joint_entropy(s: &XState) -> f64 {
    closed_form::joint_entropy(s)
}

/// S(A|B) = S(rho_AB) - S(rho_B) of an X-state, closed form.
pub fn conditional_entropy_ab(s: &XState) -> f64 {
    closed_form::conditional_entropy_ab(s)
}

/// S(X|B) + S(Z|B) through the dephasing route on the full density matrix.
pub fn uncertainty(s: &XState) -> Result<f64> {
    let rho = s.to_density();
    Ok(conditional_entropy_after_measurement(&rho, PauliBasis::X)?
        + conditional_entropy_after_measurement(&rho, PauliBasis::Z)?)
}

/// 1 + S(A|B): the bound for the mutually unbiased X/Z pair.
pub fn bound(s: &XState) -> f64 {
    1.0 + conditional_entropy_ab(s)
}

/// U - bound; a value below -1e-9 means the relation failed, which can
/// only be a bug.
pub fn tightness(uncertainty: f64, bound: f64) -> Result<f64> {
    let delta = uncertainty - bound;
    if !(delta >= -TIGHTNESS_TOL) {
        return Err(Error::Consistency(format!(
            "uncertainty relation violated: U = {uncertainty}, bound = {bound}"
        )));
    }
    Ok(delta)
}

/// An orthonormal qubit basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitBasis([Vector2<C64>; 2]);

impl QubitBasis {
    pub fn new(v0: Vector2<C64>, v1: Vector2<C64>) -> Result<Self> {
        let tol = 1e-12;
        let n0 = (v0.norm_squared() - 1.0).abs();
        let n1 = (v1.norm_squared() - 1.0).abs();
        let overlap = v0.dotc(&v1).norm();
        if n0 > tol || n1 > tol || overlap > tol {
            return Err(Error::InvalidBasis(format!(
                "not orthonormal: norm defects {n0:e}, {n1:e}, overlap {overlap:e}"
            )));
        }
        Ok(Self([v0, v1]))
    }

    pub fn vectors(&self) -> &[Vector2<C64>; 2] {
        &self.0
    }
}

impl From<BlochProjector> for QubitBasis {
    fn from(p: BlochProjector) -> Self {
        Self(p.vectors())
    }
}

impl From<PauliBasis> for QubitBasis {
    fn from(p: PauliBasis) -> Self {
        BlochProjector::from(p).into()
    }
}

/// c = max_ij |<a_i|b_j>|^2.
pub fn max_overlap_c(a: &QubitBasis, b: &QubitBasis) -> f64 {
    a.0.iter()
        .flat_map(|u| b.0.iter().map(move |v| u.dotc(v).norm_sqr()))
        .fold(0.0, f64::max)
}

/// Full set of uncertainty quantities for a stationary X-state.
pub fn evaluate(s: &XState) -> Result<EurPoint> {
    let rho = s.to_density();
    let s_x_given_b = conditional_entropy_after_measurement(&rho, PauliBasis::X)?;
    let s_z_given_b = conditional_entropy_after_measurement(&rho, PauliBasis::Z)?;
    let s_ab = joint_entropy(s);
    let s_b = closed_form::s_b(s);
    assemble(s_x_given_b, s_z_given_b, s_ab, s_b)
}

/// Same quantities for an arbitrary two-qubit state, all through the
/// eigensolver.
pub fn evaluate_state(rho: &TwoQubitOperator) -> Result<EurPoint> {
    let s_x_given_b = conditional_entropy_after_measurement(rho, PauliBasis::X)?;
    let s_z_given_b = conditional_entropy_after_measurement(rho, PauliBasis::Z)?;
    let s_ab = von_neumann_entropy(rho)?;
    let s_b = von_neumann_entropy(&partial_trace(rho, Subsystem::B))?;
    assemble(s_x_given_b, s_z_given_b, s_ab, s_b)
}

fn assemble(s_x_given_b: f64, s_z_given_b: f64, s_ab: f64, s_b: f64) -> Result<EurPoint> {
    let c = max_overlap_c(&PauliBasis::X.into(), &PauliBasis::Z.into());
    let uncertainty = s_x_given_b + s_z_given_b;
    let s_a_given_b = s_ab - s_b;
    let bound = (1.0 / c).log2() + s_a_given_b;
    Ok(EurPoint {
        uncertainty,
        bound,
        tightness: tightness(uncertainty, bound)?,
        s_x_given_b,
        s_z_given_b,
        s_ab,
        s_b,
        s_a_given_b,
        c,
    })
}

/// Absolute differences between the eigensolver and closed-form routes for
/// (S(X|B), S(Z|B), S(rho_AB)).
pub fn route_discrepancy(s: &XState) -> Result<[f64; 3]> {
    let rho = s.to_density();
    Ok([
        (conditional_entropy_after_measurement(&rho, PauliBasis::X)? - closed_form::s_x_given_b(s)).abs(),
        (conditional_entropy_after_measurement(&rho, PauliBasis::Z)? - closed_form::s_z_given_b(s)).abs(),
        (von_neumann_entropy(&rho)? - closed_form::joint_entropy(s)).abs(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{entropy_of_spectrum, measure_subsystem};
    use crate::stationary::{gamma_from_temperature, stationary_xstate, InitialCorrelation};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const PURE_11: XState = XState { x: 0.0, y: 0.0, z: 1.0, d: 0.0 };

    #[test]
    fn conditional_entropy_examples() {
        let singlet = TwoQubitOperator::singlet();
        assert_abs_diff_eq!(
            conditional_entropy_after_measurement(&singlet, PauliBasis::Z).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let p11 = TwoQubitOperator::basis_projector(1, 1);
        assert_abs_diff_eq!(
            conditional_entropy_after_measurement(&p11, PauliBasis::X).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            conditional_entropy_after_measurement(&p11, PauliBasis::Z).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn conditional_entropy_matches_outcome_decomposition() {
        let s = stationary_xstate(InitialCorrelation::new(0.5).unwrap(), 0.6).unwrap();
        let rho = s.to_density();
        let s_b = von_neumann_entropy(&partial_trace(&rho, Subsystem::B)).unwrap();
        for basis in [PauliBasis::X, PauliBasis::Z] {
            let out = measure_subsystem(&rho, Subsystem::A, basis).unwrap();
            let probs = [out[0].probability, out[1].probability];
            let mut via = entropy_of_spectrum(&probs) - s_b;
            for o in &out {
                via += o.probability * von_neumann_entropy(&o.state.unwrap()).unwrap();
            }
            assert_abs_diff_eq!(
                conditional_entropy_after_measurement(&rho, basis).unwrap(),
                via,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn joint_and_conditional_entropy_examples() {
        assert_abs_diff_eq!(joint_entropy(&XState::singlet()), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(joint_entropy(&PURE_11), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(joint_entropy(&XState::maximally_mixed()), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(conditional_entropy_ab(&XState::singlet()), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(conditional_entropy_ab(&PURE_11), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(conditional_entropy_ab(&XState::maximally_mixed()), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn uncertainty_bound_tightness_examples() {
        for (s, u, b) in [
            (XState::singlet(), 0.0, 0.0),
            (PURE_11, 1.0, 1.0),
            (XState::maximally_mixed(), 2.0, 2.0),
        ] {
            assert_abs_diff_eq!(uncertainty(&s).unwrap(), u, epsilon = 1e-12);
            assert_abs_diff_eq!(bound(&s), b, epsilon = 1e-12);
            let p = evaluate(&s).unwrap();
            assert_abs_diff_eq!(p.tightness, 0.0, epsilon = 1e-12);
        }
        // zero-temperature saturation for Delta0 = 1
        let s = stationary_xstate(InitialCorrelation::TRIPLET, 1.0).unwrap();
        assert_abs_diff_eq!(evaluate(&s).unwrap().tightness, 0.0, epsilon = 1e-12);
        assert!(tightness(1.0, 1.0 + 1e-6).is_err());
        assert!(tightness(1.0, 1.0 + 1e-10).is_ok());
    }

    #[test]
    fn frozen_values_at_delta_half_temperature_one() {
        // independent high-precision evaluation of the definitional formulas
        let g = gamma_from_temperature(1.0, 1.0).unwrap();
        let s = stationary_xstate(InitialCorrelation::new(0.5).unwrap(), g).unwrap();
        let p = evaluate(&s).unwrap();
        assert_abs_diff_eq!(p.s_x_given_b, 0.9936836108665468, epsilon = 1e-12);
        assert_abs_diff_eq!(p.s_z_given_b, 0.802800862728977, epsilon = 1e-12);
        assert_abs_diff_eq!(p.uncertainty, 1.7964844735955237, epsilon = 1e-12);
        assert_abs_diff_eq!(p.bound, 1.7857006093779793, epsilon = 1e-12);
        assert_abs_diff_eq!(p.s_ab, 1.5943457989306642, epsilon = 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let x: QubitBasis = PauliBasis::X.into();
        let z: QubitBasis = PauliBasis::Z.into();
        assert_abs_diff_eq!(max_overlap_c(&x, &z), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(max_overlap_c(&x, &x), 1.0, epsilon = 1e-15);
        let rot: QubitBasis = BlochProjector::new(PI / 3.0, 0.0).unwrap().into();
        assert_abs_diff_eq!(max_overlap_c(&z, &rot), 0.75, epsilon = 1e-15);
        let bad = QubitBasis::new(Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)), Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        assert!(matches!(bad, Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn relation_holds_and_routes_agree_on_grid() {
        for dl in [-3.0, -2.0, -1.0, 0.0, 0.5, 1.0] {
            for k in 0..200 {
                let t = 4.0 * (k + 1) as f64 / 200.0;
                let g = gamma_from_temperature(1.0, t).unwrap();
                let s = stationary_xstate(InitialCorrelation::new(dl).unwrap(), g).unwrap();
                let p = evaluate(&s).unwrap();
                assert!(p.tightness >= -TIGHTNESS_TOL);
                assert!((p.uncertainty - p.s_x_given_b - p.s_z_given_b).abs() < 1e-12);
                assert!((p.bound - 1.0 - p.s_a_given_b).abs() < 1e-12);
                let r = route_discrepancy(&s).unwrap();
                assert!(r.iter().all(|v| *v < 1e-10), "({dl}, {t}): {r:?}");
            }
        }
    }

    #[test]
    fn exchange_symmetry_of_uncertainty() {
        for (dl, t) in [(-1.0, 0.3), (0.5, 1.0), (1.0, 2.5)] {
            let g = gamma_from_temperature(1.0, t).unwrap();
            let s = stationary_xstate(InitialCorrelation::new(dl).unwrap(), g).unwrap();
            let rho = s.to_density();
            let swapped = evaluate_state(&rho.exchange()).unwrap();
            let direct = evaluate_state(&rho).unwrap();
            assert_abs_diff_eq!(swapped.uncertainty, direct.uncertainty, epsilon = 1e-12);
        }
    }
}
