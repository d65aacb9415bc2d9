//! Mutual information, classical correlation, quantum discord and the
//! minimal missing information M, with projective measurements on B.
//!
//! M is the minimum over Bloch directions of sum_k q_k S(rho_A^k). It is
//! found by a 64x64 scan of (theta, phi) followed by Nelder-Mead refinement
//! from the three best cells.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::qstate::{
    contract_measured, entropy_of_spectrum, hermitian2_eigenvalues, partial_trace,
    von_neumann_entropy, BlochProjector, DensityOperator, Subsystem, TwoQubitOperator,
    ZERO_CUTOFF,
};

pub const SCAN_RESOLUTION: usize = 64;
const REFINE_STARTS: usize = 3;
/// Allowed disagreement between the two discord routes.
pub const DISCORD_ROUTE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerReport {
    pub theta: f64,
    pub phi: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Simplex diameter of the winning refinement at termination.
    pub final_step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MissingInformation {
    pub value: f64,
    pub report: OptimizerReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelationPoint {
    pub mutual_info: f64,
    pub classical_corr: f64,
    pub discord: f64,
    pub missing_info: f64,
    pub optimizer: OptimizerReport,
}

/// I = S(A) + S(B) - S(AB).
pub fn mutual_information(rho: &TwoQubitOperator) -> Result<f64> {
    let s_a = von_neumann_entropy(&partial_trace(rho, Subsystem::A))?;
    let s_b = von_neumann_entropy(&partial_trace(rho, Subsystem::B))?;
    Ok(s_a + s_b - von_neumann_entropy(rho)?)
}

/// sum_k q_k S(rho_A^k) for the measurement `projector` on B. The state is
/// assumed valid; this sits in the optimizer's inner loop.
pub fn post_measurement_remainder(rho: &TwoQubitOperator, projector: &BlochProjector) -> f64 {
    projector
        .vectors()
        .iter()
        .map(|v| {
            let a = contract_measured(rho, Subsystem::B, v);
            let q = a.entry(0, 0).re + a.entry(1, 1).re;
            if q < ZERO_CUTOFF {
                return 0.0;
            }
            let off = 0.5 * (a.entry(0, 1) + a.entry(1, 0).conj());
            let ev = hermitian2_eigenvalues(
                a.entry(0, 0).re / q,
                a.entry(1, 1).re / q,
                off.norm_sqr() / (q * q),
            );
            q * entropy_of_spectrum(&ev)
        })
        .sum()
}

fn remainder_at(rho: &TwoQubitOperator, angles: [f64; 2]) -> f64 {
    post_measurement_remainder(rho, &BlochProjector::wrapped(angles[0], angles[1]))
}

/// Global minimum of [`post_measurement_remainder`] over measurement directions.
pub fn missing_information(rho: &TwoQubitOperator) -> Result<MissingInformation> {
    rho.check_state()?;
    let n = SCAN_RESOLUTION;
    let (d_theta, d_phi) = (PI / n as f64, 2.0 * PI / n as f64);

    let mut best = (f64::INFINITY, [0.0, 0.0]);
    let consider = |best: &mut (f64, [f64; 2]), value: f64, at: [f64; 2]| {
        if value < best.0 {
            *best = (value, at);
        }
    };

    // axial candidates for X-states; the global search below always runs
    for at in [[0.0, 0.0], [PI / 2.0, 0.0]] {
        consider(&mut best, remainder_at(rho, at), at);
    }

    let mut cells: Vec<(f64, [f64; 2])> = (0..n)
        .flat_map(|i| (0..n).map(move |j| [i as f64 * d_theta, j as f64 * d_phi]))
        .map(|at| (remainder_at(rho, at), at))
        .collect();
    // stable: ties resolve by grid order
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));

    let opts = NelderMeadOptions::default();
    let (mut iterations, mut evaluations) = (0, n * n + 2);
    let mut final_step = 0.0;
    for &(value, start) in cells.iter().take(REFINE_STARTS) {
        consider(&mut best, value, start);
        let run = nelder_mead(|p| remainder_at(rho, p), start, [d_theta, d_phi], &opts)
            .map_err(|m| {
                let w = BlochProjector::wrapped(m.point[0], m.point[1]);
                Error::NoConvergence {
                    evaluations: m.evaluations,
                    best: m.value.min(best.0),
                    theta: w.theta(),
                    phi: w.phi(),
                }
            })?;
        iterations += run.iterations;
        evaluations += run.evaluations;
        if run.value < best.0 {
            final_step = run.diameter;
        }
        consider(&mut best, run.value, run.point);
    }

    let w = BlochProjector::wrapped(best.1[0], best.1[1]);
    Ok(MissingInformation {
        value: best.0.max(0.0),
        report: OptimizerReport {
            theta: w.theta(),
            phi: w.phi(),
            iterations,
            evaluations,
            final_step,
        },
    })
}

/// J = S(rho_B) - M. The reference entropy is that of the measured side;
/// for exchange-symmetric states it equals S(rho_A).
pub fn classical_correlation(rho: &TwoQubitOperator) -> Result<f64> {
    let s_b = von_neumann_entropy(&partial_trace(rho, Subsystem::B))?;
    Ok(s_b - missing_information(rho)?.value)
}

/// D = I - J, checked against -S(A|B) + M.
pub fn quantum_discord(rho: &TwoQubitOperator) -> Result<f64> {
    Ok(evaluate(rho)?.discord)
}

/// log2(1/c) + M - D.
pub fn bound_via_discord(c: f64, missing_info: f64, discord: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(domain("c", c, "(0, 1]"));
    }
    Ok((1.0 / c).log2() + missing_info - discord)
}

pub fn evaluate(rho: &TwoQubitOperator) -> Result<CorrelationPoint> {
    let s_a = von_neumann_entropy(&partial_trace(rho, Subsystem::A))?;
    let s_b = von_neumann_entropy(&partial_trace(rho, Subsystem::B))?;
    let s_ab = von_neumann_entropy(rho)?;
    let m = missing_information(rho)?;

    let mutual_info = s_a + s_b - s_ab;
    let classical_corr = s_b - m.value;
    let discord = mutual_info - classical_corr;
    let alternative = -(s_ab - s_b) + m.value;
    if (s_a - s_b).abs() > DISCORD_ROUTE_TOL {
        return Err(Error::AsymmetricReference { s_a, s_b });
    }
    if (discord - alternative).abs() > DISCORD_ROUTE_TOL {
        return Err(Error::Consistency(format!(
            "discord routes disagree: I - J = {discord}, -S(A|B) + M = {alternative}"
        )));
    }
    Ok(CorrelationPoint {
        mutual_info,
        classical_corr,
        discord,
        missing_info: m.value,
        optimizer: m.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eur;
    use crate::qstate::QubitOperator;
    use crate::stationary::{gamma_from_temperature, stationary_xstate, InitialCorrelation, XState};
    use approx::assert_abs_diff_eq;

    fn stationary(dl: f64, t: f64) -> XState {
        let g = gamma_from_temperature(1.0, t).unwrap();
        stationary_xstate(InitialCorrelation::new(dl).unwrap(), g).unwrap()
    }

    #[test]
    fn mutual_information_examples() {
        assert_abs_diff_eq!(mutual_information(&TwoQubitOperator::singlet()).unwrap(), 2.0, epsilon = 1e-12);
        let prod = TwoQubitOperator::kron(
            &QubitOperator::from_real(0.3, 0.1, 0.1, 0.7),
            &QubitOperator::from_real(0.6, 0.0, 0.0, 0.4),
        );
        assert_abs_diff_eq!(mutual_information(&prod).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mutual_information(&TwoQubitOperator::maximally_mixed()).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn remainder_examples() {
        for (t, p) in [(0.0, 0.0), (0.7, 1.1), (PI / 2.0, 4.0), (PI, 0.3)] {
            let b = BlochProjector::new(t, p).unwrap();
            assert_abs_diff_eq!(post_measurement_remainder(&TwoQubitOperator::singlet(), &b), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(
                post_measurement_remainder(&TwoQubitOperator::maximally_mixed(), &b),
                1.0,
                epsilon = 1e-12
            );
        }
        let z = BlochProjector::new(0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            post_measurement_remainder(&TwoQubitOperator::basis_projector(1, 1), &z),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn missing_information_examples() {
        let m = missing_information(&TwoQubitOperator::singlet()).unwrap();
        assert_abs_diff_eq!(m.value, 0.0, epsilon = 1e-12);
        let m = missing_information(&TwoQubitOperator::maximally_mixed()).unwrap();
        assert_abs_diff_eq!(m.value, 1.0, epsilon = 1e-12);

        // frozen from an independent high-precision evaluation; the X basis
        // (theta = pi/2) is optimal here
        let s = stationary(0.5, 0.5);
        let m = missing_information(&s.to_density()).unwrap();
        assert_abs_diff_eq!(m.value, 0.5506730358211535, epsilon = 1e-10);
        assert_abs_diff_eq!(m.report.theta, PI / 2.0, epsilon = 1e-4);
    }

    #[test]
    fn correlation_examples() {
        let p = evaluate(&TwoQubitOperator::singlet()).unwrap();
        assert_abs_diff_eq!(p.classical_corr, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p.discord, 1.0, epsilon = 1e-10);
        let p = evaluate(&TwoQubitOperator::maximally_mixed()).unwrap();
        assert_abs_diff_eq!(p.classical_corr, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p.discord, 0.0, epsilon = 1e-10);

        // classically correlated, exchange symmetric
        let mut cc = TwoQubitOperator::basis_projector(0, 0).scale(0.5);
        cc = cc.add(&TwoQubitOperator::basis_projector(1, 1).scale(0.5));
        let p = evaluate(&cc).unwrap();
        assert_abs_diff_eq!(p.discord, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p.classical_corr, 1.0, epsilon = 1e-10);

        // product diagonal state: J = 0
        let prod = TwoQubitOperator::kron(
            &QubitOperator::from_real(0.3, 0.0, 0.0, 0.7),
            &QubitOperator::from_real(0.3, 0.0, 0.0, 0.7),
        );
        assert_abs_diff_eq!(classical_correlation(&prod).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn asymmetric_states_are_flagged() {
        let prod = TwoQubitOperator::kron(
            &QubitOperator::from_real(1.0, 0.0, 0.0, 0.0),
            &QubitOperator::maximally_mixed(),
        );
        assert!(matches!(evaluate(&prod), Err(Error::AsymmetricReference { .. })));
    }

    #[test]
    fn bound_via_discord_examples() {
        assert_abs_diff_eq!(bound_via_discord(0.5, 0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(bound_via_discord(0.5, 1.0, 0.0).unwrap(), 2.0);
        assert!(bound_via_discord(0.0, 1.0, 0.0).is_err());
        for (dl, t) in [(-1.0, 0.2), (0.5, 1.0), (1.0, 3.0), (-2.0, 0.7)] {
            let s = stationary(dl, t);
            let p = evaluate(&s.to_density()).unwrap();
            let b = bound_via_discord(0.5, p.missing_info, p.discord).unwrap();
            assert_abs_diff_eq!(b, eur::bound(&s), epsilon = 1e-6);
        }
    }

    #[test]
    fn relabelled_projectors_give_same_remainder() {
        let rho = stationary(0.5, 0.8).to_density();
        for (t, p) in [(0.3, 0.2), (1.2, 5.0), (2.9, 3.3)] {
            let b = BlochProjector::new(t, p).unwrap();
            let r = b.relabelled();
            assert_abs_diff_eq!(
                post_measurement_remainder(&rho, &b),
                post_measurement_remainder(&rho, &r),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn discord_is_nonnegative_on_stationary_states() {
        for dl in [-3.0, -2.0, -1.0, 0.0, 0.5, 1.0] {
            for t in [0.05, 0.3, 1.0, 4.0] {
                let p = evaluate(&stationary(dl, t).to_density()).unwrap();
                assert!(p.discord >= -1e-9);
                assert!(p.missing_info >= 0.0 && p.missing_info <= 1.0 + 1e-12);
                assert!(p.mutual_info >= p.classical_corr - 1e-9 && p.classical_corr >= -1e-9);
            }
        }
    }
}
