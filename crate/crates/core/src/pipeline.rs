//! Full evaluation at one (omega, T, Delta0) point and temperature sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations;
use crate::error::{domain, Error, Result};
use crate::eur::{self, TIGHTNESS_TOL};
use crate::stationary::{stationary_xstate, InitialCorrelation, UnruhParams};

pub const DEFAULT_DELTA0: [f64; 3] = [-1.0, 0.5, 1.0];
pub const DEFAULT_T_MIN: f64 = 0.01;
pub const DEFAULT_T_MAX: f64 = 4.0;
pub const DEFAULT_T_COUNT: usize = 200;
/// Tolerance of the identity bound = log2(1/c) + M - D.
pub const DISCORD_IDENTITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub omega: f64,
    pub delta0_list: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    /// Allows T = 0, evaluated as the gamma = 1 limit.
    pub t_zero_limit: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            delta0_list: DEFAULT_DELTA0.to_vec(),
            t_min: DEFAULT_T_MIN,
            t_max: DEFAULT_T_MAX,
            t_count: DEFAULT_T_COUNT,
            t_zero_limit: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(domain("omega", self.omega, "omega > 0"));
        }
        if self.t_zero_limit {
            if !(self.t_min >= 0.0) {
                return Err(domain("t_min", self.t_min, "t_min >= 0"));
            }
        } else if !(self.t_min > 0.0) {
            return Err(domain("t_min", self.t_min, "t_min > 0 (or set the T = 0 limit flag)"));
        }
        if !(self.t_max > self.t_min) || !self.t_max.is_finite() {
            return Err(domain("t_max", self.t_max, "finite, t_max > t_min"));
        }
        if self.t_count < 2 {
            return Err(domain("t_count", self.t_count as f64, "t_count >= 2"));
        }
        if self.delta0_list.is_empty() {
            return Err(Error::Domain {
                what: "delta0_list",
                value: 0.0,
                expected: "at least one Delta0",
            });
        }
        for &d in &self.delta0_list {
            InitialCorrelation::new(d)?;
        }
        Ok(())
    }

    /// Linear grid from t_min to t_max inclusive.
    pub fn temperatures(&self) -> Vec<f64> {
        let n = self.t_count;
        let span = self.t_max - self.t_min;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    self.t_max
                } else {
                    self.t_min + span * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// One evaluated grid point; column order matches the CSV header.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "T")]
    pub temperature: f64,
    pub gamma: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub d: f64,
    #[serde(rename = "U")]
    pub uncertainty: f64,
    pub bound: f64,
    pub tightness: f64,
    #[serde(rename = "S_AB")]
    pub s_ab: f64,
    #[serde(rename = "S_A_given_B")]
    pub s_a_given_b: f64,
    #[serde(rename = "I")]
    pub mutual_info: f64,
    #[serde(rename = "J")]
    pub classical_corr: f64,
    #[serde(rename = "D")]
    pub discord: f64,
    #[serde(rename = "M")]
    pub missing_info: f64,
    pub theta_star: f64,
    pub phi_star: f64,
}

impl SweepRow {
    pub const HEADER: [&'static str; 17] = [
        "T",
        "gamma",
        "x",
        "y",
        "z",
        "d",
        "U",
        "bound",
        "tightness",
        "S_AB",
        "S_A_given_B",
        "I",
        "J",
        "D",
        "M",
        "theta_star",
        "phi_star",
    ];

    pub fn values(&self) -> [f64; 17] {
        [
            self.temperature,
            self.gamma,
            self.x,
            self.y,
            self.z,
            self.d,
            self.uncertainty,
            self.bound,
            self.tightness,
            self.s_ab,
            self.s_a_given_b,
            self.mutual_info,
            self.classical_corr,
            self.discord,
            self.missing_info,
            self.theta_star,
            self.phi_star,
        ]
    }

    /// |bound - (1 + M - D)|.
    pub fn discord_identity_residual(&self) -> f64 {
        (self.bound - (1.0 + self.missing_info - self.discord)).abs()
    }

    /// Cross-module identities every emitted row must satisfy.
    pub fn check(&self) -> Result<()> {
        if self.uncertainty < self.bound - TIGHTNESS_TOL {
            return Err(Error::Consistency(format!(
                "T = {}: U = {} below bound {}",
                self.temperature, self.uncertainty, self.bound
            )));
        }
        let r = self.discord_identity_residual();
        if !(r <= DISCORD_IDENTITY_TOL) {
            return Err(Error::Consistency(format!(
                "T = {}: bound differs from 1 + M - D by {r:e}",
                self.temperature
            )));
        }
        Ok(())
    }
}

pub fn evaluate_point(omega: f64, temperature: f64, delta0: f64) -> Result<SweepRow> {
    let params = UnruhParams::new(omega, temperature)?;
    let state = stationary_xstate(InitialCorrelation::new(delta0)?, params.gamma)?;
    let e = eur::evaluate(&state)?;
    let c = correlations::evaluate(&state.to_density())?;
    let row = SweepRow {
        temperature,
        gamma: params.gamma,
        x: state.x,
        y: state.y,
        z: state.z,
        d: state.d,
        uncertainty: e.uncertainty,
        bound: e.bound,
        tightness: e.tightness,
        s_ab: e.s_ab,
        s_a_given_b: e.s_a_given_b,
        mutual_info: c.mutual_info,
        classical_corr: c.classical_corr,
        discord: c.discord,
        missing_info: c.missing_info,
        theta_star: c.optimizer.theta,
        phi_star: c.optimizer.phi,
    };
    row.check()?;
    Ok(row)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSeries {
    pub delta0: f64,
    pub rows: Vec<SweepRow>,
}

/// Evaluates the whole grid. `jobs == Some(1)` runs sequentially; otherwise
/// a worker pool (of `jobs` threads, or rayon's default) is used. Row order
/// follows the grid either way.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<Vec<SweepSeries>> {
    config.validate()?;
    let temps = config.temperatures();
    let points: Vec<(usize, f64)> = (0..config.delta0_list.len())
        .flat_map(|i| temps.iter().map(move |&t| (i, t)))
        .collect();
    let eval = |&(i, t): &(usize, f64)| evaluate_point(config.omega, t, config.delta0_list[i]);

    let rows: Vec<SweepRow> = match jobs {
        Some(1) => points.iter().map(eval).collect::<Result<_>>()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Consistency(format!("cannot start worker pool: {e}")))?
            .install(|| points.par_iter().map(eval).collect::<Result<_>>())?,
        None => points.par_iter().map(eval).collect::<Result<_>>()?,
    };

    Ok(config
        .delta0_list
        .iter()
        .zip(rows.chunks(temps.len()))
        .map(|(&delta0, chunk)| SweepSeries {
            delta0,
            rows: chunk.to_vec(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_grid() {
        let c = SweepConfig::default();
        c.validate().unwrap();
        let t = c.temperatures();
        assert_eq!(t.len(), 200);
        assert_eq!(t[0], 0.01);
        assert_eq!(t[199], 4.0);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn config_validation() {
        let bad = |f: fn(&mut SweepConfig)| {
            let mut c = SweepConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.t_min = 0.0));
        assert!(bad(|c| c.t_count = 1));
        assert!(bad(|c| c.delta0_list = vec![1.5]));
        assert!(bad(|c| c.t_max = 0.005));
        assert!(bad(|c| c.omega = 0.0));
        let ok = SweepConfig {
            t_min: 0.0,
            t_zero_limit: true,
            ..SweepConfig::default()
        };
        ok.validate().unwrap();
    }

    #[test]
    fn singlet_row() {
        for t in [0.0, 0.5, 3.0] {
            let r = evaluate_point(1.0, t, -3.0).unwrap();
            assert_abs_diff_eq!(r.uncertainty, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(r.bound, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(r.tightness, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(r.discord, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(r.missing_info, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_temperature_triplet_row() {
        let r = evaluate_point(1.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(r.uncertainty, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.bound, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.tightness, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn frozen_row_values() {
        // independent high-precision evaluation at (Delta0, T) = (-1, 1)
        let r = evaluate_point(1.0, 1.0, -1.0).unwrap();
        assert_abs_diff_eq!(r.uncertainty, 1.7295256682134195, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bound, 1.660965080924182, epsilon = 1e-12);
        assert_abs_diff_eq!(r.missing_info, 0.8307304171868618, epsilon = 1e-10);
        assert_abs_diff_eq!(r.discord, 0.16976533626267973, epsilon = 1e-10);
        assert_abs_diff_eq!(r.mutual_info - r.classical_corr, r.discord, epsilon = 1e-14);
    }

    #[test]
    fn row_check_rejects_broken_identity() {
        let mut r = evaluate_point(1.0, 1.0, 0.5).unwrap();
        r.check().unwrap();
        r.discord += 1e-3;
        assert!(r.check().is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = SweepConfig {
            t_count: 12,
            ..SweepConfig::default()
        };
        let seq = run_sweep(&c, Some(1)).unwrap();
        let par = run_sweep(&c, Some(4)).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.len(), 3);
        assert!(seq.iter().all(|s| s.rows.len() == 12));
    }
}
