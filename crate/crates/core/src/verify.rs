//! Desk-scale run of the cross-module invariant suite.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlations::{self, post_measurement_remainder};
use crate::error::Result;
use crate::eur::{self, closed_form};
use crate::lindblad::{self, KossakowskiParams};
use crate::pipeline::{run_sweep, SweepConfig, SweepSeries};
use crate::qstate::{
    binary_entropy, dephase, measure_subsystem, partial_trace, von_neumann_entropy, BlochProjector,
    DensityOperator, PauliBasis, QubitOperator, Subsystem, TwoQubitOperator, C64,
};
use crate::report;
use crate::stationary::{
    algebraic_residuals, bloch_components, gamma_from_temperature, stationary_xstate, InitialCorrelation,
    XState,
};

const GRID_DELTA0: [f64; 6] = [-3.0, -2.0, -1.0, 0.0, 0.5, 1.0];
const GAMMA0_VALUES: [f64; 3] = [0.0, 0.5, -0.4];
const SEED: u64 = 0x5eed_0fee;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    /// Mutation hook: negate the coherence d of every stationary state the
    /// suite builds, to confirm the identity checks notice.
    pub flip_d_sign: bool,
    /// Points of the brute-force optimizer spot check.
    pub brute_force_points: usize,
    /// Random initial states for the dynamics checks.
    pub trajectories: usize,
}

impl VerifyOptions {
    pub fn desk() -> Self {
        Self {
            flip_d_sign: false,
            brute_force_points: 4,
            trajectories: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.detail.is_none() && self.max_residual <= self.tolerance
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn record(&mut self, name: &'static str, tolerance: f64, outcome: Result<f64>) {
        let (max_residual, detail) = match outcome {
            Ok(r) if r.is_nan() => (r, Some("residual is NaN".into())),
            Ok(r) => (r, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        self.checks.push(Check {
            name,
            max_residual,
            tolerance,
            detail,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:<width$}  {:>12}  {:>9}  result", "check", "max resid", "tol")?;
        for c in &self.checks {
            write!(
                f,
                "{:<width$}  {:>12.3e}  {:>9.1e}  {}",
                c.name,
                c.max_residual,
                c.tolerance,
                if c.passed() { "pass" } else { "FAIL" }
            )?;
            if let Some(d) = &c.detail {
                write!(f, "  ({d})")?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Largest drop between consecutive entries (0 for a nondecreasing series).
pub fn nondecreasing_violation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
}

pub fn nonincreasing_violation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// True when the minimum sits strictly inside and the series rises on both sides of it.
pub fn has_interior_minimum(v: &[f64]) -> bool {
    let Some(k) = v
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
    else {
        return false;
    };
    k > 0 && k + 1 < v.len() && v[0] > v[k] && v[v.len() - 1] > v[k]
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn temperatures(n: usize) -> Vec<f64> {
    (1..=n).map(|k| 4.0 * k as f64 / n as f64).collect()
}

struct Suite {
    opts: VerifyOptions,
}

impl Suite {
    fn stationary(&self, delta0: f64, gamma: f64) -> Result<XState> {
        let mut s = stationary_xstate(InitialCorrelation::new(delta0)?, gamma)?;
        if self.opts.flip_d_sign {
            s.d = -s.d;
        }
        Ok(s)
    }

    fn grid_states(&self, n: usize) -> Result<Vec<(f64, f64, XState)>> {
        let mut out = Vec::new();
        for &d0 in &GRID_DELTA0 {
            for t in temperatures(n) {
                let g = gamma_from_temperature(1.0, t)?;
                out.push((d0, g, self.stationary(d0, g)?));
            }
        }
        Ok(out)
    }
}

fn state_defect(rho: &TwoQubitOperator) -> f64 {
    let tr = rho.trace();
    let neg = (-rho.spectrum()[0]).max(0.0);
    rho.hermiticity_defect()
        .max((tr.re - 1.0).abs())
        .max(tr.im.abs())
        .max(neg)
}

fn measurement_reassembly(rho: &TwoQubitOperator, basis: BlochProjector) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for which in [Subsystem::A, Subsystem::B] {
        let outcomes = measure_subsystem(rho, which, basis)?;
        let p: Vec<f64> = outcomes.iter().map(|o| o.probability).collect();
        worst = worst.max((p[0] + p[1] - 1.0).abs());

        let dephased = dephase(rho, which, basis);
        let projectors = basis.projectors();
        let mut rebuilt = TwoQubitOperator::zero();
        let mut conditional = 0.0;
        for (o, proj) in outcomes.iter().zip(&projectors) {
            if let Some(s) = &o.state {
                let part = match which {
                    Subsystem::A => TwoQubitOperator::kron(proj, s),
                    Subsystem::B => TwoQubitOperator::kron(s, proj),
                };
                rebuilt = rebuilt.add(&part.scale(o.probability));
                conditional += o.probability * von_neumann_entropy(s)?;
            }
        }
        worst = worst.max(rebuilt.max_abs_diff(&dephased));
        let direct = von_neumann_entropy(&dephased)?;
        worst = worst.max((direct - binary_entropy(p[0])? - conditional).abs());
    }
    Ok(worst)
}

fn random_state(rng: &mut ChaCha8Rng) -> TwoQubitOperator {
    let g = nalgebra::Matrix4::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = g * g.adjoint();
    let tr = m.trace().re;
    TwoQubitOperator::new(m / C64::from(tr)).hermitian_part()
}

/// Runs the suite. Failures are reported in the table, never as `Err`.
pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let suite = Suite { opts: *opts };
    let mut report = VerifyReport::default();
    let states = suite.grid_states(40);
    let sweep_config = SweepConfig {
        delta0_list: GRID_DELTA0.to_vec(),
        ..SweepConfig::default()
    };
    let sweep = run_sweep(&sweep_config, None);

    // qubit states and measurements
    report.record(
        "state validity",
        1e-10,
        states.as_ref().map_err(Clone::clone).map(|v| {
            v.iter()
                .map(|(_, _, s)| state_defect(&s.to_density()))
                .fold(0.0, f64::max)
        }),
    );
    report.record(
        "measurement reassembly",
        1e-10,
        states.as_ref().map_err(Clone::clone).and_then(|v| {
            let bases = [
                BlochProjector::from(PauliBasis::X),
                BlochProjector::from(PauliBasis::Z),
                BlochProjector::wrapped(1.1, 0.7),
            ];
            let mut worst: f64 = 0.0;
            for (_, _, s) in v.iter().step_by(7) {
                for b in bases {
                    worst = worst.max(measurement_reassembly(&s.to_density(), b)?);
                }
            }
            Ok(worst)
        }),
    );
    report.record(
        "entropy range",
        1e-12,
        states.as_ref().map_err(Clone::clone).and_then(|v| {
            let mut worst: f64 = 0.0;
            for (_, _, s) in v {
                let rho = s.to_density();
                let e = von_neumann_entropy(&rho)?;
                worst = worst.max(-e).max(e - 2.0);
                let eb = von_neumann_entropy(&partial_trace(&rho, Subsystem::B))?;
                worst = worst.max(-eb).max(eb - 1.0);
            }
            Ok(worst)
        }),
    );
    report.record("product partial trace", 1e-14, {
        let a = QubitOperator::from_real(0.7, 0.2, 0.2, 0.3);
        let b = QubitOperator::from_real(0.4, -0.1, -0.1, 0.6);
        let rho = TwoQubitOperator::kron(&a, &b);
        Ok(partial_trace(&rho, Subsystem::A)
            .max_abs_diff(&a)
            .max(partial_trace(&rho, Subsystem::B).max_abs_diff(&b)))
    });

    // stationary state
    report.record("stationary algebraic residuals", 1e-12, {
        let mut worst: f64 = 0.0;
        let mut out = Ok(());
        for &d0 in &GRID_DELTA0 {
            for t in temperatures(200) {
                let r = gamma_from_temperature(1.0, t)
                    .and_then(|g| Ok((g, bloch_components(InitialCorrelation::new(d0)?, g)?)));
                match r {
                    Ok((g, c)) => {
                        worst = algebraic_residuals(&c, d0, g).iter().fold(worst, |m, v| m.max(v.abs()))
                    }
                    Err(e) => out = Err(e),
                }
            }
        }
        out.map(|_| worst)
    });
    report.record(
        "stationary Bloch map",
        1e-12,
        states.as_ref().map_err(Clone::clone).and_then(|v| {
            let mut worst: f64 = 0.0;
            for (d0, g, s) in v {
                let c = bloch_components(InitialCorrelation::new(*d0)?, *g)?;
                let m = c.to_xstate();
                worst = worst
                    .max((m.x - s.x).abs())
                    .max((m.y - s.y).abs())
                    .max((m.z - s.z).abs())
                    .max((m.d - s.d).abs());
            }
            Ok(worst)
        }),
    );
    report.record(
        "stationary monotonicity in T",
        1e-15,
        states.as_ref().map_err(Clone::clone).map(|v| {
            let mut worst: f64 = 0.0;
            for chunk in v.chunks(40).filter(|c| c[0].0 > -3.0) {
                let x: Vec<f64> = chunk.iter().map(|c| c.2.x).collect();
                let z: Vec<f64> = chunk.iter().map(|c| c.2.z).collect();
                worst = worst.max(nondecreasing_violation(&x)).max(nonincreasing_violation(&z));
            }
            worst
        }),
    );
    report.record("stationary limits", 1e-14, {
        (|| {
            let mut worst: f64 = 0.0;
            for &d0 in &GRID_DELTA0 {
                let s = suite.stationary(d0, 0.0)?;
                worst = worst.max((s.x - s.z).abs());
            }
            let reference = suite.stationary(-3.0, 1.0)?;
            for g in [0.0, 0.3, 0.9] {
                let s = suite.stationary(-3.0, g)?;
                worst = worst.max(s.to_density().max_abs_diff(&reference.to_density()));
            }
            Ok(worst)
        })()
    });
    report.record(
        "stationary positivity margin",
        1e-12,
        states.as_ref().map_err(Clone::clone).map(|v| {
            v.iter()
                .map(|(_, _, s)| (s.d.abs() - s.y).max(-s.x).max(-s.z))
                .fold(0.0, f64::max)
        }),
    );

    // uncertainty relation
    let series_or_err = sweep.as_ref().map_err(Clone::clone);
    report.record(
        "EUR inequality",
        1e-9,
        series_or_err.clone().map(|all| {
            rows(all)
                .map(|r| r.bound - r.uncertainty)
                .fold(0.0, f64::max)
        }),
    );
    report.record(
        "closed-form vs eigensolver",
        1e-10,
        states.as_ref().map_err(Clone::clone).and_then(|v| {
            let mut worst: f64 = 0.0;
            for (_, _, s) in v {
                worst = eur::route_discrepancy(s)?.iter().fold(worst, |m, r| m.max(*r));
                let ab = eur::conditional_entropy_ab(s);
                worst = worst.max((ab - closed_form::conditional_entropy_ab(s)).abs());
            }
            Ok(worst)
        }),
    );
    report.record(
        "A<->B exchange symmetry",
        1e-10,
        states.as_ref().map_err(Clone::clone).and_then(|v| {
            let mut worst: f64 = 0.0;
            for (_, _, s) in v.iter().step_by(3) {
                let rho = s.to_density();
                let direct = eur::evaluate_state(&rho)?;
                let swapped = eur::evaluate_state(&rho.exchange())?;
                worst = worst.max((direct.uncertainty - swapped.uncertainty).abs());
            }
            Ok(worst)
        }),
    );
    report.record(
        "uncertainty curve shapes",
        1e-12,
        series_or_err.clone().and_then(|all| {
            let col = |d0: f64, f: fn(&crate::SweepRow) -> f64| series_column(all, d0, f);
            let u = col(-1.0, |r| r.uncertainty)?;
            let dm1 = col(-1.0, |r| r.tightness)?;
            let dh = col(0.5, |r| r.tightness)?;
            let d1 = col(1.0, |r| r.tightness)?;
            let t0 = eval_tightness_at_zero()?;
            Ok(nondecreasing_violation(&u)
                .max(nonincreasing_violation(&dm1))
                .max(flag(has_interior_minimum(&dh)))
                .max(nondecreasing_violation(&d1))
                .max(t0.abs()))
        }),
    );

    // correlations
    report.record(
        "discord identity",
        1e-6,
        series_or_err.clone().and_then(|all| {
            let mut worst: f64 = 0.0;
            for r in rows(all) {
                let via = correlations::bound_via_discord(0.5, r.missing_info, r.discord)?;
                worst = worst.max((via - (1.0 + r.s_a_given_b)).abs());
            }
            Ok(worst)
        }),
    );
    report.record(
        "discord nonnegativity",
        1e-9,
        series_or_err
            .clone()
            .map(|all| rows(all).map(|r| -r.discord).fold(0.0, f64::max)),
    );
    report.record(
        "correlation curve shapes",
        1e-9,
        series_or_err.clone().and_then(|all| {
            let col = |d0: f64, f: fn(&crate::SweepRow) -> f64| series_column(all, d0, f);
            Ok(nonincreasing_violation(&col(-1.0, |r| r.discord)?)
                .max(nondecreasing_violation(&col(-1.0, |r| r.missing_info)?))
                .max(flag(has_interior_minimum(&col(0.5, |r| r.discord)?)))
                .max(nondecreasing_violation(&col(1.0, |r| r.discord)?))
                .max(nondecreasing_violation(&col(1.0, |r| r.missing_info)?)))
        }),
    );
    report.record(
        "optimizer relabel invariance",
        1e-12,
        states.as_ref().map_err(Clone::clone).map(|v| {
            let mut worst: f64 = 0.0;
            for (_, _, s) in v.iter().step_by(11) {
                let rho = s.to_density();
                for i in 0..=8 {
                    for j in 0..8 {
                        let p = BlochProjector::wrapped(PI * i as f64 / 8.0, 2.0 * PI * j as f64 / 8.0);
                        let a = post_measurement_remainder(&rho, &p);
                        let b = post_measurement_remainder(&rho, &p.relabelled());
                        worst = worst.max((a - b).abs());
                    }
                }
            }
            worst
        }),
    );
    report.record(
        "optimizer vs 512x512 grid",
        1e-6,
        series_or_err.clone().and_then(|all| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let flat: Vec<_> = all
                .iter()
                .flat_map(|s| s.rows.iter().map(move |r| (s.delta0, r)))
                .collect();
            let mut worst: f64 = 0.0;
            for _ in 0..opts.brute_force_points {
                let (d0, r) = flat[rng.gen_range(0..flat.len())];
                let rho = stationary_xstate(InitialCorrelation::new(d0)?, r.gamma)?.to_density();
                worst = worst.max((brute_force_m(&rho, 512) - r.missing_info).abs());
            }
            Ok(worst)
        }),
    );

    // dynamics
    let gammas: Vec<f64> = (0..5).map(|k| k as f64 / 4.0).collect();
    report.record("Lindblad fixed point", 1e-10, {
        (|| {
            let mut worst: f64 = 0.0;
            for &d0 in &GRID_DELTA0 {
                for &g in &gammas {
                    let s = suite.stationary(d0, g)?;
                    for &g0 in &GAMMA0_VALUES {
                        for rate in [1.0, 2.5] {
                            let p = KossakowskiParams::new(rate, g * rate, g0 * rate, 1.0)?;
                            let l = lindblad::generator_for(&p)?;
                            worst = worst.max(lindblad::fixed_point_residual(&l, &s.to_density()));
                        }
                    }
                }
            }
            Ok(worst)
        })()
    });

    let dynamics = run_trajectories(opts.trajectories);
    report.record(
        "conservation of Tr[rho S]",
        1e-8,
        dynamics.as_ref().map_err(Clone::clone).map(|d| d.conservation),
    );
    report.record(
        "convergence to stationary state",
        1e-6,
        dynamics.as_ref().map_err(Clone::clone).map(|d| d.distance),
    );
    report.record(
        "trace drift per step",
        1e-10,
        dynamics.as_ref().map_err(Clone::clone).map(|d| d.trace_drift),
    );
    report.record(
        "trajectory state validity",
        1e-12,
        dynamics.as_ref().map_err(Clone::clone).map(|d| d.hermiticity),
    );

    // harness
    report.record(
        "row identities",
        1e-6,
        series_or_err.clone().and_then(|all| {
            let mut worst: f64 = 0.0;
            for r in rows(all) {
                r.check()?;
                worst = worst.max(r.discord_identity_residual());
            }
            Ok(worst)
        }),
    );
    report.record("parallel vs sequential", 0.0, {
        let small = SweepConfig {
            t_count: 16,
            ..SweepConfig::default()
        };
        (|| {
            let a = run_sweep(&small, Some(1))?;
            let b = run_sweep(&small, Some(3))?;
            let same = a.iter().zip(&b).all(|(x, y)| {
                report::sweep_csv(&small, x) == report::sweep_csv(&small, y)
                    && report::sweep_json(&small, x) == report::sweep_json(&small, y)
            });
            Ok(flag(same && a.len() == b.len()))
        })()
    });

    report
}

fn rows(all: &[SweepSeries]) -> impl Iterator<Item = &crate::SweepRow> {
    all.iter().flat_map(|s| s.rows.iter())
}

fn series_column(all: &[SweepSeries], delta0: f64, f: fn(&crate::SweepRow) -> f64) -> Result<Vec<f64>> {
    all.iter()
        .find(|s| s.delta0 == delta0)
        .map(|s| s.rows.iter().map(f).collect())
        .ok_or_else(|| crate::Error::Consistency(format!("sweep lacks Delta0 = {delta0}")))
}

fn eval_tightness_at_zero() -> Result<f64> {
    let s = stationary_xstate(InitialCorrelation::TRIPLET, 1.0)?;
    Ok(eur::evaluate(&s)?.tightness)
}

/// Minimum of the post-measurement remainder over an n x n angle grid.
pub fn brute_force_m(rho: &TwoQubitOperator, n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=n {
        for j in 0..n {
            let p = BlochProjector::wrapped(PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
            best = best.min(post_measurement_remainder(rho, &p));
        }
    }
    best
}

struct DynamicsSummary {
    conservation: f64,
    distance: f64,
    trace_drift: f64,
    hermiticity: f64,
}

fn run_trajectories(count: usize) -> Result<DynamicsSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xd1);
    let mut summary = DynamicsSummary {
        conservation: 0.0,
        distance: 0.0,
        trace_drift: 0.0,
        hermiticity: 0.0,
    };
    for _ in 0..count {
        let rho0 = random_state(&mut rng);
        let t = rng.gen_range(0.5..4.0);
        let beta = 1.0 / t;
        let p = KossakowskiParams::thermal(1.0, beta)?;
        let l = lindblad::generator_for(&p)?;
        let dtau = 0.01 / p.gamma_plus;
        let traj = lindblad::integrate_strided(&l, &rho0, 100.0 / p.gamma_plus, dtau, 50)?;

        let delta0 = lindblad::delta_of_state(&rho0);
        for (_, rho) in &traj.samples {
            summary.conservation = summary
                .conservation
                .max((lindblad::delta_of_state(rho) - delta0).abs());
            let tr = rho.trace();
            summary.hermiticity = summary
                .hermiticity
                .max(rho.hermiticity_defect())
                .max((tr.re - 1.0).abs())
                .max(tr.im.abs());
        }
        let predicted = stationary_xstate(InitialCorrelation::new(delta0.clamp(-3.0, 1.0))?, p.ratio())?;
        let dist = traj.last().1.sub(&predicted.to_density()).frobenius_norm();
        summary.distance = summary.distance.max(dist);
        summary.trace_drift = summary.trace_drift.max(traj.max_trace_drift);
    }
    Ok(summary)
}
