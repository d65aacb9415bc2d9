//! Derivative-free minimization in two variables (Nelder-Mead simplex).

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Converged when the spread of simplex values drops below this...
    pub f_tol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub x_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-10,
            x_tol: 1e-7,
            max_evaluations: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub point: [f64; 2],
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Largest vertex distance from the best vertex at termination.
    pub diameter: f64,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn along(from: [f64; 2], to: [f64; 2], t: f64) -> [f64; 2] {
    [from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Minimizes `f` starting from the axis-aligned simplex at `start` with edge
/// lengths `step`. `Err` carries the best point found when the evaluation
/// budget runs out.
pub fn nelder_mead<F>(
    mut f: F,
    start: [f64; 2],
    step: [f64; 2],
    opts: &NelderMeadOptions,
) -> Result<Minimum, Minimum>
where
    F: FnMut([f64; 2]) -> f64,
{
    let evaluations = std::cell::Cell::new(0usize);
    let mut eval = |p: [f64; 2]| {
        evaluations.set(evaluations.get() + 1);
        f(p)
    };

    let mut simplex: Vec<([f64; 2], f64)> = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ]
    .into_iter()
    .map(|p| (p, eval(p)))
    .collect();

    let mut iterations = 0usize;
    loop {
        // stable sort keeps the ordering deterministic on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0], simplex[2]);
        let diameter = dist(best.0, simplex[1].0).max(dist(best.0, worst.0));
        let summary = Minimum {
            point: best.0,
            value: best.1,
            iterations,
            evaluations: evaluations.get(),
            diameter,
        };
        if worst.1 - best.1 < opts.f_tol && diameter < opts.x_tol {
            return Ok(summary);
        }
        if evaluations.get() >= opts.max_evaluations {
            return Err(summary);
        }
        iterations += 1;

        let centroid = along(simplex[0].0, simplex[1].0, 0.5);
        let reflected = along(centroid, worst.0, -REFLECT);
        let f_r = eval(reflected);

        if f_r < best.1 {
            let expanded = along(centroid, worst.0, -EXPAND);
            let f_e = eval(expanded);
            simplex[2] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
            continue;
        }
        if f_r < simplex[1].1 {
            simplex[2] = (reflected, f_r);
            continue;
        }

        let accepted = if f_r < worst.1 {
            let outside = along(centroid, reflected, CONTRACT);
            let f_c = eval(outside);
            (f_c <= f_r).then_some((outside, f_c))
        } else {
            let inside = along(centroid, worst.0, CONTRACT);
            let f_c = eval(inside);
            (f_c < worst.1).then_some((inside, f_c))
        };
        match accepted {
            Some(v) => simplex[2] = v,
            None => {
                let anchor = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let p = along(anchor, v.0, SHRINK);
                    *v = (p, eval(p));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |p| (p[0] - 1.0).powi(2) + 3.0 * (p[1] + 0.5).powi(2),
            [0.0, 0.0],
            [0.1, 0.1],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-6);
        assert!((m.point[1] + 0.5).abs() < 1e-6);
        assert!(m.value < 1e-11);
        assert!(m.diameter < 1e-7);
    }

    #[test]
    fn rosenbrock_valley() {
        let m = nelder_mead(
            |p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2),
            [-1.2, 1.0],
            [0.1, 0.1],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-4, "{m:?}");
        assert!((m.point[1] - 1.0).abs() < 1e-4, "{m:?}");
    }

    #[test]
    fn flat_direction_still_collapses() {
        let m = nelder_mead(
            |p| (p[0] - 0.3).powi(2),
            [0.0, 0.0],
            [0.05, 0.1],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!((m.point[0] - 0.3).abs() < 1e-6);
        assert!(m.diameter < 1e-7);
    }

    #[test]
    fn constant_function_terminates() {
        let m = nelder_mead(|_| 1.0, [0.2, 0.2], [0.1, 0.1], &NelderMeadOptions::default()).unwrap();
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn budget_exhaustion_reports_best() {
        let opts = NelderMeadOptions {
            max_evaluations: 10,
            ..Default::default()
        };
        let err = nelder_mead(|p| p[0] * p[0] + p[1] * p[1], [1.0, 1.0], [0.1, 0.1], &opts).unwrap_err();
        assert!(err.evaluations >= 10);
        assert!(err.value < 2.0);
    }
}
