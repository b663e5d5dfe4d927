//! Nelder-Mead simplex descent with seeded multistart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplexOptions {
    /// Converged once every vertex lies within `xtol` of the best (max norm)...
    pub xtol: f64,
    /// ...and the vertex values spread by at most `ftol`.
    pub ftol: f64,
    pub max_evals: usize,
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-6,
            ftol: 1e-12,
            max_evals: 20_000,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

fn initial_simplex(x0: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    simplex
}

fn converged(simplex: &[Vec<f64>], values: &[f64], opts: &SimplexOptions) -> bool {
    let best = &simplex[0];
    let xspread = simplex[1..]
        .iter()
        .flat_map(|v| v.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let fspread = values.last().unwrap() - values[0];
    xspread <= opts.xtol && fspread <= opts.ftol
}

fn descend<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], step: f64, budget: usize, opts: &SimplexOptions) -> Minimum {
    let n = x0.len();
    let mut simplex = initial_simplex(x0, step);
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;
    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        order = (0..=n).collect();
        if converged(&simplex, &values, opts) || evals >= budget {
            return Minimum {
                x: simplex.swap_remove(0),
                value: values[0],
                converged: evals < budget,
                evaluations: evals,
            };
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        // outside contraction if the reflection beat the worst vertex, inside otherwise
        let outside = fr < values[n];
        let xc = along(if outside { -0.5 } else { 0.5 });
        let fc = f(&xc);
        evals += 1;
        let accept = if outside { fc <= fr } else { fc < values[n] };
        if accept {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            values[i] = f(&simplex[i]);
        }
        evals += n;
    }
}

/// Minimise `f` from `x0`. After convergence the simplex is rebuilt around
/// the result until a rebuild no longer improves it, which guards against
/// collapsed simplices.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum {
    let mut best = descend(&f, x0, opts.initial_step, opts.max_evals, opts);
    let mut total = best.evaluations;
    let mut step = opts.initial_step;
    while best.converged && total < opts.max_evals {
        step = (0.1 * step).max(10.0 * opts.xtol);
        let next = descend(&f, &best.x, step, opts.max_evals - total, opts);
        total += next.evaluations;
        let improved = next.value < best.value - opts.ftol;
        if next.value <= best.value {
            best = Minimum { evaluations: 0, ..next };
        } else {
            best.converged = next.converged;
        }
        if !improved {
            break;
        }
    }
    best.evaluations = total;
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MultistartOptions {
    pub restarts: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
}

impl Default for MultistartOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            simplex: SimplexOptions::default(),
        }
    }
}

impl MultistartOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultistartMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    /// Summed over all restarts.
    pub evaluations: usize,
    /// Index of the winning restart.
    pub restart: usize,
}

/// Start point of restart `r`: uniform in `ranges`, from stream `r` of the seed.
pub fn start_point(seed: u64, r: usize, ranges: &[(f64, f64)]) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    ranges.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect()
}

/// Run `opts.restarts` independent descents (in parallel when enabled) and
/// keep the lowest value, ties going to the lowest restart index.
pub fn multistart<F>(f: F, ranges: &[(f64, f64)], opts: &MultistartOptions) -> MultistartMinimum
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    multistart_from(f, ranges, opts, &[])
}

/// [`multistart`] with extra fixed start points, run as restarts
/// `opts.restarts..` after the random ones.
pub fn multistart_from<F>(
    f: F,
    ranges: &[(f64, f64)],
    opts: &MultistartOptions,
    starts: &[Vec<f64>],
) -> MultistartMinimum
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let random = if starts.is_empty() { opts.restarts.max(1) } else { opts.restarts };
    let runs = parallel::map_range(random + starts.len(), |r| {
        let x0 = if r < random {
            start_point(opts.seed, r, ranges)
        } else {
            starts[r - random].clone()
        };
        nelder_mead(&f, &x0, &opts.simplex)
    });
    let evaluations = runs.iter().map(|m| m.evaluations).sum();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value < a.1.value { b } else { a })
        .expect("at least one restart");
    MultistartMinimum {
        x: best.x,
        value: best.value,
        converged: best.converged,
        evaluations,
        restart,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.5).powi(2)).sum(),
            &[3.0, -2.0, 1.0, 0.0],
            &SimplexOptions::default(),
        );
        assert!(m.converged);
        for v in &m.x {
            assert!((v - 0.5).abs() < 1e-5);
        }
    }

    #[test]
    fn rosenbrock_valley() {
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &SimplexOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let opts = SimplexOptions {
            max_evals: 20,
            ..SimplexOptions::default()
        };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(!m.converged);
        assert!(m.evaluations <= 20 + 2);
    }

    #[test]
    fn multistart_finds_global_minimum_deterministically() {
        // minima near ±2, the negative one deeper
        let f = |x: &[f64]| (x[0] * x[0] - 4.0).powi(2) + 0.5 * x[0];
        let opts = MultistartOptions {
            restarts: 8,
            seed: 17,
            ..MultistartOptions::default()
        };
        let a = multistart(f, &[(-5.0, 5.0)], &opts);
        let b = multistart(f, &[(-5.0, 5.0)], &opts);
        assert!(a.x[0] < 0.0);
        assert_eq!(a, b);
    }

    #[test]
    fn restart_streams_differ() {
        let ranges = [(0.0, 1.0); 3];
        assert_ne!(start_point(1, 0, &ranges), start_point(1, 1, &ranges));
        assert_eq!(start_point(1, 4, &ranges), start_point(1, 4, &ranges));
    }
}
