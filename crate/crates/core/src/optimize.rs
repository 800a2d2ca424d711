//! Derivative-free minimization: Nelder–Mead with restarts and a seeded
//! multi-start driver.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::random::stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial (and every restart) simplex.
    pub step: f64,
    /// Converged when every vertex is within this distance of the best one.
    pub diameter_tol: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            step: 0.1,
            diameter_tol: 1e-10,
            max_evals: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

struct Counted<'a, F> {
    f: &'a F,
    evals: usize,
}

impl<F: Fn(&[f64]) -> f64> Counted<'_, F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// One Nelder–Mead descent (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2) from `x0`.
fn descend<F: Fn(&[f64]) -> f64>(
    f: &mut Counted<'_, F>,
    x0: &[f64],
    fx0: f64,
    opts: &NelderMeadOptions,
    budget_end: usize,
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        if f.evals >= budget_end {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += opts.step;
        let v = f.eval(&x);
        simplex.push((x, v));
    }
    if simplex.len() < n + 1 {
        let best = simplex
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        return (best.0, best.1, false);
    }

    let point = |c: &[f64], toward: &[f64], t: f64| -> Vec<f64> {
        c.iter()
            .zip(toward)
            .map(|(ci, ti)| ci + t * (ti - ci))
            .collect()
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            return (simplex[0].0.clone(), simplex[0].1, true);
        }
        if f.evals + 2 > budget_end {
            return (simplex[0].0.clone(), simplex[0].1, false);
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let (worst, f_worst) = simplex[n].clone();
        let (f_best, f_second) = (simplex[0].1, simplex[n - 1].1);

        let xr = point(&centroid, &worst, -1.0);
        let fr = f.eval(&xr);
        if fr < f_best {
            let xe = point(&centroid, &worst, -2.0);
            let fe = f.eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = point(&centroid, &xr, 0.5);
            let fc = f.eval(&xc);
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst, 0.5);
            let fc = f.eval(&xc);
            (xc, fc)
        };
        if fc < f_worst.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            if f.evals >= budget_end {
                break;
            }
            v.0 = point(&best, &v.0, 0.5);
            v.1 = f.eval(&v.0);
        }
    }
}

/// Minimizes `f` from `x0`, restarting a fresh simplex at the current best
/// point after each convergence until a restart no longer improves the value.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> LocalResult {
    let mut counted = Counted { f, evals: 0 };
    let mut x = x0.to_vec();
    let mut value = counted.eval(&x);
    let mut converged = false;
    while counted.evals < opts.max_evals {
        let (nx, nv, conv) = descend(&mut counted, &x, value, opts, opts.max_evals);
        let improved = nv < value;
        if nv <= value {
            x = nx;
            value = nv;
        }
        converged = conv;
        if !conv || !improved {
            break;
        }
    }
    LocalResult {
        x,
        value,
        evals: counted.evals,
        converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiStartOptions {
    pub starts: usize,
    /// Total evaluation budget across all starts.
    pub budget: usize,
    pub seed: u64,
    /// Fraction of starts refined with the second half of the budget.
    pub refine_fraction: f64,
    pub local: NelderMeadOptions,
}

impl MultiStartOptions {
    pub fn new(starts: usize, budget: usize, seed: u64) -> Self {
        Self {
            starts,
            budget,
            seed,
            refine_fraction: 0.05,
            local: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiStartResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub starts: usize,
    /// The best run stopped on its budget rather than on convergence.
    pub truncated: bool,
}

/// Minimizes `f` from `starts` points drawn by `sample_start` (start `s`
/// uses stream `s` of the seed). Half of the budget is split evenly over the
/// starts; the other half refines the best `refine_fraction` of them. Ties
/// break toward the lower start index, so the result does not depend on the
/// thread count.
pub fn multistart_minimize<F, S>(
    f: &F,
    sample_start: S,
    opts: &MultiStartOptions,
) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    let starts = opts.starts.max(1);
    let first_budget = (opts.budget / 2 / starts).max(1);
    let phase1: Vec<(usize, LocalResult)> = (0..starts)
        .into_par_iter()
        .map(|s| {
            let x0 = sample_start(&mut stream(opts.seed, s as u64));
            let local = NelderMeadOptions {
                max_evals: first_budget,
                ..opts.local
            };
            (s, nelder_mead(f, &x0, &local))
        })
        .collect();
    let mut used: usize = phase1.iter().map(|(_, r)| r.evals).sum();

    let mut ranked: Vec<&(usize, LocalResult)> = phase1.iter().collect();
    ranked.sort_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)));
    let n_refine = ((starts as f64 * opts.refine_fraction).ceil() as usize).clamp(1, starts);
    let refine_budget = opts.budget.saturating_sub(used) / n_refine;

    let refined: Vec<(usize, LocalResult)> = ranked[..n_refine]
        .par_iter()
        .map(|(s, r)| {
            if refine_budget == 0 {
                return (
                    *s,
                    LocalResult {
                        evals: 0,
                        ..r.clone()
                    },
                );
            }
            let local = NelderMeadOptions {
                max_evals: refine_budget,
                ..opts.local
            };
            let mut out = nelder_mead(f, &r.x, &local);
            if out.value > r.value {
                out.x = r.x.clone();
                out.value = r.value;
            }
            (*s, out)
        })
        .collect();
    used += refined.iter().map(|(_, r)| r.evals).sum::<usize>();

    let (_, best) = refined
        .iter()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("at least one refined start");
    MultiStartResult {
        best_x: best.x.clone(),
        best_value: best.value,
        evaluations: used,
        starts,
        truncated: !best.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    }

    #[test]
    fn quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2);
        let r = nelder_mead(&f, &[0.0, 0.0], &NelderMeadOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock_with_restarts() {
        let opts = NelderMeadOptions {
            max_evals: 50_000,
            ..Default::default()
        };
        let r = nelder_mead(&rosenbrock, &[-1.2, 1.0, 0.5], &opts);
        assert!(r.value < 1e-12, "{r:?}");
    }

    #[test]
    fn budget_is_respected() {
        let opts = NelderMeadOptions {
            max_evals: 37,
            ..Default::default()
        };
        let r = nelder_mead(&rosenbrock, &[-1.2, 1.0, 0.5, 0.1], &opts);
        assert!(r.evals <= 37);
        assert!(!r.converged);
    }

    #[test]
    fn multistart_is_deterministic_and_finds_global_minimum() {
        // two wells, the deeper one at x = 2
        let f =
            |x: &[f64]| ((x[0] + 1.0).powi(2) * (x[0] - 2.0).powi(2)) - 0.3 * x[0] + x[1].powi(2);
        let sample =
            |rng: &mut ChaCha8Rng| vec![rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0)];
        let opts = MultiStartOptions::new(20, 20_000, 9);
        let a = multistart_minimize(&f, sample, &opts);
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| multistart_minimize(&f, sample, &opts));
        assert_eq!(a, b);
        assert!((a.best_x[0] - 2.0).abs() < 0.1);
        assert!(a.evaluations <= 20_000);
    }
}
