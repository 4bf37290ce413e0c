//! Bounded multi-start Nelder-Mead maximization with an exact evaluation
//! budget per start.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub index: usize,
    pub start: Vec<f64>,
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    /// Start that produced the best value (lowest index on ties).
    pub best_start: usize,
    pub evaluations: usize,
    pub budget_exhausted: bool,
    pub starts: Vec<StartOutcome>,
}

struct Objective<'a, F> {
    f: &'a F,
    bounds: &'a [(f64, f64)],
    budget: usize,
    count: &'a AtomicUsize,
    best: &'a Mutex<Option<(f64, Vec<f64>)>>,
}

fn project(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
        .collect()
}

impl<F> CostFunction for Objective<'_, F>
where
    F: Fn(&[f64]) -> Option<f64>,
{
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        if self.count.fetch_add(1, Ordering::SeqCst) >= self.budget {
            return Ok(f64::INFINITY);
        }
        let y = project(x, self.bounds);
        match (self.f)(&y) {
            Some(v) if v.is_finite() => {
                let mut best = self.best.lock().unwrap();
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    *best = Some((v, y));
                }
                Ok(-v)
            }
            _ => Ok(f64::INFINITY),
        }
    }
}

/// Maximizes `f` over the box `bounds` from `starts` seeded start points.
/// Start `i` draws its point from stream `i` of the seed, so a run with more
/// starts visits a superset of the points of a run with fewer. `f` returns
/// `None` where it cannot be evaluated.
pub fn maximize<F>(
    f: &F,
    bounds: &[(f64, f64)],
    starts: usize,
    budget: usize,
    seed: u64,
) -> Result<OptimizeResult>
where
    F: Fn(&[f64]) -> Option<f64> + Sync,
{
    if bounds.is_empty() || bounds.iter().any(|(lo, hi)| !(lo <= hi)) {
        return Err(Error::param("optimizer needs non-empty, ordered bounds"));
    }
    if starts == 0 || budget < bounds.len() + 1 {
        return Err(Error::param(
            "optimizer needs at least one start and a budget above the simplex size",
        ));
    }
    let outcomes: Vec<StartOutcome> = (0..starts)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let start: Vec<f64> = bounds
                .iter()
                .map(|(lo, hi)| {
                    if lo == hi {
                        *lo
                    } else {
                        rng.gen_range(*lo..=*hi)
                    }
                })
                .collect();
            let mut simplex = vec![start.clone()];
            for (i, (lo, hi)) in bounds.iter().enumerate() {
                let step = 0.1 * (hi - lo).max(1e-3);
                let mut v = start.clone();
                v[i] = if start[i] + step <= *hi {
                    start[i] + step
                } else {
                    start[i] - step
                };
                simplex.push(v);
            }
            let count = AtomicUsize::new(0);
            let best = Mutex::new(None);
            let objective = Objective {
                f,
                bounds,
                budget,
                count: &count,
                best: &best,
            };
            let solver = NelderMead::new(simplex)
                .with_sd_tolerance(1e-12)
                .expect("valid tolerance");
            // Iterations are capped generously; the evaluation budget is
            // enforced inside the objective.
            let _ = Executor::new(objective, solver)
                .configure(|s| s.max_iters(budget as u64))
                .run();
            let evaluations = count.load(Ordering::SeqCst).min(budget);
            let (best_value, best_x) = best
                .into_inner()
                .unwrap()
                .unwrap_or((f64::NEG_INFINITY, start.clone()));
            StartOutcome {
                index,
                start,
                best_x,
                best_value,
                evaluations,
                budget_exhausted: evaluations >= budget,
            }
        })
        .collect();
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.best_value > outcomes[best].best_value {
            best = i;
        }
    }
    Ok(OptimizeResult {
        best_x: outcomes[best].best_x.clone(),
        best_value: outcomes[best].best_value,
        best_start: best,
        evaluations: outcomes.iter().map(|o| o.evaluations).sum(),
        budget_exhausted: outcomes.iter().any(|o| o.budget_exhausted),
        starts: outcomes,
    })
}
