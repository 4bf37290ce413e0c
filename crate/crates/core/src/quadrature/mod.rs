//! Deterministic tensor-product quadrature, the test-function catalog and
//! the Gagliardo seminorm.
//!
//! Every sum is split into fixed-size blocks in a fixed traversal order,
//! each block is accumulated with Neumaier compensation, and the block sums
//! are combined by a fixed pairwise tree. The result therefore does not
//! depend on how many worker threads evaluate the blocks.

mod function;
mod grid;
mod integrate;
mod kernel;
mod seminorm;

pub use function::{Monomial, TestFunction};
pub use grid::{Cell, GridSpec, Spacing};
pub use integrate::{average, integrate, integrate_cells, lp_norm};
pub use kernel::{gauss_legendre, self_interaction};
pub use seminorm::{
    gagliardo_seminorm, gagliardo_seminorm_parts, PairLoop, SeminormOptions, SeminormParts,
};

use rayon::prelude::*;

use crate::error::Result;

/// Terms per reduction block.
pub(crate) const BLOCK: usize = 64;

/// Neumaier's variant of Kahan compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pairwise sum with a split point that depends only on the length.
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            tree_sum(&values[..mid]) + tree_sum(&values[mid..])
        }
    }
}

/// `sum_{i < n} term(i)`, bitwise independent of the thread count.
/// The first error in traversal order wins.
pub fn deterministic_sum<F>(n: usize, term: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let blocks: Vec<Result<f64>> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = Neumaier::default();
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                acc.add(term(i)?);
            }
            Ok(acc.value())
        })
        .collect();
    let sums = blocks.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(tree_sum(&sums))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = Neumaier::default();
        acc.add(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn sum_is_thread_count_independent() {
        let f = |i: usize| Ok(((i as f64) * 0.37).sin() / (1.0 + i as f64));
        let reference = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| deterministic_sum(100_003, f))
            .unwrap();
        for threads in [2, 3, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let v = pool.install(|| deterministic_sum(100_003, f)).unwrap();
            assert_eq!(v.to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn first_error_in_order_is_reported() {
        let r = deterministic_sum(1000, |i| {
            if i == 300 || i == 900 {
                Err(crate::Error::param(format!("bad {i}")))
            } else {
                Ok(1.0)
            }
        });
        assert_eq!(r.unwrap_err().to_string(), "invalid parameter: bad 300");
    }
}
