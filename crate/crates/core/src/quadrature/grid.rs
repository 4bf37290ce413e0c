use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoxRegion;

/// Placement of cell breaks along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Uniform,
    /// Breaks `lo * (hi/lo)^{j/N}`; needs `lo > 0`. Resolves profiles that
    /// vary on a logarithmic scale near `x = 0`.
    Geometric,
}

/// Tensor grid of midpoint cells tiling `support` exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub support: BoxRegion,
    /// Cells per axis; each a power of two, at least 8.
    pub cells: Vec<usize>,
    pub spacing: Vec<Spacing>,
}

/// One midpoint cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub center: Vec<f64>,
    pub sides: Vec<f64>,
    pub weight: f64,
    /// Per-axis cell indices, row-major with axis 0 slowest.
    pub index: Vec<usize>,
}

pub(crate) fn check_resolution(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::param(format!(
            "resolution {n} must be a power of two >= 8"
        )));
    }
    Ok(())
}

impl GridSpec {
    pub fn new(support: BoxRegion, cells: Vec<usize>, spacing: Vec<Spacing>) -> Result<Self> {
        let g = GridSpec {
            support,
            cells,
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.support.validate()?;
        let d = self.support.lo.len();
        if self.cells.len() != d || self.spacing.len() != d {
            return Err(Error::param(
                "grid needs one cell count and one spacing per axis",
            ));
        }
        for (axis, n) in self.cells.iter().enumerate() {
            check_resolution(*n)?;
            if self.spacing[axis] == Spacing::Geometric && !(self.support.lo[axis] > 0.0) {
                return Err(Error::param(format!(
                    "geometric spacing on axis {axis} needs lo > 0"
                )));
            }
        }
        Ok(())
    }

    /// `n` uniform cells per axis.
    pub fn uniform(support: BoxRegion, n: usize) -> Result<Self> {
        let d = support.lo.len();
        Self::new(support, vec![n; d], vec![Spacing::Uniform; d])
    }

    /// Near-cubic uniform cells: the shortest side gets `base` cells, the
    /// others the next power of two keeping the aspect ratio at most 2.
    pub fn balanced(support: BoxRegion, base: usize) -> Result<Self> {
        check_resolution(base)?;
        let d = support.lo.len();
        let min_side = (0..d)
            .map(|i| support.side(i))
            .fold(f64::INFINITY, f64::min);
        let cells = (0..d)
            .map(|i| {
                let want = (base as f64 * support.side(i) / min_side).round().max(1.0) as usize;
                want.next_power_of_two().max(8)
            })
            .collect();
        Self::new(support, cells, vec![Spacing::Uniform; d])
    }

    /// Geometric spacing on `axis` with about `per_octave` cells per factor
    /// of two (rounded up to a power of two); `other` uniform cells elsewhere.
    pub fn log_graded(
        support: BoxRegion,
        axis: usize,
        per_octave: usize,
        other: usize,
    ) -> Result<Self> {
        let d = support.lo.len();
        if !(support.lo[axis] > 0.0) {
            return Err(Error::param("log-graded axis needs lo > 0"));
        }
        let octaves = (support.hi[axis] / support.lo[axis]).log2();
        let n = ((octaves * per_octave as f64).ceil() as usize)
            .next_power_of_two()
            .max(8);
        let mut cells = vec![other; d];
        cells[axis] = n;
        let mut spacing = vec![Spacing::Uniform; d];
        spacing[axis] = Spacing::Geometric;
        Self::new(support, cells, spacing)
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().product()
    }

    /// Same layout with every axis refined by two.
    pub fn refined(&self) -> Self {
        GridSpec {
            cells: self.cells.iter().map(|n| 2 * n).collect(),
            ..self.clone()
        }
    }

    /// Image under `x -> lambda * x`, `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        GridSpec {
            support: self.support.scaled(lambda),
            ..self.clone()
        }
    }

    /// Cell breaks along `axis`, exact at both ends.
    pub fn axis_breaks(&self, axis: usize) -> Vec<f64> {
        let (lo, hi, n) = (
            self.support.lo[axis],
            self.support.hi[axis],
            self.cells[axis],
        );
        let mut breaks: Vec<f64> = (0..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                match self.spacing[axis] {
                    Spacing::Uniform => lo + t * (hi - lo),
                    Spacing::Geometric => lo * (hi / lo).powf(t),
                }
            })
            .collect();
        breaks[0] = lo;
        breaks[n] = hi;
        breaks
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> Vec<Cell> {
        let d = self.dim();
        let axes: Vec<Vec<f64>> = (0..d).map(|a| self.axis_breaks(a)).collect();
        let total = self.cell_count();
        let mut out = Vec::with_capacity(total);
        let mut index = vec![0usize; d];
        for _ in 0..total {
            let center: Vec<f64> = (0..d)
                .map(|a| 0.5 * (axes[a][index[a]] + axes[a][index[a] + 1]))
                .collect();
            let sides: Vec<f64> = (0..d)
                .map(|a| axes[a][index[a] + 1] - axes[a][index[a]])
                .collect();
            let weight = sides.iter().product();
            out.push(Cell {
                center,
                sides,
                weight,
                index: index.clone(),
            });
            for a in (0..d).rev() {
                index[a] += 1;
                if index[a] < self.cells[a] {
                    break;
                }
                index[a] = 0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_tile_support() {
        let b = BoxRegion::new(vec![0.0, -1.0], vec![1.0, 2.0]).unwrap();
        let g = GridSpec::uniform(b.clone(), 16).unwrap();
        let cells = g.cells();
        assert_eq!(cells.len(), 256);
        let total: f64 = cells.iter().map(|c| c.weight).sum();
        assert!((total - 3.0).abs() < 1e-13);
        assert_eq!(cells[1].index, vec![0, 1]);
    }

    #[test]
    fn geometric_breaks() {
        let b = BoxRegion::new(vec![1.0 / 1024.0], vec![1.0]).unwrap();
        let g = GridSpec::log_graded(b, 0, 4, 8).unwrap();
        assert_eq!(g.cells[0], 64);
        let br = g.axis_breaks(0);
        assert_eq!(br[0], 1.0 / 1024.0);
        assert_eq!(br[64], 1.0);
        for w in br.windows(3) {
            let r1 = w[1] / w[0];
            let r2 = w[2] / w[1];
            assert!((r1 - r2).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_cells_are_near_cubic() {
        let b = BoxRegion::new(vec![-1.0, 0.25], vec![1.0, 0.5]).unwrap();
        let g = GridSpec::balanced(b, 8).unwrap();
        assert_eq!(g.cells, vec![64, 8]);
    }

    #[test]
    fn rejects_bad_resolution() {
        let b = BoxRegion::new(vec![0.0], vec![1.0]).unwrap();
        assert!(GridSpec::uniform(b.clone(), 12).is_err());
        assert!(GridSpec::uniform(b.clone(), 4).is_err());
        let b0 = BoxRegion::new(vec![0.0], vec![1.0]).unwrap();
        assert!(GridSpec::new(b0, vec![8], vec![Spacing::Geometric]).is_err());
    }
}
