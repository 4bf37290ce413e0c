//! Domains, exact boundary distance, graph flattening and the dyadic
//! decompositions used by the slab and exterior-domain arguments.

mod annulus;
mod domain;
mod dyadic;
mod graph;

pub use annulus::{annuli, Annulus};
pub use domain::{Domain, Polygon};
pub use dyadic::{dyadic_layers, parent_cube, DyadicCube, DyadicLayer};
pub use graph::{
    bilipschitz_bound, bilipschitz_empirical, flatten, graph_catalog, unflatten, LipschitzGraph,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A measurable set that quadrature can mask against and cast rays through.
///
/// `ray_intervals` returns the sorted, disjoint parameter intervals
/// `[a, b)` with `a >= 0` on which `origin + r * dir` lies in the set; `b`
/// may be infinite. `dir` is a unit vector.
pub trait Region: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[f64]) -> bool;
    fn ray_intervals(&self, origin: &[f64], dir: &[f64]) -> Vec<(f64, f64)>;
    fn bounding_box(&self) -> Option<BoxRegion>;
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = BoxRegion { lo, hi };
        b.validate()?;
        Ok(b)
    }

    pub fn cube(lo: &[f64], side: f64) -> Self {
        BoxRegion {
            lo: lo.to_vec(),
            hi: lo.iter().map(|v| v + side).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.is_empty() || self.lo.len() != self.hi.len() {
            return Err(Error::param("box corners must have equal, nonzero length"));
        }
        for (i, (l, h)) in self.lo.iter().zip(&self.hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(Error::param(format!(
                    "box axis {i}: need finite lo < hi, got [{l}, {h}]"
                )));
            }
        }
        Ok(())
    }

    pub fn measure(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn contains_box(&self, other: &BoxRegion) -> bool {
        self.contains_closed(&other.lo) && self.contains_closed(&other.hi)
    }

    pub fn intersect(&self, other: &BoxRegion) -> Option<BoxRegion> {
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi: Vec<f64> = self
            .hi
            .iter()
            .zip(&other.hi)
            .map(|(a, b)| a.min(*b))
            .collect();
        lo.iter()
            .zip(&hi)
            .all(|(l, h)| l < h)
            .then_some(BoxRegion { lo, hi })
    }

    pub fn disjoint_interiors(&self, other: &BoxRegion) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .any(|((l1, h1), (l2, h2))| h1 <= l2 || h2 <= l1)
    }

    /// Image under `x -> factor * x`.
    pub fn scaled(&self, factor: f64) -> BoxRegion {
        BoxRegion {
            lo: self.lo.iter().map(|v| v * factor).collect(),
            hi: self.hi.iter().map(|v| v * factor).collect(),
        }
    }

    /// Squared Euclidean distance from `x` to the closed box.
    pub fn distance_sq_to(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (l, h))| {
                let e = if v < l {
                    l - v
                } else if v > h {
                    v - h
                } else {
                    0.0
                };
                e * e
            })
            .sum()
    }

    /// Slab-method clip of the ray against the box, as `(t_in, t_out)` with
    /// `t_in` clamped to zero.
    pub fn ray_clip(&self, origin: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let mut t0 = 0.0_f64;
        let mut t1 = f64::INFINITY;
        for i in 0..self.lo.len() {
            if dir[i] == 0.0 {
                if origin[i] < self.lo[i] || origin[i] > self.hi[i] {
                    return None;
                }
                continue;
            }
            let a = (self.lo[i] - origin[i]) / dir[i];
            let b = (self.hi[i] - origin[i]) / dir[i];
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            t0 = t0.max(a);
            t1 = t1.min(b);
        }
        (t0 < t1).then_some((t0, t1))
    }
}

impl Region for BoxRegion {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *l < *v && *v < *h)
    }

    fn ray_intervals(&self, origin: &[f64], dir: &[f64]) -> Vec<(f64, f64)> {
        self.ray_clip(origin, dir).into_iter().collect()
    }

    fn bounding_box(&self) -> Option<BoxRegion> {
        Some(self.clone())
    }
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the sorted interval list `{r >= 0 : inside(r)}` given every
/// parameter at which membership can change.
pub(crate) fn intervals_from_breaks(
    mut breaks: Vec<f64>,
    inside: impl Fn(f64) -> bool,
) -> Vec<(f64, f64)> {
    breaks.retain(|r| r.is_finite() && *r > 0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut cuts = Vec::with_capacity(breaks.len() + 2);
    cuts.push(0.0);
    cuts.extend(breaks);
    cuts.push(f64::INFINITY);

    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let probe = if b.is_finite() {
            0.5 * (a + b)
        } else {
            2.0 * a + 1.0
        };
        if inside(probe) {
            match out.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => out.push((a, b)),
            }
        }
    }
    out
}

/// Intersection of two sorted interval lists.
pub(crate) fn intersect_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn box_ray_clip() {
        let b = BoxRegion::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let (a, e) = b.ray_clip(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert_eq!((a, e), (0.0, 0.5));
        let (a, e) = b.ray_clip(&[-1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert_eq!((a, e), (1.0, 2.0));
        assert!(b.ray_clip(&[-1.0, 1.0], &[-1.0, 0.0]).is_none());
    }

    #[test]
    fn interval_merging() {
        let iv = intervals_from_breaks(vec![1.0, 2.0, 3.0], |r| !(1.0..2.0).contains(&r));
        assert_eq!(iv, vec![(0.0, 1.0), (2.0, f64::INFINITY)]);
        let both = intersect_intervals(&iv, &[(0.5, 2.5)]);
        assert_eq!(both, vec![(0.5, 1.0), (2.0, 2.5)]);
    }
}
