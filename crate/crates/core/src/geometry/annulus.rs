use serde::{Deserialize, Serialize};

use crate::geometry::{
    dot, intersect_intervals, intervals_from_breaks, norm, unit_ball_volume, BoxRegion, Region,
};

/// `{x in R^d : inner < |x| <= outer}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
    pub d: usize,
}

impl Annulus {
    pub fn measure(&self) -> f64 {
        unit_ball_volume(self.d) * (self.outer.powi(self.d as i32) - self.inner.powi(self.d as i32))
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        let r = norm(x);
        self.inner <= r && r <= self.outer
    }

    /// Image under `x -> lambda * x`.
    pub fn scaled(&self, lambda: f64) -> Annulus {
        Annulus {
            inner: self.inner * lambda,
            outer: self.outer * lambda,
            d: self.d,
        }
    }
}

fn sphere_breaks(origin: &[f64], dir: &[f64], radius: f64) -> Vec<f64> {
    let b = dot(origin, dir);
    let c = dot(origin, origin) - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    vec![-b - sq, -b + sq]
}

impl Region for Annulus {
    fn dim(&self) -> usize {
        self.d
    }

    fn contains(&self, x: &[f64]) -> bool {
        let r = norm(x);
        self.inner < r && r <= self.outer
    }

    fn ray_intervals(&self, origin: &[f64], dir: &[f64]) -> Vec<(f64, f64)> {
        let outer = intervals_from_breaks(sphere_breaks(origin, dir, self.outer), |r| {
            let x: Vec<f64> = origin.iter().zip(dir).map(|(a, b)| a + r * b).collect();
            norm(&x) < self.outer
        });
        let not_inner = intervals_from_breaks(sphere_breaks(origin, dir, self.inner), |r| {
            let x: Vec<f64> = origin.iter().zip(dir).map(|(a, b)| a + r * b).collect();
            norm(&x) > self.inner
        });
        intersect_intervals(&outer, &not_inner)
    }

    fn bounding_box(&self) -> Option<BoxRegion> {
        Some(BoxRegion {
            lo: vec![-self.outer; self.d],
            hi: vec![self.outer; self.d],
        })
    }
}

/// `A_k = {2^k R < |x| <= 2^{k+1} R}` for `k = 0..=m`.
pub fn annuli(radius: f64, m: u32, d: usize) -> Vec<Annulus> {
    (0..=m as i32)
        .map(|k| Annulus {
            inner: 2f64.powi(k) * radius,
            outer: 2f64.powi(k + 1) * radius,
            d,
        })
        .collect()
}
