//! Closed-form Lipschitz graphs `gamma: R^{d-1} -> R` and the flattening map
//! `F(x) = (x', x_d - gamma(x'))` with inverse `G(xi) = (xi', xi_d + gamma(xi'))`.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::norm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LipschitzGraph {
    Zero,
    /// `gamma(x') = slope . x' + offset`.
    Affine {
        slope: Vec<f64>,
        offset: f64,
    },
    /// `gamma(x') = slope * |x'|`.
    Cone {
        slope: f64,
    },
    /// One-dimensional interpolant through `(knots[i], values[i])`, extended
    /// as a constant outside the knot range. Only valid for `d = 2`.
    PiecewiseLinear {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

impl LipschitzGraph {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            LipschitzGraph::Zero => Ok(()),
            LipschitzGraph::Affine { slope, offset } => {
                if slope.len() + 1 != d {
                    return Err(Error::param(format!(
                        "affine graph slope has {} entries, expected {}",
                        slope.len(),
                        d.saturating_sub(1)
                    )));
                }
                if !offset.is_finite() || slope.iter().any(|v| !v.is_finite()) {
                    return Err(Error::param("affine graph coefficients must be finite"));
                }
                Ok(())
            }
            LipschitzGraph::Cone { slope } => {
                if !(slope.is_finite() && *slope >= 0.0) {
                    return Err(Error::param("cone slope must be finite and >= 0"));
                }
                Ok(())
            }
            LipschitzGraph::PiecewiseLinear { knots, values } => {
                if d != 2 {
                    return Err(Error::param("piecewise-linear graphs require d = 2"));
                }
                if knots.len() < 2 || knots.len() != values.len() {
                    return Err(Error::param(
                        "piecewise-linear graph needs >= 2 knots with matching values",
                    ));
                }
                if knots.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::param(
                        "piecewise-linear knots must be strictly increasing",
                    ));
                }
                if values.iter().chain(knots).any(|v| !v.is_finite()) {
                    return Err(Error::param("piecewise-linear graph must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, xp: &[f64]) -> f64 {
        match self {
            LipschitzGraph::Zero => 0.0,
            LipschitzGraph::Affine { slope, offset } => {
                offset + slope.iter().zip(xp).map(|(a, x)| a * x).sum::<f64>()
            }
            LipschitzGraph::Cone { slope } => slope * norm(xp),
            LipschitzGraph::PiecewiseLinear { knots, values } => {
                let t = xp[0];
                let n = knots.len();
                if t <= knots[0] {
                    return values[0];
                }
                if t >= knots[n - 1] {
                    return values[n - 1];
                }
                let i = knots.partition_point(|k| *k <= t) - 1;
                let w = (t - knots[i]) / (knots[i + 1] - knots[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    /// Gradient where it exists; at kinks returns a one-sided value.
    pub fn gradient(&self, xp: &[f64]) -> Vec<f64> {
        match self {
            LipschitzGraph::Zero => vec![0.0; xp.len()],
            LipschitzGraph::Affine { slope, .. } => slope.clone(),
            LipschitzGraph::Cone { slope } => {
                let r = norm(xp);
                if r == 0.0 {
                    vec![0.0; xp.len()]
                } else {
                    xp.iter().map(|v| slope * v / r).collect()
                }
            }
            LipschitzGraph::PiecewiseLinear { knots, values } => {
                let t = xp[0];
                let n = knots.len();
                if t < knots[0] || t >= knots[n - 1] {
                    return vec![0.0];
                }
                let i = knots.partition_point(|k| *k <= t) - 1;
                vec![(values[i + 1] - values[i]) / (knots[i + 1] - knots[i])]
            }
        }
    }

    /// Exact `(min, max)` of `gamma` over the closed box `[lo', hi']`.
    pub fn range_over_box(&self, lo: &[f64], hi: &[f64]) -> (f64, f64) {
        let dp = lo.len();
        if dp == 0 {
            let v = self.eval(&[]);
            return (v, v);
        }
        let corner_range = || {
            (0..1usize << dp)
                .map(|mask| {
                    let c: Vec<f64> = (0..dp)
                        .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                        .collect();
                    self.eval(&c)
                })
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(v), b.max(v))
                })
        };
        match self {
            LipschitzGraph::Zero => (0.0, 0.0),
            LipschitzGraph::Affine { .. } => corner_range(),
            LipschitzGraph::Cone { slope } => {
                // Convex: the max sits at a corner, the min at the point nearest the apex.
                let nearest: Vec<f64> =
                    lo.iter().zip(hi).map(|(l, h)| 0f64.clamp(*l, *h)).collect();
                (slope * norm(&nearest), corner_range().1)
            }
            LipschitzGraph::PiecewiseLinear { knots, .. } => knots
                .iter()
                .filter(|k| **k > lo[0] && **k < hi[0])
                .chain([lo[0], hi[0]].iter())
                .map(|t| self.eval(&[*t]))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                    (a.min(v), b.max(v))
                }),
        }
    }

    /// Exact Lipschitz constant `M` of the catalog rule.
    pub fn lipschitz_constant(&self) -> f64 {
        match self {
            LipschitzGraph::Zero => 0.0,
            LipschitzGraph::Affine { slope, .. } => norm(slope),
            LipschitzGraph::Cone { slope } => *slope,
            LipschitzGraph::PiecewiseLinear { knots, values } => knots
                .windows(2)
                .zip(values.windows(2))
                .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// `F(x) = (x', x_d - gamma(x'))`.
pub fn flatten(graph: &LipschitzGraph, x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut out = x.to_vec();
    out[d - 1] -= graph.eval(&x[..d - 1]);
    out
}

/// `G(xi) = (xi', xi_d + gamma(xi'))`, the inverse of [`flatten`].
pub fn unflatten(graph: &LipschitzGraph, xi: &[f64]) -> Vec<f64> {
    let d = xi.len();
    let mut out = xi.to_vec();
    out[d - 1] += graph.eval(&xi[..d - 1]);
    out
}

/// `sqrt(2 M^2 + 2)`, an upper bound for the Lipschitz constants of both
/// `F` and `G`.
pub fn bilipschitz_bound(m: f64) -> Result<f64> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::param(format!(
            "Lipschitz constant must be finite and >= 0, got {m}"
        )));
    }
    Ok((2.0 * m * m + 2.0).sqrt())
}

/// Representative graphs `(d, gamma)` covering every rule.
pub fn graph_catalog() -> Vec<(usize, LipschitzGraph)> {
    vec![
        (2, LipschitzGraph::Zero),
        (
            2,
            LipschitzGraph::Affine {
                slope: vec![0.7],
                offset: -0.2,
            },
        ),
        (
            3,
            LipschitzGraph::Affine {
                slope: vec![1.5, -2.0],
                offset: 0.3,
            },
        ),
        (2, LipschitzGraph::Cone { slope: 1.0 }),
        (3, LipschitzGraph::Cone { slope: 2.5 }),
        (
            2,
            LipschitzGraph::PiecewiseLinear {
                knots: vec![-1.0, 0.0, 0.5, 2.0],
                values: vec![0.0, 1.0, -0.5, 0.25],
            },
        ),
    ]
}

/// Largest observed distortion `max(|F x - F y| / |x - y|, |x - y| / |F x - F y|)`
/// over `pairs` seeded random pairs in `[-radius, radius]^d`.
pub fn bilipschitz_empirical(
    graph: &LipschitzGraph,
    d: usize,
    pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<f64> {
    graph.validate(d)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param("sampling radius must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-radius..radius)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-radius..radius)).collect();
        let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let fx = flatten(graph, &x);
        let fy = flatten(graph, &y);
        let df: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
        let (nx, nf) = (norm(&dx), norm(&df));
        if nx > 0.0 && nf > 0.0 {
            worst = worst.max(nf / nx).max(nx / nf);
        }
    }
    Ok(worst)
}
