use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, LipschitzGraph};

/// `coeff * prod_i x_i^{powers[i]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// Continuous, piecewise-C^1 test functions with explicit gradients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `value` everywhere; only meaningful on bounded domains.
    Constant { value: f64 },
    /// `prod_i (1 - t_i^2)^2` with `t_i = (x_i - center_i) / radius_i`,
    /// zero outside the box `center +- radius`.
    TensorBump { center: Vec<f64>, radius: Vec<f64> },
    /// Truncated logarithm in `x_d` of depth `depth = |m|`, times a tensor
    /// bump in `x'` when `d >= 2`. With `t = log2(2 / x_d)`:
    /// `min(1, t / depth)`, multiplied by a linear cutoff `(1/2 - x_d) / (1/4)`
    /// on `x_d in [1/4, 1/2]` and by `(3 depth - t) / depth` for
    /// `t in [2 depth, 3 depth]`. Support in `x_d`: `[2^{1 - 3 depth}, 1/2]`.
    LogSpike {
        depth: u32,
        #[serde(default)]
        cross_center: Vec<f64>,
        #[serde(default)]
        cross_radius: Vec<f64>,
    },
    /// Polynomial, optionally multiplied by the tensor bump of `cutoff`.
    Polynomial {
        terms: Vec<Monomial>,
        cutoff: Option<BoxRegion>,
    },
    /// `factor * inner(x)`.
    Scaled {
        factor: f64,
        inner: Box<TestFunction>,
    },
    /// `inner(x / lambda)`.
    Dilated {
        lambda: f64,
        inner: Box<TestFunction>,
    },
    /// `inner(G(x))` with `G(xi) = (xi', xi_d + gamma(xi'))`.
    Pullback {
        graph: LipschitzGraph,
        inner: Box<TestFunction>,
    },
}

fn bump_factor(x: f64, c: f64, r: f64) -> (f64, f64) {
    let t = (x - c) / r;
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - t * t;
    (q * q, -4.0 * t * q / r)
}

fn tensor_bump(x: &[f64], center: &[f64], radius: &[f64]) -> (f64, Vec<f64>) {
    let factors: Vec<(f64, f64)> = x
        .iter()
        .zip(center.iter().zip(radius))
        .map(|(x, (c, r))| bump_factor(*x, *c, *r))
        .collect();
    let value: f64 = factors.iter().map(|f| f.0).product();
    let grad = (0..factors.len())
        .map(|i| {
            factors
                .iter()
                .enumerate()
                .map(|(j, f)| if i == j { f.1 } else { f.0 })
                .product()
        })
        .collect();
    (value, grad)
}

/// Profile of [`TestFunction::LogSpike`] and its derivative in `x_d`.
fn log_spike_profile(xd: f64, depth: f64) -> (f64, f64) {
    let lower = 2f64.powf(1.0 - 3.0 * depth);
    if xd >= 0.5 || xd <= lower {
        return (0.0, 0.0);
    }
    let ln2 = std::f64::consts::LN_2;
    let t = (2.0 / xd).log2();
    let dt = -1.0 / (xd * ln2);
    let (mut v, mut dv) = if t < depth {
        (t / depth, dt / depth)
    } else {
        (1.0, 0.0)
    };
    if xd > 0.25 {
        let c = (0.5 - xd) * 4.0;
        (v, dv) = (v * c, dv * c - 4.0 * v);
    }
    if t > 2.0 * depth {
        let c = (3.0 * depth - t) / depth;
        (v, dv) = (v * c, dv * c - v * dt / depth);
    }
    (v, dv)
}

impl TestFunction {
    pub fn constant(value: f64) -> Self {
        TestFunction::Constant { value }
    }

    pub fn bump(center: Vec<f64>, radius: Vec<f64>) -> Self {
        TestFunction::TensorBump { center, radius }
    }

    pub fn scaled(self, factor: f64) -> Self {
        TestFunction::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn dilated(self, lambda: f64) -> Self {
        TestFunction::Dilated {
            lambda,
            inner: Box::new(self),
        }
    }

    pub fn pullback(self, graph: LipschitzGraph) -> Self {
        TestFunction::Pullback {
            graph,
            inner: Box::new(self),
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            TestFunction::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::param("constant must be finite"));
                }
            }
            TestFunction::TensorBump { center, radius } => {
                if center.len() != d || radius.len() != d {
                    return Err(Error::param(format!("bump needs {d} centers and radii")));
                }
                if radius.iter().any(|r| !(r.is_finite() && *r > 0.0))
                    || center.iter().any(|c| !c.is_finite())
                {
                    return Err(Error::param("bump radii must be positive and finite"));
                }
            }
            TestFunction::LogSpike {
                depth,
                cross_center,
                cross_radius,
            } => {
                if *depth < 1 || *depth > 256 {
                    return Err(Error::param(format!(
                        "log-spike depth {depth} must lie in 1..=256"
                    )));
                }
                if cross_center.len() + 1 != d || cross_radius.len() + 1 != d {
                    return Err(Error::param(format!(
                        "log-spike needs {} cross-section centers and radii",
                        d - 1
                    )));
                }
                if cross_radius.iter().any(|r| !(*r > 0.0)) {
                    return Err(Error::param("log-spike cross radii must be positive"));
                }
            }
            TestFunction::Polynomial { terms, cutoff } => {
                if terms
                    .iter()
                    .any(|t| t.powers.len() != d || !t.coeff.is_finite())
                {
                    return Err(Error::param(format!(
                        "every monomial needs {d} powers and a finite coefficient"
                    )));
                }
                if let Some(b) = cutoff {
                    b.validate()?;
                    if b.lo.len() != d {
                        return Err(Error::param("cutoff box has the wrong dimension"));
                    }
                }
            }
            TestFunction::Scaled { factor, inner } => {
                if !factor.is_finite() {
                    return Err(Error::param("scale factor must be finite"));
                }
                inner.validate(d)?;
            }
            TestFunction::Dilated { lambda, inner } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::param("dilation factor must be positive"));
                }
                inner.validate(d)?;
            }
            TestFunction::Pullback { graph, inner } => {
                graph.validate(d)?;
                inner.validate(d)?;
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { value } => *value,
            TestFunction::TensorBump { center, radius } => x
                .iter()
                .zip(center.iter().zip(radius))
                .map(|(x, (c, r))| bump_factor(*x, *c, *r).0)
                .product(),
            TestFunction::LogSpike {
                depth,
                cross_center,
                cross_radius,
            } => {
                let d = x.len();
                let profile = log_spike_profile(x[d - 1], *depth as f64).0;
                if profile == 0.0 {
                    return 0.0;
                }
                let cross: f64 = x[..d - 1]
                    .iter()
                    .zip(cross_center.iter().zip(cross_radius))
                    .map(|(x, (c, r))| bump_factor(*x, *c, *r).0)
                    .product();
                profile * cross
            }
            TestFunction::Polynomial { terms, cutoff } => {
                let cut = match cutoff {
                    Some(b) => {
                        let c = b.center();
                        let r: Vec<f64> = (0..c.len()).map(|i| 0.5 * b.side(i)).collect();
                        tensor_bump(x, &c, &r).0
                    }
                    None => 1.0,
                };
                if cut == 0.0 {
                    return 0.0;
                }
                cut * terms
                    .iter()
                    .map(|t| {
                        t.coeff
                            * x.iter()
                                .zip(&t.powers)
                                .map(|(v, k)| v.powi(*k as i32))
                                .product::<f64>()
                    })
                    .sum::<f64>()
            }
            TestFunction::Scaled { factor, inner } => factor * inner.value(x),
            TestFunction::Dilated { lambda, inner } => {
                let y: Vec<f64> = x.iter().map(|v| v / lambda).collect();
                inner.value(&y)
            }
            TestFunction::Pullback { graph, inner } => {
                inner.value(&crate::geometry::unflatten(graph, x))
            }
        }
    }

    /// Gradient where it exists; one-sided at the finitely many kinks.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        match self {
            TestFunction::Constant { .. } => vec![0.0; d],
            TestFunction::TensorBump { center, radius } => tensor_bump(x, center, radius).1,
            TestFunction::LogSpike {
                depth,
                cross_center,
                cross_radius,
            } => {
                let (p, dp) = log_spike_profile(x[d - 1], *depth as f64);
                if p == 0.0 && dp == 0.0 {
                    return vec![0.0; d];
                }
                let (c, mut grad) = tensor_bump(&x[..d - 1], cross_center, cross_radius);
                let c = if d == 1 { 1.0 } else { c };
                grad.iter_mut().for_each(|g| *g *= p);
                grad.push(dp * c);
                grad
            }
            TestFunction::Polynomial { terms, cutoff } => {
                let poly: f64 = terms
                    .iter()
                    .map(|t| {
                        t.coeff
                            * x.iter()
                                .zip(&t.powers)
                                .map(|(v, k)| v.powi(*k as i32))
                                .product::<f64>()
                    })
                    .sum();
                let poly_grad: Vec<f64> = (0..d)
                    .map(|i| {
                        terms
                            .iter()
                            .filter(|t| t.powers[i] > 0)
                            .map(|t| {
                                t.coeff
                                    * t.powers[i] as f64
                                    * x.iter()
                                        .zip(&t.powers)
                                        .enumerate()
                                        .map(|(j, (v, k))| {
                                            if j == i {
                                                v.powi(*k as i32 - 1)
                                            } else {
                                                v.powi(*k as i32)
                                            }
                                        })
                                        .product::<f64>()
                            })
                            .sum()
                    })
                    .collect();
                match cutoff {
                    None => poly_grad,
                    Some(b) => {
                        let c = b.center();
                        let r: Vec<f64> = (0..d).map(|i| 0.5 * b.side(i)).collect();
                        let (cv, cg) = tensor_bump(x, &c, &r);
                        (0..d).map(|i| cv * poly_grad[i] + poly * cg[i]).collect()
                    }
                }
            }
            TestFunction::Scaled { factor, inner } => {
                inner.gradient(x).into_iter().map(|g| factor * g).collect()
            }
            TestFunction::Dilated { lambda, inner } => {
                let y: Vec<f64> = x.iter().map(|v| v / lambda).collect();
                inner.gradient(&y).into_iter().map(|g| g / lambda).collect()
            }
            TestFunction::Pullback { graph, inner } => {
                let y = crate::geometry::unflatten(graph, x);
                let mut g = inner.gradient(&y);
                let dg = graph.gradient(&x[..d - 1]);
                let gd = g[d - 1];
                for i in 0..d - 1 {
                    g[i] += gd * dg[i];
                }
                g
            }
        }
    }

    /// A closed box outside of which the function vanishes; `None` when the
    /// function has no compact support.
    pub fn support_box(&self) -> Option<BoxRegion> {
        match self {
            TestFunction::Constant { .. } => None,
            TestFunction::TensorBump { center, radius } => Some(BoxRegion {
                lo: center.iter().zip(radius).map(|(c, r)| c - r).collect(),
                hi: center.iter().zip(radius).map(|(c, r)| c + r).collect(),
            }),
            TestFunction::LogSpike {
                depth,
                cross_center,
                cross_radius,
            } => {
                let mut lo: Vec<f64> = cross_center
                    .iter()
                    .zip(cross_radius)
                    .map(|(c, r)| c - r)
                    .collect();
                let mut hi: Vec<f64> = cross_center
                    .iter()
                    .zip(cross_radius)
                    .map(|(c, r)| c + r)
                    .collect();
                lo.push(2f64.powf(1.0 - 3.0 * *depth as f64));
                hi.push(0.5);
                Some(BoxRegion { lo, hi })
            }
            TestFunction::Polynomial { cutoff, .. } => cutoff.clone(),
            TestFunction::Scaled { inner, .. } => inner.support_box(),
            TestFunction::Dilated { lambda, inner } => {
                inner.support_box().map(|b| b.scaled(*lambda))
            }
            TestFunction::Pullback { graph, inner } => inner.support_box().map(|b| {
                // Preimage of the box under G lies between the graph-shifted faces.
                let d = b.lo.len();
                let (gmin, gmax) = graph.range_over_box(&b.lo[..d - 1], &b.hi[..d - 1]);
                let mut lo = b.lo.clone();
                let mut hi = b.hi.clone();
                lo[d - 1] -= gmax;
                hi[d - 1] -= gmin;
                BoxRegion { lo, hi }
            }),
        }
    }
}
