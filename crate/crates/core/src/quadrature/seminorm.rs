//! Gagliardo seminorm
//! `[u]^p = int_D int_D |u(x) - u(y)|^p |x - y|^{-d-sp} dx dy`
//! for `u` supported in the grid box `S`:
//!
//! - near field: midpoint rule over pairs of distinct cells of `S ∩ D`;
//! - diagonal: each cell contributes `L^p int_Q int_Q |x-y|^{p-d-sp}` with
//!   `L = |grad u(center)|`, integrated in closed form;
//! - tail: `2 int_{S∩D} |u(x)|^p T(x) dx` with
//!   `T(x) = int_{D \ S} |x - y|^{-d-sp} dy`, evaluated exactly along rays
//!   (`int_a^b r^{-1-sp} dr`) and by quadrature over directions only.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::params::FracParams;
use crate::quadrature::{
    deterministic_sum, gauss_legendre, self_interaction, tree_sum, GridSpec, Neumaier,
    TestFunction, BLOCK,
};

/// Which ordered cell pairs the near-field loop visits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLoop {
    /// `2 sum_i sum_{j > i}` (the default, exploiting symmetry).
    #[default]
    Upper,
    /// `2 sum_i sum_{j < i}`, the transposed loop.
    Lower,
    /// `sum_i sum_{j != i}` without symmetry.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormOptions {
    /// Directions for the tail: circle nodes for `d = 2`, azimuthal nodes
    /// (with half as many polar Gauss nodes) for `d = 3`.
    pub angular_nodes: usize,
    /// Optional cap on `|x - y|` in the tail; `None` integrates to infinity.
    pub truncation_radius: Option<f64>,
    pub pair_loop: PairLoop,
}

impl Default for SeminormOptions {
    fn default() -> Self {
        SeminormOptions {
            angular_nodes: 256,
            truncation_radius: None,
            pair_loop: PairLoop::Upper,
        }
    }
}

/// The `p`-th power of the seminorm and its three parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormParts {
    pub near: f64,
    pub diagonal: f64,
    pub tail: f64,
    pub total: f64,
    pub cells: usize,
}

impl SeminormParts {
    pub fn seminorm(&self, p: f64) -> f64 {
        self.total.powf(1.0 / p)
    }
}

struct CellData {
    dim: usize,
    centers: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    shape: Vec<usize>,
    /// Sides of each distinct cell shape.
    shape_sides: Vec<Vec<f64>>,
}

impl CellData {
    fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }
}

fn directions(d: usize, n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    Ok(match d {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => (0..n)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                (vec![t.cos(), t.sin()], 2.0 * PI / n as f64)
            })
            .collect(),
        3 => {
            let mut out = Vec::new();
            for (z, wz) in gauss_legendre((n / 2).max(2), -1.0, 1.0) {
                let rho = (1.0 - z * z).sqrt();
                for k in 0..n {
                    let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                    out.push((
                        vec![rho * t.cos(), rho * t.sin(), z],
                        wz * 2.0 * PI / n as f64,
                    ));
                }
            }
            out
        }
        _ => {
            return Err(Error::UnsupportedDomain(format!(
                "seminorm quadrature supports d <= 3, got {d}"
            )))
        }
    })
}

/// `int_{D \ S} |x - y|^{-d-sp} dy` by exact radial integration per direction.
fn tail_kernel(
    x: &[f64],
    grid: &GridSpec,
    domain: &dyn Region,
    sp: f64,
    dirs: &[(Vec<f64>, f64)],
    cap: Option<f64>,
) -> f64 {
    let mut acc = Neumaier::default();
    for (w, weight) in dirs {
        let exit = match grid.support.ray_clip(x, w) {
            Some((_, t1)) => t1,
            None => 0.0,
        };
        let mut along = 0.0;
        for (a, b) in domain.ray_intervals(x, w) {
            let a = a.max(exit);
            let b = match cap {
                Some(c) => b.min(c),
                None => b,
            };
            if a < b {
                let hi = if b.is_finite() { b.powf(-sp) } else { 0.0 };
                along += (a.powf(-sp) - hi) / sp;
            }
        }
        acc.add(weight * along);
    }
    acc.value()
}

fn check_support(u: &TestFunction, domain: &dyn Region, grid: &GridSpec) -> Result<()> {
    let eps = 1e-12;
    let covered = |b: &crate::geometry::BoxRegion| {
        (0..b.lo.len()).all(|i| {
            let tol = eps * (1.0 + b.lo[i].abs().max(b.hi[i].abs()));
            grid.support.lo[i] <= b.lo[i] + tol && b.hi[i] <= grid.support.hi[i] + tol
        })
    };
    let relevant = match (u.support_box(), domain.bounding_box()) {
        (Some(s), Some(d)) => s.intersect(&d),
        (Some(s), None) => Some(s),
        (None, Some(d)) => Some(d),
        (None, None) => {
            return Err(Error::param(
                "a function without compact support needs a bounded domain",
            ));
        }
    };
    match relevant {
        Some(b) if !covered(&b) => Err(Error::param(format!(
            "grid box {:?}..{:?} does not cover the function support within the domain {:?}..{:?}",
            grid.support.lo, grid.support.hi, b.lo, b.hi
        ))),
        _ => Ok(()),
    }
}

fn gather(u: &TestFunction, domain: &dyn Region, grid: &GridSpec) -> Result<CellData> {
    let d = grid.dim();
    let mut data = CellData {
        dim: d,
        centers: vec![],
        weights: vec![],
        values: vec![],
        slopes: vec![],
        shape: vec![],
        shape_sides: vec![],
    };
    let mut shapes: HashMap<Vec<u64>, usize> = HashMap::new();
    for cell in grid.cells() {
        if !domain.contains(&cell.center) {
            continue;
        }
        let v = u.value(&cell.center);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                node: cell.center,
                value: v,
            });
        }
        let g = u.gradient(&cell.center);
        let scale = g.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let slope = if scale == 0.0 {
            0.0
        } else {
            scale * g.iter().map(|a| (a / scale).powi(2)).sum::<f64>().sqrt()
        };
        if !slope.is_finite() {
            return Err(Error::NonFinite {
                node: cell.center,
                value: slope,
            });
        }
        let key: Vec<u64> = cell.sides.iter().map(|s| s.to_bits()).collect();
        let id = match shapes.get(&key) {
            Some(id) => *id,
            None => {
                shapes.insert(key, data.shape_sides.len());
                data.shape_sides.push(cell.sides.clone());
                data.shape_sides.len() - 1
            }
        };
        data.centers.extend_from_slice(&cell.center);
        data.weights.push(cell.weight);
        data.values.push(v);
        data.slopes.push(slope);
        data.shape.push(id);
    }
    Ok(data)
}

/// `|u_i - u_j|^p w_i w_j / r^{d+sp}`, arranged as `(w_i/r^d)(w_j/r^d) r^{d-sp}`
/// so that log-graded cells near `x = 0` neither overflow nor underflow.
#[inline]
fn pair_term(
    data: &CellData,
    i: usize,
    j: usize,
    p: f64,
    p_int: Option<i32>,
    d_minus_sp: f64,
) -> f64 {
    let diff = (data.values[i] - data.values[j]).abs();
    if diff == 0.0 {
        return 0.0;
    }
    let (a, b) = (data.center(i), data.center(j));
    let r = if data.dim == 1 {
        (a[0] - b[0]).abs()
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let rd = r.powi(data.dim as i32);
    let radial = if d_minus_sp == 0.0 {
        1.0
    } else if d_minus_sp == 1.0 {
        r
    } else {
        r.powf(d_minus_sp)
    };
    let num = match p_int {
        Some(k) => diff.powi(k),
        None => diff.powf(p),
    };
    num * (data.weights[i] / rd) * (data.weights[j] / rd) * radial
}

/// `[u]_{W^{s,p}(D)}` with default options.
pub fn gagliardo_seminorm(
    u: &TestFunction,
    domain: &dyn Region,
    fp: &FracParams,
    grid: &GridSpec,
) -> Result<f64> {
    let parts = gagliardo_seminorm_parts(u, domain, fp, grid, &SeminormOptions::default())?;
    Ok(parts.seminorm(fp.p_f64()))
}

/// `[u]^p` split into near field, diagonal patch and tail.
pub fn gagliardo_seminorm_parts(
    u: &TestFunction,
    domain: &dyn Region,
    fp: &FracParams,
    grid: &GridSpec,
    opts: &SeminormOptions,
) -> Result<SeminormParts> {
    let d = grid.dim();
    if domain.dim() != d || fp.d != d {
        return Err(Error::param(format!(
            "dimension mismatch: grid {d}, domain {}, params {}",
            domain.dim(),
            fp.d
        )));
    }
    if let Some(c) = opts.truncation_radius {
        if !(c > 0.0) {
            return Err(Error::param("truncation radius must be positive"));
        }
    }
    u.validate(d)?;
    check_support(u, domain, grid)?;
    let dirs = directions(d, opts.angular_nodes.max(8))?;
    let p = fp.p_f64();
    let sp = fp.sp_f64();
    let p_int = (fp.p.is_integer() && p <= 64.0).then_some(p as i32);
    let d_minus_sp = d as f64 - sp;

    let data = gather(u, domain, grid)?;
    let n = data.values.len();

    // Near field: rows in fixed blocks, each row summed in a fixed order.
    let row = |i: usize| -> f64 {
        let mut acc = Neumaier::default();
        let range = match opts.pair_loop {
            PairLoop::Upper => i + 1..n,
            PairLoop::Lower => 0..i,
            PairLoop::Full => 0..n,
        };
        for j in range {
            if j != i {
                acc.add(pair_term(&data, i, j, p, p_int, d_minus_sp));
            }
        }
        acc.value()
    };
    let block_sums: Vec<f64> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = Neumaier::default();
            for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
                acc.add(row(i));
            }
            acc.value()
        })
        .collect();
    let pair_sum = tree_sum(&block_sums);
    let near = if opts.pair_loop == PairLoop::Full {
        pair_sum
    } else {
        2.0 * pair_sum
    };

    // Diagonal patch, one closed-form kernel integral per cell shape. The
    // integral is homogeneous of degree `d + p - sp` in the sides, so it is
    // stored as `(h, I(sides/h))` and combined as `(L h)^p h^{d-sp} I`,
    // which stays finite for huge slopes on tiny cells.
    let gamma = p - d as f64 - sp;
    let self_terms: Vec<(f64, f64)> = data
        .shape_sides
        .iter()
        .map(|s| {
            let h = s.iter().cloned().fold(0.0, f64::max);
            let unit: Vec<f64> = s.iter().map(|x| x / h).collect();
            (h, self_interaction(&unit, gamma))
        })
        .collect();
    let diagonal = deterministic_sum(n, |i| {
        let l = data.slopes[i];
        let (h, unit) = self_terms[data.shape[i]];
        Ok(if l == 0.0 {
            0.0
        } else {
            (l * h).powf(p) * h.powf(d as f64 - sp) * unit
        })
    })?;

    let tail = 2.0
        * deterministic_sum(n, |i| {
            let v = data.values[i];
            if v == 0.0 {
                return Ok(0.0);
            }
            let t = tail_kernel(
                data.center(i),
                grid,
                domain,
                sp,
                &dirs,
                opts.truncation_radius,
            );
            Ok(data.weights[i] * v.abs().powf(p) * t)
        })?;

    let total = near + diagonal + tail;
    if !total.is_finite() {
        return Err(Error::NonFinite {
            node: vec![],
            value: total,
        });
    }
    Ok(SeminormParts {
        near,
        diagonal,
        tail,
        total,
        cells: n,
    })
}
