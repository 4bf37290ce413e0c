use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, intervals_from_breaks, norm, BoxRegion, LipschitzGraph, Region};

/// The domain classes the inequalities are stated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `(-n, n)^{d-1} x (0, 1)`.
    Slab {
        n: u32,
        d: usize,
    },
    /// Complement of the closed ball `B_radius(0)`.
    ExteriorBall {
        radius: f64,
        d: usize,
    },
    /// `{x : x_d > gamma(x')}`.
    Epigraph {
        graph: LipschitzGraph,
        d: usize,
    },
    Box(BoxRegion),
    Polygon(Polygon),
}

/// Simple polygon in the plane. Orientation is irrelevant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRepr", into = "PolygonRepr")]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct PolygonRepr {
    vertices: Vec<[f64; 2]>,
}

impl TryFrom<PolygonRepr> for Polygon {
    type Error = Error;
    fn try_from(r: PolygonRepr) -> Result<Self> {
        Polygon::new(r.vertices)
    }
}

impl From<Polygon> for PolygonRepr {
    fn from(p: Polygon) -> Self {
        PolygonRepr {
            vertices: p.vertices,
        }
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

pub(crate) fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
    (q[0] * q[0] + q[1] * q[1]).sqrt()
}

/// Distance from `p` to the ray `origin + t * dir`, `t >= 0`, `dir` unit.
fn point_ray_distance(p: [f64; 2], origin: [f64; 2], dir: [f64; 2]) -> f64 {
    let v = [p[0] - origin[0], p[1] - origin[1]];
    let t = (v[0] * dir[0] + v[1] * dir[1]).max(0.0);
    ((v[0] - t * dir[0]).powi(2) + (v[1] - t * dir[1]).powi(2)).sqrt()
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::param("polygon needs at least 3 vertices"));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::param("polygon vertices must be finite"));
        }
        let p = Polygon { vertices };
        if p.signed_area().abs() == 0.0 {
            return Err(Error::param("polygon has zero area"));
        }
        for i in 0..n {
            let (a, b) = p.edge(i);
            if a == b {
                return Err(Error::param(format!("polygon edge {i} is degenerate")));
            }
            for j in i + 1..n {
                let (c, d) = p.edge(j);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges may only share their common vertex: reject
                    // folding back along the same line.
                    let shared = if j == i + 1 { b } else { a };
                    let (other_i, other_j) = if j == i + 1 { (a, d) } else { (b, c) };
                    if orient(other_i, shared, other_j) == 0.0
                        && dot(
                            &[other_i[0] - shared[0], other_i[1] - shared[1]],
                            &[other_j[0] - shared[0], other_j[1] - shared[1]],
                        ) > 0.0
                    {
                        return Err(Error::param(format!("polygon edges {i} and {j} overlap")));
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Err(Error::param(format!("polygon edges {i} and {j} intersect")));
                }
            }
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        (
            self.vertices[i],
            self.vertices[(i + 1) % self.vertices.len()],
        )
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        (0..self.vertices.len()).map(|i| self.edge(i))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
            .sum::<f64>()
    }

    fn on_boundary(&self, p: [f64; 2]) -> bool {
        self.edges()
            .any(|(a, b)| orient(a, b, p) == 0.0 && on_segment(a, b, p))
    }

    /// Even-odd rule; boundary points are outside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        if self.on_boundary(p) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    fn bounding_box(&self) -> BoxRegion {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        BoxRegion {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        }
    }

    fn edge_hits_box(a: [f64; 2], b: [f64; 2], bx: &BoxRegion) -> bool {
        // Liang-Barsky on the closed box.
        let dir = [b[0] - a[0], b[1] - a[1]];
        let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
        for k in 0..2 {
            if dir[k] == 0.0 {
                if a[k] < bx.lo[k] || a[k] > bx.hi[k] {
                    return false;
                }
            } else {
                let u = (bx.lo[k] - a[k]) / dir[k];
                let v = (bx.hi[k] - a[k]) / dir[k];
                t0 = t0.max(u.min(v));
                t1 = t1.min(u.max(v));
            }
        }
        t0 <= t1
    }
}

impl Domain {
    pub fn slab(n: u32, d: usize) -> Self {
        Domain::Slab { n, d }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Slab { n, d } => {
                if *n == 0 || *d == 0 {
                    return Err(Error::param("slab needs n >= 1 and d >= 1"));
                }
            }
            Domain::ExteriorBall { radius, d } => {
                if !(radius.is_finite() && *radius > 0.0) || *d == 0 {
                    return Err(Error::param("exterior ball needs radius > 0 and d >= 1"));
                }
            }
            Domain::Epigraph { graph, d } => {
                if *d == 0 {
                    return Err(Error::param("epigraph needs d >= 1"));
                }
                graph.validate(*d)?;
            }
            Domain::Box(b) => b.validate()?,
            Domain::Polygon(_) => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Slab { d, .. }
            | Domain::ExteriorBall { d, .. }
            | Domain::Epigraph { d, .. } => *d,
            Domain::Box(b) => b.lo.len(),
            Domain::Polygon(_) => 2,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self,
            Domain::Slab { .. } | Domain::Box(_) | Domain::Polygon(_)
        )
    }

    fn slab_box(n: u32, d: usize) -> BoxRegion {
        let mut lo = vec![-(n as f64); d];
        let mut hi = vec![n as f64; d];
        lo[d - 1] = 0.0;
        hi[d - 1] = 1.0;
        BoxRegion { lo, hi }
    }

    /// Lebesgue measure, if finite.
    pub fn measure(&self) -> Option<f64> {
        match self {
            Domain::Slab { n, d } => Some((2.0 * *n as f64).powi(*d as i32 - 1)),
            Domain::Box(b) => Some(b.measure()),
            Domain::Polygon(p) => Some(p.signed_area().abs()),
            _ => None,
        }
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Slab { n, d } => Self::slab_box(*n, *d).contains_closed(x),
            Domain::ExteriorBall { radius, .. } => norm(x) >= *radius,
            Domain::Epigraph { graph, d } => x[d - 1] >= graph.eval(&x[..d - 1]),
            Domain::Box(b) => b.contains_closed(x),
            Domain::Polygon(p) => p.contains([x[0], x[1]]) || p.on_boundary([x[0], x[1]]),
        }
    }

    /// Exact Euclidean distance to the boundary.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        if !self.contains_closed(x) {
            return Err(Error::DomainMembership { point: x.to_vec() });
        }
        let dist = match self {
            Domain::Slab { n, d } => box_interior_distance(&Self::slab_box(*n, *d), x),
            Domain::Box(b) => box_interior_distance(b, x),
            Domain::ExteriorBall { radius, .. } => norm(x) - radius,
            Domain::Polygon(p) => p.boundary_distance([x[0], x[1]]),
            Domain::Epigraph { graph, d } => epigraph_distance(graph, *d, x),
        };
        Ok(dist.max(0.0))
    }

    /// True when the closed box lies in the open domain.
    pub fn contains_box_interior(&self, b: &BoxRegion) -> bool {
        if b.lo.len() != self.dim() {
            return false;
        }
        match self {
            Domain::Slab { n, d } => {
                let s = Self::slab_box(*n, *d);
                (0..*d).all(|i| b.lo[i] > s.lo[i] && b.hi[i] < s.hi[i])
            }
            Domain::Box(s) => (0..s.lo.len()).all(|i| b.lo[i] > s.lo[i] && b.hi[i] < s.hi[i]),
            Domain::ExteriorBall { radius, .. } => {
                b.distance_sq_to(&vec![0.0; b.lo.len()]) > radius * radius
            }
            Domain::Polygon(p) => {
                let corners = [
                    [b.lo[0], b.lo[1]],
                    [b.hi[0], b.lo[1]],
                    [b.hi[0], b.hi[1]],
                    [b.lo[0], b.hi[1]],
                ];
                corners.iter().all(|c| p.contains(*c))
                    && !p.edges().any(|(u, v)| Polygon::edge_hits_box(u, v, b))
            }
            Domain::Epigraph { graph, d } => b.lo[d - 1] > graph_max_over_box(graph, b),
        }
    }

    /// `sup_x delta_D(x)` for bounded domains; sampled then refined for polygons.
    pub fn max_interior_distance(&self) -> Option<f64> {
        match self {
            Domain::Slab { n, .. } => Some((*n as f64).min(0.5)),
            Domain::Box(b) => Some(
                (0..b.lo.len())
                    .map(|i| 0.5 * b.side(i))
                    .fold(f64::INFINITY, f64::min),
            ),
            Domain::Polygon(p) => Some(polygon_inradius(p)),
            _ => None,
        }
    }
}

fn box_interior_distance(b: &BoxRegion, x: &[f64]) -> f64 {
    x.iter()
        .zip(b.lo.iter().zip(&b.hi))
        .map(|(v, (l, h))| (v - l).min(h - v))
        .fold(f64::INFINITY, f64::min)
}

fn epigraph_distance(graph: &LipschitzGraph, d: usize, x: &[f64]) -> f64 {
    let xp = &x[..d - 1];
    let xd = x[d - 1];
    if d == 1 {
        return xd - graph.eval(xp);
    }
    match graph {
        LipschitzGraph::Zero => xd,
        LipschitzGraph::Affine { slope, offset } => {
            (xd - offset - dot(slope, xp)) / (1.0 + dot(slope, slope)).sqrt()
        }
        LipschitzGraph::Cone { slope } => {
            // Rotational symmetry: the nearest point lies in the meridian
            // half-plane through x, where the boundary is a V of two rays.
            let rho = norm(xp);
            let n = (1.0 + slope * slope).sqrt();
            let r1 = point_ray_distance([rho, xd], [0.0, 0.0], [1.0 / n, slope / n]);
            let r2 = point_ray_distance([rho, xd], [0.0, 0.0], [-1.0 / n, slope / n]);
            r1.min(r2)
        }
        LipschitzGraph::PiecewiseLinear { knots, values } => {
            let p = [xp[0], xd];
            let last = knots.len() - 1;
            let mut best = point_ray_distance(p, [knots[0], values[0]], [-1.0, 0.0]).min(
                point_ray_distance(p, [knots[last], values[last]], [1.0, 0.0]),
            );
            for i in 0..last {
                best = best.min(point_segment_distance(
                    p,
                    [knots[i], values[i]],
                    [knots[i + 1], values[i + 1]],
                ));
            }
            best
        }
    }
}

fn graph_max_over_box(graph: &LipschitzGraph, b: &BoxRegion) -> f64 {
    let dp = b.lo.len() - 1;
    graph.range_over_box(&b.lo[..dp], &b.hi[..dp]).1
}

fn polygon_inradius(p: &Polygon) -> f64 {
    let bb = p.bounding_box();
    let samples = 200;
    let mut best = ([0.0, 0.0], 0.0_f64);
    for i in 0..samples {
        for j in 0..samples {
            let q = [
                bb.lo[0] + (i as f64 + 0.5) / samples as f64 * bb.side(0),
                bb.lo[1] + (j as f64 + 0.5) / samples as f64 * bb.side(1),
            ];
            if p.contains(q) {
                let dq = p.boundary_distance(q);
                if dq > best.1 {
                    best = (q, dq);
                }
            }
        }
    }
    // Compass search from the best sample.
    let mut step = bb.side(0).max(bb.side(1)) / samples as f64;
    while step > 1e-12 * bb.side(0).max(bb.side(1)) {
        let mut improved = false;
        for dir in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            let q = [best.0[0] + step * dir[0], best.0[1] + step * dir[1]];
            if p.contains(q) {
                let dq = p.boundary_distance(q);
                if dq > best.1 {
                    best = (q, dq);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best.1
}

fn epigraph_ray_breaks(graph: &LipschitzGraph, d: usize, o: &[f64], w: &[f64]) -> Vec<f64> {
    let h = |r: f64| {
        let x: Vec<f64> = o.iter().zip(w).map(|(a, b)| a + r * b).collect();
        x[d - 1] - graph.eval(&x[..d - 1])
    };
    let linear_root = |a: f64, b: f64| {
        let (ha, hb) = (h(a), h(b));
        if (ha > 0.0) != (hb > 0.0) && ha != hb {
            Some(a + (b - a) * ha / (ha - hb))
        } else {
            None
        }
    };
    match graph {
        LipschitzGraph::Zero | LipschitzGraph::Affine { .. } => {
            let h0 = h(0.0);
            let h1 = h(1.0) - h0;
            if h1 != 0.0 {
                vec![-h0 / h1]
            } else {
                vec![]
            }
        }
        LipschitzGraph::Cone { slope } if d >= 2 => {
            let m2 = slope * slope;
            let (op, od) = (&o[..d - 1], o[d - 1]);
            let (wp, wd) = (&w[..d - 1], w[d - 1]);
            let a = wd * wd - m2 * dot(wp, wp);
            let b = 2.0 * (od * wd - m2 * dot(op, wp));
            let c = od * od - m2 * dot(op, op);
            solve_quadratic(a, b, c)
        }
        LipschitzGraph::Cone { .. } => vec![-o[0] / w[0]],
        LipschitzGraph::PiecewiseLinear { knots, .. } => {
            let mut cuts = vec![0.0];
            if w[0] != 0.0 {
                cuts.extend(knots.iter().map(|k| (k - o[0]) / w[0]).filter(|r| *r > 0.0));
            }
            cuts.sort_by(f64::total_cmp);
            let mut breaks: Vec<f64> = cuts.clone();
            for win in cuts.windows(2) {
                breaks.extend(linear_root(win[0], win[1]));
            }
            let last = *cuts.last().unwrap();
            if let Some(r) = linear_root(last, last + 1.0) {
                breaks.push(r);
            } else {
                // Root beyond last + 1 on the final linear piece.
                let (h0, h1) = (h(last), h(last + 1.0));
                if h1 != h0 {
                    breaks.push(last - h0 / (h1 - h0));
                }
            }
            breaks
        }
    }
}

pub(crate) fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < 1e-300 {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    // Stable form avoids cancellation.
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = vec![];
    if q != 0.0 {
        roots.push(c / q);
        roots.push(q / a);
    } else {
        roots.push(0.0);
    }
    roots
}

impl Region for Domain {
    fn dim(&self) -> usize {
        Domain::dim(self)
    }

    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Slab { n, d } => Region::contains(&Self::slab_box(*n, *d), x),
            Domain::Box(b) => Region::contains(b, x),
            Domain::ExteriorBall { radius, .. } => norm(x) > *radius,
            Domain::Epigraph { graph, d } => x[d - 1] > graph.eval(&x[..d - 1]),
            Domain::Polygon(p) => p.contains([x[0], x[1]]),
        }
    }

    fn ray_intervals(&self, origin: &[f64], dir: &[f64]) -> Vec<(f64, f64)> {
        let at = |r: f64| -> Vec<f64> { origin.iter().zip(dir).map(|(a, b)| a + r * b).collect() };
        match self {
            Domain::Slab { n, d } => Self::slab_box(*n, *d).ray_intervals(origin, dir),
            Domain::Box(b) => b.ray_intervals(origin, dir),
            Domain::ExteriorBall { radius, .. } => {
                let breaks = solve_quadratic(
                    1.0,
                    2.0 * dot(origin, dir),
                    dot(origin, origin) - radius * radius,
                );
                intervals_from_breaks(breaks, |r| norm(&at(r)) > *radius)
            }
            Domain::Epigraph { graph, d } => {
                let breaks = epigraph_ray_breaks(graph, *d, origin, dir);
                intervals_from_breaks(breaks, |r| {
                    let x = at(r);
                    x[d - 1] > graph.eval(&x[..d - 1])
                })
            }
            Domain::Polygon(p) => {
                let o = [origin[0], origin[1]];
                let w = [dir[0], dir[1]];
                let mut breaks = Vec::new();
                for (a, b) in p.edges() {
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let denom = w[0] * e[1] - w[1] * e[0];
                    if denom == 0.0 {
                        continue;
                    }
                    let ao = [a[0] - o[0], a[1] - o[1]];
                    let r = (ao[0] * e[1] - ao[1] * e[0]) / denom;
                    let t = (ao[0] * w[1] - ao[1] * w[0]) / denom;
                    if (0.0..=1.0).contains(&t) {
                        breaks.push(r);
                    }
                }
                intervals_from_breaks(breaks, |r| {
                    let x = at(r);
                    p.contains([x[0], x[1]])
                })
            }
        }
    }

    fn bounding_box(&self) -> Option<BoxRegion> {
        match self {
            Domain::Slab { n, d } => Some(Self::slab_box(*n, *d)),
            Domain::Box(b) => Some(b.clone()),
            Domain::Polygon(p) => Some(p.bounding_box()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square_with_notch() -> Polygon {
        Polygon::new(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 2.0],
            [1.0, 1.0],
            [0.0, 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn distance_examples() {
        let ext = Domain::ExteriorBall { radius: 1.0, d: 2 };
        assert!((ext.distance_to_boundary(&[2.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let half = Domain::Epigraph {
            graph: LipschitzGraph::Zero,
            d: 3,
        };
        assert_eq!(half.distance_to_boundary(&[4.0, -1.0, 0.3]).unwrap(), 0.3);
        let slab = Domain::slab(1, 2);
        assert!((slab.distance_to_boundary(&[0.0, 0.1]).unwrap() - 0.1).abs() < 1e-15);
        assert!((slab.distance_to_boundary(&[0.95, 0.5]).unwrap() - 0.05).abs() < 1e-12);
    }

    /// Dense boundary sampling as an independent oracle for the slab.
    #[test]
    fn slab_distance_matches_boundary_sampling() {
        let slab = Domain::slab(1, 2);
        let n = 200_000;
        let mut boundary = Vec::with_capacity(4 * n);
        for i in 0..=n {
            let t = i as f64 / n as f64;
            boundary.push([-1.0 + 2.0 * t, 0.0]);
            boundary.push([-1.0 + 2.0 * t, 1.0]);
            boundary.push([-1.0, t]);
            boundary.push([1.0, t]);
        }
        for x in [[0.0, 0.1], [0.95, 0.5], [-0.3, 0.77], [0.5, 0.5]] {
            let oracle = boundary
                .iter()
                .map(|b| ((b[0] - x[0]).powi(2) + (b[1] - x[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            let exact = slab.distance_to_boundary(&x).unwrap();
            assert!((oracle - exact).abs() < 1e-6, "{x:?}: {oracle} vs {exact}");
        }
    }

    #[test]
    fn outside_points_are_rejected() {
        let slab = Domain::slab(1, 1);
        assert!(matches!(
            slab.distance_to_boundary(&[1.5]),
            Err(Error::DomainMembership { .. })
        ));
        let ext = Domain::ExteriorBall { radius: 1.0, d: 2 };
        assert!(ext.distance_to_boundary(&[0.1, 0.1]).is_err());
        let cone = Domain::Epigraph {
            graph: LipschitzGraph::Cone { slope: 1.0 },
            d: 2,
        };
        assert!(cone.distance_to_boundary(&[1.0, 0.5]).is_err());
    }

    #[test]
    fn epigraph_distances_against_sampling() {
        let graphs = [
            LipschitzGraph::Cone { slope: 1.0 },
            LipschitzGraph::Affine {
                slope: vec![0.5],
                offset: 0.2,
            },
            LipschitzGraph::PiecewiseLinear {
                knots: vec![-1.0, 0.0, 1.0],
                values: vec![0.0, 0.8, 0.1],
            },
        ];
        for g in graphs {
            let dom = Domain::Epigraph {
                graph: g.clone(),
                d: 2,
            };
            for x in [[0.3, 1.2], [-0.7, 2.0], [1.5, 1.6], [0.0, 1.0]] {
                if !Region::contains(&dom, &x) {
                    continue;
                }
                let n = 400_000;
                let oracle = (0..=n)
                    .map(|i| {
                        let t = -10.0 + 20.0 * i as f64 / n as f64;
                        ((t - x[0]).powi(2) + (g.eval(&[t]) - x[1]).powi(2)).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                let exact = dom.distance_to_boundary(&x).unwrap();
                assert!(
                    (oracle - exact).abs() < 1e-4,
                    "{g:?} {x:?}: {oracle} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn cone_distance_in_three_dimensions() {
        let dom = Domain::Epigraph {
            graph: LipschitzGraph::Cone { slope: 1.0 },
            d: 3,
        };
        // On the axis the nearest boundary point is at 45 degrees.
        let d = dom.distance_to_boundary(&[0.0, 0.0, 2.0]).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn polygon_validation_and_distance() {
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        let p = square_with_notch();
        let dom = Domain::Polygon(p);
        assert!(Region::contains(&dom, &[0.5, 0.5]));
        assert!(!Region::contains(&dom, &[1.0, 1.5]));
        let d = dom.distance_to_boundary(&[0.5, 0.25]).unwrap();
        assert!((d - 0.25).abs() < 1e-15);
        let r = dom.max_interior_distance().unwrap();
        assert!(r > 0.4 && r < 1.0, "inradius {r}");
    }

    #[test]
    fn box_containment() {
        let dom = Domain::Polygon(square_with_notch());
        assert!(dom.contains_box_interior(&BoxRegion::new(vec![0.2, 0.2], vec![0.8, 0.6]).unwrap()));
        assert!(
            !dom.contains_box_interior(&BoxRegion::new(vec![0.2, 0.2], vec![1.8, 1.5]).unwrap())
        );
        let ext = Domain::ExteriorBall { radius: 1.0, d: 2 };
        assert!(
            ext.contains_box_interior(&BoxRegion::new(vec![1.1, -0.5], vec![2.0, 0.5]).unwrap())
        );
        assert!(
            !ext.contains_box_interior(&BoxRegion::new(vec![0.9, -0.5], vec![2.0, 0.5]).unwrap())
        );
        let cone = Domain::Epigraph {
            graph: LipschitzGraph::Cone { slope: 1.0 },
            d: 2,
        };
        assert!(
            cone.contains_box_interior(&BoxRegion::new(vec![-0.5, 0.6], vec![0.5, 1.0]).unwrap())
        );
        assert!(
            !cone.contains_box_interior(&BoxRegion::new(vec![-0.5, 0.4], vec![0.5, 1.0]).unwrap())
        );
    }

    /// Ray intervals must agree with pointwise membership along the ray.
    #[test]
    fn ray_intervals_match_membership() {
        let domains = vec![
            Domain::slab(2, 2),
            Domain::ExteriorBall { radius: 1.0, d: 2 },
            Domain::ExteriorBall { radius: 0.7, d: 3 },
            Domain::Epigraph {
                graph: LipschitzGraph::Cone { slope: 1.3 },
                d: 2,
            },
            Domain::Epigraph {
                graph: LipschitzGraph::Cone { slope: 0.8 },
                d: 3,
            },
            Domain::Epigraph {
                graph: LipschitzGraph::Affine {
                    slope: vec![0.4],
                    offset: -0.1,
                },
                d: 2,
            },
            Domain::Epigraph {
                graph: LipschitzGraph::PiecewiseLinear {
                    knots: vec![-1.0, 0.0, 0.5, 1.0],
                    values: vec![0.0, 1.0, -0.5, 0.3],
                },
                d: 2,
            },
            Domain::Polygon(square_with_notch()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dom in &domains {
            let d = Region::dim(dom);
            let mut checked = 0;
            while checked < 200 {
                let o: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let mut w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = norm(&w);
                if n < 1e-3 {
                    continue;
                }
                w.iter_mut().for_each(|v| *v /= n);
                let iv = dom.ray_intervals(&o, &w);
                for k in 0..400 {
                    let r = 0.013 + k as f64 * 0.021;
                    let x: Vec<f64> = o.iter().zip(&w).map(|(a, b)| a + r * b).collect();
                    let inside = Region::contains(dom, &x);
                    let near_break = iv
                        .iter()
                        .any(|(a, b)| (r - a).abs() < 1e-9 || (r - b).abs() < 1e-9);
                    if !near_break {
                        let listed = iv.iter().any(|(a, b)| *a < r && r < *b);
                        assert_eq!(inside, listed, "{dom:?} o={o:?} w={w:?} r={r} iv={iv:?}");
                    }
                }
                checked += 1;
            }
        }
    }
}
