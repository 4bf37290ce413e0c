//! Dyadic layers `A_k = (-n, n)^{d-1} x [2^k, 2^{k+1})` of the slab and
//! their tilings by cubes of side `2^k`, stored as exact integer indices.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoxRegion, Domain};

/// Cube `index * 2^k + [0, 2^k)^d`; all coordinates are exact dyadic rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub k: i32,
    pub index: Vec<i64>,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(self.k)
    }

    /// Exact lower corner.
    pub fn lo_exact(&self) -> Vec<Ratio<i128>> {
        self.index
            .iter()
            .map(|i| Ratio::from_integer(*i as i128) * pow2(self.k))
            .collect()
    }

    pub fn to_box(&self) -> BoxRegion {
        let h = self.side();
        let lo: Vec<f64> = self.index.iter().map(|i| *i as f64 * h).collect();
        BoxRegion::cube(&lo, h)
    }
}

fn pow2(k: i32) -> Ratio<i128> {
    if k >= 0 {
        Ratio::from_integer(1i128 << k)
    } else {
        Ratio::new(1, 1i128 << (-k))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicLayer {
    pub k: i32,
    pub n: u32,
    pub d: usize,
    /// Lexicographic order in the tangential indices.
    pub cubes: Vec<DyadicCube>,
}

impl DyadicLayer {
    /// `b_k = 2^{(1-k)(d-1)} n^{d-1}`.
    pub fn count(&self) -> usize {
        self.cubes.len()
    }

    pub fn expected_count(k: i32, n: u32, d: usize) -> u128 {
        per_axis(k, n).pow(d as u32 - 1)
    }

    /// Sum of the cube measures, exact.
    pub fn measure_exact(&self) -> Ratio<i128> {
        let unit = pow2(self.k * self.d as i32);
        Ratio::from_integer(self.cubes.len() as i128) * unit
    }

    /// `|A_k| = (2n)^{d-1} 2^k`, exact.
    pub fn expected_measure(&self) -> Ratio<i128> {
        Ratio::from_integer((2 * self.n as i128).pow(self.d as u32 - 1)) * pow2(self.k)
    }

    pub fn to_box(&self) -> BoxRegion {
        let mut lo = vec![-(self.n as f64); self.d];
        let mut hi = vec![self.n as f64; self.d];
        lo[self.d - 1] = 2f64.powi(self.k);
        hi[self.d - 1] = 2f64.powi(self.k + 1);
        BoxRegion { lo, hi }
    }
}

/// Cubes per tangential axis at depth `k`: `2n / 2^k`.
fn per_axis(k: i32, n: u32) -> u128 {
    2 * n as u128 * (1u128 << (-k))
}

fn layer(k: i32, n: u32, d: usize) -> DyadicLayer {
    let m = per_axis(k, n) as i64;
    let offset = n as i64 * (1i64 << (-k));
    let total = (m as usize).pow(d as u32 - 1);
    let mut cubes = Vec::with_capacity(total);
    for lin in 0..total {
        let mut index = vec![0i64; d];
        let mut rest = lin as i64;
        for axis in (0..d - 1).rev() {
            index[axis] = rest % m - offset;
            rest /= m;
        }
        index[d - 1] = 1;
        cubes.push(DyadicCube { k, index });
    }
    DyadicLayer { k, n, d, cubes }
}

/// Layers `k = m, ..., -1` of the slab `(-n, n)^{d-1} x (0, 1)`.
pub fn dyadic_layers(slab: &Domain, m: i32) -> Result<Vec<DyadicLayer>> {
    let Domain::Slab { n, d } = slab else {
        return Err(Error::UnsupportedDomain(
            "dyadic layers are defined for the slab only".into(),
        ));
    };
    if m > -1 {
        return Err(Error::param(format!("layer depth m = {m} must be <= -1")));
    }
    if -m > 40 || (per_axis(m, *n) as f64).powi(*d as i32 - 1) > 5e7 {
        return Err(Error::param(format!(
            "layer depth m = {m} too large to enumerate for d = {d}"
        )));
    }
    Ok((m..=-1).map(|k| layer(k, *n, *d)).collect())
}

/// Index in layer `k + 1` of the cube directly above child `child_index`.
pub fn parent_cube(layer_k: &DyadicLayer, child_index: usize) -> Result<usize> {
    if layer_k.k >= -1 {
        return Err(Error::NoParent { k: layer_k.k });
    }
    let child = layer_k
        .cubes
        .get(child_index)
        .ok_or_else(|| Error::param(format!("child index {child_index} out of range")))?;
    let kp = layer_k.k + 1;
    let m = per_axis(kp, layer_k.n) as i64;
    let offset = layer_k.n as i64 * (1i64 << (-kp));
    let mut lin = 0i64;
    for axis in 0..layer_k.d - 1 {
        lin = lin * m + child.index[axis].div_euclid(2) + offset;
    }
    Ok(lin as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_formula() {
        let slab = Domain::slab(1, 2);
        let layers = dyadic_layers(&slab, -2).unwrap();
        assert_eq!(layers[1].k, -1);
        assert_eq!(layers[1].count(), 4);
        assert_eq!(layers[0].count(), 8);
        let b = layers[1].to_box();
        assert_eq!((b.lo, b.hi), (vec![-1.0, 0.5], vec![1.0, 1.0]));
        for c in &layers[1].cubes {
            assert_eq!(c.side(), 0.5);
        }
        for k in -6..=-1 {
            for (n, d) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
                let l = layer(k, n, d);
                assert_eq!(l.count() as u128, DyadicLayer::expected_count(k, n, d));
                // 2^{(1-k)(d-1)} n^{d-1}
                assert_eq!(
                    l.count() as u128,
                    (1u128 << ((1 - k) as u32 * (d as u32 - 1))) * (n as u128).pow(d as u32 - 1)
                );
            }
        }
    }

    #[test]
    fn one_dimensional_layers() {
        let layers = dyadic_layers(&Domain::slab(1, 1), -5).unwrap();
        for l in &layers {
            assert_eq!(l.count(), 1);
            let b = l.cubes[0].to_box();
            assert_eq!((b.lo[0], b.hi[0]), (2f64.powi(l.k), 2f64.powi(l.k + 1)));
        }
        for l in &layers[..layers.len() - 1] {
            assert_eq!(parent_cube(l, 0).unwrap(), 0);
        }
    }

    #[test]
    fn tiling_is_exact() {
        for (n, d) in [(1, 2), (2, 2), (1, 3), (3, 3)] {
            for l in dyadic_layers(&Domain::slab(n, d), -4).unwrap() {
                assert_eq!(l.measure_exact(), l.expected_measure());
                let lb = l.to_box();
                for (i, c) in l.cubes.iter().enumerate() {
                    assert!(lb.contains_box(&c.to_box()));
                    for other in &l.cubes[i + 1..] {
                        assert!(c.to_box().disjoint_interiors(&other.to_box()));
                    }
                }
            }
        }
    }

    #[test]
    fn parent_fibers_are_uniform() {
        for (n, d) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
            let layers = dyadic_layers(&Domain::slab(n, d), -5).unwrap();
            for w in layers.windows(2) {
                let mut fiber = vec![0usize; w[1].count()];
                for i in 0..w[0].count() {
                    let p = parent_cube(&w[0], i).unwrap();
                    fiber[p] += 1;
                    let (cb, pb) = (w[0].cubes[i].to_box(), w[1].cubes[p].to_box());
                    // Shadow containment and stacking directly below.
                    for a in 0..d - 1 {
                        assert!(pb.lo[a] <= cb.lo[a] && cb.hi[a] <= pb.hi[a]);
                    }
                    assert_eq!(cb.hi[d - 1], pb.lo[d - 1]);
                }
                assert!(fiber.iter().all(|f| *f == 1 << (d - 1)), "{fiber:?}");
            }
        }
    }

    #[test]
    fn errors() {
        let layers = dyadic_layers(&Domain::slab(1, 2), -1).unwrap();
        assert!(matches!(
            parent_cube(&layers[0], 0),
            Err(Error::NoParent { k: -1 })
        ));
        let ext = Domain::ExteriorBall { radius: 1.0, d: 2 };
        assert!(matches!(
            dyadic_layers(&ext, -2),
            Err(Error::UnsupportedDomain(_))
        ));
        assert!(dyadic_layers(&Domain::slab(1, 2), 0).is_err());
    }
}
