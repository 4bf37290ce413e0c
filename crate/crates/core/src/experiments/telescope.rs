use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dyadic_layers, BoxRegion, Domain, DyadicLayer};
use crate::hardy::{critical_exponents, DomainClass, HardyCase};
use crate::params::FracParams;
use crate::quadrature::{average, gagliardo_seminorm, GridSpec, TestFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TelescopeConfig {
    /// Uniform cells per axis when averaging over a dyadic cube.
    pub cube_resolution: usize,
    /// Cells on the shortest side of each overlap-strip seminorm grid.
    pub seminorm_base: usize,
}

impl Default for TelescopeConfig {
    fn default() -> Self {
        TelescopeConfig {
            cube_resolution: 8,
            seminorm_base: 8,
        }
    }
}

/// Quantities of one dyadic layer `A_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerRow {
    pub k: i32,
    /// Number of cubes `b_k` in the layer.
    pub cubes: usize,
    /// Cubes meeting `supp u` (the only nonzero averages).
    pub active_cubes: usize,
    /// `a_k = sum_i |(u)_{A_k^i}|^tau`.
    pub a_k: f64,
    /// `2^{k(d - alpha)} / (-k)^tau`.
    pub weight: f64,
    /// `[u]^tau` over `A_k ∪ A_{k+1}`; `None` for `k = -1`.
    pub overlap_seminorm_tau: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeReport {
    pub m: i32,
    pub alpha: f64,
    pub tau: f64,
    pub layers: Vec<LayerRow>,
    /// `sum_k weight_k a_k`.
    pub lhs: f64,
    /// `((2/3)^{tau-1} + 1) 2^{alpha-d} a_{-1}`.
    pub head: f64,
    /// `sum_k [u]^tau_{W^{s,p}(A_k ∪ A_{k+1})}`.
    pub seminorm_sum: f64,
    /// Smallest `C >= 0` with `lhs <= head + C * seminorm_sum`; `None`
    /// when the seminorm sum vanishes (then `lhs <= head` must hold).
    pub minimal_c: Option<f64>,
    /// Layers whose quantities vanish because they miss `supp u`.
    pub skipped_layers: Vec<i32>,
    /// Every layer has exactly `b_k` cubes.
    pub counts_match: bool,
}

fn layer_average_sum(
    u: &TestFunction,
    support: &BoxRegion,
    layer: &DyadicLayer,
    tau: f64,
    res: usize,
) -> Result<(f64, usize)> {
    let mut sum = 0.0;
    let mut active = 0;
    for cube in &layer.cubes {
        let b = cube.to_box();
        if b.disjoint_interiors(support) {
            continue;
        }
        active += 1;
        let avg = average(u, &b, &GridSpec::uniform(b.clone(), res)?)?;
        sum += avg.abs().powf(tau);
    }
    Ok((sum, active))
}

/// Recomputes every quantity of the slab telescoping argument for `u` down
/// to depth `m` and reports the smallest constant closing the chain.
pub fn telescoping_reconstruction(
    slab: &Domain,
    u: &TestFunction,
    fp: &FracParams,
    m: i32,
    cfg: &TelescopeConfig,
) -> Result<TelescopeReport> {
    let Domain::Slab { n, d } = slab else {
        return Err(Error::UnsupportedDomain(
            "telescoping reconstruction runs on the slab".into(),
        ));
    };
    let (n, d) = (*n, *d);
    if fp.d != d {
        return Err(Error::param(format!(
            "parameters are for d = {} but the slab has d = {d}",
            fp.d
        )));
    }
    if m > -2 {
        return Err(Error::param(format!("depth m = {m} must be <= -2")));
    }
    u.validate(d)?;
    let support = u
        .support_box()
        .ok_or_else(|| Error::param("u needs compact support"))?;
    if !slab.contains_box_interior(&support) {
        return Err(Error::DomainMembership {
            point: support.center(),
        });
    }
    let case = HardyCase::classify(*fp, DomainClass::of(slab))?;
    let alpha = critical_exponents(&case)?.alpha.to_f64();
    let tau = fp.tau_f64();
    let layers = dyadic_layers(slab, m)?;
    let counts_match = layers
        .iter()
        .all(|l| l.count() as u128 == DyadicLayer::expected_count(l.k, n, d));

    let mut rows = Vec::with_capacity(layers.len());
    let mut skipped = Vec::new();
    for layer in &layers {
        let k = layer.k;
        let (a_k, active) = layer_average_sum(u, &support, layer, tau, cfg.cube_resolution)?;
        let overlap_seminorm_tau = if k <= -2 {
            let mut strip = layer.to_box();
            strip.hi[d - 1] = 2f64.powi(k + 2);
            match strip.intersect(&support) {
                Some(b) if b.measure() > 0.0 => {
                    let grid = GridSpec::balanced(b, cfg.seminorm_base)?;
                    Some(gagliardo_seminorm(u, &strip, fp, &grid)?.powf(tau))
                }
                _ => Some(0.0),
            }
        } else {
            None
        };
        if active == 0 && overlap_seminorm_tau.unwrap_or(0.0) == 0.0 {
            skipped.push(k);
        }
        let weight = 2f64.powf(k as f64 * (d as f64 - alpha)) / (-k as f64).powf(tau);
        rows.push(LayerRow {
            k,
            cubes: layer.count(),
            active_cubes: active,
            a_k,
            weight,
            overlap_seminorm_tau,
        });
    }
    let lhs: f64 = rows.iter().map(|r| r.weight * r.a_k).sum();
    let a_top = rows.last().expect("at least two layers").a_k;
    let head = ((2.0f64 / 3.0).powf(tau - 1.0) + 1.0) * 2f64.powf(alpha - d as f64) * a_top;
    let seminorm_sum: f64 = rows.iter().filter_map(|r| r.overlap_seminorm_tau).sum();
    let minimal_c = (seminorm_sum > 0.0).then(|| ((lhs - head) / seminorm_sum).max(0.0));
    Ok(TelescopeReport {
        m,
        alpha,
        tau,
        layers: rows,
        lhs,
        head,
        seminorm_sum,
        minimal_c,
        skipped_layers: skipped,
        counts_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp2() -> FracParams {
        FracParams::parse(2, "2", "1/2", "2").unwrap()
    }

    #[test]
    fn counts_and_skips() {
        let slab = Domain::slab(1, 2);
        let u = TestFunction::bump(vec![0.0, 0.7], vec![0.3, 0.1]);
        let r =
            telescoping_reconstruction(&slab, &u, &fp2(), -4, &TelescopeConfig::default()).unwrap();
        assert!(r.counts_match);
        assert_eq!(
            r.layers.iter().map(|l| l.cubes).collect::<Vec<_>>(),
            vec![32, 16, 8, 4]
        );
        assert_eq!(r.skipped_layers, vec![-4, -3]);
        assert!(r.head > 0.0);
    }

    #[test]
    fn top_layer_only_is_dominated_by_head() {
        let slab = Domain::slab(1, 2);
        let u = TestFunction::bump(vec![0.0, 0.75], vec![0.4, 0.2]);
        let r =
            telescoping_reconstruction(&slab, &u, &fp2(), -3, &TelescopeConfig::default()).unwrap();
        assert!(r.lhs <= r.head, "lhs {} head {}", r.lhs, r.head);
        assert_eq!(r.minimal_c, Some(0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let slab = Domain::slab(1, 2);
        let u = TestFunction::bump(vec![0.0, 0.5], vec![0.2, 0.1]);
        assert!(
            telescoping_reconstruction(&slab, &u, &fp2(), -1, &TelescopeConfig::default()).is_err()
        );
        let ext = Domain::ExteriorBall { radius: 1.0, d: 2 };
        assert!(
            telescoping_reconstruction(&ext, &u, &fp2(), -3, &TelescopeConfig::default()).is_err()
        );
    }
}
