use serde::{Deserialize, Serialize};

use super::{boundary_bump, log_spike, maximize, member_grid, FunctionFamily, StartOutcome};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::hardy::{hardy_ratio, HardyCase};
use crate::quadrature::TestFunction;

/// Multi-start Nelder-Mead settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub starts: usize,
    /// Objective evaluations allowed per start.
    pub budget: usize,
    /// Set from the run seed; not part of the serialized config.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 8,
            budget: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    /// Parameters of the best member (`log2 h` for boundary bumps, the
    /// member index otherwise).
    pub best_params: Vec<f64>,
    pub best_ratio: f64,
    pub evaluations: usize,
    pub budget_exhausted: bool,
    /// Per-start outcomes for continuous families; empty for discrete ones.
    pub starts: Vec<StartOutcome>,
    /// `(parameter, ratio)` for every member of a discrete family.
    pub members: Vec<(f64, f64)>,
}

fn ratio_of(u: &TestFunction, case: &HardyCase, domain: &Domain, resolution: usize) -> Result<f64> {
    let grid = member_grid(u, resolution)?;
    Ok(hardy_ratio(u, domain, case, &grid)?.ratio)
}

fn discrete_members(family: &FunctionFamily, domain: &Domain) -> Result<Vec<(f64, TestFunction)>> {
    match family {
        FunctionFamily::LogSpike { levels } => levels
            .iter()
            .map(|&j| {
                Ok((
                    j as f64,
                    log_spike(domain, 1u32.checked_shl(j).unwrap_or(0))?,
                ))
            })
            .collect(),
        FunctionFamily::TensorBumpGrid { centers, radii } => {
            if centers.len() != radii.len() {
                return Err(Error::param(
                    "tensor bump grid needs one radius vector per center",
                ));
            }
            Ok(centers
                .iter()
                .zip(radii)
                .enumerate()
                .map(|(i, (c, r))| (i as f64, TestFunction::bump(c.clone(), r.clone())))
                .collect())
        }
        FunctionFamily::BoundaryBump { .. } => unreachable!("continuous family"),
    }
}

/// Lower bound on the best Hardy constant: the largest ratio found over the
/// family.
pub fn estimate_constant(
    family: &FunctionFamily,
    case: &HardyCase,
    domain: &Domain,
    search: &SearchConfig,
    resolution: usize,
) -> Result<EstimateResult> {
    match family {
        FunctionFamily::BoundaryBump { h_min, h_max } => {
            if !(*h_min > 0.0 && h_min <= h_max && 3.0 * h_max < 1.0) {
                return Err(Error::param(
                    "boundary bump range needs 0 < h_min <= h_max < 1/3",
                ));
            }
            // Surface structural problems (wrong domain, wrong case) as
            // errors instead of letting the optimizer see +inf everywhere.
            ratio_of(&boundary_bump(domain, *h_max)?, case, domain, resolution)?;
            let f = |x: &[f64]| {
                let u = boundary_bump(domain, x[0].exp2()).ok()?;
                ratio_of(&u, case, domain, resolution).ok()
            };
            let bounds = [(h_min.log2(), h_max.log2())];
            let r = maximize(&f, &bounds, search.starts, search.budget, search.seed)?;
            Ok(EstimateResult {
                best_params: r.best_x,
                best_ratio: r.best_value,
                evaluations: r.evaluations,
                budget_exhausted: r.budget_exhausted,
                starts: r.starts,
                members: Vec::new(),
            })
        }
        _ => {
            let members = discrete_members(family, domain)?;
            if members.is_empty() {
                return Err(Error::param("function family is empty"));
            }
            let mut rows = Vec::with_capacity(members.len());
            for (param, u) in &members {
                rows.push((*param, ratio_of(u, case, domain, resolution)?));
            }
            let mut best = 0;
            for (i, row) in rows.iter().enumerate() {
                if row.1 > rows[best].1 {
                    best = i;
                }
            }
            Ok(EstimateResult {
                best_params: vec![rows[best].0],
                best_ratio: rows[best].1,
                evaluations: rows.len(),
                budget_exhausted: false,
                starts: Vec::new(),
                members: rows,
            })
        }
    }
}

/// Hardy ratios of boundary bumps at the given distances.
pub fn ratio_sweep(
    case: &HardyCase,
    domain: &Domain,
    hs: &[f64],
    resolution: usize,
) -> Result<Vec<(f64, f64)>> {
    hs.iter()
        .map(|&h| {
            Ok((
                h,
                ratio_of(&boundary_bump(domain, h)?, case, domain, resolution)?,
            ))
        })
        .collect()
}
