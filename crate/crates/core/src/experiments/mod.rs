//! Constant estimation over test-function families, weight-optimality
//! blow-up probes and the dyadic telescoping reconstruction on the slab.

mod estimate;
mod optimize;
mod probe;
mod telescope;

pub use estimate::{estimate_constant, ratio_sweep, EstimateResult, SearchConfig};
pub use optimize::{maximize, OptimizeResult, StartOutcome};
pub use probe::{blowup_probe, ProbeConfig, ProbeLevel, ProbeResult, Verdict};
pub use telescope::{telescoping_reconstruction, LayerRow, TelescopeConfig, TelescopeReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::quadrature::{GridSpec, TestFunction};

/// Parametrized test-function families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionFamily {
    /// Bumps at distance `h` from `{x_d = 0}`: `x_d` in `(h, 3h)`, and in
    /// `x'` centered at 0 with radius `n/2`. Searched over `log2 h`.
    BoundaryBump { h_min: f64, h_max: f64 },
    /// Truncated logarithms of depth `2^j` for each `j` in `levels`.
    LogSpike { levels: Vec<u32> },
    /// A fixed list of tensor bumps.
    TensorBumpGrid {
        centers: Vec<Vec<f64>>,
        radii: Vec<Vec<f64>>,
    },
}

fn slab_shape(domain: &Domain) -> Result<(u32, usize)> {
    match domain {
        Domain::Slab { n, d } => Ok((*n, *d)),
        _ => Err(Error::UnsupportedDomain(
            "this family is defined on the slab".into(),
        )),
    }
}

/// The boundary bump at distance `h` on the slab.
pub fn boundary_bump(domain: &Domain, h: f64) -> Result<TestFunction> {
    let (n, d) = slab_shape(domain)?;
    if !(h > 0.0 && 3.0 * h < 1.0) {
        return Err(Error::param(format!(
            "boundary distance h = {h} must lie in (0, 1/3)"
        )));
    }
    let mut center = vec![0.0; d];
    let mut radius = vec![n as f64 / 2.0; d];
    center[d - 1] = 2.0 * h;
    radius[d - 1] = h;
    Ok(TestFunction::bump(center, radius))
}

/// Log-spike of depth `depth` on the slab.
pub fn log_spike(domain: &Domain, depth: u32) -> Result<TestFunction> {
    let (n, d) = slab_shape(domain)?;
    Ok(TestFunction::LogSpike {
        depth,
        cross_center: vec![0.0; d - 1],
        cross_radius: vec![n as f64 / 2.0; d - 1],
    })
}

/// Grid for a compactly supported member: `resolution` cells on the
/// shortest side of its support box.
pub fn member_grid(u: &TestFunction, resolution: usize) -> Result<GridSpec> {
    let support = u
        .support_box()
        .ok_or_else(|| Error::param("family members need compact support"))?;
    GridSpec::balanced(support, resolution)
}
