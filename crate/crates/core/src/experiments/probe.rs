use serde::{Deserialize, Serialize};

use super::log_spike;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::hardy::{hardy_ratio_with, HardyCase, WeightSpec};
use crate::quadrature::{GridSpec, SeminormOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    /// Log-spike depths are `2^j` for `j` in `j_min..=j_max`.
    pub j_min: u32,
    pub j_max: u32,
    pub threshold: f64,
    /// Minimum number of valid levels for a diverging verdict.
    pub min_levels: usize,
    /// Geometric cells per octave along `x_d`.
    pub per_octave: usize,
    /// Uniform cells along the other axes.
    pub cross_resolution: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            j_min: 3,
            j_max: 8,
            threshold: 1.15,
            min_levels: 4,
            per_octave: 4,
            cross_resolution: 16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Diverging,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeLevel {
    pub depth: u32,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub beta_used: f64,
    pub levels: Vec<ProbeLevel>,
    pub verdict: Verdict,
    pub growth_factors: Vec<f64>,
    /// Set when a level failed and the series stops at the last valid one.
    pub truncated: bool,
    pub failure: Option<String>,
}

/// Hardy ratios of log-spikes of increasing depth under the weight of `case`
/// with `beta` replaced by `beta_prime`.
pub fn blowup_probe(
    case: &HardyCase,
    beta_prime: f64,
    cfg: &ProbeConfig,
    domain: &Domain,
) -> Result<ProbeResult> {
    if !beta_prime.is_finite() {
        return Err(Error::param("beta' must be finite"));
    }
    if cfg.j_min == 0 || cfg.j_min > cfg.j_max || cfg.j_max > 8 {
        return Err(Error::param("probe levels need 1 <= j_min <= j_max <= 8"));
    }
    if !(cfg.threshold > 1.0) {
        return Err(Error::param("growth threshold must exceed 1"));
    }
    let w = WeightSpec::for_case(case, domain, None)?.with_beta(beta_prime);
    let d = domain.dim();
    let mut levels = Vec::new();
    let mut failure = None;
    for j in cfg.j_min..=cfg.j_max {
        let depth = 1u32 << j;
        let attempt = log_spike(domain, depth).and_then(|u| {
            let support = u
                .support_box()
                .ok_or_else(|| Error::param("log-spike without support"))?;
            let grid = GridSpec::log_graded(support, d - 1, cfg.per_octave, cfg.cross_resolution)?;
            hardy_ratio_with(&u, domain, &case.fp, &w, &grid, &SeminormOptions::default())
        });
        match attempt {
            Ok(r) if r.ratio.is_finite() => levels.push(ProbeLevel {
                depth,
                ratio: r.ratio,
            }),
            Ok(r) => {
                failure = Some(format!("non-finite ratio {} at depth {depth}", r.ratio));
                break;
            }
            Err(e) => {
                failure = Some(format!("depth {depth}: {e}"));
                break;
            }
        }
    }
    if levels.is_empty() {
        return Err(Error::Degenerate(
            failure.unwrap_or_else(|| "no probe level evaluated".into()),
        ));
    }
    let growth_factors: Vec<f64> = levels.windows(2).map(|w| w[1].ratio / w[0].ratio).collect();
    let diverging =
        levels.len() >= cfg.min_levels && growth_factors.iter().all(|g| *g >= cfg.threshold);
    Ok(ProbeResult {
        beta_used: beta_prime,
        levels,
        verdict: if diverging {
            Verdict::Diverging
        } else {
            Verdict::Bounded
        },
        growth_factors,
        truncated: failure.is_some(),
        failure,
    })
}
