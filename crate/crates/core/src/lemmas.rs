//! Supporting inequalities as slack functions `RHS - LHS`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dyadic_layers, parent_cube, Annulus, BoxRegion, Domain, Region};
use crate::params::{FracParams, Rational};
use crate::quadrature::{
    gagliardo_seminorm_parts, integrate_cells, GridSpec, SeminormOptions, TestFunction,
};

/// One inequality instance. `passed` is `slack >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    pub lemma_id: String,
    pub inputs: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SlackReport {
    fn new(lemma_id: &str, inputs: &[(&str, f64)], lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        SlackReport {
            lemma_id: lemma_id.to_string(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs,
            rhs,
            slack,
            tolerance,
            passed: slack >= -tolerance,
        }
    }
}

pub const ELEMENTARY_TOLERANCE: f64 = 1e-12;
pub const AVERAGE_DIFFERENCE_TOLERANCE: f64 = 1e-9;

fn check_c_tau(c: f64, tau: f64) -> Result<()> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(Error::param(format!("c = {c} must exceed 1")));
    }
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(Error::param(format!("tau = {tau} must exceed 1")));
    }
    Ok(())
}

/// `(1 - c^{-1/(tau-1)})^{1-tau}`, the coefficient of `|b|^tau`.
pub fn elementary_coefficient(c: f64, tau: f64) -> f64 {
    (1.0 - c.powf(-1.0 / (tau - 1.0))).powf(1.0 - tau)
}

/// `c|a|^tau + (1 - c^{-1/(tau-1)})^{1-tau} |b|^tau - (|a| + |b|)^tau`.
pub fn elementary_inequality_slack(a: f64, b: f64, c: f64, tau: f64) -> Result<SlackReport> {
    check_c_tau(c, tau)?;
    let (a_abs, b_abs) = (a.abs(), b.abs());
    let lhs = (a_abs + b_abs).powf(tau);
    let rhs = c * a_abs.powf(tau) + elementary_coefficient(c, tau) * b_abs.powf(tau);
    Ok(SlackReport::new(
        "elementary",
        &[("a", a), ("b", b), ("c", c), ("tau", tau)],
        lhs,
        rhs,
        ELEMENTARY_TOLERANCE,
    ))
}

/// `x_0 = 1 / (c^{1/(tau-1)} - 1)`, where `(1 + x)^tau - c x^tau` peaks.
pub fn maximizer_x0(c: f64, tau: f64) -> Result<f64> {
    check_c_tau(c, tau)?;
    Ok(1.0 / (c.powf(1.0 / (tau - 1.0)) - 1.0))
}

fn box_cells(b: &BoxRegion, resolution: usize) -> Result<Vec<crate::quadrature::Cell>> {
    Ok(GridSpec::uniform(b.clone(), resolution)?.cells())
}

/// Average-difference inequality with `C = 2^tau` on two disjoint boxes,
/// each discretized by `resolution` midpoint cells per axis.
pub fn average_difference_slack(
    u: &TestFunction,
    e: &BoxRegion,
    f: &BoxRegion,
    tau: f64,
    resolution: usize,
) -> Result<SlackReport> {
    if !(tau >= 1.0) {
        return Err(Error::param(format!("tau = {tau} must be >= 1")));
    }
    e.validate()?;
    f.validate()?;
    if !e.disjoint_interiors(f) {
        return Err(Error::param("E and F overlap"));
    }
    let ce = box_cells(e, resolution)?;
    let cf = box_cells(f, resolution)?;
    let (me, mf) = (
        integrate_cells(|_| 1.0, &ce, None)?,
        integrate_cells(|_| 1.0, &cf, None)?,
    );
    let ue = integrate_cells(|x| u.value(x), &ce, None)? / me;
    let uf = integrate_cells(|x| u.value(x), &cf, None)? / mf;
    let union = me + mf;
    let mean = (me * ue + mf * uf) / union;
    let dev = integrate_cells(|x| (u.value(x) - mean).abs().powf(tau), &ce, None)?
        + integrate_cells(|x| (u.value(x) - mean).abs().powf(tau), &cf, None)?;
    let lhs = (ue - uf).abs().powf(tau);
    let rhs = 2f64.powf(tau) * union / me.min(mf) * (dev / union);
    Ok(SlackReport::new(
        "average_difference",
        &[("tau", tau), ("measure_e", me), ("measure_f", mf)],
        lhs,
        rhs,
        AVERAGE_DIFFERENCE_TOLERANCE,
    ))
}

/// `(sum |a_l|)^beta - sum |a_l|^beta`.
pub fn power_sum_slack(values: &[f64], beta: f64) -> Result<SlackReport> {
    if values.is_empty() {
        return Err(Error::param("power sum needs at least one value"));
    }
    if !(beta >= 1.0) {
        return Err(Error::param(format!("beta = {beta} must be >= 1")));
    }
    let lhs: f64 = values.iter().map(|v| v.abs().powf(beta)).sum();
    let rhs = values.iter().map(|v| v.abs()).sum::<f64>().powf(beta);
    let tol = 1e-12 * rhs.max(1.0);
    Ok(SlackReport::new(
        "power_sum",
        &[("beta", beta), ("count", values.len() as f64)],
        lhs,
        rhs,
        tol,
    ))
}

/// Region family for the scaled Sobolev inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalableRegion {
    Box(BoxRegion),
    Annulus(Annulus),
}

impl ScalableRegion {
    pub fn scaled(&self, lambda: f64) -> Self {
        match self {
            ScalableRegion::Box(b) => ScalableRegion::Box(b.scaled(lambda)),
            ScalableRegion::Annulus(a) => ScalableRegion::Annulus(a.scaled(lambda)),
        }
    }

    pub fn region(&self) -> &dyn Region {
        match self {
            ScalableRegion::Box(b) => b,
            ScalableRegion::Annulus(a) => a,
        }
    }

    pub fn bounding_box(&self) -> BoxRegion {
        self.region().bounding_box().expect("bounded")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevRatio {
    pub lambda: f64,
    /// `(mean_{D_lambda} |u_lambda - (u_lambda)|^tau)^{1/tau}`.
    pub lhs: f64,
    /// `(lambda^{sp-d} [u_lambda]^p)^{1/p}`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Ratio of the two sides of the scaled Sobolev inequality for
/// `u_lambda(x) = u(x / lambda)` on `D_lambda = lambda D`, with the grid
/// for `D` given by `resolution` cells on the shortest side of its box.
pub fn scaled_sobolev_ratio(
    u: &TestFunction,
    lambda: f64,
    fp: &FracParams,
    base: &ScalableRegion,
    resolution: usize,
) -> Result<SobolevRatio> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda = {lambda} must be positive")));
    }
    let d = Rational::integer(fp.d as i64);
    let sp = fp.sp();
    if sp > d {
        return Err(Error::param("scaled Sobolev inequality needs sp <= d"));
    }
    if fp.tau < fp.p || fp.sobolev_exponent().is_some_and(|ps| fp.tau > ps) {
        return Err(Error::param(format!(
            "tau = {} outside the admissible range",
            fp.tau
        )));
    }
    let region = base.scaled(lambda);
    let grid = GridSpec::balanced(region.bounding_box(), resolution)?;
    let ul = u.clone().dilated(lambda);
    let cells = grid.cells();
    let mask = Some(region.region());
    let measure = integrate_cells(|_| 1.0, &cells, mask)?;
    let mean = integrate_cells(|x| ul.value(x), &cells, mask)? / measure;
    let tau = fp.tau_f64();
    let lhs = (integrate_cells(|x| (ul.value(x) - mean).abs().powf(tau), &cells, mask)? / measure)
        .powf(1.0 / tau);
    let parts =
        gagliardo_seminorm_parts(&ul, region.region(), fp, &grid, &SeminormOptions::default())?;
    let p = fp.p_f64();
    let rhs = (lambda.powf(fp.sp_f64() - fp.d as f64) * parts.total).powf(1.0 / p);
    let ratio = if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        lhs / rhs
    } else {
        return Err(Error::Degenerate(
            "seminorm vanishes for a non-constant function".into(),
        ));
    };
    Ok(SobolevRatio {
        lambda,
        lhs,
        rhs,
        ratio,
    })
}

/// The constant identity behind the telescoping step at layer `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopeIdentity {
    pub k: i32,
    /// `1 - c^{-1/(tau-1)} = 1/(2(-k))` holds in exact rational arithmetic.
    pub exact: bool,
    /// `(1 - c^{-1/(tau-1)})^{1-tau}` evaluated from `c` in floating point.
    pub lhs: f64,
    /// `2^{tau-1} (-k)^{tau-1}`.
    pub rhs: f64,
    pub relative_error: f64,
}

/// With `c = (-k / (-k - 1/2))^{tau-1}`: `(1 - c^{-1/(tau-1)})^{1-tau} = 2^{tau-1}(-k)^{tau-1}`.
pub fn telescoping_identity(k: i32, tau: Rational) -> Result<TelescopeIdentity> {
    if k > -1 {
        return Err(Error::param(format!(
            "layer index k = {k} must be negative"
        )));
    }
    if tau <= Rational::integer(1) {
        return Err(Error::param("tau must exceed 1"));
    }
    let mk = Rational::integer(-k as i64);
    // c^{-1/(tau-1)} is exactly the rational (-k - 1/2)/(-k).
    let q = (mk - Rational::new(1, 2)) / mk;
    let exact = Rational::integer(1) - q == Rational::integer(1) / (Rational::integer(2) * mk);
    let t = tau.to_f64();
    let c = (-(k as f64) / (-(k as f64) - 0.5)).powf(t - 1.0);
    let lhs = elementary_coefficient(c, t);
    let rhs = 2f64.powf(t - 1.0) * (-(k as f64)).powf(t - 1.0);
    Ok(TelescopeIdentity {
        k,
        exact,
        lhs,
        rhs,
        relative_error: (lhs - rhs).abs() / rhs,
    })
}

/// `(1/(-k)^{tau-1} - 1/(-k+1/2)^{tau-1}) / (1/(-k)^tau)`; tends to `(tau-1)/2`.
pub fn telescoping_asymptotic_ratio(k: i32, tau: f64) -> f64 {
    let x = -(k as f64);
    (x.powf(1.0 - tau) - (x + 0.5).powf(1.0 - tau)) * x.powf(tau)
}

/// Sizes and seed for [`lemma_suite`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaSuiteConfig {
    pub elementary_draws: usize,
    pub equality_draws: usize,
    pub average_cases: usize,
    pub average_resolution: usize,
    pub power_sum_draws: usize,
    pub telescope_k_min: i32,
    pub asymptotic_k_min: i32,
    pub tau: Rational,
}

impl Default for LemmaSuiteConfig {
    fn default() -> Self {
        LemmaSuiteConfig {
            elementary_draws: 100_000,
            equality_draws: 100,
            average_cases: 1_000,
            average_resolution: 8,
            power_sum_draws: 10_000,
            telescope_k_min: -40,
            asymptotic_k_min: -400,
            tau: Rational::integer(2),
        }
    }
}

/// Minimum slack per lemma plus the telescoping checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub elementary_min_slack: f64,
    pub elementary_worst: SlackReport,
    /// Largest `slack / (|a|+|b|)^tau` at `a/b = x_0`.
    pub equality_max_slack: f64,
    pub average_min_slack: f64,
    pub average_worst: SlackReport,
    pub power_sum_min_slack: f64,
    pub telescope_identity_exact: bool,
    pub telescope_identity_max_rel_error: f64,
    pub asymptotic_min: f64,
    pub asymptotic_max: f64,
    pub asymptotic_limit: f64,
    pub asymptotic_series: Vec<(i32, f64)>,
    pub passed: bool,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn worst(reports: Vec<SlackReport>) -> SlackReport {
    reports
        .into_iter()
        .reduce(|a, b| if b.slack < a.slack { b } else { a })
        .expect("non-empty")
}

/// One random adjacent pair of dyadic cubes of the unit slab and a bump
/// around them.
fn dyadic_pair_case(rng: &mut ChaCha8Rng) -> Result<(BoxRegion, BoxRegion, TestFunction, f64)> {
    let d = rng.gen_range(1..=2usize);
    let k = rng.gen_range(-4..=-2);
    let layers = dyadic_layers(&Domain::slab(1, d), k)?;
    let layer = &layers[0];
    let i = rng.gen_range(0..layer.count());
    let e = layer.cubes[i].to_box();
    let f = if d == 2 && rng.gen_bool(0.5) {
        // Horizontal neighbour in the same layer (wrapping to the left end).
        let j = if i + 1 < layer.count() { i + 1 } else { i - 1 };
        layer.cubes[j].to_box()
    } else {
        layers[1].cubes[parent_cube(layer, i)?].to_box()
    };
    let lo: Vec<f64> = e.lo.iter().zip(&f.lo).map(|(a, b)| a.min(*b)).collect();
    let hi: Vec<f64> = e.hi.iter().zip(&f.hi).map(|(a, b)| a.max(*b)).collect();
    let center: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| rng.gen_range(*l..*h))
        .collect();
    let radius: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| rng.gen_range(0.2..1.5) * (h - l))
        .collect();
    let tau = rng.gen_range(1.0..4.0);
    Ok((
        e,
        f,
        TestFunction::bump(center, radius).scaled(rng.gen_range(-3.0..3.0)),
        tau,
    ))
}

pub fn lemma_suite(cfg: &LemmaSuiteConfig, seed: u64) -> Result<LemmaSuiteReport> {
    let elementary: Vec<SlackReport> = (0..cfg.elementary_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let a = rng.gen_range(-10.0..=10.0);
            let b = rng.gen_range(-10.0..=10.0);
            let c = 1.0 + (10.0 - 1.0) * (1.0 - rng.gen::<f64>());
            let tau = 1.0 + 5.0 * (1.0 - rng.gen::<f64>());
            elementary_inequality_slack(a, b, c, tau)
        })
        .collect::<Result<_>>()?;
    let elementary_worst = worst(elementary);

    let equality: Vec<f64> = (0..cfg.equality_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed ^ 0xE0, i as u64);
            let c = rng.gen_range(1.1..10.0);
            let tau = rng.gen_range(1.2..6.0);
            let b = rng.gen_range(0.1..10.0);
            let x0 = maximizer_x0(c, tau)?;
            let r = elementary_inequality_slack(x0 * b, b, c, tau)?;
            Ok(r.slack / r.lhs)
        })
        .collect::<Result<_>>()?;
    let equality_max_slack = equality.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let average: Vec<SlackReport> = (0..cfg.average_cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed ^ 0xA2, i as u64);
            let (e, f, u, tau) = dyadic_pair_case(&mut rng)?;
            average_difference_slack(&u, &e, &f, tau, cfg.average_resolution)
        })
        .collect::<Result<_>>()?;
    let average_worst = worst(average);

    let power: Vec<f64> = (0..cfg.power_sum_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed ^ 0x95, i as u64);
            let n = rng.gen_range(1..20);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let beta = rng.gen_range(1.0..=5.0);
            let r = power_sum_slack(&values, beta)?;
            Ok(r.slack + r.tolerance)
        })
        .collect::<Result<_>>()?;
    let power_sum_min_slack = power.iter().cloned().fold(f64::INFINITY, f64::min);

    let ids: Vec<TelescopeIdentity> = (cfg.telescope_k_min..=-2)
        .map(|k| telescoping_identity(k, cfg.tau))
        .collect::<Result<_>>()?;
    let telescope_identity_exact = ids.iter().all(|t| t.exact);
    let telescope_identity_max_rel_error = ids.iter().map(|t| t.relative_error).fold(0.0, f64::max);

    let tau = cfg.tau.to_f64();
    let asymptotic_series: Vec<(i32, f64)> = (cfg.asymptotic_k_min..=-4)
        .rev()
        .map(|k| (k, telescoping_asymptotic_ratio(k, tau)))
        .collect();
    let asymptotic_min = asymptotic_series
        .iter()
        .map(|v| v.1)
        .fold(f64::INFINITY, f64::min);
    let asymptotic_max = asymptotic_series
        .iter()
        .map(|v| v.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let asymptotic_limit = asymptotic_series.last().map_or(f64::NAN, |v| v.1);

    let passed = elementary_worst.passed
        && equality_max_slack <= 1e-9
        && average_worst.passed
        && power_sum_min_slack >= 0.0
        && telescope_identity_exact
        && telescope_identity_max_rel_error <= 1e-12
        && asymptotic_min >= 0.2
        && asymptotic_max <= 5.0;
    Ok(LemmaSuiteReport {
        elementary_min_slack: elementary_worst.slack,
        elementary_worst,
        equality_max_slack,
        average_min_slack: average_worst.slack,
        average_worst,
        power_sum_min_slack,
        telescope_identity_exact,
        telescope_identity_max_rel_error,
        asymptotic_min,
        asymptotic_max,
        asymptotic_limit,
        asymptotic_series,
        passed,
    })
}
