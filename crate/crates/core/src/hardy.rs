//! Exponent tables, the logarithmic weight `delta^{-alpha} ln^{-beta}(rho)`,
//! the weighted left-hand side and the Hardy ratio against the full
//! `W^{s,p}` norm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Region};
use crate::params::{FracParams, Rational};
use crate::quadrature::{
    deterministic_sum, gagliardo_seminorm_parts, integrate, integrate_cells, GridSpec,
    SeminormOptions, SeminormParts, TestFunction,
};

/// The three domain classes of the main theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainClass {
    /// Bounded Lipschitz domains (slab, box, polygon).
    Bounded,
    /// Complements of a ball.
    Exterior,
    /// Epigraphs of Lipschitz graphs.
    Graph,
}

impl DomainClass {
    pub fn of(domain: &Domain) -> Self {
        match domain {
            Domain::Slab { .. } | Domain::Box(_) | Domain::Polygon(_) => DomainClass::Bounded,
            Domain::ExteriorBall { .. } => DomainClass::Exterior,
            Domain::Epigraph { .. } => DomainClass::Graph,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "1a")]
    C1a,
    #[serde(rename = "1b")]
    C1b,
    #[serde(rename = "1c")]
    C1c,
    #[serde(rename = "2a")]
    C2a,
    #[serde(rename = "2b")]
    C2b,
    #[serde(rename = "3a")]
    C3a,
    #[serde(rename = "3b")]
    C3b,
    #[serde(rename = "3c")]
    C3c,
}

impl CaseId {
    pub const ALL: [CaseId; 8] = [
        CaseId::C1a,
        CaseId::C1b,
        CaseId::C1c,
        CaseId::C2a,
        CaseId::C2b,
        CaseId::C3a,
        CaseId::C3b,
        CaseId::C3c,
    ];

    pub fn class(self) -> DomainClass {
        match self {
            CaseId::C1a | CaseId::C1b | CaseId::C1c => DomainClass::Bounded,
            CaseId::C2a | CaseId::C2b => DomainClass::Exterior,
            CaseId::C3a | CaseId::C3b | CaseId::C3c => DomainClass::Graph,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::C1a => "1a",
            CaseId::C1b => "1b",
            CaseId::C1c => "1c",
            CaseId::C2a => "2a",
            CaseId::C2b => "2b",
            CaseId::C3a => "3a",
            CaseId::C3b => "3b",
            CaseId::C3c => "3c",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| {
                Error::CaseDispatch(format!(
                    "unknown case `{s}`; expected one of 1a,1b,1c,2a,2b,3a,3b,3c"
                ))
            })
    }
}

/// A case of the main theorem together with parameters satisfying its hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardyCase {
    pub case_id: CaseId,
    pub fp: FracParams,
}

fn hypotheses_hold(case_id: CaseId, fp: &FracParams) -> std::result::Result<(), String> {
    let one = Rational::integer(1);
    let d = Rational::integer(fp.d as i64);
    let sp = fp.sp();
    let (tau, p) = (fp.tau, fp.p);
    let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };
    match case_id {
        CaseId::C1a | CaseId::C3a => {
            need(sp == one, "requires sp = 1")?;
            need(fp.d > 1, "requires d > 1")?;
            let pstar = fp.sobolev_exponent().ok_or("requires sp < d")?;
            need(
                p <= tau && tau <= pstar,
                &format!("requires p <= tau <= p*_s = {pstar}"),
            )
        }
        CaseId::C1b | CaseId::C3b => {
            need(sp == one, "requires sp = 1")?;
            need(fp.d == 1, "requires d = 1")?;
            need(tau >= p, "requires tau >= p")
        }
        CaseId::C1c | CaseId::C3c => {
            need(sp == one, "requires sp = 1")?;
            need(tau < p, "requires tau < p")
        }
        CaseId::C2a => {
            need(sp == d, "requires sp = d")?;
            need(tau >= p, "requires tau >= p")
        }
        CaseId::C2b => {
            need(sp == d, "requires sp = d")?;
            need(tau < p, "requires tau < p")
        }
    }
}

impl HardyCase {
    pub fn new(case_id: CaseId, fp: FracParams) -> Result<Self> {
        fp.validate()?;
        hypotheses_hold(case_id, &fp).map_err(|why| {
            Error::CaseDispatch(format!(
                "case {case_id} {why}; got d={}, p={}, s={}, tau={} (sp={})",
                fp.d,
                fp.p,
                fp.s,
                fp.tau,
                fp.sp()
            ))
        })?;
        Ok(HardyCase { case_id, fp })
    }

    /// The unique case of `class` whose hypotheses `fp` satisfies.
    pub fn classify(fp: FracParams, class: DomainClass) -> Result<Self> {
        let hits: Vec<CaseId> = CaseId::ALL
            .into_iter()
            .filter(|c| c.class() == class && hypotheses_hold(*c, &fp).is_ok())
            .collect();
        match hits.as_slice() {
            [one] => Ok(HardyCase { case_id: *one, fp }),
            [] => Err(Error::CaseDispatch(format!(
                "no {class:?} case matches d={}, p={}, s={}, tau={} (sp={}); cases need sp = 1 (bounded/graph) or sp = d (exterior)",
                fp.d,
                fp.p,
                fp.s,
                fp.tau,
                fp.sp()
            ))),
            many => Err(Error::CaseDispatch(format!("ambiguous: {many:?}"))),
        }
    }
}

/// Exact `(alpha, beta)` of the weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub alpha: Rational,
    pub beta: Rational,
}

pub fn critical_exponents(case: &HardyCase) -> Result<ExponentPair> {
    let fp = &case.fp;
    hypotheses_hold(case.case_id, fp)
        .map_err(|why| Error::CaseDispatch(format!("case {} {why}", case.case_id)))?;
    let d = Rational::integer(fp.d as i64);
    let one = Rational::integer(1);
    let pair = match case.case_id {
        CaseId::C1a | CaseId::C3a => {
            let alpha = d + (one - d) * fp.tau / fp.p;
            let beta = d * fp.p + (one - d) * fp.tau;
            if alpha < Rational::integer(0) || alpha > one || beta > fp.tau {
                return Err(Error::CaseDispatch(format!(
                    "exponent bounds violated: alpha={alpha}, beta={beta}"
                )));
            }
            ExponentPair { alpha, beta }
        }
        CaseId::C1b | CaseId::C3b => ExponentPair {
            alpha: one,
            beta: fp.tau,
        },
        CaseId::C1c | CaseId::C3c => ExponentPair {
            alpha: one,
            beta: fp.p,
        },
        CaseId::C2a => ExponentPair {
            alpha: d,
            beta: fp.tau,
        },
        CaseId::C2b => ExponentPair {
            alpha: d,
            beta: fp.p,
        },
    };
    Ok(pair)
}

/// Argument of the logarithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoKind {
    /// `rho = 2 / x_d`, with `x_d` also in place of `delta` (slab form).
    FlatSlab,
    /// `rho = 2R / delta`.
    BoundedCase,
    /// `rho = max(2R / delta, 2 delta / R)`.
    ExteriorCase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub alpha: f64,
    pub beta: f64,
    pub rho: RhoKind,
    /// Length scale `R`; unused by [`RhoKind::FlatSlab`].
    pub r: f64,
}

impl WeightSpec {
    pub fn new(exponents: ExponentPair, rho: RhoKind, r: f64) -> Self {
        WeightSpec {
            alpha: exponents.alpha.to_f64(),
            beta: exponents.beta.to_f64(),
            rho,
            r,
        }
    }

    /// Weight prescribed by the theorem for `case` on `domain`. `graph_r`
    /// sets `R` for epigraphs (default 1).
    pub fn for_case(case: &HardyCase, domain: &Domain, graph_r: Option<f64>) -> Result<Self> {
        let class = DomainClass::of(domain);
        if class != case.case_id.class() {
            return Err(Error::CaseDispatch(format!(
                "case {} does not apply to a {class:?} domain",
                case.case_id
            )));
        }
        let e = critical_exponents(case)?;
        Ok(match domain {
            Domain::Slab { .. } => WeightSpec::new(e, RhoKind::FlatSlab, 1.0),
            Domain::Box(_) | Domain::Polygon(_) => {
                let r = domain.max_interior_distance().expect("bounded");
                WeightSpec::new(e, RhoKind::BoundedCase, r)
            }
            Domain::ExteriorBall { radius, .. } => {
                WeightSpec::new(e, RhoKind::ExteriorCase, *radius)
            }
            Domain::Epigraph { .. } => {
                let r = graph_r.unwrap_or(1.0);
                if !(r > 0.0) {
                    return Err(Error::param("graph length scale R must be positive"));
                }
                WeightSpec::new(e, RhoKind::BoundedCase, r)
            }
        })
    }

    pub fn with_beta(self, beta: f64) -> Self {
        WeightSpec { beta, ..self }
    }
}

/// `delta^{-alpha} ln^{-beta}(rho(x))`.
pub fn weight_value(w: &WeightSpec, domain: &Domain, x: &[f64]) -> Result<f64> {
    let delta = match w.rho {
        RhoKind::FlatSlab => {
            let xd = x[x.len() - 1];
            if !domain.contains_closed(x) {
                return Err(Error::DomainMembership { point: x.to_vec() });
            }
            xd
        }
        _ => domain.distance_to_boundary(x)?,
    };
    if !(delta > 0.0) {
        return Err(Error::DomainMembership { point: x.to_vec() });
    }
    let rho = match w.rho {
        RhoKind::FlatSlab => 2.0 / delta,
        RhoKind::BoundedCase => 2.0 * w.r / delta,
        RhoKind::ExteriorCase => (2.0 * w.r / delta).max(2.0 * delta / w.r),
    };
    if !(rho > 1.0) {
        return Err(Error::WeightDomain {
            point: x.to_vec(),
            rho,
        });
    }
    let mut v = 1.0;
    if w.alpha != 0.0 {
        v *= delta.powf(-w.alpha);
    }
    if w.beta != 0.0 {
        v *= rho.ln().powf(-w.beta);
    }
    Ok(v)
}

/// `(int_D |u|^tau / (delta^alpha ln^beta rho))^{1/tau}`.
pub fn hardy_lhs(
    u: &TestFunction,
    domain: &Domain,
    w: &WeightSpec,
    tau: f64,
    grid: &GridSpec,
) -> Result<f64> {
    if !(tau >= 1.0) {
        return Err(Error::param(format!("tau = {tau} must be >= 1")));
    }
    let cells = grid.cells();
    // The weight may be undefined off the support, so it is evaluated only
    // where u is nonzero.
    let value = deterministic_sum(cells.len(), |i| {
        let c = &cells[i];
        if !domain.contains(&c.center) {
            return Ok(0.0);
        }
        let v = u.value(&c.center);
        if v == 0.0 {
            return Ok(0.0);
        }
        let term = v.abs().powf(tau) * weight_value(w, domain, &c.center)? * c.weight;
        if !term.is_finite() {
            return Err(Error::NonFinite {
                node: c.center.clone(),
                value: term,
            });
        }
        Ok(term)
    })?;
    Ok(value.powf(1.0 / tau))
}

/// Components of the empirical Hardy constant for one function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyRatio {
    pub lhs: f64,
    pub lp_norm: f64,
    pub seminorm: f64,
    pub ratio: f64,
    pub seminorm_parts: SeminormParts,
}

/// `x_d - gamma(x') < R` on the support, for the graph case.
fn check_graph_strip(u: &TestFunction, domain: &Domain, r: f64, grid: &GridSpec) -> Result<()> {
    if let Domain::Epigraph { graph, d } = domain {
        for c in grid.cells() {
            if u.value(&c.center) != 0.0 && c.center[d - 1] - graph.eval(&c.center[..d - 1]) >= r {
                return Err(Error::param(format!(
                    "support point {:?} leaves the strip x_d - gamma(x') < R = {r}",
                    c.center
                )));
            }
        }
    }
    Ok(())
}

/// Ratio with the weight the theorem prescribes for `case`.
pub fn hardy_ratio(
    u: &TestFunction,
    domain: &Domain,
    case: &HardyCase,
    grid: &GridSpec,
) -> Result<HardyRatio> {
    let w = WeightSpec::for_case(case, domain, None)?;
    if case.case_id.class() == DomainClass::Graph {
        check_graph_strip(u, domain, w.r, grid)?;
    }
    hardy_ratio_with(u, domain, &case.fp, &w, grid, &SeminormOptions::default())
}

/// `lhs / (||u||_p^p + [u]^p)^{1/p}` for an explicit weight.
pub fn hardy_ratio_with(
    u: &TestFunction,
    domain: &Domain,
    fp: &FracParams,
    w: &WeightSpec,
    grid: &GridSpec,
    opts: &SeminormOptions,
) -> Result<HardyRatio> {
    let p = fp.p_f64();
    let lhs = hardy_lhs(u, domain, w, fp.tau_f64(), grid)?;
    let lp_p = integrate(|x| u.value(x).abs().powf(p), grid, Some(domain))?;
    let parts = gagliardo_seminorm_parts(u, domain, fp, grid, opts)?;
    let denom = (lp_p + parts.total).powf(1.0 / p);
    if !(denom > 0.0) {
        return Err(Error::Degenerate("W^{s,p} norm of u vanishes".into()));
    }
    Ok(HardyRatio {
        lhs,
        lp_norm: lp_p.powf(1.0 / p),
        seminorm: parts.seminorm(p),
        ratio: lhs / denom,
        seminorm_parts: parts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub theta: f64,
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Hoelder split with `tau = theta p + (1 - theta) p*_s`, `a = theta`,
/// `b = theta p`, on the slab weight `x_d`, `ln(2 / x_d)`.
pub fn holder_interpolation_check(
    u: &TestFunction,
    fp: &FracParams,
    theta: f64,
    grid: &GridSpec,
) -> Result<HolderCheck> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::param(format!("theta = {theta} must lie in [0, 1]")));
    }
    if fp.sp() != Rational::integer(1) || fp.d < 2 {
        return Err(Error::param("the Hoelder split needs sp = 1 < d"));
    }
    let d = fp.d;
    if !(grid.support.lo[d - 1] > 0.0 && grid.support.hi[d - 1] <= 1.0) {
        return Err(Error::param("grid must lie in 0 < x_d <= 1"));
    }
    let p = fp.p_f64();
    let pstar = fp.sobolev_exponent().expect("sp < d").to_f64();
    let tau = theta * p + (1.0 - theta) * pstar;
    let (a, b) = (theta, theta * p);
    let cells = grid.cells();
    let ln = |x: &[f64]| (2.0 / x[d - 1]).ln();
    let lhs = integrate_cells(
        |x| u.value(x).abs().powf(tau) / (x[d - 1].powf(a) * ln(x).powf(b)),
        &cells,
        None,
    )?;
    let weighted = integrate_cells(
        |x| u.value(x).abs().powf(p) / (x[d - 1] * ln(x).powf(p)),
        &cells,
        None,
    )?;
    let sobolev = integrate_cells(|x| u.value(x).abs().powf(pstar), &cells, None)?;
    let rhs = if theta == 0.0 {
        sobolev
    } else if theta == 1.0 {
        weighted
    } else {
        weighted.powf(theta) * sobolev.powf(1.0 - theta)
    };
    Ok(HolderCheck {
        theta,
        tau,
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

/// Values under successive grid doublings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderVerdict {
    pub values: Vec<f64>,
    pub divergent: bool,
}

/// Evaluates `f` on `grid` and `rungs` successive refinements; divergent
/// when every rung at least doubles the value.
pub fn divergence_ladder<F>(f: F, grid: &GridSpec, rungs: usize) -> Result<LadderVerdict>
where
    F: Fn(&GridSpec) -> Result<f64>,
{
    let mut g = grid.clone();
    let mut values = vec![f(&g)?];
    for _ in 0..rungs {
        g = g.refined();
        values.push(f(&g)?);
    }
    let divergent = rungs > 0 && values.windows(2).all(|w| w[1] >= 2.0 * w[0] && w[0] > 0.0);
    Ok(LadderVerdict { values, divergent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoxRegion;

    fn case(id: &str, d: usize, p: &str, s: &str, tau: &str) -> Result<HardyCase> {
        HardyCase::new(id.parse()?, FracParams::parse(d, p, s, tau)?)
    }

    #[test]
    fn exponent_examples() {
        let e = critical_exponents(&case("1a", 2, "2", "1/2", "2").unwrap()).unwrap();
        assert_eq!(
            (e.alpha, e.beta),
            (Rational::integer(1), Rational::integer(2))
        );
        let e = critical_exponents(&case("1a", 2, "2", "1/2", "4").unwrap()).unwrap();
        assert_eq!(
            (e.alpha, e.beta),
            (Rational::integer(0), Rational::integer(0))
        );
        let e = critical_exponents(&case("2a", 2, "4", "1/2", "5").unwrap()).unwrap();
        assert_eq!(
            (e.alpha, e.beta),
            (Rational::integer(2), Rational::integer(5))
        );
    }

    #[test]
    fn case_hypotheses_are_enforced() {
        assert!(matches!(
            case("1a", 2, "2", "1/2", "5"),
            Err(Error::CaseDispatch(_))
        ));
        assert!(matches!(
            case("1b", 2, "2", "1/2", "2"),
            Err(Error::CaseDispatch(_))
        ));
        assert!(matches!(
            case("2a", 2, "2", "1/2", "2"),
            Err(Error::CaseDispatch(_))
        ));
        assert!(matches!(
            case("1c", 1, "2", "1/2", "2"),
            Err(Error::CaseDispatch(_))
        ));
        let fp = FracParams::parse(2, "3", "1/2", "3").unwrap();
        assert!(matches!(
            HardyCase::classify(fp, DomainClass::Bounded),
            Err(Error::CaseDispatch(_))
        ));
        let fp = FracParams::parse(1, "2", "1/2", "3/2").unwrap();
        assert_eq!(
            HardyCase::classify(fp, DomainClass::Graph).unwrap().case_id,
            CaseId::C3c
        );
    }

    #[test]
    fn weight_examples() {
        let slab = Domain::slab(1, 1);
        let w = WeightSpec {
            alpha: 1.0,
            beta: 2.0,
            rho: RhoKind::FlatSlab,
            r: 1.0,
        };
        let v = weight_value(&w, &slab, &[0.5]).unwrap();
        assert!((v - 2.0 / 4f64.ln().powi(2)).abs() < 1e-15);

        let ext = Domain::ExteriorBall { radius: 1.0, d: 2 };
        let w = WeightSpec {
            alpha: 2.0,
            beta: 3.0,
            rho: RhoKind::ExteriorCase,
            r: 1.0,
        };
        let v = weight_value(&w, &ext, &[1.5, 0.0]).unwrap();
        assert!((v - 0.5f64.powi(-2) * 4f64.ln().powf(-3.0)).abs() < 1e-12);
        let near = weight_value(&w, &ext, &[1.0 + 1e-9, 0.0]).unwrap();
        assert!(near > 1e13);

        let flat = WeightSpec {
            alpha: 0.0,
            beta: 0.0,
            rho: RhoKind::FlatSlab,
            r: 1.0,
        };
        assert_eq!(weight_value(&flat, &slab, &[0.3]).unwrap(), 1.0);

        let bx = Domain::Box(BoxRegion::new(vec![0.0], vec![4.0]).unwrap());
        let small_r = WeightSpec {
            alpha: 1.0,
            beta: 1.0,
            rho: RhoKind::BoundedCase,
            r: 0.25,
        };
        assert!(matches!(
            weight_value(&small_r, &bx, &[2.0]),
            Err(Error::WeightDomain { .. })
        ));
    }

    #[test]
    fn lhs_reduces_to_lp_norm_for_trivial_weight() {
        let slab = Domain::slab(1, 1);
        let g = GridSpec::uniform(BoxRegion::new(vec![0.25], vec![0.75]).unwrap(), 64).unwrap();
        let u = TestFunction::bump(vec![0.5], vec![0.25]);
        let w = WeightSpec {
            alpha: 0.0,
            beta: 0.0,
            rho: RhoKind::FlatSlab,
            r: 1.0,
        };
        let lhs = hardy_lhs(&u, &slab, &w, 3.0, &g).unwrap();
        let lp = crate::quadrature::lp_norm(&u, &slab, 3.0, &g).unwrap();
        assert!((lhs - lp).abs() < 1e-14);
        assert_eq!(
            hardy_lhs(&TestFunction::constant(0.0), &slab, &w, 2.0, &g).unwrap(),
            0.0
        );
    }

    #[test]
    fn lhs_self_converges() {
        let slab = Domain::slab(1, 1);
        let b = BoxRegion::new(vec![0.25], vec![0.75]).unwrap();
        let u = TestFunction::bump(vec![0.5], vec![0.25]);
        let w = WeightSpec {
            alpha: 1.0,
            beta: 2.0,
            rho: RhoKind::FlatSlab,
            r: 1.0,
        };
        let coarse = hardy_lhs(
            &u,
            &slab,
            &w,
            2.0,
            &GridSpec::uniform(b.clone(), 64).unwrap(),
        )
        .unwrap();
        let fine = hardy_lhs(&u, &slab, &w, 2.0, &GridSpec::uniform(b, 256).unwrap()).unwrap();
        assert!((coarse - fine).abs() / fine < 1e-3);
    }

    #[test]
    fn ratio_is_homogeneous_and_monotone_in_beta() {
        let slab = Domain::slab(1, 2);
        let g = GridSpec::uniform(
            BoxRegion::new(vec![-0.5, 0.05], vec![0.5, 0.45]).unwrap(),
            16,
        )
        .unwrap();
        let u = TestFunction::bump(vec![0.0, 0.25], vec![0.5, 0.2]);
        let c = case("1a", 2, "2", "1/2", "2").unwrap();
        let r1 = hardy_ratio(&u, &slab, &c, &g).unwrap();
        let r2 = hardy_ratio(&u.clone().scaled(-7.5), &slab, &c, &g).unwrap();
        assert!(r1.ratio > 0.0 && r1.ratio.is_finite());
        assert!((r1.ratio - r2.ratio).abs() <= 1e-12 * r1.ratio);
        // ln(2/x_d) >= ln(2/0.45) > 1 on the support, so larger beta shrinks the weight.
        let w = WeightSpec::for_case(&c, &slab, None).unwrap();
        let opts = SeminormOptions::default();
        let a = hardy_ratio_with(&u, &slab, &c.fp, &w, &g, &opts)
            .unwrap()
            .ratio;
        let b = hardy_ratio_with(&u, &slab, &c.fp, &w.with_beta(w.beta + 1.0), &g, &opts)
            .unwrap()
            .ratio;
        assert!(b <= a);
    }

    #[test]
    fn zero_function_is_degenerate() {
        let slab = Domain::slab(1, 1);
        let g = GridSpec::uniform(BoxRegion::new(vec![0.25], vec![0.75]).unwrap(), 8).unwrap();
        let c = case("1b", 1, "2", "1/2", "2").unwrap();
        let zero = TestFunction::bump(vec![0.5], vec![0.25]).scaled(0.0);
        assert!(matches!(
            hardy_ratio(&zero, &slab, &c, &g),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn holder_split() {
        let fp = FracParams::parse(2, "2", "1/2", "2").unwrap();
        let g = GridSpec::uniform(
            BoxRegion::new(vec![-0.5, 0.05], vec![0.5, 0.45]).unwrap(),
            32,
        )
        .unwrap();
        let u = TestFunction::bump(vec![0.0, 0.25], vec![0.5, 0.2]);
        for theta in [0.0, 1.0] {
            let h = holder_interpolation_check(&u, &fp, theta, &g).unwrap();
            assert!(h.slack.abs() <= 1e-12 * h.lhs, "{h:?}");
        }
        let h = holder_interpolation_check(&u, &fp, 0.5, &g).unwrap();
        assert_eq!(h.tau, 3.0);
        assert!(h.slack >= -1e-9);
        assert!(holder_interpolation_check(&u, &fp, 1.5, &g).is_err());
    }

    #[test]
    fn ladder_detects_growth() {
        let g = GridSpec::uniform(BoxRegion::new(vec![0.0], vec![1.0]).unwrap(), 8).unwrap();
        let v = divergence_ladder(|g| Ok(g.cells[0] as f64), &g, 3).unwrap();
        assert!(v.divergent);
        let v = divergence_ladder(|_| Ok(1.0), &g, 3).unwrap();
        assert!(!v.divergent);
    }
}
