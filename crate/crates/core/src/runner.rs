//! Experiment configs, dispatch to the modules and machine-readable result
//! records (one JSON summary plus one CSV per series).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{
    blowup_probe, estimate_constant, telescoping_reconstruction, FunctionFamily, ProbeConfig,
    SearchConfig, TelescopeConfig, Verdict,
};
use crate::geometry::{Domain, Region};
use crate::hardy::{critical_exponents, hardy_ratio, CaseId, DomainClass, HardyCase};
use crate::lemmas::{lemma_suite, LemmaSuiteConfig};
use crate::params::FracParams;
use crate::quadrature::{gagliardo_seminorm_parts, GridSpec, SeminormOptions, TestFunction};

/// Version of the [`ExperimentRecord`] JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Exponents,
    Seminorm,
    HardyCheck,
    EstimateConstant,
    BlowupProbe,
    LemmaSuite,
    Telescope,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Exponents => "exponents",
            Command::Seminorm => "seminorm",
            Command::HardyCheck => "hardy-check",
            Command::EstimateConstant => "estimate-constant",
            Command::BlowupProbe => "blowup-probe",
            Command::LemmaSuite => "lemma-suite",
            Command::Telescope => "telescope",
        }
    }
}

fn default_resolution() -> usize {
    32
}

/// One experiment. Sections not used by `command` are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<FracParams>,
    /// Hardy case; inferred from the domain class when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseId>,
    /// Cells per axis (shortest side for balanced grids); a power of two >= 8.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<TestFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FunctionFamily>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    /// Probe exponent; defaults to the critical `beta` of the case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_prime: Option<f64>,
    /// Expected probe verdict; a mismatch fails the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Verdict>,
    #[serde(default)]
    pub lemmas: LemmaSuiteConfig,
    #[serde(default)]
    pub telescope: TelescopeConfig,
    /// Deepest dyadic layer `m` for the telescoping reconstruction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<i32>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            domain: None,
            params: None,
            case: None,
            resolution: default_resolution(),
            seed: 0,
            output: None,
            function: None,
            family: None,
            search: SearchConfig::default(),
            probe: ProbeConfig::default(),
            beta_prime: None,
            expect: None,
            lemmas: LemmaSuiteConfig::default(),
            telescope: TelescopeConfig::default(),
            depth: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("<root>", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, without the output location (which
    /// does not affect results).
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(&ExperimentConfig {
            output: None,
            ..self.clone()
        })
        .expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    fn need<'a, T>(value: &'a Option<T>, field: &str, command: Command) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| {
            Error::config(field, format!("required by command {}", command.as_str()))
        })
    }

    /// Field-level validation against the preconditions of `command`.
    pub fn validate(&self) -> Result<()> {
        let c = self.command;
        let wrap = |field: &'static str| move |e: Error| Error::config(field, e.to_string());
        if self.resolution < 8 || !self.resolution.is_power_of_two() {
            return Err(Error::config(
                "resolution",
                format!("{} is not a power of two >= 8", self.resolution),
            ));
        }
        if let Some(domain) = &self.domain {
            domain.validate().map_err(wrap("domain"))?;
        }
        if let Some(fp) = &self.params {
            fp.validate().map_err(wrap("params"))?;
            if let Some(domain) = &self.domain {
                if domain.dim() != fp.d {
                    return Err(Error::config(
                        "params.d",
                        format!(
                            "{} differs from the domain dimension {}",
                            fp.d,
                            domain.dim()
                        ),
                    ));
                }
            }
        }
        if let (Some(u), Some(domain)) = (&self.function, &self.domain) {
            u.validate(domain.dim()).map_err(wrap("function"))?;
        }
        match c {
            Command::Exponents => {
                Self::need(&self.params, "params", c)?;
                if self.case.is_none() && self.domain.is_none() {
                    return Err(Error::config(
                        "case",
                        "give a case or a domain to infer it from",
                    ));
                }
            }
            Command::Seminorm | Command::HardyCheck => {
                Self::need(&self.domain, "domain", c)?;
                Self::need(&self.params, "params", c)?;
                Self::need(&self.function, "function", c)?;
            }
            Command::EstimateConstant => {
                Self::need(&self.domain, "domain", c)?;
                Self::need(&self.params, "params", c)?;
                Self::need(&self.family, "family", c)?;
                if self.search.starts == 0 || self.search.budget < 2 {
                    return Err(Error::config("search", "needs starts >= 1 and budget >= 2"));
                }
            }
            Command::BlowupProbe => {
                Self::need(&self.domain, "domain", c)?;
                Self::need(&self.params, "params", c)?;
                if let Some(b) = self.beta_prime {
                    if !b.is_finite() {
                        return Err(Error::config("beta_prime", "must be finite"));
                    }
                }
                if self.probe.j_min == 0
                    || self.probe.j_min > self.probe.j_max
                    || self.probe.j_max > 8
                {
                    return Err(Error::config(
                        "probe",
                        "levels need 1 <= j_min <= j_max <= 8",
                    ));
                }
                if !(self.probe.threshold > 1.0) {
                    return Err(Error::config("probe.threshold", "must exceed 1"));
                }
            }
            Command::LemmaSuite => {}
            Command::Telescope => {
                let domain = Self::need(&self.domain, "domain", c)?;
                if !matches!(domain, Domain::Slab { .. }) {
                    return Err(Error::config("domain", "telescope runs on a slab"));
                }
                Self::need(&self.params, "params", c)?;
                Self::need(&self.function, "function", c)?;
                let m = *Self::need(&self.depth, "depth", c)?;
                if m > -2 {
                    return Err(Error::config("depth", format!("{m} must be <= -2")));
                }
            }
        }
        Ok(())
    }

    fn hardy_case(&self) -> Result<HardyCase> {
        let fp = *Self::need(&self.params, "params", self.command)?;
        match (self.case, &self.domain) {
            (Some(id), Some(domain)) if id.class() != DomainClass::of(domain) => {
                Err(Error::config(
                    "case",
                    format!(
                        "case {id} does not apply to a {:?} domain",
                        DomainClass::of(domain)
                    ),
                ))
            }
            (Some(id), _) => HardyCase::new(id, fp),
            (None, Some(domain)) => HardyCase::classify(fp, DomainClass::of(domain)),
            (None, None) => Err(Error::config(
                "case",
                "give a case or a domain to infer it from",
            )),
        }
    }
}

/// A named table; `None` cells are written as empty CSV fields / JSON null.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: Command,
    pub config_digest: String,
    pub seed: u64,
    /// False on a property violation or a module error.
    pub passed: bool,
    pub scalars: BTreeMap<String, Value>,
    pub series: Vec<Series>,
    /// Full result structure of the module call.
    pub detail: Value,
    pub error: Option<ErrorRecord>,
    pub wall_time_seconds: f64,
}

impl ExperimentRecord {
    /// The record without its wall time; identical configs give identical
    /// strings.
    pub fn reproducible_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("record serializes");
        v.as_object_mut()
            .expect("object")
            .remove("wall_time_seconds");
        serde_json::to_string(&v).expect("record serializes")
    }
}

struct Outcome {
    passed: bool,
    scalars: BTreeMap<String, Value>,
    series: Vec<Series>,
    detail: Value,
}

impl Outcome {
    fn new(passed: bool, detail: Value) -> Self {
        Outcome {
            passed,
            scalars: BTreeMap::new(),
            series: Vec::new(),
            detail,
        }
    }

    fn scalar(mut self, key: &str, value: impl Serialize) -> Self {
        self.scalars.insert(
            key.to_string(),
            serde_json::to_value(value).expect("scalar serializes"),
        );
        self
    }

    fn series(mut self, name: &str, columns: &[&str], rows: Vec<Vec<Option<f64>>>) -> Self {
        self.series.push(Series {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn function_grid(u: &TestFunction, domain: &Domain, resolution: usize) -> Result<GridSpec> {
    let support = match (u.support_box(), domain.bounding_box()) {
        (Some(s), Some(b)) => s
            .intersect(&b)
            .ok_or_else(|| Error::param("function support misses the domain"))?,
        (Some(s), None) => s,
        (None, Some(b)) => b,
        (None, None) => {
            return Err(Error::param(
                "function without compact support on an unbounded domain",
            ))
        }
    };
    GridSpec::balanced(support, resolution)
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Exponents => {
            let case = cfg.hardy_case()?;
            let e = critical_exponents(&case)?;
            let fp = case.fp;
            Ok(Outcome::new(
                true,
                json!({ "case": case.case_id, "alpha": e.alpha, "beta": e.beta }),
            )
            .scalar("case", case.case_id)
            .scalar("alpha", e.alpha)
            .scalar("beta", e.beta)
            .scalar("alpha_f64", e.alpha.to_f64())
            .scalar("beta_f64", e.beta.to_f64())
            .scalar("criticality", fp.criticality())
            .scalar("sp", fp.sp()))
        }
        Command::Seminorm => {
            let (domain, fp, u) = (
                cfg.domain.as_ref().unwrap(),
                cfg.params.as_ref().unwrap(),
                cfg.function.as_ref().unwrap(),
            );
            let grid = function_grid(u, domain, cfg.resolution)?;
            let parts =
                gagliardo_seminorm_parts(u, domain, fp, &grid, &SeminormOptions::default())?;
            let seminorm = parts.seminorm(fp.p_f64());
            Ok(Outcome::new(seminorm.is_finite(), to_value(parts))
                .scalar("seminorm", seminorm)
                .scalar("seminorm_p", parts.total)
                .scalar("near", parts.near)
                .scalar("diagonal", parts.diagonal)
                .scalar("tail", parts.tail)
                .scalar("cells", parts.cells))
        }
        Command::HardyCheck => {
            let (domain, u) = (cfg.domain.as_ref().unwrap(), cfg.function.as_ref().unwrap());
            let case = cfg.hardy_case()?;
            let grid = function_grid(u, domain, cfg.resolution)?;
            let r = hardy_ratio(u, domain, &case, &grid)?;
            Ok(Outcome::new(r.ratio.is_finite(), to_value(r))
                .scalar("case", case.case_id)
                .scalar("ratio", r.ratio)
                .scalar("lhs", r.lhs)
                .scalar("lp_norm", r.lp_norm)
                .scalar("seminorm", r.seminorm))
        }
        Command::EstimateConstant => {
            let (domain, family) = (cfg.domain.as_ref().unwrap(), cfg.family.as_ref().unwrap());
            let case = cfg.hardy_case()?;
            let search = SearchConfig {
                seed: cfg.seed,
                ..cfg.search.clone()
            };
            let r = estimate_constant(family, &case, domain, &search, cfg.resolution)?;
            let starts = r
                .starts
                .iter()
                .map(|s| {
                    vec![
                        Some(s.index as f64),
                        Some(s.start[0]),
                        Some(s.best_x[0]),
                        Some(s.best_value),
                        Some(s.evaluations as f64),
                    ]
                })
                .collect();
            let members = r
                .members
                .iter()
                .map(|(p, v)| vec![Some(*p), Some(*v)])
                .collect();
            let mut out = Outcome::new(r.best_ratio.is_finite(), to_value(&r))
                .scalar("case", case.case_id)
                .scalar("best_ratio", r.best_ratio)
                .scalar("best_params", &r.best_params)
                .scalar("evaluations", r.evaluations)
                .scalar("budget_exhausted", r.budget_exhausted);
            if !r.starts.is_empty() {
                out = out.series(
                    "starts",
                    &["start", "x0", "best_x", "best_ratio", "evaluations"],
                    starts,
                );
            }
            if !r.members.is_empty() {
                out = out.series("members", &["parameter", "ratio"], members);
            }
            Ok(out)
        }
        Command::BlowupProbe => {
            let domain = cfg.domain.as_ref().unwrap();
            let case = cfg.hardy_case()?;
            let beta = match cfg.beta_prime {
                Some(b) => b,
                None => critical_exponents(&case)?.beta.to_f64(),
            };
            let r = blowup_probe(&case, beta, &cfg.probe, domain)?;
            let passed = cfg.expect.is_none_or(|v| v == r.verdict);
            let levels = r
                .levels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let g = if i == 0 {
                        None
                    } else {
                        Some(r.growth_factors[i - 1])
                    };
                    vec![Some(l.depth as f64), Some(l.ratio), g]
                })
                .collect();
            Ok(Outcome::new(passed, to_value(&r))
                .scalar("case", case.case_id)
                .scalar("beta_used", r.beta_used)
                .scalar("verdict", r.verdict)
                .scalar("expected", cfg.expect)
                .scalar("truncated", r.truncated)
                .series("levels", &["depth", "ratio", "growth_factor"], levels))
        }
        Command::LemmaSuite => {
            let r = lemma_suite(&cfg.lemmas, cfg.seed)?;
            let asym = r
                .asymptotic_series
                .iter()
                .map(|(k, v)| vec![Some(*k as f64), Some(*v)])
                .collect();
            Ok(Outcome::new(r.passed, to_value(&r))
                .scalar("elementary_min_slack", r.elementary_min_slack)
                .scalar("equality_max_slack", r.equality_max_slack)
                .scalar("average_min_slack", r.average_min_slack)
                .scalar("power_sum_min_slack", r.power_sum_min_slack)
                .scalar("telescope_identity_exact", r.telescope_identity_exact)
                .scalar("asymptotic_limit", r.asymptotic_limit)
                .series("asymptotic", &["k", "ratio"], asym))
        }
        Command::Telescope => {
            let (domain, fp, u) = (
                cfg.domain.as_ref().unwrap(),
                cfg.params.as_ref().unwrap(),
                cfg.function.as_ref().unwrap(),
            );
            let r = telescoping_reconstruction(domain, u, fp, cfg.depth.unwrap(), &cfg.telescope)?;
            let layers = r
                .layers
                .iter()
                .map(|l| {
                    vec![
                        Some(l.k as f64),
                        Some(l.cubes as f64),
                        Some(l.active_cubes as f64),
                        Some(l.a_k),
                        Some(l.weight),
                        l.overlap_seminorm_tau,
                    ]
                })
                .collect();
            Ok(Outcome::new(r.counts_match, to_value(&r))
                .scalar("minimal_c", r.minimal_c)
                .scalar("lhs", r.lhs)
                .scalar("head", r.head)
                .scalar("seminorm_sum", r.seminorm_sum)
                .scalar("counts_match", r.counts_match)
                .scalar("skipped_layers", &r.skipped_layers)
                .series(
                    "layers",
                    &[
                        "k",
                        "cubes",
                        "active_cubes",
                        "a_k",
                        "weight",
                        "overlap_seminorm_tau",
                    ],
                    layers,
                ))
        }
    }
}

/// Validates `cfg` and runs it. Invalid configs are errors; failures inside
/// the modules become an error record with `passed = false`.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let outcome = dispatch(cfg);
    let wall_time_seconds = start.elapsed().as_secs_f64();
    let (passed, scalars, series, detail, error) = match outcome {
        Ok(o) => (o.passed, o.scalars, o.series, o.detail, None),
        Err(e @ Error::Config { .. }) => return Err(e),
        Err(e) => (
            false,
            BTreeMap::new(),
            Vec::new(),
            Value::Null,
            Some(ErrorRecord {
                kind: e.kind().into(),
                message: e.to_string(),
            }),
        ),
    };
    Ok(ExperimentRecord {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command,
        config_digest: cfg.digest(),
        seed: cfg.seed,
        passed,
        scalars,
        series,
        detail,
        error,
        wall_time_seconds,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `summary.json` and `<series>.csv` files into `dir`; returns the
/// paths written.
pub fn write_outputs(record: &ExperimentRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let summary = dir.join("summary.json");
    let text = serde_json::to_string_pretty(record).expect("record serializes");
    fs::write(&summary, text + "\n").map_err(io_err(&summary))?;
    written.push(summary);
    for s in &record.series {
        let path = dir.join(format!("{}.csv", s.name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
        w.write_record(&s.columns).map_err(|e| csv_err(&path, e))?;
        for row in &s.rows {
            w.write_record(
                row.iter()
                    .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
            )
            .map_err(|e| csv_err(&path, e))?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    }
}
