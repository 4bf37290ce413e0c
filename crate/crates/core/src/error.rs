use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} is not in the closed domain")]
    DomainMembership { point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("non-finite integrand value {value} at node {node:?}")]
    NonFinite { node: Vec<f64>, value: f64 },

    #[error("layer {k} has no parent layer")]
    NoParent { k: i32 },

    #[error("no Hardy case matches: {0}")]
    CaseDispatch(String),

    #[error("weight undefined at {point:?}: rho = {rho} <= 1")]
    WeightDomain { point: Vec<f64>, rho: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Stable snake_case name of the variant, used in result records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DomainMembership { .. } => "domain_membership",
            Error::Parameter(_) => "parameter",
            Error::UnsupportedDomain(_) => "unsupported_domain",
            Error::NonFinite { .. } => "non_finite",
            Error::NoParent { .. } => "no_parent",
            Error::CaseDispatch(_) => "case_dispatch",
            Error::WeightDomain { .. } => "weight_domain",
            Error::Degenerate(_) => "degenerate",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
