//! Exact fractional parameters `(d, p, s, tau)`.
//!
//! `p`, `s` and `tau` are rationals so that the critical loci `sp = 1` and
//! `sp = d` are decided without rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number with `"num/den"` text form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub Ratio<i64>);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(Ratio::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"7"`, `"-3/4"` and terminating decimals such as `"0.25"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::param(format!("cannot parse `{s}` as a rational"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::param(format!("zero denominator in `{s}`")));
            }
            return Ok(Rational::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_val: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let den = 10i64.pow(frac.len() as u32);
            let frac_val: i64 = frac.parse().map_err(|_| bad())?;
            let num = int_val.abs() * den + frac_val;
            return Ok(Rational::new(if neg { -num } else { num }, den));
        }
        s.parse::<i64>().map(Rational::integer).map_err(|_| bad())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Rational::integer(n)),
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(std::ops::$tr::$m(self.0, rhs.0))
            }
        }
    };
}
forward_op!(Add, add);
forward_op!(Sub, sub);
forward_op!(Mul, mul);
forward_op!(Div, div);

impl std::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Which critical locus `s·p` sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    /// `sp = 1` (and `d > 1`, or `d = 1` where both coincide).
    SpEq1,
    /// `sp = d` with `d > 1`.
    SpEqD,
    Subcritical,
    /// `sp > d`; outside every case handled here.
    Supercritical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FracParams {
    pub d: usize,
    pub p: Rational,
    pub s: Rational,
    pub tau: Rational,
}

impl FracParams {
    pub fn new(d: usize, p: Rational, s: Rational, tau: Rational) -> Result<Self> {
        let fp = FracParams { d, p, s, tau };
        fp.validate()?;
        Ok(fp)
    }

    /// Shorthand for tests and examples: `FracParams::parse(2, "2", "1/2", "2")`.
    pub fn parse(d: usize, p: &str, s: &str, tau: &str) -> Result<Self> {
        Self::new(d, p.parse()?, s.parse()?, tau.parse()?)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = Rational(Ratio::zero());
        let one = Rational::integer(1);
        if self.d == 0 {
            return Err(Error::param("dimension d must be >= 1"));
        }
        if self.p <= one {
            return Err(Error::param(format!("p = {} must exceed 1", self.p)));
        }
        if self.s <= zero || self.s >= one {
            return Err(Error::param(format!("s = {} must lie in (0, 1)", self.s)));
        }
        if self.tau < one {
            return Err(Error::param(format!("tau = {} must be >= 1", self.tau)));
        }
        Ok(())
    }

    pub fn sp(&self) -> Rational {
        self.s * self.p
    }

    pub fn sp_f64(&self) -> f64 {
        self.sp().to_f64()
    }

    pub fn criticality(&self) -> Criticality {
        let sp = self.sp();
        let d = Rational::integer(self.d as i64);
        if sp == Rational::integer(1) {
            Criticality::SpEq1
        } else if sp == d {
            Criticality::SpEqD
        } else if sp < d {
            Criticality::Subcritical
        } else {
            Criticality::Supercritical
        }
    }

    /// Fractional Sobolev exponent `dp/(d - sp)`, defined only for `sp < d`.
    pub fn sobolev_exponent(&self) -> Option<Rational> {
        let d = Rational::integer(self.d as i64);
        let sp = self.sp();
        (sp < d).then(|| d * self.p / (d - sp))
    }

    pub fn p_f64(&self) -> f64 {
        self.p.to_f64()
    }

    pub fn s_f64(&self) -> f64 {
        self.s.to_f64()
    }

    pub fn tau_f64(&self) -> f64 {
        self.tau.to_f64()
    }

    pub fn with_tau(&self, tau: Rational) -> Self {
        FracParams { tau, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_forms() {
        assert_eq!("1/2".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("0.25".parse::<Rational>().unwrap(), Rational::new(1, 4));
        assert_eq!("-1.5".parse::<Rational>().unwrap(), Rational::new(-3, 2));
        assert_eq!("4".parse::<Rational>().unwrap(), Rational::integer(4));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
    }

    #[test]
    fn criticality_is_exact() {
        let fp = FracParams::parse(2, "2", "1/2", "2").unwrap();
        assert_eq!(fp.criticality(), Criticality::SpEq1);
        assert_eq!(fp.sobolev_exponent(), Some(Rational::integer(4)));

        let fp = FracParams::parse(2, "4", "1/2", "5").unwrap();
        assert_eq!(fp.criticality(), Criticality::SpEqD);
        assert_eq!(fp.sobolev_exponent(), None);

        let fp = FracParams::parse(2, "3", "1/3", "3").unwrap();
        assert_eq!(fp.criticality(), Criticality::SpEq1);

        let fp = FracParams::parse(3, "2", "3/10", "2").unwrap();
        assert_eq!(fp.criticality(), Criticality::Subcritical);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(FracParams::parse(1, "1", "1/2", "2").is_err());
        assert!(FracParams::parse(1, "2", "1", "2").is_err());
        assert!(FracParams::parse(0, "2", "1/2", "2").is_err());
        assert!(FracParams::parse(1, "2", "1/2", "1/2").is_err());
    }

    #[test]
    fn serde_uses_text_form() {
        let fp = FracParams::parse(1, "2", "1/2", "2").unwrap();
        let json = serde_json::to_string(&fp).unwrap();
        assert_eq!(json, r#"{"d":1,"p":"2","s":"1/2","tau":"2"}"#);
        let back: FracParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fp);
    }
}
