//! Grid-based hyperparameter tuning.
//!
//! Grids are built from [`one_grid`] axes, which are dense near both
//! endpoints and coarse in the middle, because good settings often sit at an
//! extreme of their range (a cooling rate of exactly 1.0, for example).
//! [`hyper_tune`] evaluates a grid, keeps the best fraction, multiplies the
//! per-run budget and repeats until at most `scale` candidates remain.

mod grid;
mod tune;

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

pub use grid::{hyperparm_grid, one_grid};
pub use tune::{hyper_tune, scoring, GridRunner, ScoredAssignment, TuneProfile, TuneReport, TuningRound};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TuneError {
    #[error("invalid tuning configuration: {0}")]
    Config(String),
    #[error("runner failed: {0}")]
    Runner(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Real,
    Integer,
}

/// A tunable parameter and the box it lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperparameterSpec {
    pub name: String,
    #[serde(default = "real_kind")]
    pub kind: ParamKind,
    pub min: f64,
    pub max: f64,
    pub default: f64,
}

fn real_kind() -> ParamKind {
    ParamKind::Real
}

impl HyperparameterSpec {
    pub fn real(name: &str, min: f64, max: f64, default: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: ParamKind::Real,
            min,
            max,
            default,
        }
    }

    pub fn integer(name: &str, min: i64, max: i64, default: i64) -> Self {
        Self {
            name: name.to_string(),
            kind: ParamKind::Integer,
            min: min as f64,
            max: max as f64,
            default: default as f64,
        }
    }

    pub fn validate(&self) -> Result<(), TuneError> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.min <= self.default
            && self.default <= self.max;
        if ok {
            Ok(())
        } else {
            Err(TuneError::Config(format!(
                "{}: need min <= default <= max, got {} / {} / {}",
                self.name, self.min, self.default, self.max
            )))
        }
    }

    /// Converts a grid coordinate to a value of this parameter's kind.
    pub fn value(&self, x: f64) -> ParamValue {
        match self.kind {
            ParamKind::Real => ParamValue::Real(x),
            ParamKind::Integer => ParamValue::Int(x.round() as i64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
}

impl ParamValue {
    pub fn as_f64(self) -> f64 {
        match self {
            ParamValue::Int(v) => v as f64,
            ParamValue::Real(v) => v,
        }
    }

    /// Integers parse as [`ParamValue::Int`], anything else numeric as real.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        text.parse::<i64>()
            .map(ParamValue::Int)
            .ok()
            .or_else(|| text.parse::<f64>().ok().filter(|v| v.is_finite()).map(ParamValue::Real))
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.as_f64().total_cmp(&other.as_f64())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
        }
    }
}

/// Named values, kept in the order of the specs that produced them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assignment {
    values: Vec<(String, ParamValue)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `name`, replacing an earlier value in place.
    pub fn set(&mut self, name: &str, value: ParamValue) {
        match self.values.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.values.push((name.to_string(), value)),
        }
    }

    pub fn with(mut self, name: &str, value: ParamValue) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<ParamValue> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, ParamValue)> + '_ {
        self.values.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parses `name=value,name=value`. An empty string is the empty
    /// assignment.
    pub fn parse(text: &str) -> Result<Self, TuneError> {
        let mut out = Self::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| TuneError::Config(format!("`{part}` is not name=value")))?;
            let name = name.trim();
            if out.get(name).is_some() {
                return Err(TuneError::Config(format!("`{name}` given twice")));
            }
            let value = ParamValue::parse(value)
                .ok_or_else(|| TuneError::Config(format!("`{value}` is not a number")))?;
            out.set(name, value);
        }
        Ok(out)
    }

    /// Lexicographic comparison of the values, used to break score ties.
    pub fn cmp_values(&self, other: &Self) -> Ordering {
        for ((_, a), (_, b)) in self.values.iter().zip(&other.values) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.values.len().cmp(&other.values.len())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (n, v) in &self.values {
            map.serialize_entry(n, v)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_matches_documented_shape() {
        let s: HyperparameterSpec =
            serde_json::from_str(r#"{"name":"gamma", "min":0.0, "max":2.0, "default":0.5}"#).unwrap();
        assert_eq!(s, HyperparameterSpec::real("gamma", 0.0, 2.0, 0.5));
        assert!(s.validate().is_ok());
        assert!(HyperparameterSpec::real("x", 1.0, 0.0, 0.5).validate().is_err());
    }

    #[test]
    fn assignment_parse_and_display() {
        let a = Assignment::parse("T0=0.5, cooling_rate=1.0,reset_period=100").unwrap();
        assert_eq!(a.get("reset_period"), Some(ParamValue::Int(100)));
        assert_eq!(a.get("cooling_rate"), Some(ParamValue::Real(1.0)));
        assert_eq!(a.to_string(), "T0=0.5,cooling_rate=1,reset_period=100");
        assert!(Assignment::parse("").unwrap().is_empty());
        assert!(Assignment::parse("T").is_err());
        assert!(Assignment::parse("T=x").is_err());
        assert!(Assignment::parse("T=1,T=2").is_err());
    }

    #[test]
    fn assignment_serializes_in_order() {
        let a = Assignment::new()
            .with("z", ParamValue::Int(1))
            .with("a", ParamValue::Real(0.5));
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"z":1,"a":0.5}"#);
    }

    #[test]
    fn value_ordering_is_lexicographic() {
        let a = Assignment::new().with("x", ParamValue::Real(0.1)).with("y", ParamValue::Int(9));
        let b = Assignment::new().with("x", ParamValue::Real(0.1)).with("y", ParamValue::Int(10));
        assert_eq!(a.cmp_values(&b), Ordering::Less);
        assert_eq!(b.cmp_values(&a), Ordering::Greater);
        assert_eq!(a.cmp_values(&a.clone()), Ordering::Equal);
    }
}
