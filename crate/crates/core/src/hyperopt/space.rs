use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Dimension {
    Uniform { lo: f64, hi: f64 },
    LogUniform { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    Categorical { choices: Vec<String> },
}

impl Dimension {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            Dimension::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Dimension::LogUniform { lo, hi } => *lo > 0.0 && hi.is_finite() && lo < hi,
            Dimension::Integer { lo, hi } => lo < hi,
            Dimension::Categorical { choices } => !choices.is_empty(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid search dimension {self:?}")))
        }
    }

    /// Bounds of the continuous working coordinate: the log for log-uniform
    /// dimensions, half-integer padding for integer ones.
    pub(crate) fn internal_bounds(&self) -> Option<(f64, f64)> {
        match self {
            Dimension::Uniform { lo, hi } => Some((*lo, *hi)),
            Dimension::LogUniform { lo, hi } => Some((lo.ln(), hi.ln())),
            Dimension::Integer { lo, hi } => Some((*lo as f64 - 0.5, *hi as f64 + 0.5)),
            Dimension::Categorical { .. } => None,
        }
    }

    pub(crate) fn to_internal(&self, v: &ParamValue) -> f64 {
        match (self, v) {
            (Dimension::LogUniform { .. }, ParamValue::Real(x)) => x.ln(),
            (_, ParamValue::Real(x)) => *x,
            (_, ParamValue::Int(i)) => *i as f64,
            (Dimension::Categorical { choices }, ParamValue::Choice(c)) => {
                choices.iter().position(|x| x == c).unwrap_or(0) as f64
            }
            (_, ParamValue::Choice(_)) => f64::NAN,
        }
    }

    /// Maps an internal coordinate back to a value inside the bounds.
    pub(crate) fn from_internal(&self, u: f64) -> ParamValue {
        match self {
            Dimension::Uniform { lo, hi } => ParamValue::Real(u.clamp(*lo, *hi)),
            Dimension::LogUniform { lo, hi } => ParamValue::Real(u.exp().clamp(*lo, *hi)),
            Dimension::Integer { lo, hi } => ParamValue::Int((u.round() as i64).clamp(*lo, *hi)),
            Dimension::Categorical { choices } => {
                ParamValue::Choice(choices[(u as usize).min(choices.len() - 1)].clone())
            }
        }
    }

    pub fn sample_uniform(&self, rng: &mut impl Rng) -> ParamValue {
        match self {
            Dimension::Uniform { lo, hi } => ParamValue::Real(rng.random_range(*lo..=*hi)),
            Dimension::LogUniform { lo, hi } => {
                ParamValue::Real(rng.random_range(lo.ln()..=hi.ln()).exp().clamp(*lo, *hi))
            }
            Dimension::Integer { lo, hi } => ParamValue::Int(rng.random_range(*lo..=*hi)),
            Dimension::Categorical { choices } => ParamValue::Choice(choices[rng.random_range(0..choices.len())].clone()),
        }
    }

    pub fn contains(&self, v: &ParamValue) -> bool {
        match (self, v) {
            (Dimension::Uniform { lo, hi } | Dimension::LogUniform { lo, hi }, ParamValue::Real(x)) => {
                (*lo..=*hi).contains(x)
            }
            (Dimension::Integer { lo, hi }, ParamValue::Int(i)) => (*lo..=*hi).contains(i),
            (Dimension::Categorical { choices }, ParamValue::Choice(c)) => choices.contains(c),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Choice(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Real(x) => Some(*x),
            ParamValue::Int(i) => Some(*i as f64),
            ParamValue::Choice(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Choice(c) => Some(c),
            _ => None,
        }
    }
}

/// A point in a search space, keyed by dimension name.
pub type Point = BTreeMap<String, ParamValue>;

/// Ordered named dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    dims: Vec<(String, Dimension)>,
}

impl SearchSpace {
    pub fn new(dims: Vec<(String, Dimension)>) -> Result<Self> {
        for (i, (name, d)) in dims.iter().enumerate() {
            d.validate()?;
            if dims[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::Config(format!("dimension `{name}` declared twice")));
            }
        }
        Ok(SearchSpace { dims })
    }

    pub fn dims(&self) -> &[(String, Dimension)] {
        &self.dims
    }

    pub fn sample_uniform(&self, rng: &mut impl Rng) -> Point {
        self.dims
            .iter()
            .map(|(n, d)| (n.clone(), d.sample_uniform(rng)))
            .collect()
    }

    pub fn contains(&self, point: &Point) -> bool {
        point.len() == self.dims.len()
            && self
                .dims
                .iter()
                .all(|(n, d)| point.get(n).is_some_and(|v| d.contains(v)))
    }
}
