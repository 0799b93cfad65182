//! Distortion functions f with f(x) >= x.

use crate::weight::{format_weight, parse_weight, Weight};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistortionError {
    #[error("multiplicative stretch must satisfy t >= 1, got {0}")]
    BadStretch(String),
    #[error("additive slack must satisfy beta >= 0, got {0}")]
    BadAdditive(String),
    #[error("linear distortion needs alpha >= 1 and beta >= 0")]
    BadLinear,
    #[error("table distortion has no entry for x = {0}")]
    MissingTableEntry(String),
    #[error("distortion violates f(x) >= x at x = {x}: f(x) = {fx}")]
    BelowIdentity { x: String, fx: String },
    #[error("cannot parse distortion spec `{0}` (expected id, mult:<t>, add:<b> or linear:<a>,<b>)")]
    BadSpec(String),
}

/// A distortion function. Monotonicity is not assumed; f(x) >= x is checked at
/// every evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistortionFn {
    /// f(x) = t x with t >= 1
    Multiplicative(Weight),
    /// f(x) = x + beta with beta >= 0
    Additive(Weight),
    /// f(x) = alpha x + beta with alpha >= 1, beta >= 0
    Linear(Weight, Weight),
    /// explicit map over the distances that occur
    Table(BTreeMap<Weight, Weight>),
}

impl DistortionFn {
    pub fn identity() -> Self {
        DistortionFn::Multiplicative(Weight::from_integer(1))
    }

    pub fn multiplicative(t: Weight) -> Result<Self, DistortionError> {
        if t < Weight::from_integer(1) {
            return Err(DistortionError::BadStretch(format_weight(&t)));
        }
        Ok(DistortionFn::Multiplicative(t))
    }

    pub fn additive(beta: Weight) -> Result<Self, DistortionError> {
        if beta < Weight::zero() {
            return Err(DistortionError::BadAdditive(format_weight(&beta)));
        }
        Ok(DistortionFn::Additive(beta))
    }

    pub fn linear(alpha: Weight, beta: Weight) -> Result<Self, DistortionError> {
        if alpha < Weight::from_integer(1) || beta < Weight::zero() {
            return Err(DistortionError::BadLinear);
        }
        Ok(DistortionFn::Linear(alpha, beta))
    }

    pub fn table(entries: impl IntoIterator<Item = (Weight, Weight)>) -> Self {
        DistortionFn::Table(entries.into_iter().collect())
    }

    /// The stretch t when this is a multiplicative distortion.
    pub fn multiplicative_stretch(&self) -> Option<&Weight> {
        match self {
            DistortionFn::Multiplicative(t) => Some(t),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Weight) -> Result<Weight, DistortionError> {
        let fx = match self {
            DistortionFn::Multiplicative(t) => *t * x,
            DistortionFn::Additive(beta) => *x + beta,
            DistortionFn::Linear(alpha, beta) => *alpha * x + beta,
            DistortionFn::Table(map) => map
                .get(x)
                .cloned()
                .ok_or_else(|| DistortionError::MissingTableEntry(format_weight(x)))?,
        };
        if fx < *x {
            return Err(DistortionError::BelowIdentity {
                x: format_weight(x),
                fx: format_weight(&fx),
            });
        }
        Ok(fx)
    }

    /// Parses `id`, `mult:<t>`, `add:<b>`, `linear:<a>,<b>`.
    pub fn parse(spec: &str) -> Result<Self, DistortionError> {
        let bad = || DistortionError::BadSpec(spec.to_string());
        let spec = spec.trim();
        if spec == "id" {
            return Ok(Self::identity());
        }
        let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "mult" => Self::multiplicative(parse_weight(args).map_err(|_| bad())?),
            "add" => Self::additive(parse_weight(args).map_err(|_| bad())?),
            "linear" => {
                let (a, b) = args.split_once(',').ok_or_else(bad)?;
                Self::linear(
                    parse_weight(a).map_err(|_| bad())?,
                    parse_weight(b).map_err(|_| bad())?,
                )
            }
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for DistortionFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistortionFn::Multiplicative(t) => write!(f, "mult:{}", format_weight(t)),
            DistortionFn::Additive(b) => write!(f, "add:{}", format_weight(b)),
            DistortionFn::Linear(a, b) => {
                write!(f, "linear:{},{}", format_weight(a), format_weight(b))
            }
            DistortionFn::Table(map) => write!(f, "table[{} entries]", map.len()),
        }
    }
}
