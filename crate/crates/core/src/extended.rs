use serde::{Deserialize, Serialize};
use std::fmt;

/// A nonnegative quantity that may be infinite, such as a horizon or a norm
/// over an unbounded window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn from_f64(x: f64) -> Self {
        if x.is_infinite() {
            Extended::Infinite
        } else {
            Extended::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    /// Lossy conversion for arithmetic; infinity maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            Extended::Finite(x) => x,
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// `x < self`, treating infinity as larger than every real.
    pub fn exceeds(&self, x: f64) -> bool {
        match *self {
            Extended::Finite(v) => x < v,
            Extended::Infinite => true,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}
