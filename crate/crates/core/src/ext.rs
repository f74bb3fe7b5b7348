//! Extended reals: a finite value or `+∞`.
//!
//! Existence times and tube radii may be unbounded. They are carried as an
//! explicit variant rather than as `f64::INFINITY` so arithmetic on them is
//! never silently poisoned.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// `true` when `x < self`.
    pub fn exceeds(self, x: f64) -> bool {
        match self {
            ExtReal::Finite(v) => x < v,
            ExtReal::PosInf => true,
        }
    }

    pub fn min_with(self, x: f64) -> f64 {
        match self {
            ExtReal::Finite(v) => v.min(x),
            ExtReal::PosInf => x,
        }
    }

    /// CSV token: full-precision decimal or `inf`.
    pub fn to_csv_token(self) -> String {
        match self {
            ExtReal::Finite(v) => format_full(v),
            ExtReal::PosInf => "inf".to_string(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

/// JSON form: `{"value": <number|null>, "infinite": <bool>}`.
#[derive(Serialize, Deserialize)]
struct ExtRealRepr {
    value: Option<f64>,
    infinite: bool,
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match *self {
            ExtReal::Finite(v) => ExtRealRepr { value: Some(v), infinite: false },
            ExtReal::PosInf => ExtRealRepr { value: None, infinite: true },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ExtRealRepr::deserialize(d)?;
        match (repr.infinite, repr.value) {
            (true, _) => Ok(ExtReal::PosInf),
            (false, Some(v)) => Ok(ExtReal::Finite(v)),
            (false, None) => Err(serde::de::Error::custom("finite extended real without a value")),
        }
    }
}
