//! Exact rational values extended by `±∞`.
//!
//! Every endpoint in the crate is an [`Ext`]; no floating point is used for
//! barcode geometry. Values serialize as strings: `"3"`, `"-7/2"`, `"inf"`,
//! `"-inf"`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = Ratio<i128>;

/// Shorthand for `p/q`.
pub fn q(p: i128, d: i128) -> Q {
    Q::new(p, d)
}

/// Shorthand for an integer rational.
pub fn qi(p: i128) -> Q {
    Q::from_integer(p)
}

pub fn format_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            if let Some((int, frac)) = s.split_once('.') {
                // finite decimal, read exactly
                let neg = int.starts_with('-');
                let int_abs = int.trim_start_matches(['-', '+']);
                let digits = format!("{int_abs}{frac}");
                let n: i128 = digits.parse().map_err(|_| bad())?;
                let d = 10i128.checked_pow(u32::try_from(frac.len()).map_err(|_| bad())?).ok_or_else(bad)?;
                let v = Q::new(n, d);
                Ok(if neg { -v } else { v })
            } else {
                Ok(Q::from_integer(s.parse().map_err(|_| bad())?))
            }
        }
    }
}

/// A rational number or one of the two infinities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Fin(Q),
    PosInf,
}

impl Ext {
    pub fn int(v: i128) -> Self {
        Ext::Fin(qi(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn finite(&self) -> Option<Q> {
        match self {
            Ext::Fin(v) => Some(*v),
            _ => None,
        }
    }

    /// Translation by a finite amount; infinities are fixed.
    pub fn shift(&self, by: Q) -> Self {
        match self {
            Ext::Fin(v) => Ext::Fin(v + by),
            other => *other,
        }
    }

    /// `|a - b|` with `|∞ - ∞| = 0` for like signs and `∞` otherwise.
    pub fn abs_diff(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin((a - b).abs()),
            (Ext::PosInf, Ext::PosInf) | (Ext::NegInf, Ext::NegInf) => Ext::Fin(Q::zero()),
            _ => Ext::PosInf,
        }
    }

    /// `self - other` for `self ≥ other`, as a length. Infinite if either end is.
    pub fn length_from(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a - b),
            _ => Ext::PosInf,
        }
    }

    /// Division by a positive finite scalar.
    pub fn div(&self, by: Q) -> Self {
        debug_assert!(by > Q::zero());
        match self {
            Ext::Fin(v) => Ext::Fin(v / by),
            other => *other,
        }
    }

    pub fn le_q(&self, v: &Q) -> bool {
        *self <= Ext::Fin(*v)
    }

    pub fn cmp_q(&self, v: &Q) -> Ordering {
        self.cmp(&Ext::Fin(*v))
    }
}

impl From<Q> for Ext {
    fn from(v: Q) -> Self {
        Ext::Fin(v)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::PosInf => f.write_str("inf"),
            Ext::Fin(v) => f.write_str(&format_q(v)),
        }
    }
}

impl FromStr for Ext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "∞" | "+∞" => Ok(Ext::PosInf),
            "-inf" | "-∞" => Ok(Ext::NegInf),
            other => parse_q(other).map(Ext::Fin),
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct ExtVisitor;

impl Visitor<'_> for ExtVisitor {
    type Value = Ext;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational string like \"-3/2\", \"inf\", or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Ext, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Ext, E> {
        Ok(Ext::int(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Ext, E> {
        Ok(Ext::int(v.into()))
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExtVisitor)
    }
}

/// Serde adapter for finite rationals stored as strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        match Ext::deserialize(d)? {
            Ext::Fin(v) => Ok(v),
            other => Err(de::Error::custom(format!("expected a finite rational, got {other}"))),
        }
    }
}

/// Serde adapter for lists of finite rationals.
pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let raw = Vec::<Ext>::deserialize(d)?;
        raw.into_iter()
            .map(|e| match e {
                Ext::Fin(v) => Ok(v),
                other => Err(de::Error::custom(format!("expected a finite rational, got {other}"))),
            })
            .collect()
    }
}
