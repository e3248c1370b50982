//! Decorated intervals of the real line, 1-D barcodes, ε-matchings and the
//! bottleneck distance.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{covering_matching, infimum_over_candidates};
use crate::value::{Ext, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub v: Ext,
    pub closed: bool,
}

impl Endpoint {
    pub fn closed(v: Ext) -> Self {
        Endpoint { v, closed: true }
    }

    pub fn open(v: Ext) -> Self {
        Endpoint { v, closed: false }
    }
}

/// Order of left endpoints by the sets `{x : x ≥ a}` they bound: smaller
/// means the interval reaches further left.
fn cmp_left(a: &Endpoint, b: &Endpoint) -> Ordering {
    a.v.cmp(&b.v).then_with(|| b.closed.cmp(&a.closed))
}

/// Order of right endpoints: larger means the interval reaches further right.
fn cmp_right(a: &Endpoint, b: &Endpoint) -> Ordering {
    a.v.cmp(&b.v).then_with(|| a.closed.cmp(&b.closed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Interval1D {
    pub left: Endpoint,
    pub right: Endpoint,
}

impl Interval1D {
    /// Validates that the interval is nonempty, that a degenerate interval is
    /// the closed point, and that infinite ends are open.
    pub fn new(left: Endpoint, right: Endpoint) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidInterval(format!("{why}: {}", Interval1D { left, right })));
        if left.v == Ext::PosInf || right.v == Ext::NegInf {
            return bad("endpoint on the wrong side of the line");
        }
        if (!left.v.is_finite() && left.closed) || (!right.v.is_finite() && right.closed) {
            return bad("infinite endpoints must be open");
        }
        match left.v.cmp(&right.v) {
            Ordering::Greater => bad("left endpoint exceeds right endpoint"),
            Ordering::Equal if !(left.closed && right.closed) => bad("degenerate interval must be closed"),
            _ => Ok(Interval1D { left, right }),
        }
    }

    pub fn closed(a: Ext, b: Ext) -> Result<Self> {
        Self::new(Endpoint::closed(a), Endpoint::closed(b))
    }

    pub fn open(a: Ext, b: Ext) -> Result<Self> {
        Self::new(Endpoint::open(a), Endpoint::open(b))
    }

    pub fn closed_open(a: Ext, b: Ext) -> Result<Self> {
        Self::new(Endpoint::closed(a), Endpoint::open(b))
    }

    pub fn open_closed(a: Ext, b: Ext) -> Result<Self> {
        Self::new(Endpoint::open(a), Endpoint::closed(b))
    }

    pub fn contains(&self, x: &Q) -> bool {
        let x = Ext::Fin(*x);
        let above = if self.left.closed { self.left.v <= x } else { self.left.v < x };
        let below = if self.right.closed { x <= self.right.v } else { x < self.right.v };
        above && below
    }

    /// Decorated containment `self ⊆ other`.
    pub fn is_subset(&self, other: &Interval1D) -> bool {
        cmp_left(&other.left, &self.left) != Ordering::Greater && cmp_right(&self.right, &other.right) != Ordering::Greater
    }

    /// `right − left`, infinite for unbounded intervals.
    pub fn length(&self) -> Ext {
        self.right.v.length_from(&self.left.v)
    }

    pub fn is_bounded(&self) -> bool {
        self.left.v.is_finite() && self.right.v.is_finite()
    }
}

impl fmt::Display for Interval1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.left.closed { '[' } else { '(' };
        let r = if self.right.closed { ']' } else { ')' };
        write!(f, "{l}{},{}{r}", self.left.v, self.right.v)
    }
}

impl FromStr for Interval1D {
    type Err = Error;

    /// Parses `[a,b]`, `(a,b)`, `[a,b)`, `(a,b]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an interval: {s:?}"));
        let mut chars = s.chars();
        let open_c = chars.next().ok_or_else(bad)?;
        let close_c = chars.next_back().ok_or_else(bad)?;
        let inner = chars.as_str();
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let lc = match open_c {
            '[' => true,
            '(' => false,
            _ => return Err(bad()),
        };
        let rc = match close_c {
            ']' => true,
            ')' => false,
            _ => return Err(bad()),
        };
        Interval1D::new(Endpoint { v: a.parse()?, closed: lc }, Endpoint { v: b.parse()?, closed: rc })
    }
}

impl<'de> Deserialize<'de> for Interval1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            left: Endpoint,
            right: Endpoint,
        }
        let raw = Raw::deserialize(d)?;
        Interval1D::new(raw.left, raw.right).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Barcode1D {
    pub intervals: Vec<Interval1D>,
}

impl Barcode1D {
    pub fn new(intervals: Vec<Interval1D>) -> Self {
        Barcode1D { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Canonical order, so multisets compare with `==`.
    pub fn sorted(&self) -> Barcode1D {
        let mut v = self.intervals.clone();
        v.sort_by(|a, b| cmp_left(&a.left, &b.left).then_with(|| cmp_right(&a.right, &b.right)));
        Barcode1D { intervals: v }
    }

    /// Parses a whitespace- or semicolon-separated list like `[0,1) (2,inf)`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        let mut cur = String::new();
        for ch in s.chars() {
            if ch.is_whitespace() || ch == ';' {
                continue;
            }
            cur.push(ch);
            if ch == ']' || ch == ')' {
                out.push(cur.parse()?);
                cur.clear();
            }
        }
        if !cur.is_empty() {
            return Err(Error::Parse(format!("trailing input {cur:?}")));
        }
        Ok(Barcode1D { intervals: out })
    }
}

impl fmt::Display for Barcode1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A partial bijection given by index pairs `(source, target)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Matching { pairs }
    }

    pub fn identity(n: usize) -> Self {
        Matching { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    /// Checks ranges and injectivity on both sides.
    pub fn validate(&self, n_source: usize, n_target: usize) -> Result<()> {
        let mut seen_s = vec![false; n_source];
        let mut seen_t = vec![false; n_target];
        for &(i, j) in &self.pairs {
            if i >= n_source {
                return Err(Error::IndexOutOfRange { index: i, len: n_source });
            }
            if j >= n_target {
                return Err(Error::IndexOutOfRange { index: j, len: n_target });
            }
            if std::mem::replace(&mut seen_s[i], true) {
                return Err(Error::InvalidMatching(format!("source index {i} matched twice")));
            }
            if std::mem::replace(&mut seen_t[j], true) {
                return Err(Error::InvalidMatching(format!("target index {j} matched twice")));
            }
        }
        Ok(())
    }

    /// Marks of matched indices on each side.
    pub fn coverage(&self, n_source: usize, n_target: usize) -> (Vec<bool>, Vec<bool>) {
        let mut s = vec![false; n_source];
        let mut t = vec![false; n_target];
        for &(i, j) in &self.pairs {
            s[i] = true;
            t[j] = true;
        }
        (s, t)
    }
}

fn check_eps(eps: &Q) -> Result<()> {
    if *eps < Q::from_integer(0) {
        Err(Error::Negative(format!("ε = {eps}")))
    } else {
        Ok(())
    }
}

/// `{a : ∃ b ∈ J, |a − b| ≤ ε}`.
pub fn thicken(j: &Interval1D, eps: &Q) -> Result<Interval1D> {
    check_eps(eps)?;
    Ok(Interval1D {
        left: Endpoint { v: j.left.v.shift(-eps), closed: j.left.closed },
        right: Endpoint { v: j.right.v.shift(*eps), closed: j.right.closed },
    })
}

/// True iff no `a ∈ J` has `a + t ∈ J`.
pub fn is_trivial_1d(j: &Interval1D, t: &Q) -> bool {
    match j.length() {
        Ext::Fin(len) => match len.cmp(t) {
            Ordering::Less => true,
            Ordering::Equal => !(j.left.closed && j.right.closed),
            Ordering::Greater => false,
        },
        _ => false,
    }
}

fn two(eps: &Q) -> Q {
    eps * Q::from_integer(2)
}

pub fn is_interleaved_1d(j: &Interval1D, k: &Interval1D, eps: &Q) -> Result<bool> {
    let tj = thicken(j, eps)?;
    let tk = thicken(k, eps)?;
    let t = two(eps);
    Ok((j.is_subset(&tk) && k.is_subset(&tj)) || (is_trivial_1d(j, &t) && is_trivial_1d(k, &t)))
}

pub fn check_matching_1d(sigma: &Matching, c: &Barcode1D, d: &Barcode1D, eps: &Q) -> Result<bool> {
    check_eps(eps)?;
    sigma.validate(c.len(), d.len())?;
    let t = two(eps);
    let (cov_c, cov_d) = sigma.coverage(c.len(), d.len());
    let required_ok = c.intervals.iter().zip(&cov_c).all(|(j, &m)| m || is_trivial_1d(j, &t))
        && d.intervals.iter().zip(&cov_d).all(|(j, &m)| m || is_trivial_1d(j, &t));
    if !required_ok {
        return Ok(false);
    }
    for &(i, j) in &sigma.pairs {
        if !is_interleaved_1d(&c.intervals[i], &d.intervals[j], eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Some ε-matching between `C` and `D`, if one exists.
pub fn find_matching_1d(c: &Barcode1D, d: &Barcode1D, eps: &Q) -> Result<Option<Matching>> {
    check_eps(eps)?;
    let t = two(eps);
    let tc: Vec<bool> = c.intervals.iter().map(|j| is_trivial_1d(j, &t)).collect();
    let td: Vec<bool> = d.intervals.iter().map(|j| is_trivial_1d(j, &t)).collect();
    let thk_c: Vec<Interval1D> = c.intervals.iter().map(|j| thicken(j, eps)).collect::<Result<_>>()?;
    let thk_d: Vec<Interval1D> = d.intervals.iter().map(|j| thicken(j, eps)).collect::<Result<_>>()?;
    let edge = |i: usize, j: usize| (c.intervals[i].is_subset(&thk_d[j]) && d.intervals[j].is_subset(&thk_c[i])) || (tc[i] && td[j]);
    Ok(covering_matching(c.len(), d.len(), edge, &tc, &td).map(Matching::new))
}

/// Finite values at which some 1-D predicate can change.
fn candidates_1d(c: &Barcode1D, d: &Barcode1D) -> Vec<Q> {
    let all: Vec<&Interval1D> = c.intervals.iter().chain(&d.intervals).collect();
    let lefts: Vec<Q> = all.iter().filter_map(|j| j.left.v.finite()).collect();
    let rights: Vec<Q> = all.iter().filter_map(|j| j.right.v.finite()).collect();
    let mut out = Vec::new();
    for ends in [&lefts, &rights] {
        for (k, x) in ends.iter().enumerate() {
            for y in &ends[k + 1..] {
                out.push(if x > y { x - y } else { y - x });
            }
        }
    }
    for j in &all {
        if let Ext::Fin(len) = j.length() {
            out.push(len / Q::from_integer(2));
        }
    }
    out
}

/// `inf{ε : an ε-matching exists}`, possibly `+∞`.
pub fn bottleneck_1d(c: &Barcode1D, d: &Barcode1D) -> Ext {
    infimum_over_candidates(candidates_1d(c, d), |eps| matches!(find_matching_1d(c, d, eps), Ok(Some(_))))
}
