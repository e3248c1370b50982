//! Blocks in the half-plane 𝕌 = {(x, y) : x ≤ y}, block barcodes, their
//! ε-predicates, diagonal restriction and bottleneck distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{Barcode1D, Endpoint, Interval1D, Matching};
use crate::matching::{covering_matching, infimum_over_candidates};
use crate::value::{Ext, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    O,
    Co,
    Oc,
    C,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] = [BlockKind::O, BlockKind::Co, BlockKind::Oc, BlockKind::C];

    pub fn as_str(&self) -> &'static str {
        match self {
            BlockKind::O => "o",
            BlockKind::Co => "co",
            BlockKind::Oc => "oc",
            BlockKind::C => "c",
        }
    }

    /// Kind from the closedness of the two ends.
    pub fn from_closed(left: bool, right: bool) -> Self {
        match (left, right) {
            (false, false) => BlockKind::O,
            (true, false) => BlockKind::Co,
            (false, true) => BlockKind::Oc,
            (true, true) => BlockKind::C,
        }
    }
}

impl FromStr for BlockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "o" => Ok(BlockKind::O),
            "co" => Ok(BlockKind::Co),
            "oc" => Ok(BlockKind::Oc),
            "c" => Ok(BlockKind::C),
            _ => Err(Error::Parse(format!("unknown block kind {s:?}"))),
        }
    }
}

/// A block `⟨a, b⟩` of the given kind. For kind `c`, `a > b` encodes the
/// switched block lying above the diagonal.
///
/// Regions, for `(x, y)` with `x ≤ y`:
/// `o`: a < x, y < b; `co`: a ≤ y < b; `oc`: a < x ≤ b; `c`: x ≤ b, y ≥ a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub a: Ext,
    pub b: Ext,
}

impl Block {
    /// Validates and normalizes. Forms whose region coincides with that of
    /// another kind are rewritten to the canonical kind:
    /// `(−∞,b)_o → co`, `(a,∞)_o → oc`, `(−∞,∞)_o → c`, `[a,∞)_co → c`,
    /// `(−∞,b]_oc → c`.
    pub fn new(kind: BlockKind, a: Ext, b: Ext) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidBlock(format!("{why}: {} {a},{b}", kind.as_str())));
        if a == Ext::PosInf || b == Ext::NegInf {
            return bad("endpoint on the wrong side of the line");
        }
        let kind = match kind {
            BlockKind::O => match (a.is_finite(), b.is_finite()) {
                (false, false) => BlockKind::C,
                (false, true) => BlockKind::Co,
                (true, false) => BlockKind::Oc,
                (true, true) => BlockKind::O,
            },
            BlockKind::Co if !b.is_finite() => BlockKind::C,
            BlockKind::Oc if !a.is_finite() => BlockKind::C,
            k => k,
        };
        if kind != BlockKind::C && a >= b {
            return bad("requires a < b");
        }
        Ok(Block { kind, a, b })
    }

    pub fn o(a: Ext, b: Ext) -> Result<Self> {
        Self::new(BlockKind::O, a, b)
    }

    pub fn co(a: Ext, b: Ext) -> Result<Self> {
        Self::new(BlockKind::Co, a, b)
    }

    pub fn oc(a: Ext, b: Ext) -> Result<Self> {
        Self::new(BlockKind::Oc, a, b)
    }

    pub fn c(a: Ext, b: Ext) -> Result<Self> {
        Self::new(BlockKind::C, a, b)
    }

    pub fn is_switched(&self) -> bool {
        self.kind == BlockKind::C && self.a > self.b
    }

    /// Membership of `(x, y)`; no check that `x ≤ y`.
    pub fn contains_unchecked(&self, x: &Q, y: &Q) -> bool {
        let (x, y) = (Ext::Fin(*x), Ext::Fin(*y));
        match self.kind {
            BlockKind::O => self.a < x && y < self.b,
            BlockKind::Co => self.a <= y && y < self.b,
            BlockKind::Oc => self.a < x && x <= self.b,
            BlockKind::C => x <= self.b && y >= self.a,
        }
    }

    /// `b − a` for blocks with both ends finite.
    pub fn length(&self) -> Ext {
        self.b.length_from(&self.a)
    }

    /// The 1-D interval `diag B`, absent for switched blocks.
    pub fn diag(&self) -> Option<Interval1D> {
        if self.is_switched() {
            return None;
        }
        let (lc, rc) = match self.kind {
            BlockKind::O => (false, false),
            BlockKind::Co => (true, false),
            BlockKind::Oc => (false, true),
            BlockKind::C => (true, true),
        };
        let left = Endpoint { v: self.a, closed: lc && self.a.is_finite() };
        let right = Endpoint { v: self.b, closed: rc && self.b.is_finite() };
        Some(Interval1D::new(left, right).expect("block diagonal is a valid interval"))
    }

    /// `{p : p + ε ∈ B}` under the shift `(x, y) + ε = (x − ε, y + ε)`.
    pub fn shift_back(&self, eps: &Q) -> Block {
        let (a, b) = match self.kind {
            BlockKind::O => (self.a.shift(*eps), self.b.shift(-eps)),
            BlockKind::C => (self.a.shift(-eps), self.b.shift(*eps)),
            BlockKind::Co => (self.a.shift(-eps), self.b.shift(-eps)),
            BlockKind::Oc => (self.a.shift(*eps), self.b.shift(*eps)),
        };
        Block { kind: self.kind, a, b }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = match self.kind {
            BlockKind::O => ('(', ')'),
            BlockKind::Co => ('[', ')'),
            BlockKind::Oc => ('(', ']'),
            BlockKind::C => ('[', ']'),
        };
        write!(f, "{l}{},{}{r}_BL", self.a, self.b)
    }
}

impl FromStr for Block {
    type Err = Error;

    /// Parses `(a,b)`, `[a,b)`, `(a,b]`, `[a,b]`, optionally suffixed `_BL`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_suffix("_BL").unwrap_or(s);
        let bad = || Error::Parse(format!("not a block: {s:?}"));
        if s.len() < 2 {
            return Err(bad());
        }
        let (lc, rc) = match (s.chars().next(), s.chars().last()) {
            (Some('['), Some(']')) => (true, true),
            (Some('['), Some(')')) => (true, false),
            (Some('('), Some(']')) => (false, true),
            (Some('('), Some(')')) => (false, false),
            _ => return Err(bad()),
        };
        let (a, b) = s[1..s.len() - 1].split_once(',').ok_or_else(bad)?;
        Block::new(BlockKind::from_closed(lc, rc), a.parse()?, b.parse()?)
    }
}

impl<'de> Deserialize<'de> for Block {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            kind: BlockKind,
            a: Ext,
            b: Ext,
        }
        let raw = Raw::deserialize(d)?;
        Block::new(raw.kind, raw.a, raw.b).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockBarcode {
    pub blocks: Vec<Block>,
}

impl BlockBarcode {
    pub fn new(blocks: Vec<Block>) -> Self {
        BlockBarcode { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn sorted(&self) -> BlockBarcode {
        let mut v = self.blocks.clone();
        v.sort_by(|x, y| (x.a, x.b, x.kind).cmp(&(y.a, y.b, y.kind)));
        BlockBarcode { blocks: v }
    }

    /// Number of blocks containing `(x, y)`.
    pub fn multiplicity_at(&self, x: &Q, y: &Q) -> usize {
        self.blocks.iter().filter(|b| b.contains_unchecked(x, y)).count()
    }

    /// Parses a whitespace-separated list like `[-2,2] (-1,1)_BL`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ';').filter(|t| !t.is_empty()) {
            out.push(tok.parse()?);
        }
        Ok(BlockBarcode { blocks: out })
    }
}

impl fmt::Display for BlockBarcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn block_contains(block: &Block, x: &Q, y: &Q) -> Result<bool> {
    if x > y {
        return Err(Error::InvalidBlock(format!("point ({x}, {y}) lies outside x ≤ y")));
    }
    Ok(block.contains_unchecked(x, y))
}

/// Whether the `t`-shift of `I^B` vanishes.
pub fn block_is_trivial(block: &Block, t: &Q) -> bool {
    let len = block.length();
    match block.kind {
        BlockKind::Co | BlockKind::Oc => len.le_q(t),
        BlockKind::O => len.le_q(&(t * Q::from_integer(2))),
        BlockKind::C => false,
    }
}

pub fn block_is_interleaved(x: &Block, y: &Block, eps: &Q) -> Result<bool> {
    if *eps < Q::from_integer(0) {
        return Err(Error::Negative(format!("ε = {eps}")));
    }
    let same = x.kind == y.kind && x.a.abs_diff(&y.a).le_q(eps) && x.b.abs_diff(&y.b).le_q(eps);
    let t = eps * Q::from_integer(2);
    Ok(same || (block_is_trivial(x, &t) && block_is_trivial(y, &t)))
}

pub fn diag_barcode(bb: &BlockBarcode) -> Barcode1D {
    Barcode1D::new(bb.blocks.iter().filter_map(Block::diag).collect())
}

/// For each block, its index in `diag_barcode`, if it has a diagonal.
pub fn diag_indices(bb: &BlockBarcode) -> Vec<Option<usize>> {
    let mut next = 0;
    bb.blocks
        .iter()
        .map(|b| {
            b.diag().map(|_| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

/// Restriction of `σ` to pairs whose blocks both meet the diagonal,
/// re-indexed into the diagonal barcodes.
pub fn diag_matching(sigma: &Matching, b: &BlockBarcode, d: &BlockBarcode) -> Result<Matching> {
    sigma.validate(b.len(), d.len())?;
    let ib = diag_indices(b);
    let id = diag_indices(d);
    Ok(Matching::new(sigma.pairs.iter().filter_map(|&(i, j)| Some((ib[i]?, id[j]?))).collect()))
}

pub fn check_matching_block(sigma: &Matching, b: &BlockBarcode, d: &BlockBarcode, eps: &Q) -> Result<bool> {
    if *eps < Q::from_integer(0) {
        return Err(Error::Negative(format!("ε = {eps}")));
    }
    sigma.validate(b.len(), d.len())?;
    let t = eps * Q::from_integer(2);
    let (cov_b, cov_d) = sigma.coverage(b.len(), d.len());
    let covered = b.blocks.iter().zip(&cov_b).all(|(x, &m)| m || block_is_trivial(x, &t))
        && d.blocks.iter().zip(&cov_d).all(|(x, &m)| m || block_is_trivial(x, &t));
    if !covered {
        return Ok(false);
    }
    for &(i, j) in &sigma.pairs {
        if !block_is_interleaved(&b.blocks[i], &d.blocks[j], eps)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Some ε-matching between the block barcodes, if one exists.
pub fn find_matching_block(b: &BlockBarcode, d: &BlockBarcode, eps: &Q) -> Result<Option<Matching>> {
    if *eps < Q::from_integer(0) {
        return Err(Error::Negative(format!("ε = {eps}")));
    }
    let t = eps * Q::from_integer(2);
    let tb: Vec<bool> = b.blocks.iter().map(|x| block_is_trivial(x, &t)).collect();
    let td: Vec<bool> = d.blocks.iter().map(|x| block_is_trivial(x, &t)).collect();
    let edge = |i: usize, j: usize| {
        let (x, y) = (&b.blocks[i], &d.blocks[j]);
        (x.kind == y.kind && x.a.abs_diff(&y.a).le_q(eps) && x.b.abs_diff(&y.b).le_q(eps)) || (tb[i] && td[j])
    };
    Ok(covering_matching(b.len(), d.len(), edge, &tb, &td).map(Matching::new))
}

fn candidates_block(b: &BlockBarcode, d: &BlockBarcode) -> Vec<Q> {
    let all: Vec<&Block> = b.blocks.iter().chain(&d.blocks).collect();
    let a_s: Vec<Q> = all.iter().filter_map(|x| x.a.finite()).collect();
    let b_s: Vec<Q> = all.iter().filter_map(|x| x.b.finite()).collect();
    let mut out = Vec::new();
    for ends in [&a_s, &b_s] {
        for (k, x) in ends.iter().enumerate() {
            for y in &ends[k + 1..] {
                out.push(if x > y { x - y } else { y - x });
            }
        }
    }
    for x in &all {
        if let Ext::Fin(len) = x.length() {
            match x.kind {
                BlockKind::Co | BlockKind::Oc => out.push(len / Q::from_integer(2)),
                BlockKind::O => out.push(len / Q::from_integer(4)),
                BlockKind::C => {}
            }
        }
    }
    out
}

/// `inf{ε : an ε-matching of block barcodes exists}`, possibly `+∞`.
pub fn bottleneck_block(b: &BlockBarcode, d: &BlockBarcode) -> Ext {
    infimum_over_candidates(candidates_block(b, d), |eps| matches!(find_matching_block(b, d, eps), Ok(Some(_))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::{bottleneck_1d, check_matching_1d};
    use crate::value::{q, qi};

    fn blk(s: &str) -> Block {
        s.parse().unwrap()
    }

    fn bb(s: &str) -> BlockBarcode {
        BlockBarcode::parse_list(s).unwrap()
    }

    #[test]
    fn normalization_of_unbounded_forms() {
        assert_eq!(blk("(-inf,3)").kind, BlockKind::Co);
        assert_eq!(blk("(1,inf)").kind, BlockKind::Oc);
        assert_eq!(blk("(-inf,inf)").kind, BlockKind::C);
        assert_eq!(blk("[1,inf)").kind, BlockKind::C);
        assert_eq!(blk("(-inf,1]").kind, BlockKind::C);
        assert!("(2,1)".parse::<Block>().is_err());
        assert!("[2,2)".parse::<Block>().is_err());
        assert!("[2,1]".parse::<Block>().unwrap().is_switched());
    }

    #[test]
    fn normalized_forms_keep_their_regions() {
        // compare membership before and after normalization on a small grid
        let raw = [
            (BlockKind::O, Ext::NegInf, Ext::int(1)),
            (BlockKind::O, Ext::int(-1), Ext::PosInf),
            (BlockKind::O, Ext::NegInf, Ext::PosInf),
            (BlockKind::Co, Ext::int(0), Ext::PosInf),
            (BlockKind::Oc, Ext::NegInf, Ext::int(0)),
        ];
        let pts: Vec<Q> = (-6..=6).map(|k| q(k, 2)).collect();
        for (kind, a, b) in raw {
            let norm = Block::new(kind, a, b).unwrap();
            let region = |x: &Q, y: &Q| {
                let (x, y) = (Ext::Fin(*x), Ext::Fin(*y));
                match kind {
                    BlockKind::O => a < x && y < b,
                    BlockKind::Co => a <= y && y < b,
                    BlockKind::Oc => a < x && x <= b,
                    BlockKind::C => x <= b && y >= a,
                }
            };
            for x in &pts {
                for y in pts.iter().filter(|y| *y >= x) {
                    assert_eq!(norm.contains_unchecked(x, y), region(x, y), "{norm} at ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn containment_examples() {
        assert!(block_contains(&blk("(0,2)"), &q(1, 2), &q(3, 2)).unwrap());
        assert!(block_contains(&blk("[0,2]"), &qi(-5), &qi(7)).unwrap());
        assert!(!block_contains(&blk("[2,0]"), &qi(1), &qi(1)).unwrap());
        assert!(block_contains(&blk("[2,0]"), &qi(0), &qi(2)).unwrap());
        assert!(block_contains(&blk("[0,1)"), &qi(-3), &qi(0)).unwrap());
        assert!(!block_contains(&blk("[0,1)"), &qi(-3), &qi(1)).unwrap());
        assert!(block_contains(&blk("(0,1]"), &q(1, 2), &qi(9)).unwrap());
        assert!(block_contains(&blk("(0,2)"), &qi(2), &qi(1)).is_err());
    }

    #[test]
    fn triviality_examples() {
        assert!(block_is_trivial(&blk("[0,1)"), &qi(1)));
        assert!(block_is_trivial(&blk("(0,4)"), &qi(2)));
        assert!(!block_is_trivial(&blk("(0,4)"), &q(19, 10)));
        assert!(!block_is_trivial(&blk("[0,1]"), &qi(1000)));
        assert!(!block_is_trivial(&blk("(0,inf]"), &qi(1000)));
    }

    #[test]
    fn interleaving_examples() {
        assert!(block_is_interleaved(&blk("(0,10)"), &blk("(1,9)"), &qi(1)).unwrap());
        assert!(!block_is_interleaved(&blk("(0,10)"), &blk("[0,10)"), &qi(1)).unwrap());
        assert!(block_is_interleaved(&blk("[3,1]"), &blk("[7/2,1/2]"), &q(1, 2)).unwrap());
        assert!(!block_is_interleaved(&blk("[0,1]"), &blk("[0,inf)"), &qi(100)).unwrap());
        assert!(block_is_interleaved(&blk("[0,inf)"), &blk("[1,inf)"), &qi(1)).unwrap());
    }

    #[test]
    fn diag_examples() {
        let b0 = bb("[-2,2] (-1,1) [-1,0) (0,1]");
        assert_eq!(diag_barcode(&b0), Barcode1D::parse_list("[-2,2] (-1,1) [-1,0) (0,1]").unwrap());
        assert!(diag_barcode(&bb("[2,0]")).is_empty());
        assert_eq!(diag_barcode(&bb("(-inf,inf)")), Barcode1D::parse_list("(-inf,inf)").unwrap());
    }

    #[test]
    fn diag_matching_examples() {
        let x = bb("(0,10) [2,0]");
        let y = bb("(1,9) [3,-1]");
        let sigma = Matching::new(vec![(0, 0), (1, 1)]);
        assert!(check_matching_block(&sigma, &x, &y, &qi(1)).unwrap());
        let dm = diag_matching(&sigma, &x, &y).unwrap();
        assert_eq!(dm, Matching::new(vec![(0, 0)]));
        assert!(check_matching_1d(&dm, &diag_barcode(&x), &diag_barcode(&y), &qi(2)).unwrap());
        let sw = diag_matching(&Matching::new(vec![(1, 1)]), &x, &y).unwrap();
        assert!(sw.pairs.is_empty());
    }

    #[test]
    fn check_matching_examples() {
        let x = bb("(0,10) [0,1]");
        assert!(check_matching_block(&Matching::identity(2), &x, &x, &qi(0)).unwrap());
        assert!(!check_matching_block(&Matching::default(), &bb("[0,1]"), &bb(""), &qi(50)).unwrap());
        assert!(check_matching_block(&Matching::default(), &bb("(0,4)"), &bb(""), &qi(1)).unwrap());
    }

    #[test]
    fn bottleneck_examples() {
        let x = bb("(0,10) [0,1] [3,1] (2,inf]");
        assert_eq!(bottleneck_block(&x, &x), Ext::int(0));
        assert_eq!(bottleneck_block(&bb("(0,10)"), &bb("(1,9)")), Ext::int(1));
        assert_eq!(bottleneck_block(&bb("[0,5]"), &bb("")), Ext::PosInf);
        assert_eq!(bottleneck_block(&bb("(0,4)"), &bb("")), Ext::int(1));
        assert_eq!(bottleneck_block(&bb("[0,4)"), &bb("")), Ext::int(2));
    }

    #[test]
    fn diagonal_distance_at_most_twice_block_distance() {
        let x = bb("(0,10) [0,4) (1,3] [5,6]");
        let y = bb("(1,9) [1,4) [5,7]");
        let db = bottleneck_block(&x, &y);
        let dd = bottleneck_1d(&diag_barcode(&x), &diag_barcode(&y));
        match (db, dd) {
            (Ext::Fin(b), Ext::Fin(d)) => assert!(d <= b * qi(2)),
            (Ext::PosInf, _) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_schema() {
        let x = bb("[-2,2] (0,inf]");
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"blocks":[{"kind":"c","a":"-2","b":"2"},{"kind":"oc","a":"0","b":"inf"}]}"#);
        assert_eq!(serde_json::from_str::<BlockBarcode>(&s).unwrap(), x);
        assert!(serde_json::from_str::<BlockBarcode>(r#"{"blocks":[{"kind":"o","a":"2","b":"1"}]}"#).is_err());
    }
}
