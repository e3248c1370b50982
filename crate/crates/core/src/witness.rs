//! Explicit interleavings of block-decomposable modules built from matchings,
//! their verification on a finite grid, and the typed matching check.
//!
//! The shift by `ε` sends `(x, y)` to `(x − ε, y + ε)`. A witness component
//! `J → K(ε)` is a scalar on the overlap `J ∩ K(ε)`, where
//! `K(ε) = {p : p + ε ∈ K}` is `K.shift_back(ε)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::blocks::{block_is_interleaved, block_is_trivial, check_matching_block, Block, BlockBarcode, BlockKind};
use crate::error::{Error, Result};
use crate::intervals::Matching;
use crate::matching::covering_matching;
use crate::value::{qi, Ext, Q};

/// Scalars of `f: J → K(ε)` and `g: K → J(ε)` for one matched pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub source: usize,
    pub target: usize,
    pub f: u8,
    pub g: u8,
}

/// A candidate ε-interleaving between `⊕ I^J` and `⊕ I^K`. Blocks outside
/// every pair have zero components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterleavingWitness {
    pub eps: Q,
    pub source: BlockBarcode,
    pub target: BlockBarcode,
    pub pairs: Vec<WitnessPair>,
}

impl InterleavingWitness {
    /// Assembles a witness without checking it; see [`verify_witness`].
    pub fn new_unchecked(eps: Q, source: BlockBarcode, target: BlockBarcode, pairs: Vec<WitnessPair>) -> Self {
        InterleavingWitness { eps, source, target, pairs }
    }

    fn well_formed(&self) -> bool {
        let m = Matching::new(self.pairs.iter().map(|p| (p.source, p.target)).collect());
        self.eps >= qi(0) && m.validate(self.source.len(), self.target.len()).is_ok() && self.pairs.iter().all(|p| p.f <= 1 && p.g <= 1)
    }
}

pub fn witness_from_matching(sigma: &Matching, b: &BlockBarcode, d: &BlockBarcode, eps: &Q) -> Result<InterleavingWitness> {
    if !check_matching_block(sigma, b, d, eps)? {
        return Err(Error::InvalidMatching(format!("not an {eps}-matching")));
    }
    let t = eps * qi(2);
    let pairs = sigma
        .pairs
        .iter()
        .map(|&(i, j)| {
            // both ends vanish under φ^{2ε}, so zero maps interleave them
            let s = u8::from(!(block_is_trivial(&b.blocks[i], &t) && block_is_trivial(&d.blocks[j], &t)));
            WitnessPair { source: i, target: j, f: s, g: s }
        })
        .collect();
    Ok(InterleavingWitness { eps: *eps, source: b.clone(), target: d.clone(), pairs })
}

/// Grid coordinates: every finite endpoint shifted by `0, ±ε, ±2ε`, one
/// point beyond each extreme, and midpoints of consecutive values.
pub fn verification_grid(w: &InterleavingWitness, extra: &[Q]) -> Vec<Q> {
    let mut base = BTreeSet::new();
    for blk in w.source.blocks.iter().chain(&w.target.blocks) {
        for v in [blk.a, blk.b].iter().filter_map(Ext::finite) {
            for k in -2..=2 {
                base.insert(v + w.eps * qi(k));
            }
        }
    }
    base.extend(extra.iter().copied());
    if base.is_empty() {
        base.insert(qi(0));
    }
    let lo = *base.first().unwrap() - qi(1);
    let hi = *base.last().unwrap() + qi(1);
    base.insert(lo);
    base.insert(hi);
    let sorted: Vec<Q> = base.iter().copied().collect();
    base.extend(sorted.windows(2).map(|p| (p[0] + p[1]) / qi(2)));
    base.into_iter().collect()
}

type Pt = (Q, Q);

fn inside(blk: &Block, p: &Pt) -> bool {
    blk.contains_unchecked(&p.0, &p.1)
}

fn shift(p: &Pt, e: Q) -> Pt {
    (p.0 - e, p.1 + e)
}

/// `c · 1: J → K(ε)` commutes with the structure maps along `p ≤ p′`.
fn natural_step(c: u8, j: &Block, k_shifted: &Block, p: &Pt, p2: &Pt) -> bool {
    if c == 0 || !inside(j, p) || !inside(k_shifted, p2) {
        return true;
    }
    inside(j, p2) == inside(k_shifted, p)
}

/// `g(ε) ∘ f = φ^{2ε}` on `J` at `p`, for the pair with scalars `cf`, `cg`.
fn composite_ok(cf: u8, cg: u8, j: &Block, k: &Block, p: &Pt, eps: Q) -> bool {
    let want = inside(j, p) && inside(j, &shift(p, eps * qi(2)));
    let got = cf * cg == 1 && inside(j, p) && inside(k, &shift(p, eps)) && inside(j, &shift(p, eps * qi(2)));
    want == got
}

/// Naturality of `f` and `g` along grid-adjacent steps, and both composite
/// identities at every grid point with `x ≤ y`. Extra coordinates refine the
/// grid.
pub fn verify_witness(w: &InterleavingWitness, extra: &[Q]) -> bool {
    if !w.well_formed() {
        return false;
    }
    let grid = verification_grid(w, extra);
    let eps = w.eps;
    let n = grid.len();
    let mut matched_s = vec![false; w.source.len()];
    let mut matched_t = vec![false; w.target.len()];
    for pr in &w.pairs {
        matched_s[pr.source] = true;
        matched_t[pr.target] = true;
    }
    let points = || (0..n).flat_map(move |i| (i..n).map(move |j| (i, j)));
    // unmatched blocks carry zero maps, so φ^{2ε} must vanish on them
    let dead = |blk: &Block| {
        points().all(|(i, j)| {
            let p = (grid[i], grid[j]);
            !(inside(blk, &p) && inside(blk, &shift(&p, eps * qi(2))))
        })
    };
    let unmatched_ok = w.source.blocks.iter().zip(&matched_s).all(|(b, &m)| m || dead(b))
        && w.target.blocks.iter().zip(&matched_t).all(|(b, &m)| m || dead(b));
    if !unmatched_ok {
        return false;
    }
    w.pairs.iter().all(|pr| {
        let j = &w.source.blocks[pr.source];
        let k = &w.target.blocks[pr.target];
        let (ks, js) = (k.shift_back(&eps), j.shift_back(&eps));
        points().all(|(a, b)| {
            let p = (grid[a], grid[b]);
            // p ≤ p′ in ℝ^op × ℝ: x decreases or y increases
            let mut steps = Vec::with_capacity(2);
            if a > 0 {
                steps.push((grid[a - 1], grid[b]));
            }
            if b + 1 < n {
                steps.push((grid[a], grid[b + 1]));
            }
            steps.iter().all(|p2| natural_step(pr.f, j, &ks, &p, p2) && natural_step(pr.g, k, &js, &p, p2))
                && composite_ok(pr.f, pr.g, j, k, &p, eps)
                && composite_ok(pr.g, pr.f, k, j, &p, eps)
        })
    })
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    source: usize,
    target: usize,
    f: u8,
    g: u8,
    /// Supports of `f` and `g` as block intersections.
    f_support: Option<[String; 2]>,
    g_support: Option<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    #[serde(with = "crate::value::serde_q")]
    eps: Q,
    source: BlockBarcode,
    target: BlockBarcode,
    pairs: Vec<PairJson>,
}

impl Serialize for InterleavingWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                let j = self.source.blocks.get(p.source);
                let k = self.target.blocks.get(p.target);
                let support = |c: u8, from: Option<&Block>, to: Option<&Block>| match (c, from, to) {
                    (1, Some(x), Some(y)) => Some([x.to_string(), y.shift_back(&self.eps).to_string()]),
                    _ => None,
                };
                PairJson {
                    source: p.source,
                    target: p.target,
                    f: p.f,
                    g: p.g,
                    f_support: support(p.f, j, k),
                    g_support: support(p.g, k, j),
                }
            })
            .collect();
        WitnessJson { eps: self.eps, source: self.source.clone(), target: self.target.clone(), pairs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for InterleavingWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = WitnessJson::deserialize(d)?;
        let pairs = raw.pairs.iter().map(|p| WitnessPair { source: p.source, target: p.target, f: p.f, g: p.g }).collect();
        Ok(InterleavingWitness { eps: raw.eps, source: raw.source, target: raw.target, pairs })
    }
}

/// Blocks a stability matching at `ε` must cover: all closed blocks, open
/// blocks longer than `10ε`, and half-open blocks longer than `2ε`.
pub fn must_cover(blk: &Block, eps: &Q) -> bool {
    match blk.kind {
        BlockKind::C => true,
        BlockKind::O => !block_is_trivial(blk, &(eps * qi(5))),
        BlockKind::Co | BlockKind::Oc => !block_is_trivial(blk, &(eps * qi(2))),
    }
}

/// Whether a type-preserving matching of ε-interleaved pairs covers every
/// block in [`must_cover`] on both sides.
pub fn block_stability_check(b: &BlockBarcode, d: &BlockBarcode, eps: &Q) -> bool {
    if *eps < qi(0) {
        return false;
    }
    let free_b: Vec<bool> = b.blocks.iter().map(|x| !must_cover(x, eps)).collect();
    let free_d: Vec<bool> = d.blocks.iter().map(|x| !must_cover(x, eps)).collect();
    let edge = |i: usize, j: usize| {
        let (x, y) = (&b.blocks[i], &d.blocks[j]);
        x.kind == y.kind && block_is_interleaved(x, y, eps).unwrap_or(false)
    };
    covering_matching(b.len(), d.len(), edge, &free_b, &free_d).is_some()
}
