//! The block extension `E` on barcodes and pointwise, and the zigzag
//! distances defined through it.
//!
//! Under the alternating pattern, position `k` (1-based) sits at the ℤℤ
//! coordinate `(i, i−1)` for odd `k = 2i+1` (a source) and `(i, i)` for even
//! `k = 2i+2` (a sink).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blocks::{bottleneck_block, Block, BlockBarcode, BlockKind};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::value::{Ext, Q};
use crate::zigzag::{alternating, decompose_zz, Dir, ZigzagBarcode, ZigzagInterval, ZigzagModule};

/// `⟨b, d⟩_ZZ` with integer (or infinite) labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedZigzagInterval {
    pub kind: BlockKind,
    pub b: Ext,
    pub d: Ext,
}

impl fmt::Display for TaggedZigzagInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = match self.kind {
            BlockKind::O => ('(', ')'),
            BlockKind::Co => ('[', ')'),
            BlockKind::Oc => ('(', ']'),
            BlockKind::C => ('[', ']'),
        };
        write!(f, "{l}{},{}{r}_ZZ", self.b, self.d)
    }
}

/// Strictly increasing real values for the integer labels `0, 1, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    #[serde(with = "crate::value::serde_q_vec")]
    values: Vec<Q>,
}

impl Grid {
    pub fn new(values: Vec<Q>) -> Result<Self> {
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInterval("grid values must increase strictly".into()));
        }
        Ok(Grid { values })
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Real value of an integer label; infinities are fixed.
    pub fn value(&self, label: &Ext) -> Result<Ext> {
        match label {
            Ext::Fin(v) => {
                let idx = if v.is_integer() { usize::try_from(*v.numer()).ok() } else { None };
                idx.and_then(|i| self.values.get(i))
                    .map(|x| Ext::Fin(*x))
                    .ok_or_else(|| Error::IndexOutOfRange { index: v.to_integer().max(0) as usize, len: self.values.len() })
            }
            inf => Ok(*inf),
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(with = "crate::value::serde_q_vec")]
            values: Vec<Q>,
        }
        Grid::new(Raw::deserialize(d)?.values).map_err(serde::de::Error::custom)
    }
}

fn require_alternating(orientation: &[Dir]) -> Result<()> {
    if orientation == alternating(orientation.len() + 1).as_slice() {
        Ok(())
    } else {
        Err(Error::Orientation("expected the alternating pattern starting with a source".into()))
    }
}

/// ℤℤ label and closedness of a position used as a left or right end.
fn end_label(k: usize, is_left: bool) -> (i128, bool) {
    let i = ((k - 1) / 2) as i128;
    let is_source = k % 2 == 1;
    match (is_source, is_left) {
        (true, true) => (i - 1, false),
        (true, false) => (i, false),
        (false, _) => (i, true),
    }
}

pub fn tag_interval(j: &ZigzagInterval, orientation: &[Dir]) -> Result<TaggedZigzagInterval> {
    require_alternating(orientation)?;
    ZigzagBarcode { intervals: vec![*j] }.validate(orientation.len() + 1)?;
    let (b, lc) = end_label(j.first, true);
    let (d, rc) = end_label(j.last, false);
    Ok(TaggedZigzagInterval { kind: BlockKind::from_closed(lc, rc), b: Ext::int(b), d: Ext::int(d) })
}

pub fn extend_interval(j: &TaggedZigzagInterval) -> Result<Block> {
    Block::new(j.kind, j.b, j.d)
}

/// The block of a tagged interval with its labels read through `grid`.
pub fn extend_interval_on(j: &TaggedZigzagInterval, grid: &Grid) -> Result<Block> {
    Block::new(j.kind, grid.value(&j.b)?, grid.value(&j.d)?)
}

pub fn extend_barcode(z: &ZigzagBarcode, orientation: &[Dir]) -> Result<BlockBarcode> {
    let blocks = z.intervals.iter().map(|j| tag_interval(j, orientation).and_then(|t| extend_interval(&t))).collect::<Result<Vec<_>>>()?;
    Ok(BlockBarcode::new(blocks))
}

/// `dim E(V)_{(x,y)}`: the colimit of `V` over the ℤℤ positions below `(x, y)`
/// in `ℝ^op × ℝ`, i.e. positions from source `⌈x⌉` through source `⌊y⌋+1`.
pub fn pointwise_dim_e(v: &ZigzagModule, x: &Q, y: &Q) -> Result<usize> {
    v.require_alternating()?;
    if x > y {
        return Err(Error::InvalidBlock(format!("point ({x}, {y}) lies outside x ≤ y")));
    }
    let n = v.len() as i128;
    let lo = 2 * x.ceil().to_integer() + 1;
    let hi = 2 * y.floor().to_integer() + 3;
    if lo.max(1) > hi.min(n) {
        return Ok(0);
    }
    // outside 1..=n the module is zero; a source whose zero neighbour sink is
    // in the box maps to 0 there, so its whole space dies in the colimit
    let kill_first = lo <= 0;
    let kill_last = hi > n && n % 2 == 1;
    colimit_dim(v, lo.max(1) as usize, hi.min(n) as usize, kill_first, kill_last)
}

/// Dimension of the colimit of `V` restricted to positions `lo..=hi`,
/// optionally with `V_lo` and/or `V_hi` sent to zero.
fn colimit_dim(v: &ZigzagModule, lo: usize, hi: usize, kill_lo: bool, kill_hi: bool) -> Result<usize> {
    let p = v.field();
    let dims = v.dims();
    let offsets: Vec<usize> = (lo..=hi)
        .scan(0usize, |acc, k| {
            let o = *acc;
            *acc += dims[k - 1];
            Some(o)
        })
        .collect();
    let total: usize = (lo..=hi).map(|k| dims[k - 1]).sum();
    // one relation column per basis vector of each arrow's domain
    let mut columns: Vec<Vec<u32>> = Vec::new();
    for k in lo..hi {
        let arrow = &v.arrows()[k - 1];
        let (src, dst) = match arrow.dir {
            Dir::Fwd => (k, k + 1),
            Dir::Bwd => (k + 1, k),
        };
        let (os, od) = (offsets[src - lo], offsets[dst - lo]);
        for c in 0..dims[src - 1] {
            let mut col = vec![0u32; total];
            col[os + c] = 1;
            for r in 0..dims[dst - 1] {
                col[od + r] = (col[od + r] + p - arrow.matrix.get(r, c)) % p;
            }
            columns.push(col);
        }
    }
    for (kill, k) in [(kill_lo, lo), (kill_hi, hi)] {
        if kill {
            for c in 0..dims[k - 1] {
                let mut col = vec![0u32; total];
                col[offsets[k - lo] + c] = 1;
                columns.push(col);
            }
        }
    }
    let rel = Matrix::from_columns(p, total, &columns);
    Ok(total - rel.rank())
}

/// Bottleneck distance of the extended barcodes.
pub fn zz_bottleneck(v: &ZigzagModule, w: &ZigzagModule) -> Result<Ext> {
    let bv = extend_barcode(&decompose_zz(v), &v.orientation())?;
    let bw = extend_barcode(&decompose_zz(w), &w.orientation())?;
    Ok(bottleneck_block(&bv, &bw))
}

/// Certified bounds `(lower, upper)` on the interleaving distance from a
/// block bottleneck value: `d_I ≤ d_b ≤ c·d_I` with `c = 5/2`, or `c = 1`
/// under the tight constant.
pub fn interleaving_bounds(d_b: Ext, tight: bool) -> (Ext, Ext) {
    let c = if tight { Q::from_integer(1) } else { Q::new(5, 2) };
    (d_b.div(c), d_b)
}

pub fn zz_interleaving_bounds(v: &ZigzagModule, w: &ZigzagModule, tight: bool) -> Result<(Ext, Ext)> {
    Ok(interleaving_bounds(zz_bottleneck(v, w)?, tight))
}
