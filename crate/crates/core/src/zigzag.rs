//! Finite zigzag modules over GF(p) and their interval decomposition.
//!
//! Positions are numbered `1..=n`. Arrow `k` joins positions `k` and `k+1`;
//! a forward arrow maps `V_k → V_{k+1}` and a backward arrow `V_{k+1} → V_k`.
//! In the alternating pattern position 1 is a source, so arrow `k` is forward
//! exactly when `k` is odd.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_prime, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "fwd")]
    Fwd,
    #[serde(rename = "bwd")]
    Bwd,
}

/// Directions of the `n − 1` arrows of the alternating pattern.
pub fn alternating(n: usize) -> Vec<Dir> {
    (1..n).map(|k| if k % 2 == 1 { Dir::Fwd } else { Dir::Bwd }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub dir: Dir,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagModule {
    field: u32,
    dims: Vec<usize>,
    arrows: Vec<Arrow>,
}

impl ZigzagModule {
    /// Checks the field, arrow count and matrix shapes.
    pub fn new(field: u32, dims: Vec<usize>, arrows: Vec<Arrow>) -> Result<Self> {
        check_prime(field)?;
        if dims.is_empty() {
            return Err(Error::Dimension("a zigzag needs at least one position".into()));
        }
        if arrows.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!("{} positions need {} arrows, found {}", dims.len(), dims.len() - 1, arrows.len())));
        }
        for (k, a) in arrows.iter().enumerate() {
            if a.matrix.field() != field {
                return Err(Error::FieldMismatch { expected: field, found: a.matrix.field() });
            }
            let want = match a.dir {
                Dir::Fwd => (dims[k + 1], dims[k]),
                Dir::Bwd => (dims[k], dims[k + 1]),
            };
            if a.matrix.shape() != want {
                return Err(Error::Dimension(format!("arrow {} has shape {:?}, expected {want:?}", k + 1, a.matrix.shape())));
            }
        }
        Ok(ZigzagModule { field, dims, arrows })
    }

    pub fn zero(field: u32, orientation: &[Dir]) -> Self {
        let n = orientation.len() + 1;
        let arrows = orientation.iter().map(|&dir| Arrow { dir, matrix: Matrix::zeros(field, 0, 0) }).collect();
        ZigzagModule { field, dims: vec![0; n], arrows }
    }

    pub fn field(&self) -> u32 {
        self.field
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn orientation(&self) -> Vec<Dir> {
        self.arrows.iter().map(|a| a.dir).collect()
    }

    pub fn is_alternating(&self) -> bool {
        self.orientation() == alternating(self.len())
    }

    pub fn require_alternating(&self) -> Result<()> {
        if self.is_alternating() {
            Ok(())
        } else {
            Err(Error::Orientation("expected the alternating pattern starting with a source".into()))
        }
    }
}

/// Position range `[first, last]`, 1-based and inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZigzagInterval {
    pub first: usize,
    pub last: usize,
}

impl ZigzagInterval {
    pub fn new(first: usize, last: usize) -> Result<Self> {
        if first == 0 || first > last {
            return Err(Error::InvalidInterval(format!("position range [{first},{last}]")));
        }
        Ok(ZigzagInterval { first, last })
    }

    pub fn contains(&self, k: usize) -> bool {
        self.first <= k && k <= self.last
    }
}

impl fmt::Display for ZigzagInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.first, self.last)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagBarcode {
    pub intervals: Vec<ZigzagInterval>,
}

impl ZigzagBarcode {
    pub fn sorted(&self) -> Self {
        let mut v = self.intervals.clone();
        v.sort();
        ZigzagBarcode { intervals: v }
    }

    /// Checks every interval lies within `1..=n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        for j in &self.intervals {
            if j.first == 0 || j.first > j.last || j.last > n {
                return Err(Error::InvalidInterval(format!("{j} outside 1..={n}")));
            }
        }
        Ok(())
    }
}

pub fn interval_module_zz(j: ZigzagInterval, orientation: &[Dir], field: u32) -> Result<ZigzagModule> {
    let n = orientation.len() + 1;
    ZigzagBarcode { intervals: vec![j] }.validate(n)?;
    let dims: Vec<usize> = (1..=n).map(|k| usize::from(j.contains(k))).collect();
    let arrows = orientation
        .iter()
        .enumerate()
        .map(|(k, &dir)| {
            let (s, t) = (dims[k], dims[k + 1]);
            let matrix = match dir {
                Dir::Fwd => Matrix::from_fn(field, t, s, |_, _| 1),
                Dir::Bwd => Matrix::from_fn(field, s, t, |_, _| 1),
            };
            Arrow { dir, matrix }
        })
        .collect();
    ZigzagModule::new(field, dims, arrows)
}

/// Direct sum of modules sharing `orientation` and `field`.
pub fn direct_sum(vs: &[ZigzagModule], orientation: &[Dir], field: u32) -> Result<ZigzagModule> {
    for v in vs {
        if v.field != field {
            return Err(Error::FieldMismatch { expected: field, found: v.field });
        }
        if v.orientation() != orientation {
            return Err(Error::Orientation("summands have different orientations".into()));
        }
    }
    let n = orientation.len() + 1;
    let dims = (0..n).map(|k| vs.iter().map(|v| v.dims[k]).sum()).collect();
    let arrows = orientation
        .iter()
        .enumerate()
        .map(|(k, &dir)| {
            let parts: Vec<&Matrix> = vs.iter().map(|v| &v.arrows[k].matrix).collect();
            Arrow { dir, matrix: Matrix::block_diag(field, &parts) }
        })
        .collect();
    ZigzagModule::new(field, dims, arrows)
}

/// Direct sum of interval modules, one per barcode entry.
pub fn module_from_barcode(bc: &ZigzagBarcode, orientation: &[Dir], field: u32) -> Result<ZigzagModule> {
    let parts = bc.intervals.iter().map(|&j| interval_module_zz(j, orientation, field)).collect::<Result<Vec<_>>>()?;
    direct_sum(&parts, orientation, field)
}

/// Change of basis at every position by the given invertible matrices.
pub fn change_basis(v: &ZigzagModule, ts: &[Matrix]) -> ZigzagModule {
    assert_eq!(ts.len(), v.len());
    let inv: Vec<Matrix> = ts.iter().map(|t| t.inverse().expect("invertible base change")).collect();
    let arrows = v
        .arrows
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let matrix = match a.dir {
                Dir::Fwd => ts[k + 1].mul(&a.matrix).mul(&inv[k]),
                Dir::Bwd => ts[k].mul(&a.matrix).mul(&inv[k + 1]),
            };
            Arrow { dir: a.dir, matrix }
        })
        .collect();
    ZigzagModule { field: v.field, dims: v.dims.clone(), arrows }
}

/// Conjugate every position by a random invertible matrix.
pub fn shuffle_basis(v: &ZigzagModule, seed: u64) -> ZigzagModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffle_basis_with(v, &mut rng)
}

pub fn shuffle_basis_with<R: Rng + ?Sized>(v: &ZigzagModule, rng: &mut R) -> ZigzagModule {
    let ts: Vec<Matrix> = v.dims.iter().map(|&d| Matrix::random_invertible(v.field, d, rng)).collect();
    change_basis(v, &ts)
}

/// `r(s, q)` for the fixed start `s` and every `q ≥ s` (0-based).
fn rank_sweep(v: &ZigzagModule, s: usize) -> Vec<usize> {
    let p = v.field;
    let n = v.len();
    // lim → V_q and V_q → colim for the restriction to [s, q]
    let mut lim = Matrix::identity(p, v.dims[s]);
    let mut colim = Matrix::identity(p, v.dims[s]);
    let mut out = vec![v.dims[s]];
    for q in s..n - 1 {
        let a = &v.arrows[q].matrix;
        match v.arrows[q].dir {
            Dir::Fwd => {
                lim = a.mul(&lim);
                let c = colim.rows();
                let rel = Matrix::vstack(p, v.dims[q], &[&colim, &a.neg()]);
                let proj = rel.cokernel_projection();
                colim = proj.slice(0, proj.rows(), c, c + v.dims[q + 1]);
            }
            Dir::Bwd => {
                colim = colim.mul(a);
                let l = lim.cols();
                let k = Matrix::hstack(p, v.dims[q], &[&lim, &a.neg()]).kernel_matrix();
                lim = k.slice(l, l + v.dims[q + 1], 0, k.cols());
            }
        }
        out.push(colim.mul(&lim).rank());
    }
    out
}

/// Rank of the canonical map from the limit to the colimit of `V`
/// restricted to positions `first..=last` (1-based).
pub fn generalized_rank(v: &ZigzagModule, first: usize, last: usize) -> Result<usize> {
    ZigzagInterval::new(first, last)?;
    if last > v.len() {
        return Err(Error::IndexOutOfRange { index: last, len: v.len() });
    }
    Ok(rank_sweep(v, first - 1)[last - first])
}

/// Interval decomposition by inclusion–exclusion on generalized ranks.
pub fn decompose_zz(v: &ZigzagModule) -> ZigzagBarcode {
    let n = v.len();
    // r[s][q] for 0 ≤ s ≤ q < n
    let r: Vec<Vec<usize>> = (0..n).map(|s| rank_sweep(v, s)).collect();
    let rank = |s: isize, q: usize| -> i64 {
        if s < 0 || q >= n {
            0
        } else {
            r[s as usize][q - s as usize] as i64
        }
    };
    let mut out = Vec::new();
    for s in 0..n {
        for q in s..n {
            let si = s as isize;
            let m = rank(si, q) - rank(si - 1, q) - rank(si, q + 1) + rank(si - 1, q + 1);
            debug_assert!(m >= 0, "negative multiplicity at [{s},{q}]");
            for _ in 0..m.max(0) {
                out.push(ZigzagInterval { first: s + 1, last: q + 1 });
            }
        }
    }
    ZigzagBarcode { intervals: out }
}

/// Random multiset of at most `max_count` intervals within `1..=n`.
pub fn random_barcode<R: Rng + ?Sized>(n: usize, max_count: usize, rng: &mut R) -> ZigzagBarcode {
    let count = rng.gen_range(0..=max_count);
    let mut intervals = Vec::with_capacity(count);
    for _ in 0..count {
        let a = rng.gen_range(1..=n);
        let b = rng.gen_range(1..=n);
        intervals.push(ZigzagInterval { first: a.min(b), last: a.max(b) });
    }
    ZigzagBarcode { intervals }.sorted()
}

#[derive(Serialize, Deserialize)]
struct ArrowJson {
    dir: Dir,
    matrix: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct ZigzagJson {
    field: u32,
    dims: Vec<usize>,
    arrows: Vec<ArrowJson>,
}

impl Serialize for ZigzagModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZigzagJson {
            field: self.field,
            dims: self.dims.clone(),
            arrows: self.arrows.iter().map(|a| ArrowJson { dir: a.dir, matrix: a.matrix.to_rows() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZigzagModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ZigzagJson::deserialize(d)?;
        let mut arrows = Vec::with_capacity(raw.arrows.len());
        for (k, a) in raw.arrows.into_iter().enumerate() {
            let (&s, &t) = match (raw.dims.get(k), raw.dims.get(k + 1)) {
                (Some(s), Some(t)) => (s, t),
                _ => return Err(D::Error::custom("more arrows than positions allow")),
            };
            let (rows, cols) = match a.dir {
                Dir::Fwd => (t, s),
                Dir::Bwd => (s, t),
            };
            let matrix = Matrix::from_rows_shaped(raw.field, rows, cols, &a.matrix)
                .map_err(|e| D::Error::custom(format!("arrow {}: {e}", k + 1)))?;
            arrows.push(Arrow { dir: a.dir, matrix });
        }
        ZigzagModule::new(raw.field, raw.dims, arrows).map_err(D::Error::custom)
    }
}
