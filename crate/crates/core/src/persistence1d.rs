//! Persistence modules over ℝ that are constant on the cells of a finite
//! grid, their morphisms, (co)kernel and image barcodes, and the induced
//! matching of a morphism.
//!
//! Cell `i` is `[g_i, g_{i+1})` and the last cell is `[g_m, ∞)`, so every bar
//! is `[g_i, g_j)` or `[g_i, ∞)`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{Barcode1D, Interval1D, Matching};
use crate::linalg::{check_prime, Matrix};
use crate::value::{Ext, Q};
use crate::zigzag::{decompose_zz, Arrow, Dir, ZigzagModule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineModule {
    field: u32,
    grid: Vec<Q>,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
}

impl LineModule {
    pub fn new(field: u32, grid: Vec<Q>, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self> {
        check_prime(field)?;
        if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInterval("grid must be nonempty and strictly increasing".into()));
        }
        if dims.len() != grid.len() || maps.len() + 1 != grid.len() {
            return Err(Error::Dimension(format!(
                "grid of {} points needs {} dims and {} maps, found {} and {}",
                grid.len(),
                grid.len(),
                grid.len() - 1,
                dims.len(),
                maps.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.field() != field {
                return Err(Error::FieldMismatch { expected: field, found: m.field() });
            }
            if m.shape() != (dims[i + 1], dims[i]) {
                return Err(Error::Dimension(format!("map {i} has shape {:?}", m.shape())));
            }
        }
        Ok(LineModule { field, grid, dims, maps })
    }

    pub fn field(&self) -> u32 {
        self.field
    }

    pub fn grid(&self) -> &[Q] {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    fn as_zigzag(&self) -> ZigzagModule {
        let arrows = self.maps.iter().map(|m| Arrow { dir: Dir::Fwd, matrix: m.clone() }).collect();
        ZigzagModule::new(self.field, self.dims.clone(), arrows).expect("line module shapes are valid")
    }

    /// Sum of interval modules on cell ranges `[a, b)` (0-based); `b = m`
    /// means the bar never dies.
    pub fn from_cell_bars(field: u32, grid: Vec<Q>, bars: &[(usize, usize)]) -> Result<Self> {
        let m = grid.len();
        for &(a, b) in bars {
            if a >= b || b > m {
                return Err(Error::InvalidInterval(format!("cell range [{a},{b}) on {m} cells")));
            }
        }
        let dims: Vec<usize> = (0..m).map(|t| bars.iter().filter(|&&(a, b)| a <= t && t < b).count()).collect();
        let maps = (0..m.saturating_sub(1))
            .map(|t| {
                let src: Vec<usize> = (0..bars.len()).filter(|&k| bars[k].0 <= t && t < bars[k].1).collect();
                let dst: Vec<usize> = (0..bars.len()).filter(|&k| bars[k].0 <= t + 1 && t + 1 < bars[k].1).collect();
                Matrix::from_fn(field, dst.len(), src.len(), |r, c| u32::from(dst[r] == src[c]))
            })
            .collect();
        LineModule::new(field, grid, dims, maps)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineMorphism {
    source: LineModule,
    target: LineModule,
    components: Vec<Matrix>,
}

impl LineMorphism {
    /// Checks shapes and that every square commutes.
    pub fn new(source: LineModule, target: LineModule, components: Vec<Matrix>) -> Result<Self> {
        if source.grid != target.grid {
            return Err(Error::Dimension("source and target grids differ".into()));
        }
        if source.field != target.field {
            return Err(Error::FieldMismatch { expected: source.field, found: target.field });
        }
        if components.len() != source.grid.len() {
            return Err(Error::Dimension(format!("{} components for {} cells", components.len(), source.grid.len())));
        }
        for (i, f) in components.iter().enumerate() {
            if f.shape() != (target.dims[i], source.dims[i]) || f.field() != source.field {
                return Err(Error::Dimension(format!("component {i} has shape {:?}", f.shape())));
            }
        }
        for i in 0..source.maps.len() {
            let lhs = target.maps[i].mul(&components[i]);
            let rhs = components[i + 1].mul(&source.maps[i]);
            if lhs != rhs {
                return Err(Error::NotCommutative(format!("square between cells {i} and {}", i + 1)));
            }
        }
        Ok(LineMorphism { source, target, components })
    }

    pub fn source(&self) -> &LineModule {
        &self.source
    }

    pub fn target(&self) -> &LineModule {
        &self.target
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }
}

fn solve_exact(a: &Matrix, b: &Matrix) -> Matrix {
    a.solve_matrix(b).expect("shapes agree").expect("induced map exists for a commuting morphism")
}

pub fn line_barcode(m: &LineModule) -> Barcode1D {
    let cells = m.grid.len();
    let mut out: Vec<Interval1D> = decompose_zz(&m.as_zigzag())
        .intervals
        .iter()
        .map(|j| {
            let a = Ext::Fin(m.grid[j.first - 1]);
            let b = if j.last == cells { Ext::PosInf } else { Ext::Fin(m.grid[j.last]) };
            Interval1D::closed_open(a, b).expect("grid bars are nonempty")
        })
        .collect();
    out.sort_by(|x, y| (x.left.v, x.right.v).cmp(&(y.left.v, y.right.v)));
    Barcode1D::new(out)
}

/// Kernel, image and cokernel of `f` as line modules.
pub fn morphism_modules(f: &LineMorphism) -> (LineModule, LineModule, LineModule) {
    let p = f.source.field;
    let m = f.source.grid.len();
    let kers: Vec<Matrix> = f.components.iter().map(Matrix::kernel_matrix).collect();
    let ims: Vec<Matrix> = f.components.iter().map(Matrix::column_space).collect();
    let projs: Vec<Matrix> = f.components.iter().map(Matrix::cokernel_projection).collect();
    let sections: Vec<Matrix> = projs.iter().map(|pi| solve_exact(pi, &Matrix::identity(p, pi.rows()))).collect();
    let mut ker_maps = Vec::new();
    let mut im_maps = Vec::new();
    let mut coker_maps = Vec::new();
    for i in 0..m - 1 {
        ker_maps.push(solve_exact(&kers[i + 1], &f.source.maps[i].mul(&kers[i])));
        im_maps.push(solve_exact(&ims[i + 1], &f.target.maps[i].mul(&ims[i])));
        coker_maps.push(projs[i + 1].mul(&f.target.maps[i]).mul(&sections[i]));
    }
    let build = |dims: Vec<usize>, maps| LineModule::new(p, f.source.grid.clone(), dims, maps).expect("induced shapes");
    (
        build(kers.iter().map(Matrix::cols).collect(), ker_maps),
        build(ims.iter().map(Matrix::cols).collect(), im_maps),
        build(projs.iter().map(Matrix::rows).collect(), coker_maps),
    )
}

/// Barcodes of `ker f`, `im f` and `coker f`.
pub fn morphism_barcodes(f: &LineMorphism) -> (Barcode1D, Barcode1D, Barcode1D) {
    let (k, i, c) = morphism_modules(f);
    (line_barcode(&k), line_barcode(&i), line_barcode(&c))
}

/// Longest bar, `0` for the empty barcode. A half-open bar `[a, b)` is
/// `u`-trivial exactly when `b − a ≤ u`.
pub fn max_bar_length(b: &Barcode1D) -> Ext {
    b.intervals.iter().map(Interval1D::length).max().unwrap_or(Ext::int(0))
}

/// `(ε, δ)`: the smallest shifts annihilating `ker f` and `coker f`.
pub fn triviality_of(f: &LineMorphism) -> (Ext, Ext) {
    let (k, _, c) = morphism_barcodes(f);
    (max_bar_length(&k), max_bar_length(&c))
}

/// Pairs equal-keyed bars of two barcodes in order of decreasing length.
fn pair_by_key(from: &Barcode1D, to: &Barcode1D, key: impl Fn(&Interval1D) -> Ext) -> Vec<(usize, usize)> {
    let group = |b: &Barcode1D| {
        let mut g: BTreeMap<Ext, Vec<usize>> = BTreeMap::new();
        for (k, j) in b.intervals.iter().enumerate() {
            g.entry(key(j)).or_default().push(k);
        }
        for v in g.values_mut() {
            // stable sort keeps the pairing deterministic among equal bars
            v.sort_by(|&x, &y| b.intervals[y].length().cmp(&b.intervals[x].length()));
        }
        g
    };
    let gf = group(from);
    let gt = group(to);
    let mut out = Vec::new();
    for (k, xs) in &gf {
        if let Some(ys) = gt.get(k) {
            out.extend(xs.iter().copied().zip(ys.iter().copied()));
        }
    }
    out
}

/// The matching `B(M) → B(N)` obtained by composing the surjection part
/// `B(M) → B(im f)` (shared left endpoints) with the injection part
/// `B(im f) → B(N)` (shared right endpoints).
pub fn induced_matching_1d(f: &LineMorphism) -> (Barcode1D, Barcode1D, Matching) {
    let bm = line_barcode(&f.source);
    let bn = line_barcode(&f.target);
    let (_, im, _) = morphism_modules(f);
    let bi = line_barcode(&im);
    let surj = pair_by_key(&bm, &bi, |j| j.left.v);
    let inj: BTreeMap<usize, usize> = pair_by_key(&bi, &bn, |j| j.right.v).into_iter().collect();
    let pairs = surj.into_iter().filter_map(|(m, i)| inj.get(&i).map(|&n| (m, n))).collect();
    (bm, bn, Matching::new(pairs))
}

/// `x − u ≤ y` with `∞ − ∞` read as "no constraint".
fn minus_le(x: &Ext, u: &Ext, y: &Ext) -> bool {
    match u {
        Ext::Fin(u) => x.shift(-u) <= *y,
        _ => true,
    }
}

/// Checks coverage of `B(M)_ε`, `B(N)_δ` and the endpoint inequalities
/// `a′ ≤ a ≤ a′ + δ`, `b − ε ≤ b′ ≤ b`, `a ≤ b′` for every matched pair.
pub fn check_induced_matching(bm: &Barcode1D, bn: &Barcode1D, chi: &Matching, eps: &Ext, delta: &Ext) -> Result<bool> {
    chi.validate(bm.len(), bn.len())?;
    let (cov_m, cov_n) = chi.coverage(bm.len(), bn.len());
    let long = |j: &Interval1D, u: &Ext| j.length() > *u;
    if bm.intervals.iter().zip(&cov_m).any(|(j, &c)| !c && long(j, eps)) {
        return Ok(false);
    }
    if bn.intervals.iter().zip(&cov_n).any(|(j, &c)| !c && long(j, delta)) {
        return Ok(false);
    }
    for &(i, k) in &chi.pairs {
        let (a, b) = (bm.intervals[i].left.v, bm.intervals[i].right.v);
        let (a2, b2) = (bn.intervals[k].left.v, bn.intervals[k].right.v);
        let ok = a2 <= a && minus_le(&a, delta, &a2) && minus_le(&b, eps, &b2) && b2 <= b && a <= b2;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random morphism between sums of interval modules, disguised by
/// pointwise base changes. Bars are cell ranges; an entry between
/// `I[a,b) → I[c,d)` is allowed only when `c ≤ a < d ≤ b`.
pub fn random_morphism<R: Rng + ?Sized>(field: u32, grid: Vec<Q>, max_bars: usize, rng: &mut R) -> LineMorphism {
    let m = grid.len();
    let bars = |rng: &mut R| -> Vec<(usize, usize)> {
        let count = rng.gen_range(0..=max_bars);
        (0..count)
            .map(|_| {
                let a = rng.gen_range(0..m);
                (a, rng.gen_range(a + 1..=m))
            })
            .collect()
    };
    let sb = bars(rng);
    let tb = bars(rng);
    let src = LineModule::from_cell_bars(field, grid.clone(), &sb).expect("valid bars");
    let tgt = LineModule::from_cell_bars(field, grid, &tb).expect("valid bars");
    let coeff: Vec<Vec<u32>> = tb
        .iter()
        .map(|&(c, d)| {
            sb.iter().map(|&(a, b)| if c <= a && a < d && d <= b && rng.gen_bool(0.7) { rng.gen_range(0..field) } else { 0 }).collect()
        })
        .collect();
    let comps: Vec<Matrix> = (0..m)
        .map(|t| {
            let s: Vec<usize> = (0..sb.len()).filter(|&k| sb[k].0 <= t && t < sb[k].1).collect();
            let r: Vec<usize> = (0..tb.len()).filter(|&k| tb[k].0 <= t && t < tb[k].1).collect();
            Matrix::from_fn(field, r.len(), s.len(), |i, j| coeff[r[i]][s[j]])
        })
        .collect();
    let ts: Vec<Matrix> = src.dims.iter().map(|&d| Matrix::random_invertible(field, d, rng)).collect();
    let us: Vec<Matrix> = tgt.dims.iter().map(|&d| Matrix::random_invertible(field, d, rng)).collect();
    let conj = |mm: &LineModule, bs: &[Matrix]| {
        let maps = (0..m - 1).map(|i| bs[i + 1].mul(&mm.maps[i]).mul(&bs[i].inverse().expect("invertible"))).collect();
        LineModule::new(field, mm.grid.clone(), mm.dims.clone(), maps).expect("conjugate shapes")
    };
    let src2 = conj(&src, &ts);
    let tgt2 = conj(&tgt, &us);
    let comps2 = (0..m).map(|i| us[i].mul(&comps[i]).mul(&ts[i].inverse().expect("invertible"))).collect();
    LineMorphism::new(src2, tgt2, comps2).expect("interval morphisms commute")
}

#[derive(Serialize, Deserialize)]
struct LineModuleJson {
    field: u32,
    #[serde(with = "crate::value::serde_q_vec")]
    grid: Vec<Q>,
    dims: Vec<usize>,
    maps: Vec<Vec<Vec<i64>>>,
}

impl From<&LineModule> for LineModuleJson {
    fn from(m: &LineModule) -> Self {
        LineModuleJson { field: m.field, grid: m.grid.clone(), dims: m.dims.clone(), maps: m.maps.iter().map(Matrix::to_rows).collect() }
    }
}

impl TryFrom<LineModuleJson> for LineModule {
    type Error = Error;

    fn try_from(j: LineModuleJson) -> Result<Self> {
        if j.maps.len() + 1 != j.dims.len() {
            return Err(Error::Dimension("maps must number one fewer than dims".into()));
        }
        let maps = j
            .maps
            .iter()
            .enumerate()
            .map(|(i, rows)| Matrix::from_rows_shaped(j.field, j.dims[i + 1], j.dims[i], rows))
            .collect::<Result<Vec<_>>>()?;
        LineModule::new(j.field, j.grid, j.dims, maps)
    }
}

impl Serialize for LineModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LineModuleJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LineModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        LineModuleJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct LineMorphismJson {
    source: LineModule,
    target: LineModule,
    components: Vec<Vec<Vec<i64>>>,
}

impl Serialize for LineMorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LineMorphismJson {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self.components.iter().map(Matrix::to_rows).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LineMorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = LineMorphismJson::deserialize(d)?;
        if raw.components.len() != raw.source.dims.len() {
            return Err(D::Error::custom("one component per cell is required"));
        }
        let comps = raw
            .components
            .iter()
            .enumerate()
            .map(|(i, rows)| Matrix::from_rows_shaped(raw.source.field, raw.target.dims[i], raw.source.dims[i], rows))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        LineMorphism::new(raw.source, raw.target, comps).map_err(D::Error::custom)
    }
}
