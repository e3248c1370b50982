//! Piecewise-linear functions on finite graphs: level-set zigzags, interlevel
//! block barcodes, level-set barcodes and pointwise certificates.
//!
//! The zigzag samples the function at regular values. With critical values
//! `s_0 < … < s_{m−1}` and regular values `t_0 < s_0 < t_1 < … < s_{m−1} < t_m`,
//! position `2k+1` is the level `γ⁻¹(t_k)` and position `2k+2` is the slab
//! `γ⁻¹([t_k, t_{k+1}])`. Label `k` of the extended barcode then sits at `s_k`.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::{diag_barcode, Block, BlockBarcode, BlockKind};
use crate::error::{Error, Result};
use crate::extension::{extend_interval_on, tag_interval, Grid};
use crate::intervals::{bottleneck_1d, Barcode1D};
use crate::linalg::Matrix;
use crate::value::{qi, Ext, Q};
use crate::zigzag::{alternating, decompose_zz, Arrow, Dir, ZigzagModule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: u64,
    #[serde(with = "crate::value::serde_q")]
    pub value: Q,
}

/// A graph with a value at every vertex, extended linearly over edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PLGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(u64, u64)>,
}

impl<'de> Deserialize<'de> for PLGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            vertices: Vec<Vertex>,
            edges: Vec<(u64, u64)>,
        }
        let raw = Raw::deserialize(d)?;
        PLGraph::new(raw.vertices, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// The graph with vertices indexed by position rather than id.
struct Indexed {
    values: Vec<Q>,
    edges: Vec<(usize, usize)>,
}

impl PLGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(u64, u64)>) -> Result<Self> {
        let g = PLGraph { vertices, edges };
        validate_pl_graph(&g)?;
        Ok(g)
    }

    /// From `(id, value)` pairs, for fixtures.
    pub fn from_values(vertices: &[(u64, Q)], edges: &[(u64, u64)]) -> Result<Self> {
        PLGraph::new(vertices.iter().map(|&(id, value)| Vertex { id, value }).collect(), edges.to_vec())
    }

    /// Sorted distinct vertex values.
    pub fn critical_values(&self) -> Vec<Q> {
        self.vertices.iter().map(|v| v.value).collect::<BTreeSet<_>>().into_iter().collect()
    }

    fn indexed(&self) -> Indexed {
        let pos: HashMap<u64, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        Indexed {
            values: self.vertices.iter().map(|v| v.value).collect(),
            edges: self.edges.iter().map(|(u, v)| (pos[u], pos[v])).collect(),
        }
    }
}

/// Checks a nonempty vertex set, unique ids, known endpoints, no self-loops
/// and distinct endpoint values on every edge.
pub fn validate_pl_graph(g: &PLGraph) -> Result<()> {
    let mut errs = Vec::new();
    if g.vertices.is_empty() {
        errs.push("vertex set is empty".to_string());
    }
    let mut values = HashMap::new();
    for v in &g.vertices {
        if values.insert(v.id, v.value).is_some() {
            errs.push(format!("vertex id {} is repeated", v.id));
        }
    }
    for (k, &(u, v)) in g.edges.iter().enumerate() {
        match (values.get(&u), values.get(&v)) {
            (Some(_), _) | (_, Some(_)) if u == v => errs.push(format!("edge {k} is a self-loop at {u}")),
            (Some(a), Some(b)) if a == b => errs.push(format!("edge {k} ({u},{v}) has equal endpoint values {a}")),
            (Some(_), Some(_)) => {}
            _ => errs.push(format!("edge {k} ({u},{v}) references an unknown vertex")),
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidGraph(errs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PreimageNode {
    Vertex(usize),
    /// Interior point of an edge at a given value.
    Crossing(usize, Q),
}

/// `γ⁻¹([x, y])` as a graph, with components.
#[derive(Clone, Debug)]
pub struct PreimageGraph {
    pub nodes: Vec<PreimageNode>,
    pub edges: Vec<(usize, usize)>,
    /// Component of every node.
    pub component: Vec<usize>,
    pub h0: usize,
    pub h1: usize,
    vertex_node: HashMap<usize, usize>,
    /// A node on the fragment of every edge meeting the band.
    edge_node: HashMap<usize, usize>,
}

impl PreimageGraph {
    pub fn homology(&self, degree: usize) -> usize {
        if degree == 0 {
            self.h0
        } else {
            self.h1
        }
    }

    fn component_of(&self, node: &PreimageNode) -> usize {
        let n = match node {
            PreimageNode::Vertex(v) => self.vertex_node[v],
            PreimageNode::Crossing(e, _) => self.edge_node[e],
        };
        self.component[n]
    }

    /// One node per component, in component order.
    fn representatives(&self) -> Vec<PreimageNode> {
        let mut rep = vec![None; self.h0];
        for (n, &c) in self.component.iter().enumerate() {
            rep[c].get_or_insert(self.nodes[n]);
        }
        rep.into_iter().map(|r| r.expect("every component has a node")).collect()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn build_preimage(g: &Indexed, x: &Q, y: &Q) -> PreimageGraph {
    assert!(x <= y, "band needs x ≤ y");
    let mut nodes = Vec::new();
    let mut index: HashMap<PreimageNode, usize> = HashMap::new();
    let mut intern = |n: PreimageNode, nodes: &mut Vec<PreimageNode>| {
        *index.entry(n).or_insert_with(|| {
            nodes.push(n);
            nodes.len() - 1
        })
    };
    let mut vertex_node = HashMap::new();
    for (v, val) in g.values.iter().enumerate() {
        if x <= val && val <= y {
            vertex_node.insert(v, intern(PreimageNode::Vertex(v), &mut nodes));
        }
    }
    let mut edges = Vec::new();
    let mut edge_node = HashMap::new();
    for (e, &(u, v)) in g.edges.iter().enumerate() {
        let (lo, hi) = if g.values[u] < g.values[v] { (u, v) } else { (v, u) };
        let from = (*x).max(g.values[lo]);
        let to = (*y).min(g.values[hi]);
        if from > to {
            continue;
        }
        let at = |z: Q| {
            if z == g.values[lo] {
                PreimageNode::Vertex(lo)
            } else if z == g.values[hi] {
                PreimageNode::Vertex(hi)
            } else {
                PreimageNode::Crossing(e, z)
            }
        };
        let a = intern(at(from), &mut nodes);
        let b = intern(at(to), &mut nodes);
        edge_node.insert(e, a);
        if from < to {
            edges.push((a, b));
        }
    }
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    for &(a, b) in &edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut label = HashMap::new();
    let component: Vec<usize> = (0..nodes.len())
        .map(|n| {
            let r = find(&mut parent, n);
            let next = label.len();
            *label.entry(r).or_insert(next)
        })
        .collect();
    let h0 = label.len();
    // Euler characteristic of a graph: E − V + C
    let h1 = edges.len() + h0 - nodes.len();
    PreimageGraph { nodes, edges, component, h0, h1, vertex_node, edge_node }
}

pub fn preimage_graph(g: &PLGraph, x: &Q, y: &Q) -> PreimageGraph {
    build_preimage(&g.indexed(), x, y)
}

/// Regular values `t_0, …, t_m` interleaving the critical values.
fn regular_values(s: &[Q]) -> Vec<Q> {
    let mut t = Vec::with_capacity(s.len() + 1);
    t.push(s[0] - qi(1));
    t.extend(s.windows(2).map(|w| (w[0] + w[1]) / qi(2)));
    t.push(s[s.len() - 1] + qi(1));
    t
}

/// The bands sampled by the zigzag, in position order.
fn zigzag_bands(s: &[Q]) -> Vec<(Q, Q)> {
    let t = regular_values(s);
    let mut bands = Vec::with_capacity(2 * s.len() + 1);
    for k in 0..s.len() {
        bands.push((t[k], t[k]));
        bands.push((t[k], t[k + 1]));
    }
    bands.push((t[s.len()], t[s.len()]));
    bands
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > 1 {
        return Err(Error::Other(format!("graphs have homology only in degrees 0 and 1, not {degree}")));
    }
    Ok(())
}

/// `H_degree` of levels and slabs over GF(`field`), alternating from a level.
pub fn levelset_zigzag(g: &PLGraph, degree: usize, field: u32) -> Result<ZigzagModule> {
    check_degree(degree)?;
    let ig = g.indexed();
    let bands = zigzag_bands(&g.critical_values());
    let pre: Vec<PreimageGraph> = bands.iter().map(|(x, y)| build_preimage(&ig, x, y)).collect();
    let dims: Vec<usize> = pre.iter().map(|p| p.homology(degree)).collect();
    let orientation = alternating(pre.len());
    let arrows = orientation
        .iter()
        .enumerate()
        .map(|(k, &dir)| {
            // levels sit at even 0-based positions and include into both neighbours
            let (level, slab) = if dir == Dir::Fwd { (k, k + 1) } else { (k + 1, k) };
            let (from, to) = (&pre[level], &pre[slab]);
            let matrix = if degree == 0 {
                let reps = from.representatives();
                Matrix::from_fn(field, to.h0, from.h0, |r, c| u32::from(to.component_of(&reps[c]) == r))
            } else {
                debug_assert_eq!(from.h1, 0, "levels at regular values are discrete");
                Matrix::zeros(field, to.h1, from.h1)
            };
            Arrow { dir, matrix }
        })
        .collect();
    ZigzagModule::new(field, dims, arrows)
}

/// The interlevel block barcode `B_degree`. Degree 1 consists of the switched
/// blocks `[b, a]` for the open blocks `(a, b)` of degree 0.
pub fn interlevel_blocks(g: &PLGraph, degree: usize) -> Result<BlockBarcode> {
    check_degree(degree)?;
    let zz = levelset_zigzag(g, 0, 2)?;
    let grid = Grid::new(g.critical_values())?;
    let orientation = zz.orientation();
    let b0 = decompose_zz(&zz)
        .intervals
        .iter()
        .map(|j| extend_interval_on(&tag_interval(j, &orientation)?, &grid))
        .collect::<Result<Vec<_>>>()?;
    let b0 = BlockBarcode::new(b0).sorted();
    if degree == 0 {
        return Ok(b0);
    }
    let b1 = b0.blocks.iter().filter(|b| b.kind == BlockKind::O).map(|b| Block::c(b.b, b.a)).collect::<Result<Vec<_>>>()?;
    Ok(BlockBarcode::new(b1).sorted())
}

pub fn level_barcode(g: &PLGraph, degree: usize) -> Result<Barcode1D> {
    Ok(diag_barcode(&interlevel_blocks(g, degree)?).sorted())
}

/// Critical values, midpoints between them, and one point beyond each end.
pub fn verification_grid(g: &PLGraph) -> Vec<Q> {
    let s = g.critical_values();
    let mut pts: Vec<Q> = regular_values(&s);
    pts.extend(s);
    pts.sort();
    pts
}

/// Whether every band `[x, y]` on the verification grid has exactly as many
/// blocks containing `(x, y)` as `H_degree(γ⁻¹([x, y]))` has dimensions.
pub fn verify_pointwise(g: &PLGraph, degree: usize, bb: &BlockBarcode) -> bool {
    pointwise_mismatches(g, degree, bb).is_empty()
}

/// Bands where the certificate fails, with `(blocks, homology)` counts.
pub fn pointwise_mismatches(g: &PLGraph, degree: usize, bb: &BlockBarcode) -> Vec<((Q, Q), usize, usize)> {
    let ig = g.indexed();
    let pts = verification_grid(g);
    let mut out = Vec::new();
    for (i, x) in pts.iter().enumerate() {
        for y in &pts[i..] {
            let h = build_preimage(&ig, x, y).homology(degree);
            let m = bb.multiplicity_at(x, y);
            if h != m {
                out.push(((*x, *y), m, h));
            }
        }
    }
    out
}

/// The degree-1 zigzag agrees slab by slab with the degree-1 blocks.
pub fn h1_consistent(g: &PLGraph) -> Result<bool> {
    let zz = levelset_zigzag(g, 1, 2)?;
    let b1 = interlevel_blocks(g, 1)?;
    let bands = zigzag_bands(&g.critical_values());
    let bars = decompose_zz(&zz);
    Ok(bands.iter().enumerate().all(|(k, (x, y))| {
        let here = bars.intervals.iter().filter(|j| j.contains(k + 1)).count();
        here == b1.multiplicity_at(x, y)
    }))
}

#[derive(Clone, Debug)]
pub struct Perturbation {
    pub graph: PLGraph,
    /// `max |γ(v) − κ(v)|` over vertices.
    pub d_inf: Q,
}

const PERTURB_STEPS: i128 = 8;
const PERTURB_ATTEMPTS: usize = 10_000;

/// Shifts each vertex value by a multiple of `δ/8` in `[−δ, δ]`, resampling
/// until no edge has equal endpoint values.
pub fn perturb<R: Rng + ?Sized>(g: &PLGraph, delta: &Q, rng: &mut R) -> Result<Perturbation> {
    if *delta < qi(0) {
        return Err(Error::Negative(format!("δ = {delta}")));
    }
    for _ in 0..PERTURB_ATTEMPTS {
        let shifts: Vec<Q> =
            g.vertices.iter().map(|_| *delta * qi(rng.gen_range(-PERTURB_STEPS..=PERTURB_STEPS)) / qi(PERTURB_STEPS)).collect();
        let vertices: Vec<Vertex> = g.vertices.iter().zip(&shifts).map(|(v, s)| Vertex { id: v.id, value: v.value + s }).collect();
        if let Ok(graph) = PLGraph::new(vertices, g.edges.clone()) {
            let d_inf = shifts.iter().map(|s| if *s < qi(0) { -s } else { *s }).max().unwrap_or(qi(0));
            return Ok(Perturbation { graph, d_inf });
        }
    }
    Err(Error::Other(format!("no valid perturbation found in {PERTURB_ATTEMPTS} attempts")))
}

/// Lower bound on the Reeb interleaving distance from degree-0 level-set
/// barcodes: `d_b / 5`, or `d_b / 2` with the tight constant.
pub fn reeb_lower_bound(g1: &PLGraph, g2: &PLGraph, tight: bool) -> Result<Ext> {
    let d = bottleneck_1d(&level_barcode(g1, 0)?, &level_barcode(g2, 0)?);
    Ok(d.div(qi(if tight { 2 } else { 5 })))
}

/// Random graph on `n` vertices with integer values in `0..=max_value` and
/// about `edges` edges; parallel edges and cycles are common.
pub fn random_pl_graph<R: Rng + ?Sized>(n: usize, edges: usize, max_value: i128, rng: &mut R) -> PLGraph {
    assert!(n >= 1 && max_value >= 1);
    let mut values: Vec<Q> = (0..n).map(|_| qi(rng.gen_range(0..=max_value))).collect();
    if n >= 2 && values.iter().all(|v| *v == values[0]) {
        values[1] = if values[0] == qi(0) { qi(1) } else { qi(0) };
    }
    let mut es = Vec::new();
    for _ in 0..edges * 4 {
        if es.len() == edges {
            break;
        }
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if values[u] != values[v] {
            es.push((u as u64, v as u64));
        }
    }
    let vs: Vec<(u64, Q)> = values.into_iter().enumerate().map(|(i, v)| (i as u64, v)).collect();
    PLGraph::from_values(&vs, &es).expect("edges join distinct values")
}

pub mod fixtures {
    use super::*;

    pub fn single_edge() -> PLGraph {
        PLGraph::from_values(&[(0, qi(0)), (1, qi(1))], &[(0, 1)]).unwrap()
    }

    /// A 4-cycle with values `0, 1, 2, 1`.
    pub fn diamond() -> PLGraph {
        PLGraph::from_values(&[(0, qi(0)), (1, qi(1)), (2, qi(2)), (3, qi(1))], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    /// The height function of a figure-eight-like immersed curve, as its image
    /// graph with the crossing at height 0 as a vertex of degree 4.
    pub fn immersed_curve() -> PLGraph {
        // A(−2) X(0) B(1) C(−1) D(2)
        PLGraph::from_values(&[(0, qi(-2)), (1, qi(0)), (2, qi(1)), (3, qi(-1)), (4, qi(2))], &[(0, 1), (1, 2), (2, 3), (3, 1), (1, 4)])
            .unwrap()
    }

    pub fn all() -> Vec<(&'static str, PLGraph)> {
        vec![("single_edge", single_edge()), ("diamond", diamond()), ("immersed_curve", immersed_curve())]
    }
}
