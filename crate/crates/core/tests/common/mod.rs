//! Brute-force oracles and random corpora shared by the integration tests.
//!
//! Every oracle here recomputes its answer from definitions by exhaustive
//! enumeration and never calls the matching or search code it checks.

#![allow(dead_code)]

use blockstab::grid2d::linf;
use blockstab::intervals::Endpoint;
use blockstab::persistence1d::LineMorphism;
use blockstab::{q, qi, Barcode1D, Block, BlockBarcode, BlockKind, Ext, Interval1D, Matrix, Q};
use rand::Rng;

/// Every partial injection `0..n → 0..m`, as `target[i]`.
pub fn partial_matchings(n: usize, m: usize) -> Vec<Vec<Option<usize>>> {
    fn go(i: usize, n: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, n, used, cur, out);
        cur.pop();
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, n, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut vec![false; m], &mut Vec::new(), &mut out);
    out
}

/// `min over partial matchings σ` of the largest per-element cost: pair cost
/// for matched pairs, unmatched cost for everything left over.
pub fn minimax<T>(c: &[T], d: &[T], pair: impl Fn(&T, &T) -> Ext, alone: impl Fn(&T) -> Ext) -> Ext {
    partial_matchings(c.len(), d.len())
        .into_iter()
        .map(|sigma| {
            let mut worst = Ext::int(0);
            let mut hit = vec![false; d.len()];
            for (i, s) in sigma.iter().enumerate() {
                let cost = match s {
                    Some(j) => {
                        hit[*j] = true;
                        pair(&c[i], &d[*j])
                    }
                    None => alone(&c[i]),
                };
                worst = worst.max(cost);
            }
            for (j, h) in hit.iter().enumerate() {
                if !h {
                    worst = worst.max(alone(&d[j]));
                }
            }
            worst
        })
        .min()
        .expect("the empty matching always exists")
}

fn half(e: Ext) -> Ext {
    e.div(qi(2))
}

/// `inf{ε : J is 2ε-trivial}`.
pub fn interval_alone(j: &Interval1D) -> Ext {
    half(j.right.v.length_from(&j.left.v))
}

/// `inf{ε : J, K are ε-interleaved}`.
pub fn interval_pair(j: &Interval1D, k: &Interval1D) -> Ext {
    let moved = j.left.v.abs_diff(&k.left.v).max(j.right.v.abs_diff(&k.right.v));
    moved.min(interval_alone(j).max(interval_alone(k)))
}

pub fn brute_bottleneck_1d(c: &Barcode1D, d: &Barcode1D) -> Ext {
    minimax(&c.intervals, &d.intervals, interval_pair, interval_alone)
}

/// `inf{ε : the block is 2ε-trivial}`.
pub fn block_alone(b: &Block) -> Ext {
    let len = b.b.length_from(&b.a);
    match b.kind {
        BlockKind::C => Ext::PosInf,
        BlockKind::O => len.div(qi(4)),
        BlockKind::Co | BlockKind::Oc => half(len),
    }
}

pub fn block_pair(x: &Block, y: &Block) -> Ext {
    let moved = if x.kind == y.kind { x.a.abs_diff(&y.a).max(x.b.abs_diff(&y.b)) } else { Ext::PosInf };
    moved.min(block_alone(x).max(block_alone(y)))
}

pub fn brute_bottleneck_block(c: &BlockBarcode, d: &BlockBarcode) -> Ext {
    minimax(&c.blocks, &d.blocks, block_pair, block_alone)
}

/// Minimax ℓ∞ cost over all bijections; `+∞` when sizes differ.
pub fn brute_free_bottleneck(a: &[(Q, Q)], b: &[(Q, Q)]) -> Ext {
    if a.len() != b.len() {
        return Ext::PosInf;
    }
    partial_matchings(a.len(), b.len())
        .into_iter()
        .filter(|s| s.iter().all(Option::is_some))
        .map(|s| s.iter().enumerate().map(|(i, j)| Ext::Fin(linf(&a[i], &b[j.unwrap()]))).max().unwrap_or(Ext::int(0)))
        .min()
        .expect("a bijection exists between equal sizes")
}

/// Small rationals on a half-integer lattice.
pub fn small_q<R: Rng + ?Sized>(rng: &mut R) -> Q {
    q(rng.gen_range(-8..=8), 2)
}

pub fn random_interval<R: Rng + ?Sized>(rng: &mut R) -> Interval1D {
    loop {
        let (x, y) = (small_q(rng), small_q(rng));
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let left = if rng.gen_bool(0.1) { Endpoint::open(Ext::NegInf) } else { Endpoint { v: Ext::Fin(a), closed: rng.gen() } };
        let right = if rng.gen_bool(0.1) { Endpoint::open(Ext::PosInf) } else { Endpoint { v: Ext::Fin(b), closed: rng.gen() } };
        if let Ok(j) = Interval1D::new(left, right) {
            return j;
        }
    }
}

pub fn random_barcode_1d<R: Rng + ?Sized>(max: usize, rng: &mut R) -> Barcode1D {
    let n = rng.gen_range(0..=max);
    Barcode1D::new((0..n).map(|_| random_interval(rng)).collect())
}

pub fn random_block<R: Rng + ?Sized>(rng: &mut R) -> Block {
    loop {
        let kind = BlockKind::ALL[rng.gen_range(0..4)];
        let a = if rng.gen_bool(0.08) { Ext::NegInf } else { Ext::Fin(small_q(rng)) };
        let b = if rng.gen_bool(0.08) { Ext::PosInf } else { Ext::Fin(small_q(rng)) };
        if let Ok(blk) = Block::new(kind, a, b) {
            return blk;
        }
    }
}

pub fn random_block_barcode<R: Rng + ?Sized>(max: usize, rng: &mut R) -> BlockBarcode {
    let n = rng.gen_range(0..=max);
    BlockBarcode::new((0..n).map(|_| random_block(rng)).collect())
}

/// Moves every finite endpoint by a multiple of `ε/4` in `[−ε, ε]`, keeping
/// each kind; blocks that would degenerate are moved again.
pub fn perturb_blocks<R: Rng + ?Sized>(b: &BlockBarcode, eps: &Q, rng: &mut R) -> BlockBarcode {
    let jiggle = |v: Ext, rng: &mut R| v.shift(*eps * q(rng.gen_range(-4..=4), 4));
    BlockBarcode::new(
        b.blocks
            .iter()
            .map(|x| loop {
                let (a, bb) = (jiggle(x.a, rng), jiggle(x.b, rng));
                if let Ok(y) = Block::new(x.kind, a, bb) {
                    if y.kind == x.kind {
                        break y;
                    }
                }
            })
            .collect(),
    )
}

/// `(ε, δ)` measured from the definition: the least `u` such that every
/// kernel element dies, and every target element enters the image, after a
/// shift by `u`.
pub fn brute_trivialities(f: &LineMorphism) -> (Ext, Ext) {
    let (m, n) = (f.source(), f.target());
    let g = m.grid();
    let cells = g.len();
    let p = m.field();
    let phi = |maps: &[Matrix], dims: &[usize], i: usize, j: usize| {
        let mut t = Matrix::identity(p, dims[i]);
        for k in i..j {
            t = maps[k].mul(&t);
        }
        t
    };
    let mut eps = Ext::int(0);
    let mut delta = Ext::int(0);
    for i in 0..cells {
        let ker = f.components()[i].kernel_matrix();
        if ker.cols() > 0 {
            let dies = (i..cells).find(|&j| phi(m.maps(), m.dims(), i, j).mul(&ker).is_zero());
            eps = eps.max(dies.map_or(Ext::PosInf, |j| Ext::Fin(g[j] - g[i])));
        }
        let enters = (i..cells).find(|&j| {
            let im = f.components()[j].column_space();
            let moved = phi(n.maps(), n.dims(), i, j);
            Matrix::hstack(p, n.dims()[j], &[&im, &moved]).rank() == im.rank()
        });
        delta = delta.max(enters.map_or(Ext::PosInf, |j| Ext::Fin(g[j] - g[i])));
    }
    (eps, delta)
}

/// The induced-matching contract, restated from its definition.
pub fn induced_contract(bm: &Barcode1D, bn: &Barcode1D, pairs: &[(usize, usize)], eps: Ext, delta: Ext) -> bool {
    let mut seen_m = vec![false; bm.len()];
    let mut seen_n = vec![false; bn.len()];
    for &(i, k) in pairs {
        if i >= bm.len() || k >= bn.len() || seen_m[i] || seen_n[k] {
            return false;
        }
        seen_m[i] = true;
        seen_n[k] = true;
    }
    let len = |j: &Interval1D| j.right.v.length_from(&j.left.v);
    let covered = bm.intervals.iter().zip(&seen_m).all(|(j, &s)| s || len(j) <= eps)
        && bn.intervals.iter().zip(&seen_n).all(|(j, &s)| s || len(j) <= delta);
    let plus = |x: Ext, u: Ext| match (x, u) {
        (Ext::Fin(x), Ext::Fin(u)) => Ext::Fin(x + u),
        (x, Ext::Fin(_)) => x,
        _ => Ext::PosInf,
    };
    covered
        && pairs.iter().all(|&(i, k)| {
            let (a, b) = (bm.intervals[i].left.v, bm.intervals[i].right.v);
            let (a2, b2) = (bn.intervals[k].left.v, bn.intervals[k].right.v);
            // b − ε ≤ b′ is read as b ≤ b′ + ε so that ∞ − ∞ never arises
            a2 <= a && a <= plus(a2, delta) && b <= plus(b2, eps) && b2 <= b && a <= b2
        })
}

/// A free monomorphism whose source generators sit at most one step above
/// their partners, so its cokernel is 1-trivial.
pub fn near_identity_free<R: Rng + ?Sized>(
    window: blockstab::Window,
    max_gens: usize,
    field: u32,
    rng: &mut R,
) -> blockstab::GridMorphism2D {
    let n = rng.gen_range(1..=max_gens);
    let target: Vec<(i64, i64)> =
        (0..n).map(|_| (rng.gen_range(window.x0 + 1..window.x1()), rng.gen_range(window.y0 + 1..window.y1()))).collect();
    let source: Vec<(i64, i64)> = target.iter().map(|&(x, y)| (x + rng.gen_range(0..=1), y + rng.gen_range(0..=1))).collect();
    let coeff: Vec<Vec<u32>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let ok = target[j].0 <= source[i].0 && target[j].1 <= source[i].1;
                    // unitriangular in list order, hence injective
                    if i == j {
                        1
                    } else if ok && j < i {
                        rng.gen_range(0..field)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    blockstab::grid2d::free_morphism(&source, &target, &coeff, window, field).expect("coefficients respect generator order")
}
