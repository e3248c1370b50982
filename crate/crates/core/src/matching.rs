//! Bipartite matching with required coverage, and the infimum search shared
//! by every bottleneck distance in the crate.

use std::collections::VecDeque;

use crate::value::{Ext, Q};

/// Maximum bipartite matching. `adj[u]` lists right vertices adjacent to left
/// vertex `u`. Returns `mate[u]` for every left vertex.
pub fn hopcroft_karp(n_right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut mate_l: Vec<Option<usize>> = vec![None; n_left];
    let mut mate_r: Vec<Option<usize>> = vec![None; n_right];
    let mut dist = vec![u32::MAX; n_left];

    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if mate_l[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match mate_r[v] {
                    None => found = true,
                    Some(w) if dist[w] == u32::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..n_left {
            if mate_l[u].is_none() {
                augment(u, adj, &mut mate_l, &mut mate_r, &mut dist);
            }
        }
    }
    mate_l
}

fn augment(u: usize, adj: &[Vec<usize>], mate_l: &mut [Option<usize>], mate_r: &mut [Option<usize>], dist: &mut [u32]) -> bool {
    for &v in &adj[u] {
        let ok = match mate_r[v] {
            None => true,
            Some(w) => dist[w] == dist[u] + 1 && augment(w, adj, mate_l, mate_r, dist),
        };
        if ok {
            mate_l[u] = Some(v);
            mate_r[v] = Some(u);
            return true;
        }
    }
    dist[u] = u32::MAX;
    false
}

/// Decide whether a partial matching between `C` (size `nc`) and `D` (size
/// `nd`) exists that uses only `edge(i, j)` pairs and leaves unmatched only
/// elements flagged trivial. Returns the `C`–`D` pairs of one such matching.
///
/// Reduction: left = C ∪ D̄, right = D ∪ C̄. A trivial `C_i` may take its own
/// copy `C̄_i`, a trivial `D_j` may take `D̄_j`, and the copies pair freely
/// among themselves. Perfect matchings correspond to admissible partial ones.
pub fn covering_matching(
    nc: usize,
    nd: usize,
    edge: impl Fn(usize, usize) -> bool,
    trivial_c: &[bool],
    trivial_d: &[bool],
) -> Option<Vec<(usize, usize)>> {
    debug_assert_eq!(trivial_c.len(), nc);
    debug_assert_eq!(trivial_d.len(), nd);
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(nc + nd);
    for i in 0..nc {
        let mut row: Vec<usize> = (0..nd).filter(|&j| edge(i, j)).collect();
        if trivial_c[i] {
            row.push(nd + i);
        }
        adj.push(row);
    }
    for j in 0..nd {
        let mut row: Vec<usize> = (nd..nd + nc).collect();
        if trivial_d[j] {
            row.push(j);
        }
        adj.push(row);
    }
    let mate = hopcroft_karp(nd + nc, &adj);
    if mate.iter().any(Option::is_none) {
        return None;
    }
    Some(mate[..nc].iter().enumerate().filter_map(|(i, m)| m.filter(|&j| j < nd).map(|j| (i, j))).collect())
}

/// Infimum of `{ε ≥ 0 : feasible(ε)}` for a monotone predicate whose value
/// can only change at the given candidates.
///
/// The test points are the sorted candidates, their midpoints, and one point
/// past the last; the first feasible point identifies the infimum as the
/// candidate at or just below it. Returns `+∞` if no test point is feasible.
pub fn infimum_over_candidates(mut candidates: Vec<Q>, feasible: impl Fn(&Q) -> bool) -> Ext {
    candidates.push(Q::from_integer(0));
    candidates.retain(|c| *c >= Q::from_integer(0));
    candidates.sort();
    candidates.dedup();
    let last = *candidates.last().expect("zero is always a candidate");
    let mut points: Vec<(Q, usize)> = Vec::with_capacity(2 * candidates.len());
    for (k, c) in candidates.iter().enumerate() {
        points.push((*c, k));
        let next = candidates.get(k + 1).copied().unwrap_or(last + Q::from_integer(1));
        points.push(((c + next) / Q::from_integer(2), k));
    }
    let (mut lo, mut hi) = (0usize, points.len());
    // invariant: points[..lo] infeasible, points[hi..] feasible
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&points[mid].0) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    match points.get(lo) {
        Some(&(_, k)) => Ext::Fin(candidates[k]),
        None => Ext::PosInf,
    }
}
