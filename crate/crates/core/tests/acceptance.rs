//! Acceptance suite: one PASS/FAIL line per criterion, with exact comparisons
//! throughout. Run with `cargo test -p blockstab --test acceptance -- --nocapture`
//! to see the report.

mod common;

use std::time::{Duration, Instant};

use blockstab::blocks::{bottleneck_block, check_matching_block, find_matching_block};
use blockstab::grid2d::{
    coker_is_trivial, directional_coker_triviality, free_bottleneck, freeness_defects, interpolant, random_free_morphism, Axis,
};
use blockstab::intervals::bottleneck_1d;
use blockstab::levelset::{fixtures, h1_consistent, interlevel_blocks, level_barcode, perturb, random_pl_graph, verify_pointwise};
use blockstab::persistence1d::{induced_matching_1d, random_morphism, triviality_of};
use blockstab::witness::{block_stability_check, verify_witness, witness_from_matching};
use blockstab::zigzag::{decompose_zz, module_from_barcode, random_barcode, shuffle_basis_with, Dir};
use blockstab::{q, qi, Barcode1D, BlockBarcode, BlockKind, Ext, Matching, Window, Q};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn run(name: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = budget.map_or(true, |b| took <= b);
    let ok = out.ok && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(" (limit {:.0?})", b));
    println!("{} {name}: {} [{:.3?}{budget_note}]", if ok { "PASS" } else { "FAIL" }, out.detail, took);
    ok
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn criterion_1() -> Outcome {
    let g = fixtures::immersed_curve();
    let want_b = BlockBarcode::parse_list("[-2,2]_BL (-1,1)_BL [-1,0)_BL (0,1]_BL").unwrap().sorted();
    let want_l = Barcode1D::parse_list("[-2,2] (-1,1) [-1,0) (0,1]").unwrap().sorted();
    let b0 = interlevel_blocks(&g, 0).unwrap();
    let l0 = level_barcode(&g, 0).unwrap();
    Outcome { ok: b0 == want_b && l0 == want_l, detail: format!("B0 = {b0}, L0 = {l0}") }
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut bad = 0;
    for trial in 0..200 {
        let n = r.gen_range(1..=30);
        let orientation: Vec<Dir> = (0..n - 1).map(|_| if r.gen() { Dir::Fwd } else { Dir::Bwd }).collect();
        let field = if trial % 2 == 0 { 2 } else { 5 };
        let bc = random_barcode(n, 20, &mut r);
        let v = module_from_barcode(&bc, &orientation, field).unwrap();
        let v = shuffle_basis_with(&v, &mut r);
        if decompose_zz(&v).sorted() != bc {
            bad += 1;
        }
    }
    Outcome { ok: bad == 0, detail: format!("200 modules, {bad} mismatches") }
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut bad = Vec::new();
    let pairs = 600;
    for _ in 0..pairs {
        let (c, d) = (random_barcode_1d(5, &mut r), random_barcode_1d(5, &mut r));
        if bottleneck_1d(&c, &d) != brute_bottleneck_1d(&c, &d) {
            bad.push(format!("{c:?} vs {d:?}"));
        }
        let (c, d) = (random_block_barcode(5, &mut r), random_block_barcode(5, &mut r));
        if bottleneck_block(&c, &d) != brute_bottleneck_block(&c, &d) {
            bad.push(format!("{c} vs {d}"));
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: format!(
            "{pairs} interval pairs and {pairs} block pairs, {} disagreements {}",
            bad.len(),
            bad.first().map_or("", String::as_str)
        ),
    }
}

fn criterion_4() -> Outcome {
    let deltas = [q(1, 10), q(1, 4), q(1, 2)];
    let mut trials = 0;
    let mut bad = Vec::new();
    for t in 0..120u64 {
        let mut r = rng(4_000 + t);
        let n = r.gen_range(3..=7);
        let g = random_pl_graph(n, n + r.gen_range(0..=3), 4, &mut r);
        let delta = deltas[t as usize % 3];
        let p = perturb(&g, &delta, &mut r).unwrap();
        let bound = Ext::Fin(p.d_inf);
        for i in 0..2 {
            let db = bottleneck_block(&interlevel_blocks(&g, i).unwrap(), &interlevel_blocks(&p.graph, i).unwrap());
            let dl = bottleneck_1d(&level_barcode(&g, i).unwrap(), &level_barcode(&p.graph, i).unwrap());
            if db > bound || dl > bound {
                bad.push((t, i, db, dl, p.d_inf));
            }
        }
        trials += 1;
    }
    Outcome { ok: bad.is_empty(), detail: format!("{trials} trials, violations {bad:?}") }
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut accepted = 0;
    let mut failed = 0;
    for _ in 0..300 {
        let (b, d) = (random_block_barcode(3, &mut r), random_block_barcode(3, &mut r));
        let mut eps_list: Vec<Q> = vec![qi(0), q(1, 2), qi(1), qi(2)];
        if let Ext::Fin(e) = bottleneck_block(&b, &d) {
            eps_list.push(e);
        }
        for eps in eps_list {
            for s in partial_matchings(b.len(), d.len()) {
                let sigma = Matching::new(s.iter().enumerate().filter_map(|(i, j)| Some((i, (*j)?))).collect());
                if check_matching_block(&sigma, &b, &d, &eps).unwrap() {
                    accepted += 1;
                    let w = witness_from_matching(&sigma, &b, &d, &eps).unwrap();
                    if !verify_witness(&w, &[]) {
                        failed += 1;
                    }
                }
            }
        }
    }
    Outcome { ok: accepted > 0 && failed == 0, detail: format!("{accepted} accepted matchings, {failed} witnesses rejected") }
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut bad = 0;
    let mut measured_mismatch = 0;
    for trial in 0..250 {
        let m = r.gen_range(2..=6);
        let mut grid: Vec<Q> = (0..m).map(|k| qi(2 * k) + q(r.gen_range(0..4), 2)).collect();
        grid.sort();
        grid.dedup();
        let field = if trial % 2 == 0 { 2 } else { 3 };
        let f = random_morphism(field, grid, 4, &mut r);
        let (eps, delta) = triviality_of(&f);
        if (eps, delta) != brute_trivialities(&f) {
            measured_mismatch += 1;
        }
        let (bm, bn, chi) = induced_matching_1d(&f);
        if !induced_contract(&bm, &bn, &chi.pairs, eps, delta) {
            bad += 1;
        }
    }
    Outcome {
        ok: bad == 0 && measured_mismatch == 0,
        detail: format!("250 morphisms, {bad} contract violations, {measured_mismatch} triviality mismatches"),
    }
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let w = Window::new(0, 0, 7, 7).unwrap();
    let (mut monos, mut bad, mut coker_cases) = (0, 0, 0);
    while monos < 120 {
        let field = if monos % 2 == 0 { 2 } else { 3 };
        let f = if monos % 3 == 2 { near_identity_free(w, 4, field, &mut r) } else { random_free_morphism(w, 4, field, &mut r).2 };
        if !f.is_injective() {
            continue;
        }
        monos += 1;
        let eps = r.gen_range(0..=3);
        let l = interpolant(&f, eps).unwrap();
        let e = Ext::int(eps.into());
        let mut ok = freeness_defects(&l.module).is_empty() && directional_coker_triviality(&l.image_into, Axis::X) <= e;
        if coker_is_trivial(&f, eps) {
            coker_cases += 1;
            ok &= directional_coker_triviality(&l.into_target, Axis::Y) <= e;
        }
        bad += usize::from(!ok);
    }
    Outcome {
        ok: bad == 0 && coker_cases > 0,
        detail: format!("{monos} monomorphisms ({coker_cases} with ε-trivial cokernel), {bad} failures"),
    }
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut bad = 0;
    for k in 0..250 {
        let n = r.gen_range(0..=7);
        let m = if k % 10 == 0 { r.gen_range(0..=7) } else { n };
        let mut pts = |c: usize| -> Vec<(Q, Q)> { (0..c).map(|_| (small_q(&mut r), small_q(&mut r))).collect() };
        let (a, b) = (pts(n), pts(m));
        if free_bottleneck(&a, &b) != brute_free_bottleneck(&a, &b) {
            bad += 1;
        }
    }
    Outcome { ok: bad == 0, detail: format!("250 multiset pairs, {bad} disagreements") }
}

fn switched_bijection(b0: &BlockBarcode, b1: &BlockBarcode) -> bool {
    let mut opens: Vec<(Ext, Ext)> = b0.blocks.iter().filter(|b| b.kind == BlockKind::O).map(|b| (b.a, b.b)).collect();
    let mut switched: Vec<(Ext, Ext)> = b1.blocks.iter().filter(|b| b.is_switched()).map(|b| (b.b, b.a)).collect();
    opens.sort();
    switched.sort();
    switched.len() == b1.len() && opens == switched
}

fn criterion_9() -> Outcome {
    let mut graphs: Vec<_> = fixtures::all().into_iter().map(|(_, g)| g).collect();
    let mut r = rng(9);
    for _ in 0..120 {
        let n = r.gen_range(2..=8);
        graphs.push(random_pl_graph(n, n + r.gen_range(0..=4), 5, &mut r));
    }
    let mut bad = 0;
    for g in &graphs {
        let b0 = interlevel_blocks(g, 0).unwrap();
        let b1 = interlevel_blocks(g, 1).unwrap();
        let ok = verify_pointwise(g, 0, &b0) && verify_pointwise(g, 1, &b1) && switched_bijection(&b0, &b1) && h1_consistent(g).unwrap();
        bad += usize::from(!ok);
    }
    Outcome { ok: bad == 0, detail: format!("{} graphs, {bad} failures", graphs.len()) }
}

fn stability_feasibility() -> Outcome {
    let mut r = rng(10);
    let cases = 200;
    let mut feasible = 0;
    for k in 0..cases {
        let b = random_block_barcode(6, &mut r);
        let eps = [q(1, 4), q(1, 2), qi(1)][k % 3];
        let d = perturb_blocks(&b, &eps, &mut r);
        feasible += usize::from(block_stability_check(&b, &d, &eps) && find_matching_block(&b, &d, &eps).unwrap().is_some());
    }
    Outcome { ok: feasible == cases, detail: format!("{feasible}/{cases} ε-perturbed pairs feasible") }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        run("criterion 1 immersed-curve barcodes", Some(secs(1)), criterion_1),
        run("criterion 2 zigzag construct-then-recover", Some(secs(30)), criterion_2),
        run("criterion 3 bottleneck oracle equivalence", Some(secs(60)), criterion_3),
        run("criterion 4 level-set stability", Some(secs(120)), criterion_4),
        run("criterion 5 witnesses from accepted matchings", None, criterion_5),
        run("criterion 6 induced matching contract", None, criterion_6),
        run("criterion 7 interpolant freeness and cokernels", None, criterion_7),
        run("criterion 8 free bottleneck oracle", None, criterion_8),
        run("criterion 9 pointwise certificate and switched bijection", None, criterion_9),
        run("block_stability_check feasibility on perturbed barcodes", None, stability_feasibility),
    ];
    assert!(results.iter().all(|&ok| ok), "some acceptance criteria failed; see the report above");
}
