//! Deterministic inputs for the benchmarks.

use blockstab::levelset::{random_pl_graph, PLGraph};
use blockstab::zigzag::{alternating, module_from_barcode, random_barcode, shuffle_basis_with, ZigzagModule};
use blockstab::{q, Block, BlockBarcode, BlockKind, Ext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` finite blocks of mixed kinds with endpoints on a quarter-integer lattice.
pub fn block_barcode(n: usize, seed: u64) -> BlockBarcode {
    let mut r = rng(seed);
    let blocks = (0..n)
        .map(|_| {
            let kind = BlockKind::ALL[r.gen_range(0..4)];
            let a = r.gen_range(-40..40);
            let b = a + r.gen_range(1..40);
            Block::new(kind, Ext::Fin(q(a, 4)), Ext::Fin(q(b, 4))).expect("a < b")
        })
        .collect();
    BlockBarcode::new(blocks)
}

/// Alternating zigzag of length `n` with up to `summands` bars, basis shuffled.
pub fn zigzag(n: usize, summands: usize, field: u32, seed: u64) -> ZigzagModule {
    let mut r = rng(seed);
    let bc = random_barcode(n, summands, &mut r);
    let v = module_from_barcode(&bc, &alternating(n), field).expect("valid barcode");
    shuffle_basis_with(&v, &mut r)
}

pub fn graph(vertices: usize, seed: u64) -> PLGraph {
    random_pl_graph(vertices, vertices + vertices / 2, 12, &mut rng(seed))
}
