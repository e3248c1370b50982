//! Exact computation and verification of stability for zigzag and
//! block-decomposable persistence modules.
//!
//! All barcode geometry is over exact rationals ([`Q`]) extended by `±∞`
//! ([`Ext`]); all linear algebra is over a prime field GF(p) carried by each
//! matrix.

pub mod blocks;
pub mod error;
pub mod extension;
pub mod grid2d;
pub mod intervals;
pub mod levelset;
pub mod linalg;
pub mod matching;
pub mod persistence1d;
pub mod value;
pub mod witness;
pub mod zigzag;

pub use blocks::{Block, BlockBarcode, BlockKind};
pub use error::{Error, Result};
pub use grid2d::{GridModule2D, GridMorphism2D, Window};
pub use intervals::{Barcode1D, Endpoint, Interval1D, Matching};
pub use levelset::PLGraph;
pub use linalg::Matrix;
pub use persistence1d::{LineModule, LineMorphism};
pub use value::{q, qi, Ext, Q};
pub use witness::InterleavingWitness;
pub use zigzag::{Dir, ZigzagBarcode, ZigzagInterval, ZigzagModule};
