//! Dense linear algebra over a prime field GF(p).
//!
//! Every matrix carries its characteristic; combining matrices of different
//! characteristics is a programming error (asserted) in the arithmetic
//! operators and an input error in the checked constructors.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_FIELD: u32 = 2;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + b as u64) % p as u64) as u32
}

#[inline]
fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 + p as u64 - b as u64) % p as u64) as u32
}

fn pow_mod(mut base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u32 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0, "zero has no inverse");
    pow_mod(a, p - 2, p)
}

/// Reduce a signed integer into `0..p`.
pub fn reduce(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) {}x{} [", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            f.write_str(&row.join(" "))?;
        }
        f.write_str("]")
    }
}

impl Matrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Matrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Build from signed integer rows; entries are reduced mod `p`.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_shaped(p, rows.len(), cols, rows)
    }

    /// Like [`Matrix::from_rows`] with an explicit shape, so that `0 × c`
    /// matrices survive a trip through JSON (`[]`).
    pub fn from_rows_shaped(p: u32, nrows: usize, ncols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        check_prime(p)?;
        if rows.len() != nrows {
            return Err(Error::Dimension(format!("expected {nrows} rows, found {}", rows.len())));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != ncols {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {ncols}", r.len())));
            }
            data.extend(r.iter().map(|&v| reduce(v, p)));
        }
        Ok(Matrix { p, rows: nrows, cols: ncols, data })
    }

    pub fn from_fn(p: u32, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % p);
            }
        }
        Matrix { p, rows, cols, data }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Self {
        Self::from_fn(p, rows, columns.len(), |r, c| columns[c][r])
    }

    pub fn field(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|&v| v as i64).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.p, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.p != other.p {
            return Err(Error::FieldMismatch { expected: self.p, found: other.p });
        }
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(self.mul(other))
    }

    /// Matrix product. Panics on a shape or field mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.p, other.p, "field mismatch");
        assert_eq!(self.cols, other.rows, "shape mismatch {:?} * {:?}", self.shape(), other.shape());
        let p = self.p as u64;
        let mut out = Matrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = ((*d as u64 + a * b as u64) % p) as u32;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|r| self.row(r).iter().zip(v).fold(0u32, |acc, (&a, &b)| add_mod(acc, mul_mod(a, b, self.p), self.p))).collect()
    }

    pub fn neg(&self) -> Matrix {
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| sub_mod(0, v, self.p)).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape());
        Matrix {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, self.p)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    /// Horizontal concatenation `[A | B | ...]`.
    pub fn hstack(p: u32, rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            for r in 0..rows {
                for c in 0..m.cols {
                    out.data[r * cols + off + c] = m.get(r, c);
                }
            }
            off += m.cols;
        }
        out
    }

    /// Vertical concatenation.
    pub fn vstack(p: u32, cols: usize, parts: &[&Matrix]) -> Matrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Matrix { p, rows, cols, data }
    }

    /// Block-diagonal sum.
    pub fn block_diag(p: u32, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(p, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for m in parts {
            for r in 0..m.rows {
                for c in 0..m.cols {
                    out.data[(ro + r) * cols + co + c] = m.get(r, c);
                }
            }
            ro += m.rows;
            co += m.cols;
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Self::from_fn(self.p, idx.len(), self.cols, |r, c| self.get(idx[r], c))
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Self::from_fn(self.p, self.rows, idx.len(), |r, c| self.get(r, idx[c]))
    }

    /// Sub-block `rows[r0..r1] × cols[c0..c1]`.
    pub fn slice(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Self::from_fn(self.p, r1 - r0, c1 - c0, |r, c| self.get(r0 + r, c0 + c))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..m.cols {
                    m.data.swap(pr * m.cols + k, r * m.cols + k);
                }
            }
            let inv = inv_mod(m.get(r, c), p);
            for k in c..m.cols {
                let v = m.get(r, k);
                m.data[r * m.cols + k] = mul_mod(v, inv, p);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c);
                if f == 0 {
                    continue;
                }
                for k in c..m.cols {
                    let sub = mul_mod(f, m.data[r * m.cols + k], p);
                    m.data[i * m.cols + k] = sub_mod(m.data[i * m.cols + k], sub, p);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// Columns form a basis of `{x : Ax = 0}`.
    pub fn kernel_matrix(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Matrix::zeros(self.p, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, j, sub_mod(0, r.get(i, fc), self.p));
            }
        }
        k
    }

    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let k = self.kernel_matrix();
        (0..k.cols).map(|c| k.column(c)).collect()
    }

    /// Some `x` with `Ax = b`, if `b` lies in the column space.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side has length {}, matrix has {} rows", b.len(), self.rows)));
        }
        let rhs = Matrix::from_columns(self.p, self.rows, &[b.iter().map(|v| v % self.p).collect()]);
        Ok(self.solve_matrix(&rhs)?.map(|x| x.column(0)))
    }

    /// Some `X` with `AX = B`, if every column of `B` lies in the column space.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Option<Matrix>> {
        if b.rows != self.rows {
            return Err(Error::Dimension(format!("right-hand side has {} rows, matrix has {}", b.rows, self.rows)));
        }
        let aug = Matrix::hstack(self.p, self.rows, &[self, b]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(self.p, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(i, self.cols + j));
            }
        }
        Ok(Some(x))
    }

    /// Pivot columns of `A`: a basis of the column space.
    pub fn column_space(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_cols(&pivots)
    }

    /// A matrix `Π` with full row rank and `ker Π = col A`.
    pub fn cokernel_projection(&self) -> Matrix {
        self.transpose().kernel_matrix().transpose()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        self.solve_matrix(&Matrix::identity(self.p, self.rows)).ok().flatten()
    }

    pub fn random<R: Rng + ?Sized>(p: u32, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        Matrix::from_fn(p, rows, cols, |_, _| rng.gen_range(0..p))
    }

    pub fn random_invertible<R: Rng + ?Sized>(p: u32, n: usize, rng: &mut R) -> Matrix {
        loop {
            let m = Matrix::random(p, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }
}

/// JSON form of a standalone matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: u32,
    pub matrix: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson { field: m.p, matrix: m.to_rows(), cols: (m.rows == 0).then_some(m.cols) }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let cols = j.cols.unwrap_or_else(|| j.matrix.first().map_or(0, Vec::len));
        Matrix::from_rows_shaped(j.field, j.matrix.len(), cols, &j.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(p: u32, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(p, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Rank by brute force: the largest k with a nonzero k×k minor.
    fn rank_by_minors(a: &Matrix) -> usize {
        fn det(a: &Matrix) -> u32 {
            let n = a.rows();
            if n == 0 {
                return 1;
            }
            let p = a.field();
            let mut acc = 0u32;
            for c in 0..n {
                let rest: Vec<usize> = (0..n).filter(|&k| k != c).collect();
                let minor = a.slice(1, n, 0, n).select_cols(&rest);
                let term = mul_mod(a.get(0, c), det(&minor), p);
                acc = if c % 2 == 0 { add_mod(acc, term, p) } else { sub_mod(acc, term, p) };
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=a.rows().min(a.cols())).rev() {
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    if det(&a.select_rows(&rs).select_cols(&cs)) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(2, 2).rank(), 2);
        assert_eq!(m(2, &[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(Matrix::zeros(3, 0, 4).rank(), 0);
    }

    #[test]
    fn rank_matches_minor_enumeration_over_gf5() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let a = Matrix::random(5, 5, 5, &mut rng);
            assert_eq!(a.rank(), rank_by_minors(&a), "{a:?}");
        }
        // low-rank products exercise the degenerate minors
        for _ in 0..20 {
            let l = Matrix::random(5, 5, 2, &mut rng);
            let r = Matrix::random(5, 2, 5, &mut rng);
            let a = l.mul(&r);
            assert_eq!(a.rank(), rank_by_minors(&a));
        }
    }

    #[test]
    fn kernel_examples() {
        // enumerate GF(2)^2: only (1,1) is a nonzero solution of x + y = 0
        let a = m(2, &[&[1, 1]]);
        let solutions: Vec<Vec<u32>> =
            (0..4u32).map(|bits| vec![bits & 1, bits >> 1]).filter(|x| x.iter().any(|&v| v != 0) && a.mul_vec(x) == vec![0]).collect();
        assert_eq!(solutions, vec![vec![1, 1]]);
        assert_eq!(a.kernel_basis(), solutions);

        assert!(Matrix::identity(3, 3).kernel_basis().is_empty());
        assert_eq!(Matrix::zeros(2, 2, 3).kernel_basis().len(), 3);
    }

    #[test]
    fn membership_examples() {
        let id = Matrix::identity(5, 3);
        assert_eq!(id.solve(&[4, 0, 2]).unwrap(), Some(vec![4, 0, 2]));
        // column space of [[1],[1]] over GF(2) is {(0,0),(1,1)}
        assert_eq!(m(2, &[&[1], &[1]]).solve(&[1, 0]).unwrap(), None);
        assert_eq!(m(2, &[&[1, 0], &[0, 0]]).solve(&[1, 0]).unwrap(), Some(vec![1, 0]));
        assert!(matches!(id.solve(&[1, 2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn cokernel_projection_kills_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = Matrix::random(7, 5, 3, &mut rng);
            let pi = a.cokernel_projection();
            assert_eq!(pi.rows(), 5 - a.rank());
            assert!(pi.mul(&a).is_zero());
            assert_eq!(pi.rank(), pi.rows());
        }
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert_eq!(Matrix::from_rows(4, &[vec![1]]), Err(Error::NotPrime(4)));
    }

    #[test]
    fn json_keeps_empty_shapes() {
        let z = Matrix::zeros(3, 0, 4);
        let j = serde_json::to_string(&MatrixJson::from(&z)).unwrap();
        let back: Matrix = serde_json::from_str::<MatrixJson>(&j).unwrap().try_into().unwrap();
        assert_eq!(back, z);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        fn arb_matrix() -> impl Strategy<Value = Matrix> {
            (prop::sample::select(vec![2u32, 3, 5, 7]), 0usize..6, 0usize..6, any::<u64>()).prop_map(|(p, r, c, seed)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Matrix::random(p, r, c, &mut rng)
            })
        }

        proptest! {
            #[test]
            fn rank_of_transpose(a in arb_matrix()) {
                prop_assert_eq!(a.rank(), a.transpose().rank());
            }

            #[test]
            fn kernel_vectors_are_annihilated(a in arb_matrix()) {
                let basis = a.kernel_basis();
                prop_assert_eq!(basis.len(), a.cols() - a.rank());
                for x in &basis {
                    prop_assert!(a.mul_vec(x).iter().all(|&v| v == 0));
                }
            }

            #[test]
            fn membership_of_images(a in arb_matrix(), seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x: Vec<u32> = (0..a.cols()).map(|_| rng.gen_range(0..a.field())).collect();
                let b = a.mul_vec(&x);
                let sol = a.solve(&b).unwrap();
                prop_assert!(sol.is_some());
                prop_assert_eq!(a.mul_vec(&sol.unwrap()), b);
            }
        }
    }
}
