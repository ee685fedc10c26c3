use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const W: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> BitVec {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> BitVec {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> BitVec {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % W);
        if b {
            self.words[i / W] |= mask;
        } else {
            self.words[i / W] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    /// Indices of the set bits, increasing.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * W + t)
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let bits: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        bits.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<BitVec, D::Error> {
        let bits = String::deserialize(d)?;
        let mut v = BitVec::zeros(bits.len());
        for (i, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(serde::de::Error::custom("bit vector must be 0/1")),
            }
        }
        Ok(v)
    }
}

/// Dense bit-packed matrix over GF(2), stored row-major.
///
/// A linear map is stored as a `target_dim x source_dim` matrix whose column
/// `j` is the image of source basis vector `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: GF2Matrix,
    pub pivots: Vec<usize>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> GF2Matrix {
        let stride = words_for(cols);
        GF2Matrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> GF2Matrix {
        let mut m = GF2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVec], cols: usize) -> GF2Matrix {
        let mut m = GF2Matrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_mut(i).copy_from_slice(&r.words);
        }
        m
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[BitVec], rows: usize) -> GF2Matrix {
        let mut m = GF2Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn from_bools(entries: &[&[bool]]) -> GF2Matrix {
        let cols = entries.first().map_or(0, |r| r.len());
        let rows: Vec<BitVec> = entries.iter().map(|r| BitVec::from_bools(r)).collect();
        GF2Matrix::from_rows(&rows, cols)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / W] >> (j % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / W];
        let mask = 1u64 << (j % W);
        if b {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + j / W] ^= 1u64 << (j % W);
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    fn xor_rows(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> GF2Matrix {
        let mut t = GF2Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn add(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = GF2Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = self.row_words(i);
            let dst = i * out.stride;
            for (k, &w) in row.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    let src = other.row_words(k * W + t);
                    for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len, "vector length mismatch");
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let parity: u32 = self
                .row_words(i)
                .iter()
                .zip(&v.words)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if parity % 2 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        GF2Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &GF2Matrix) -> GF2Matrix {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        let mut out = GF2Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in self.row(i).ones() {
                out.set(i, j, true);
            }
            for j in other.row(i).ones() {
                out.set(i, self.cols + j, true);
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> GF2Matrix {
        let mut out = GF2Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                if self.get(i, j) {
                    out.set(i, k, true);
                }
            }
        }
        out
    }

    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(p, r);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_rows(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        // forward elimination only; cheaper than a full rref
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(p, r);
            for i in r + 1..m.rows {
                if m.get(i, c) {
                    m.xor_rows(r, i);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of the null space `{v : self * v = 0}`.
    pub fn kernel(&self) -> Vec<BitVec> {
        let Echelon { matrix, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, free);
            for (r, &p) in pivots.iter().enumerate() {
                if matrix.get(r, free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Some `x` with `self * x = b`, if one exists.
    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let aug = self.hstack(&GF2Matrix::from_columns(std::slice::from_ref(b), self.rows));
        let Echelon { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if matrix.get(r, self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }

    /// Basis of the column space, as the pivot columns of `self`.
    pub fn column_space(&self) -> Vec<BitVec> {
        self.rref().pivots.iter().map(|&j| self.column(j)).collect()
    }
}

/// Rank and a null-space basis; `rank + kernel.len() == m.cols()`.
pub fn kernel_and_rank(m: &GF2Matrix) -> (usize, Vec<BitVec>) {
    let kernel = m.kernel();
    (m.cols() - kernel.len(), kernel)
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    /// One hex string per row: the row's words, least significant word first,
    /// each as 16 big-endian hex digits.
    data: Vec<String>,
}

impl Serialize for GF2Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let data = (0..self.rows)
            .map(|i| self.row_words(i).iter().map(|w| format!("{w:016x}")).collect())
            .collect();
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            data,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GF2Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<GF2Matrix, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(d)?;
        let mut m = GF2Matrix::zeros(repr.rows, repr.cols);
        if repr.data.len() != repr.rows {
            return Err(D::Error::custom("row count mismatch"));
        }
        for (i, hex) in repr.data.iter().enumerate() {
            if hex.len() != 16 * m.stride {
                return Err(D::Error::custom("row width mismatch"));
            }
            for k in 0..m.stride {
                let w = u64::from_str_radix(&hex[16 * k..16 * (k + 1)], 16)
                    .map_err(D::Error::custom)?;
                m.data[i * m.stride + k] = w;
            }
        }
        let tail = repr.cols % W;
        if tail != 0 && (0..m.rows).any(|i| m.row_words(i)[m.stride - 1] >> tail != 0) {
            return Err(D::Error::custom("bits set beyond the column count"));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let (r, k) = kernel_and_rank(&GF2Matrix::identity(3));
        assert_eq!(r, 3);
        assert!(k.is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let (r, k) = kernel_and_rank(&GF2Matrix::zeros(2, 5));
        assert_eq!(r, 0);
        assert_eq!(k.len(), 5);
    }

    #[test]
    fn one_by_two() {
        let m = GF2Matrix::from_bools(&[&[true, true]]);
        let (r, k) = kernel_and_rank(&m);
        assert_eq!(r, 1);
        assert_eq!(k, vec![BitVec::from_bools(&[true, true])]);
    }

    #[test]
    fn wide_matrices_cross_word_boundaries() {
        let mut m = GF2Matrix::zeros(3, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(2, 129, true);
        assert_eq!(m.rank(), 3);
        for v in m.kernel() {
            assert!(m.mul_vec(&v).is_zero());
        }
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn solve_round_trip() {
        let m = GF2Matrix::from_bools(&[&[true, false, true], &[false, true, true]]);
        let b = BitVec::from_bools(&[true, false]);
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let singular = GF2Matrix::from_bools(&[&[true, true], &[true, true]]);
        assert!(singular.solve(&BitVec::from_bools(&[true, false])).is_none());
    }

    #[test]
    fn serde_round_trip() {
        let mut m = GF2Matrix::zeros(2, 70);
        m.set(1, 69, true);
        m.set(0, 3, true);
        let json = serde_json::to_string(&m).unwrap();
        let back: GF2Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
