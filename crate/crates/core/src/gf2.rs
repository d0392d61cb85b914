//! Bit-packed linear algebra over GF(2).
//!
//! Rows are stored as `u64` words, least-significant bit first. Everything here
//! is a pure function of its inputs.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c => return Err(Error::Input(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(Self::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Standard inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVector({s})")
    }
}

/// Dense matrix over GF(2) with bit-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row vectors, which must all have length `cols`.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Input(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        Ok(m)
    }

    /// Parses rows given as `0`/`1` strings.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let vecs = rows.iter().map(|r| BitVector::parse(r)).collect::<Result<Vec<_>>>()?;
        let cols = vecs.first().map_or(0, BitVector::len);
        Self::from_rows(cols, &vecs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let idx = r * self.stride + c / WORD;
        let mask = 1u64 << (c % WORD);
        if value {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`
    pub fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (lo, hi) = self.data.split_at_mut(src.max(dst) * s);
        let (src_words, dst_words) = if src < dst {
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        let (src_words, dst_words): (&[u64], &mut [u64]) = (src_words, dst_words);
        for (d, v) in dst_words.iter_mut().zip(src_words) {
            *d ^= *v;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Computes `M v` over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::Input(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(BitVector::from_bits((0..self.rows).map(|r| {
            self.row_words(r).iter().zip(v.words()).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
        })))
    }

    /// Reduces `self` in place to reduced row echelon form and returns the pivot columns.
    pub fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    self.add_row(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // Forward elimination only; no need for the reduced form.
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, rank);
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.add_row(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Keeps only the columns listed in `columns`, in ascending order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        let mut cols: Vec<usize> = columns.to_vec();
        cols.sort_unstable();
        cols.dedup();
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::Input(format!(
                "column index {bad} out of range for {} columns",
                self.cols
            )));
        }
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Basis of `{ v : M v = 0 }`.
    pub fn nullspace(&self) -> Vec<BitVector> {
        let mut m = self.clone();
        let pivots = m.reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::zeros(self.cols);
                v.set(free, true);
                for (r, &p) in pivots.iter().enumerate() {
                    if m.get(r, free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

/// An incrementally built row space that remembers how each basis vector was
/// formed from the inserted rows, so membership queries can return a certificate.
#[derive(Clone, Debug)]
pub struct RowSpace {
    len: usize,
    /// (pivot column, reduced vector, combination of inserted rows)
    basis: Vec<(usize, BitVector, Vec<usize>)>,
    inserted: usize,
}

impl RowSpace {
    pub fn new(len: usize) -> Self {
        Self { len, basis: Vec::new(), inserted: 0 }
    }

    pub fn from_matrix(m: &BinaryMatrix) -> Self {
        let mut rs = Self::new(m.cols());
        for r in 0..m.rows() {
            rs.insert(&m.row(r));
        }
        rs
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Reduces `v` against the basis, returning the residual and the set of
    /// inserted rows whose sum equals `v - residual`.
    fn reduce_tracked(&self, v: &BitVector) -> (BitVector, Vec<usize>) {
        let mut residual = v.clone();
        let mut combo: Vec<bool> = vec![false; self.inserted];
        for (pivot, vec, rows) in &self.basis {
            if residual.get(*pivot) {
                residual.xor_assign(vec);
                for &r in rows {
                    combo[r] ^= true;
                }
            }
        }
        let rows = combo.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        (residual, rows)
    }

    /// Inserts a row; returns true if it was independent of the current span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.len, "row length mismatch");
        let index = self.inserted;
        self.inserted += 1;
        let (residual, mut rows) = self.reduce_tracked(v);
        let Some(pivot) = residual.first_one() else {
            return false;
        };
        rows.push(index);
        rows.sort_unstable();
        self.basis.push((pivot, residual, rows));
        true
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce_tracked(v).0.is_zero()
    }

    /// Indices of inserted rows summing to `v`, if `v` lies in the span.
    pub fn express(&self, v: &BitVector) -> Option<Vec<usize>> {
        let (residual, rows) = self.reduce_tracked(v);
        residual.is_zero().then_some(rows)
    }
}

/// A Pauli operator modulo phase, stored as its `(x | z)` bit pattern.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticVector {
    x: BitVector,
    z: BitVector,
}

impl SymplecticVector {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVector::zeros(n), z: BitVector::zeros(n) }
    }

    pub fn from_parts(x: BitVector, z: BitVector) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Input("x and z parts differ in length".into()));
        }
        Ok(Self { x, z })
    }

    /// Splits a `2n`-bit row laid out as `x_0..x_{n-1} z_0..z_{n-1}`.
    pub fn from_row(row: &BitVector) -> Self {
        let n = row.len() / 2;
        let x = BitVector::from_bits((0..n).map(|i| row.get(i)));
        let z = BitVector::from_bits((0..n).map(|i| row.get(n + i)));
        Self { x, z }
    }

    pub fn to_row(&self) -> BitVector {
        let n = self.n();
        let mut row = BitVector::zeros(2 * n);
        for i in self.x.ones() {
            row.set(i, true);
        }
        for i in self.z.ones() {
            row.set(n + i, true);
        }
        row
    }

    /// Parses a Pauli string over `{I, X, Y, Z}`.
    pub fn parse_pauli(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let mut p = Self::identity(n);
        for (i, ch) in s.chars().enumerate() {
            match ch {
                'I' | 'i' | '_' => {}
                'X' | 'x' => p.x.set(i, true),
                'Z' | 'z' => p.z.set(i, true),
                'Y' | 'y' => {
                    p.x.set(i, true);
                    p.z.set(i, true);
                }
                c => return Err(Error::Input(format!("invalid Pauli character {c:?}"))),
            }
        }
        Ok(p)
    }

    pub fn single(n: usize, qubit: usize, pauli: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::Input(format!("qubit {qubit} out of range for n={n}")));
        }
        let mut s: Vec<char> = vec!['I'; n];
        s[qubit] = pauli;
        Self::parse_pauli(&s.into_iter().collect::<String>())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x_part(&self) -> &BitVector {
        &self.x
    }

    pub fn z_part(&self) -> &BitVector {
        &self.z
    }

    pub fn pauli_at(&self, i: usize) -> char {
        match (self.x.get(i), self.z.get(i)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    pub fn to_pauli_string(&self) -> String {
        (0..self.n()).map(|i| self.pauli_at(i)).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.x.ones().chain(self.z.ones()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn weight(&self) -> usize {
        self.x.words().iter().zip(self.z.words()).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn mul_assign(&mut self, other: &SymplecticVector) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }
}

impl fmt::Debug for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({})", self.to_pauli_string())
    }
}

/// `<u.x, v.z> + <u.z, v.x>` mod 2; zero exactly when the two Paulis commute.
pub fn symplectic_product(u: &SymplecticVector, v: &SymplecticVector) -> Result<bool> {
    if u.n() != v.n() {
        return Err(Error::Input(format!(
            "symplectic product of operators on {} and {} qubits",
            u.n(),
            v.n()
        )));
    }
    Ok(u.x.dot(&v.z) ^ u.z.dot(&v.x))
}
