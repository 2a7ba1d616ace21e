//! Dense linear algebra over the two-element field.
//!
//! Vectors are packed into `u64` words. Matrices are stored row-major and act
//! on column vectors: an `r × c` matrix maps `F^c → F^r`. Subspaces are kept
//! in reduced row-echelon form, so two subspaces are equal exactly when their
//! bases are bit-identical.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("index ({row}, {col}) out of range for {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("composition of differentials is nonzero")]
    CompositionNonzero,
    #[error("map does not respect the given subspaces: {0}")]
    NotInvariant(&'static str),
}

/// A vector over GF(2) of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.toggle(i);
        }
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
        )
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// `self += other` over GF(2).
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
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

    /// Index of the lowest set bit: the pivot under our echelon convention.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * WORD + w.trailing_zeros() as usize)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * WORD + t)
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "[{s}]")
    }
}

/// A dense `rows × cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must share a length.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged row");
                BitVec::from_bits(&r.iter().map(|&x| x % 2 == 1).collect::<Vec<_>>())
            })
            .collect();
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.ones() {
                m.data[i].set(j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Result<bool, Gf2Error> {
        self.check(row, col)?;
        Ok(self.data[row].get(col))
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) -> Result<(), Gf2Error> {
        self.check(row, col)?;
        self.data[row].set(col, value);
        Ok(())
    }

    /// Adds 1 to entry `(row, col)`. Panics when out of range.
    pub fn toggle(&mut self, row: usize, col: usize) {
        self.check(row, col).expect("toggle out of range");
        self.data[row].toggle(col);
    }

    fn check(&self, row: usize, col: usize) -> Result<(), Gf2Error> {
        if row < self.rows && col < self.cols {
            Ok(())
        } else {
            Err(Gf2Error::OutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&i| self.data[i].get(j)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    /// Matrix–vector product `self · v`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&i| self.data[i].dot(v)))
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != rhs.rows {
            return Err(Gf2Error::DimensionMismatch {
                context: "matrix product",
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[i].xor_assign(&rhs.data[k]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Gf2Error::DimensionMismatch {
                context: "matrix sum",
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    /// The submatrix on the given row and column indices, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.data[r].get(c) {
                    out.data[i].set(j, true);
                }
            }
        }
        out
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != rhs.rows {
            return Err(Gf2Error::DimensionMismatch {
                context: "horizontal stack",
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in self.data[i].ones() {
                out.data[i].set(j, true);
            }
            for j in rhs.data[i].ones() {
                out.data[i].set(self.cols + j, true);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(&self.data).finish()
    }
}

/// Reduces `vectors` in place to reduced row-echelon form and returns it,
/// dropping zero vectors. Pivots are lowest set bits, sorted ascending.
fn rref(mut vectors: Vec<BitVec>) -> Vec<BitVec> {
    let mut basis: Vec<BitVec> = Vec::new();
    for mut v in vectors.drain(..) {
        for b in &basis {
            let p = b.leading().expect("basis vectors are nonzero");
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        let Some(p) = v.leading() else { continue };
        for b in basis.iter_mut() {
            if b.get(p) {
                b.xor_assign(&v);
            }
        }
        basis.push(v);
    }
    basis.sort_by_key(|b| b.leading());
    basis
}

/// A linear subspace of `F^ambient_dim` held in canonical echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<BitVec>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim).map(|i| BitVec::unit(ambient_dim, i)).collect(),
        }
    }

    pub fn span(ambient_dim: usize, vectors: impl IntoIterator<Item = BitVec>) -> Result<Self, Gf2Error> {
        let vectors: Vec<BitVec> = vectors.into_iter().collect();
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Gf2Error::DimensionMismatch {
                context: "spanning vector",
                expected: ambient_dim,
                found: v.len(),
            });
        }
        Ok(Self {
            ambient_dim,
            basis: rref(vectors),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().map(|b| b.leading().expect("nonzero basis vector"))
    }

    /// Reduces `v` against the echelon basis; the result is zero on every pivot.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for b in &self.basis {
            let p = b.leading().expect("nonzero basis vector");
            if r.get(p) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        v.len() == self.ambient_dim && self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient_dim == self.ambient_dim && other.basis.iter().all(|v| self.contains(v))
    }

    /// Re-runs echelon canonicalization. A no-op on any value built by this module.
    pub fn canonicalize(&self) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            basis: rref(self.basis.clone()),
        }
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in F^{}) ", self.dim(), self.ambient_dim)?;
        f.debug_list().entries(&self.basis).finish()
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    rref(m.data.clone()).len()
}

/// Echelon basis of `{v : m·v = 0}`.
pub fn kernel_basis(m: &BitMatrix) -> Subspace {
    let reduced = rref(m.data.clone());
    let pivots: Vec<usize> = reduced.iter().map(|r| r.leading().unwrap()).collect();
    let mut vectors = Vec::with_capacity(m.cols - pivots.len());
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = BitVec::unit(m.cols, free);
        for (row, &p) in reduced.iter().zip(&pivots) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        vectors.push(v);
    }
    Subspace {
        ambient_dim: m.cols,
        basis: rref(vectors),
    }
}

/// Echelon basis of the column span of `m`.
pub fn image_basis(m: &BitMatrix) -> Subspace {
    Subspace {
        ambient_dim: m.rows,
        basis: rref(m.transpose().data),
    }
}

/// `dim ker(d_out) − rank(d_in)`, after checking `d_out · d_in = 0`.
pub fn homology_rank(d_out: &BitMatrix, d_in: &BitMatrix) -> Result<usize, Gf2Error> {
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Gf2Error::CompositionNonzero);
    }
    Ok(d_out.cols - rank(d_out) - rank(d_in))
}

/// Matrix of `dom → F^rows / codom_mod` induced by `m`, in the canonical
/// bases: the echelon basis of `dom` and the standard vectors off the pivots of
/// `codom_mod`.
pub fn restrict_quotient(
    m: &BitMatrix,
    dom: &Subspace,
    codom_mod: &Subspace,
) -> Result<BitMatrix, Gf2Error> {
    let source = Subquotient::new(dom.clone(), Subspace::zero(m.cols))?;
    let target = Subquotient::new(Subspace::full(m.rows), codom_mod.clone())?;
    induced_map(m, &source, &target)
}

/// A space `sub / modulus` with `modulus ⊆ sub ⊆ F^n`, together with a
/// canonical basis of representatives for the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient {
    sub: Subspace,
    modulus: Subspace,
    reps: Vec<BitVec>,
    rep_pivots: Vec<usize>,
}

impl Subquotient {
    pub fn new(sub: Subspace, modulus: Subspace) -> Result<Self, Gf2Error> {
        if sub.ambient_dim != modulus.ambient_dim {
            return Err(Gf2Error::DimensionMismatch {
                context: "subquotient ambient",
                expected: sub.ambient_dim,
                found: modulus.ambient_dim,
            });
        }
        if !sub.contains_subspace(&modulus) {
            return Err(Gf2Error::NotInvariant("modulus is not contained in the subspace"));
        }
        // Representatives reduced against the modulus pivots, then mutually
        // reduced, so a vector's coordinates can be read off pivot bits.
        let reduced: Vec<BitVec> = sub
            .basis
            .iter()
            .map(|v| modulus.reduce(v))
            .filter(|v| !v.is_zero())
            .collect();
        let reps = rref(reduced);
        let rep_pivots = reps.iter().map(|r| r.leading().unwrap()).collect();
        Ok(Self {
            sub,
            modulus,
            reps,
            rep_pivots,
        })
    }

    /// Homology `ker(d) / im(d)` of a square differential.
    pub fn homology(d: &BitMatrix) -> Result<Self, Gf2Error> {
        if d.rows != d.cols {
            return Err(Gf2Error::DimensionMismatch {
                context: "square differential",
                expected: d.rows,
                found: d.cols,
            });
        }
        if !d.mul(d)?.is_zero() {
            return Err(Gf2Error::CompositionNonzero);
        }
        Self::new(kernel_basis(d), image_basis(d))
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.sub.ambient_dim
    }

    pub fn representatives(&self) -> &[BitVec] {
        &self.reps
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    pub fn modulus(&self) -> &Subspace {
        &self.modulus
    }

    /// Coordinates of the class of `v`, or `None` if `v ∉ sub`.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        let mut r = self.modulus.reduce(v);
        let coords = BitVec::from_indices(
            self.reps.len(),
            self.rep_pivots
                .iter()
                .enumerate()
                .filter(|(_, &p)| r.get(p))
                .map(|(k, _)| k),
        );
        for k in coords.ones() {
            r.xor_assign(&self.reps[k]);
        }
        r.is_zero().then_some(coords)
    }
}

/// The map `source → target` induced by `m` on subquotients. Checks that `m`
/// sends `source.sub` into `target.sub` and `source.modulus` into
/// `target.modulus`.
pub fn induced_map(
    m: &BitMatrix,
    source: &Subquotient,
    target: &Subquotient,
) -> Result<BitMatrix, Gf2Error> {
    if m.cols != source.ambient_dim() {
        return Err(Gf2Error::DimensionMismatch {
            context: "map domain",
            expected: source.ambient_dim(),
            found: m.cols,
        });
    }
    if m.rows != target.ambient_dim() {
        return Err(Gf2Error::DimensionMismatch {
            context: "map codomain",
            expected: target.ambient_dim(),
            found: m.rows,
        });
    }
    for v in source.modulus.basis() {
        if !target.modulus.contains(&m.apply(v)) {
            return Err(Gf2Error::NotInvariant("image of modulus escapes target modulus"));
        }
    }
    let mut columns = Vec::with_capacity(source.dim());
    for v in source.representatives() {
        let image = m.apply(v);
        let c = target
            .coordinates(&image)
            .ok_or(Gf2Error::NotInvariant("image leaves the target subspace"))?;
        columns.push(c);
    }
    Ok(BitMatrix::from_columns(target.dim(), &columns))
}
