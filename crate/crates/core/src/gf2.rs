//! Linear algebra over F₂ on 64-bit words.
//!
//! Vectors of length n ≤ 64 are packed into a single `u64`, coordinate `j`
//! at bit `j` (LSB-first), so `BitVec::from_int(n, i)` is the binary
//! expansion of the integer index `i`. Subspaces always carry their basis in
//! reduced row echelon form: the pivot of each basis vector is its most
//! significant set bit, pivots strictly increase along the basis, and every
//! pivot column is zero in all other basis vectors. Two subspaces are equal as
//! sets exactly when their bases are equal.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_BITS: usize = 64;

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

#[inline]
fn top_bit(x: u64) -> u64 {
    debug_assert!(x != 0);
    1u64 << (63 - x.leading_zeros())
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_BITS {
        Err(Error::TooWide(len))
    } else {
        Ok(())
    }
}

/// An element of F₂ⁿ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: u8,
    bits: u64,
}

impl BitVec {
    pub fn zeros(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(BitVec { len: len as u8, bits: 0 })
    }

    /// LSB-first: bit `j` of `value` becomes coordinate `j`.
    pub fn from_int(len: usize, value: u64) -> Result<Self> {
        check_len(len)?;
        if value & !low_mask(len) != 0 {
            return Err(Error::ValueOutOfRange { value, bits: len });
        }
        Ok(BitVec { len: len as u8, bits: value })
    }

    /// Standard basis vector `e_j`.
    pub fn unit(len: usize, j: usize) -> Result<Self> {
        if j >= len {
            return Err(Error::BitOutOfRange { index: j, n: len });
        }
        Self::from_int(len, 1u64 << j)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        check_len(bits.len())?;
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j));
        Ok(BitVec {
            len: bits.len() as u8,
            bits: value,
        })
    }

    #[inline]
    pub fn to_int(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        j < self.len() && (self.bits >> j) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        self.same_len(other)?;
        Ok(BitVec {
            len: self.len,
            bits: self.bits ^ other.bits,
        })
    }

    /// Inner product over F₂.
    pub fn dot(&self, other: &BitVec) -> Result<bool> {
        self.same_len(other)?;
        Ok(parity(self.bits & other.bits))
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len()).map(|j| self.get(j)).collect()
    }

    fn same_len(&self, other: &BitVec) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// Coordinates in order, coordinate 0 first.
impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len() {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Fully reduced echelon basis of the span of `vectors`, pivots ascending, so
/// the span of e_0..e_{n-1} enumerates in natural index order.
pub(crate) fn echelon<I: IntoIterator<Item = u64>>(vectors: I) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            if v & top_bit(b) != 0 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = top_bit(v);
        for b in basis.iter_mut() {
            if *b & p != 0 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_unstable();
    basis
}

/// An r×n matrix over F₂, one word per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<u64>,
}

impl F2Matrix {
    /// Row `i` is `rows[i]` read LSB-first as a vector of length `cols`.
    /// Zero rows (r = 0) are allowed and describe the map onto F₂⁰.
    pub fn new(cols: usize, rows: Vec<u64>) -> Result<Self> {
        check_len(cols)?;
        check_len(rows.len())?;
        if cols == 0 {
            return Err(Error::InvalidParameter("matrix needs at least one column".into()));
        }
        if let Some(&bad) = rows.iter().find(|&&r| r & !low_mask(cols) != 0) {
            return Err(Error::ValueOutOfRange { value: bad, bits: cols });
        }
        Ok(F2Matrix { cols, rows })
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Result<Self> {
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
        }
        Self::new(cols, rows.iter().map(BitVec::to_int).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Result<Self> {
        Self::new(cols, vec![0; rows])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, (0..n).map(|j| 1u64 << j).collect())
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row_words(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            len: self.cols as u8,
            bits: self.rows[i],
        }
    }

    /// Column `j` as a word over the rows.
    pub fn column(&self, j: usize) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &row)| acc | (((row >> j) & 1) << i))
    }

    /// `Mx` on raw words; bits of `x` beyond `cols` are ignored.
    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        let mut out = 0u64;
        for (i, &row) in self.rows.iter().enumerate() {
            out |= (parity(row & x) as u64) << i;
        }
        out
    }

    pub fn mat_vec_mul(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok(BitVec {
            len: self.rows.len() as u8,
            bits: self.apply(v.to_int()),
        })
    }

    pub fn rank(&self) -> usize {
        echelon(self.rows.iter().copied()).len()
    }

    /// Appends one row below the existing ones.
    pub fn stack_row(&self, row: u64) -> Result<F2Matrix> {
        let mut rows = self.rows.clone();
        rows.push(row);
        F2Matrix::new(self.cols, rows)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<F2Matrix> {
        let r = self.rows.len();
        if r != self.cols {
            return None;
        }
        let mut left = self.rows.clone();
        let mut right: Vec<u64> = (0..r).map(|i| 1u64 << i).collect();
        for col in 0..r {
            let pivot = (col..r).find(|&i| (left[i] >> col) & 1 == 1)?;
            left.swap(col, pivot);
            right.swap(col, pivot);
            for i in 0..r {
                if i != col && (left[i] >> col) & 1 == 1 {
                    left[i] ^= left[col];
                    right[i] ^= right[col];
                }
            }
        }
        F2Matrix::new(self.cols, right).ok()
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.num_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.num_rows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut acc = 0u64;
                for (k, &o) in other.rows.iter().enumerate() {
                    if (row >> k) & 1 == 1 {
                        acc ^= o;
                    }
                }
                acc
            })
            .collect();
        F2Matrix::new(other.cols, rows)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{} [", self.rows.len(), self.cols)?;
        for i in 0..self.rows.len() {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// `Mv` over F₂.
pub fn mat_vec_mul(m: &F2Matrix, v: &BitVec) -> Result<BitVec> {
    m.mat_vec_mul(v)
}

/// A linear subspace of F₂ⁿ held in canonical (RREF) form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<u64>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Result<Self> {
        check_len(ambient)?;
        Ok(Subspace {
            ambient,
            basis: Vec::new(),
        })
    }

    pub fn full(ambient: usize) -> Result<Self> {
        Self::span(ambient, (0..ambient).map(|j| 1u64 << j))
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span<I: IntoIterator<Item = u64>>(ambient: usize, vectors: I) -> Result<Self> {
        check_len(ambient)?;
        let mask = low_mask(ambient);
        let vectors: Vec<u64> = vectors.into_iter().collect();
        if let Some(&bad) = vectors.iter().find(|&&v| v & !mask != 0) {
            return Err(Error::ValueOutOfRange {
                value: bad,
                bits: ambient,
            });
        }
        Ok(Subspace {
            ambient,
            basis: echelon(vectors),
        })
    }

    /// Span of vectors that must be linearly independent.
    pub fn from_basis(ambient: usize, vectors: &[BitVec]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    actual: v.len(),
                });
            }
        }
        let s = Self::span(ambient, vectors.iter().map(BitVec::to_int))?;
        if s.dim() != vectors.len() {
            return Err(Error::LinearlyDependent);
        }
        Ok(s)
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical basis words, pivots ascending.
    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<BitVec> {
        self.basis
            .iter()
            .map(|&b| BitVec {
                len: self.ambient as u8,
                bits: b,
            })
            .collect()
    }

    /// Pivot coordinates of the canonical basis, in basis order.
    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|&b| 63 - b.leading_zeros() as usize)
            .collect()
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            if v & top_bit(b) != 0 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        v & !low_mask(self.ambient) == 0 && self.reduce(v) == 0
    }

    /// The element with basis coefficients `coeffs` (bit `i` selects basis
    /// vector `i`). Plain binary order over `coeffs` is the enumeration order
    /// used everywhere a vector is indexed by the elements of a subspace.
    #[inline]
    pub fn element(&self, coeffs: u64) -> u64 {
        let mut v = 0u64;
        let mut c = coeffs;
        while c != 0 {
            let i = c.trailing_zeros() as usize;
            v ^= self.basis[i];
            c &= c - 1;
        }
        v
    }

    /// Basis coefficients of `v`, or `None` when `v` is outside the space.
    pub fn coordinates(&self, v: u64) -> Option<u64> {
        if !self.contains(v) {
            return None;
        }
        let mut c = 0u64;
        for (i, &b) in self.basis.iter().enumerate() {
            if v & top_bit(b) != 0 {
                c |= 1u64 << i;
            }
        }
        Some(c)
    }

    /// All 2^dim elements in enumeration order.
    pub fn elements(&self) -> Vec<u64> {
        let size = 1usize << self.dim();
        let mut out = vec![0u64; size];
        for i in 0..self.dim() {
            let half = 1usize << i;
            let b = self.basis[i];
            for c in 0..half {
                out[half + c] = out[c] ^ b;
            }
        }
        out
    }

    /// Sum V + U.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                actual: other.ambient,
            });
        }
        Subspace::span(
            self.ambient,
            self.basis.iter().chain(other.basis.iter()).copied(),
        )
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subspace")
            .field("ambient", &self.ambient)
            .field("basis", &self.basis_vectors())
            .finish()
    }
}

fn kernel_of_rows(cols: usize, rows: &[u64]) -> Result<Subspace> {
    let reduced = echelon(rows.iter().copied());
    let mut pivot_row = vec![None; cols];
    for &row in &reduced {
        pivot_row[63 - row.leading_zeros() as usize] = Some(row);
    }
    let mut vectors = Vec::with_capacity(cols - reduced.len());
    for free in 0..cols {
        if pivot_row[free].is_some() {
            continue;
        }
        let mut v = 1u64 << free;
        for (p, row) in pivot_row.iter().enumerate() {
            if let Some(row) = row {
                if (row >> free) & 1 == 1 {
                    v |= 1u64 << p;
                }
            }
        }
        vectors.push(v);
    }
    Subspace::span(cols, vectors)
}

/// Basis of {v : Mv = 0}.
pub fn kernel_basis(m: &F2Matrix) -> Subspace {
    kernel_of_rows(m.num_cols(), m.row_words()).expect("matrix columns already validated")
}

/// V⊥ = {u : ⟨u, v⟩ = 0 for all v ∈ V}.
pub fn orthogonal_complement(v: &Subspace) -> Subspace {
    kernel_of_rows(v.ambient, &v.basis).expect("ambient already validated")
}

/// A subspace W with V ∩ W = {0} and V + W = F₂ⁿ: the span of the standard
/// basis vectors at the non-pivot coordinates of V's canonical basis.
pub fn complement_space(v: &Subspace) -> Subspace {
    let pivots = v.pivots();
    let vectors = (0..v.ambient)
        .filter(|j| !pivots.contains(j))
        .map(|j| 1u64 << j);
    Subspace::span(v.ambient, vectors).expect("ambient already validated")
}

/// Solves `Ma = y` for `a` inside a fixed complement `W` of ker M.
///
/// The images `M w_i` of W's basis are independent, so each `y` in the image
/// of M has exactly one preimage in W.
#[derive(Clone, Debug)]
pub struct CosetSolver {
    out_bits: usize,
    w: Subspace,
    // (image, coefficient mask over W's basis), fully reduced, pivots = msb
    reduced: Vec<(u64, u64)>,
}

impl CosetSolver {
    pub fn new(m: &F2Matrix, w: &Subspace) -> Result<Self> {
        if w.ambient_dim() != m.num_cols() {
            return Err(Error::DimensionMismatch {
                expected: m.num_cols(),
                actual: w.ambient_dim(),
            });
        }
        if w.dim() != m.rank() {
            return Err(Error::NotComplementary);
        }
        let mut reduced: Vec<(u64, u64)> = Vec::with_capacity(w.dim());
        for (i, &b) in w.basis().iter().enumerate() {
            let (mut img, mut combo) = (m.apply(b), 1u64 << i);
            for &(r, c) in &reduced {
                if img & top_bit(r) != 0 {
                    img ^= r;
                    combo ^= c;
                }
            }
            if img == 0 {
                return Err(Error::NotComplementary);
            }
            let p = top_bit(img);
            for e in reduced.iter_mut() {
                if e.0 & p != 0 {
                    e.0 ^= img;
                    e.1 ^= combo;
                }
            }
            reduced.push((img, combo));
        }
        Ok(CosetSolver {
            out_bits: m.num_rows(),
            w: w.clone(),
            reduced,
        })
    }

    pub fn complement(&self) -> &Subspace {
        &self.w
    }

    /// Returns `(a, coefficients of a in W's basis)`.
    #[inline]
    pub fn solve(&self, y: u64) -> Option<(u64, u64)> {
        let mut rest = y;
        let mut combo = 0u64;
        for &(r, c) in &self.reduced {
            if rest & top_bit(r) != 0 {
                rest ^= r;
                combo ^= c;
            }
        }
        if rest != 0 {
            return None;
        }
        Some((self.w.element(combo), combo))
    }

    pub fn out_bits(&self) -> usize {
        self.out_bits
    }
}

/// The representative `a ∈ W` of the coset `M⁻¹(y)`, or `None` when `y` is
/// outside the image of `M`.
pub fn coset_representative(m: &F2Matrix, w: &Subspace, y: &BitVec) -> Result<Option<BitVec>> {
    if y.len() != m.num_rows() {
        return Err(Error::DimensionMismatch {
            expected: m.num_rows(),
            actual: y.len(),
        });
    }
    let solver = CosetSolver::new(m, w)?;
    Ok(solver.solve(y.to_int()).map(|(a, _)| BitVec {
        len: m.num_cols() as u8,
        bits: a,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bv(bits: &[u8]) -> BitVec {
        BitVec::from_bits(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()).unwrap()
    }

    fn mat(rows: &[&[u8]]) -> F2Matrix {
        let cols = rows[0].len();
        F2Matrix::from_rows(cols, &rows.iter().map(|r| bv(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn int_round_trip_is_lsb_first() {
        let v = BitVec::from_int(3, 5).unwrap();
        assert_eq!(v.to_bits(), vec![true, false, true]);
        assert_eq!(v.to_int(), 5);
        assert!(BitVec::from_int(3, 8).is_err());
        assert!(BitVec::zeros(65).is_err());
    }

    #[test]
    fn mat_vec_examples() {
        let id = F2Matrix::identity(3).unwrap();
        assert_eq!(id.mat_vec_mul(&bv(&[1, 0, 1])).unwrap(), bv(&[1, 0, 1]));
        let z = F2Matrix::zero(2, 3).unwrap();
        assert!(z.mat_vec_mul(&bv(&[1, 1, 1])).unwrap().is_zero());
        let m = mat(&[&[1, 1, 0], &[0, 1, 1]]);
        assert_eq!(m.mat_vec_mul(&bv(&[1, 1, 1])).unwrap(), bv(&[0, 0]));
        assert!(m.mat_vec_mul(&bv(&[1, 1])).is_err());
    }

    #[test]
    fn kernel_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // full-rank square
        loop {
            let rows: Vec<u64> = (0..5).map(|_| rng.gen_range(0..32)).collect();
            let m = F2Matrix::new(5, rows).unwrap();
            if m.rank() == 5 {
                assert_eq!(kernel_basis(&m).dim(), 0);
                break;
            }
        }
        assert_eq!(kernel_basis(&F2Matrix::zero(3, 4).unwrap()).dim(), 4);
        let k = kernel_basis(&mat(&[&[1, 1]]));
        assert_eq!(k, Subspace::from_basis(2, &[bv(&[1, 1])]).unwrap());
    }

    #[test]
    fn orthogonal_complement_examples() {
        assert_eq!(
            orthogonal_complement(&Subspace::zero(4).unwrap()),
            Subspace::full(4).unwrap()
        );
        assert_eq!(
            orthogonal_complement(&Subspace::full(4).unwrap()),
            Subspace::zero(4).unwrap()
        );
        let v = Subspace::from_basis(2, &[bv(&[1, 1])]).unwrap();
        assert_eq!(orthogonal_complement(&v), v);
    }

    #[test]
    fn complement_space_examples() {
        assert_eq!(
            complement_space(&Subspace::zero(3).unwrap()),
            Subspace::full(3).unwrap()
        );
        assert_eq!(
            complement_space(&Subspace::full(3).unwrap()),
            Subspace::zero(3).unwrap()
        );
        let v = Subspace::from_basis(2, &[bv(&[1, 0])]).unwrap();
        let w = complement_space(&v);
        assert_eq!(w, Subspace::from_basis(2, &[bv(&[0, 1])]).unwrap());
        // direct sum by enumeration
        let mut seen = std::collections::HashSet::new();
        for a in v.elements() {
            for b in w.elements() {
                seen.insert(a ^ b);
            }
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn coset_representative_examples() {
        let m = mat(&[&[1, 1]]);
        let w = Subspace::from_basis(2, &[bv(&[1, 0])]).unwrap();
        assert_eq!(
            coset_representative(&m, &w, &bv(&[0])).unwrap(),
            Some(bv(&[0, 0]))
        );
        assert_eq!(
            coset_representative(&m, &w, &bv(&[1])).unwrap(),
            Some(bv(&[1, 0]))
        );
        let id = F2Matrix::identity(3).unwrap();
        let full = Subspace::full(3).unwrap();
        for y in 0..8 {
            let y = BitVec::from_int(3, y).unwrap();
            assert_eq!(coset_representative(&id, &full, &y).unwrap(), Some(y));
        }
        assert!(coset_representative(&m, &w, &bv(&[1, 0])).is_err());
        // W inside the kernel is rejected
        let bad = Subspace::from_basis(2, &[bv(&[1, 1])]).unwrap();
        assert_eq!(
            coset_representative(&m, &bad, &bv(&[1])),
            Err(Error::NotComplementary)
        );
    }

    #[test]
    fn non_surjective_map_reports_absent() {
        // both rows equal: image is {00, 11}
        let m = mat(&[&[1, 0, 1], &[1, 0, 1]]);
        let w = complement_space(&kernel_basis(&m));
        assert_eq!(coset_representative(&m, &w, &bv(&[1, 0])).unwrap(), None);
        let a = coset_representative(&m, &w, &bv(&[1, 1])).unwrap().unwrap();
        assert_eq!(m.mat_vec_mul(&a).unwrap(), bv(&[1, 1]));
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = F2Matrix::new(6, (0..6).map(|_| rng.gen_range(0..64)).collect()).unwrap();
            match m.inverse() {
                Some(inv) => assert_eq!(m.mul(&inv).unwrap(), F2Matrix::identity(6).unwrap()),
                None => assert!(m.rank() < 6),
            }
        }
    }

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, n: usize) -> F2Matrix {
        F2Matrix::new(n, (0..r).map(|_| rng.gen::<u64>() & low_mask(n)).collect()).unwrap()
    }

    #[test]
    fn exhaustive_agreement_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..60 {
            let n = 1 + trial % 10;
            let r = rng.gen_range(0..=n);
            let m = random_matrix(&mut rng, r, n);
            let kernel = kernel_basis(&m);
            let brute: Vec<u64> = (0..1u64 << n).filter(|&x| m.apply(x) == 0).collect();
            assert_eq!(brute.len(), 1 << kernel.dim());
            assert!(brute.iter().all(|&x| kernel.contains(x)));
            assert_eq!(kernel.dim() + m.rank(), n);

            let perp = orthogonal_complement(&kernel);
            let brute_perp: Vec<u64> = (0..1u64 << n)
                .filter(|&u| brute.iter().all(|&v| !parity(u & v)))
                .collect();
            assert_eq!(brute_perp.len(), 1 << perp.dim());
            assert!(brute_perp.iter().all(|&u| perp.contains(u)));
            assert_eq!(orthogonal_complement(&perp), kernel);

            let w = complement_space(&kernel);
            let solver = CosetSolver::new(&m, &w).unwrap();
            for y in 0..1u64 << r {
                let preimages: Vec<u64> = (0..1u64 << n).filter(|&x| m.apply(x) == y).collect();
                match solver.solve(y) {
                    Some((a, c)) => {
                        assert_eq!(m.apply(a), y);
                        assert!(w.contains(a));
                        assert_eq!(w.element(c), a);
                        assert!(preimages.contains(&a));
                    }
                    None => assert!(preimages.is_empty()),
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn mat_vec_is_linear(rows in proptest::collection::vec(0u64..4096, 1..12), u in 0u64..4096, v in 0u64..4096) {
            let m = F2Matrix::new(12, rows).unwrap();
            proptest::prop_assert_eq!(m.apply(u ^ v), m.apply(u) ^ m.apply(v));
        }

        #[test]
        fn int_round_trip(n in 1usize..=64, raw in proptest::num::u64::ANY) {
            let v = raw & low_mask(n);
            proptest::prop_assert_eq!(BitVec::from_int(n, v).unwrap().to_int(), v);
        }

        #[test]
        fn double_complement_is_identity(vs in proptest::collection::vec(0u64..1024, 0..10)) {
            let v = Subspace::span(10, vs).unwrap();
            let perp = orthogonal_complement(&v);
            proptest::prop_assert_eq!(v.dim() + perp.dim(), 10);
            proptest::prop_assert_eq!(orthogonal_complement(&perp), v.clone());
            let w = complement_space(&v);
            proptest::prop_assert_eq!(v.sum(&w).unwrap().dim(), 10);
            proptest::prop_assert_eq!(v.dim() + w.dim(), 10);
        }
    }
}
