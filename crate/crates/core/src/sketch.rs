//! Measurement vectors y = (Mx, (M⊗B)x) assembled from spectral queries.
//!
//! Entry (j, t, b) lives at `(b·D + t)·2^r + j`. Row b = 0 is the bucket sum
//! `Σ_{h_t(i)=j} x(i)`; row b ≥ 1 restricts that sum to indices whose bit b
//! (1-based, LSB-first) is set.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::cell::RefCell;

use crate::condenser::LinearCondenser;
use crate::error::{Error, Result};
use crate::gf2::{complement_space, kernel_basis, BitVec, F2Matrix, Subspace};
use crate::wht::{enumerate_span, subspace_sums, SpectralScale, SpectrumOracle};

/// Sorted, duplicate-free sparse vector over F₂ⁿ indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    entries: Vec<(u64, f64)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec::default()
    }

    /// Sorts by index, adds up repeated indices and drops zeros.
    pub fn from_pairs<I: IntoIterator<Item = (u64, f64)>>(pairs: I) -> Self {
        let mut entries: Vec<(u64, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(u64, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        SparseVec { entries: merged }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|e| *e.1 != 0.0)
                .map(|(i, &v)| (i as u64, v))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u64, f64)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: u64) -> f64 {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc + e.1.abs())
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().chain(other.entries.iter()).copied())
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .copied()
                .chain(other.entries.iter().map(|&(i, v)| (i, -v))),
        )
    }

    /// ‖self − other‖₁.
    pub fn l1_distance(&self, other: &SparseVec) -> f64 {
        self.sub(other).l1_norm()
    }
}

/// Bit `b` (1-based, LSB-first) of `i`.
pub fn bit_select(i: &BitVec, b: usize) -> Result<bool> {
    if b == 0 || b > i.len() {
        return Err(Error::BitOutOfRange {
            index: b,
            n: i.len(),
        });
    }
    Ok(i.get(b - 1))
}

/// `[M; e_bᵀ]`, the map x ↦ (Mx, x(b)).
pub fn stacked_matrix(m: &F2Matrix, b: usize) -> Result<F2Matrix> {
    if b == 0 || b > m.num_cols() {
        return Err(Error::BitOutOfRange {
            index: b,
            n: m.num_cols(),
        });
    }
    m.stack_row(1u64 << (b - 1))
}

/// The pieces needed to read one block of coset sums off the spectrum.
#[derive(Clone, Debug)]
pub struct BlockPlan {
    pub t: u64,
    /// 0 for the plain row, b ≥ 1 for the map with bit b appended.
    pub b: usize,
    pub matrix: F2Matrix,
    /// Row space of `matrix`, i.e. the dual of its kernel.
    pub vperp: Subspace,
    /// Complement of the kernel, one representative per coset.
    pub w: Subspace,
}

impl BlockPlan {
    fn new(t: u64, b: usize, matrix: F2Matrix) -> Self {
        let n = matrix.num_cols();
        let vperp = Subspace::span(n, matrix.row_words().iter().copied())
            .expect("rows fit the ambient dimension");
        let w = complement_space(&kernel_basis(&matrix));
        BlockPlan {
            t,
            b,
            matrix,
            vperp,
            w,
        }
    }
}

/// Every spectral position the sketch will read, fixed before any query.
#[derive(Clone, Debug)]
pub struct QueryPlan {
    pub n: usize,
    pub r: usize,
    pub seeds: u64,
    pub with_tensor: bool,
    pub blocks: Vec<BlockPlan>,
    positions: Vec<u64>,
}

impl QueryPlan {
    /// Sorted, distinct spectral positions.
    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// D·2^{r+1}·(n+1).
    pub fn size_bound(&self) -> u128 {
        self.seeds as u128 * (1u128 << (self.r + 1)) * (self.n as u128 + 1)
    }
}

fn seed_blocks(cond: &LinearCondenser, t: u64, with_tensor: bool) -> Result<Vec<BlockPlan>> {
    let m = cond.matrix(t)?;
    let mut blocks = vec![BlockPlan::new(t, 0, m.clone())];
    if with_tensor {
        for b in 1..=cond.n() {
            blocks.push(BlockPlan::new(t, b, stacked_matrix(&m, b)?));
        }
    }
    Ok(blocks)
}

pub fn plan_queries(cond: &LinearCondenser, with_tensor: bool) -> Result<QueryPlan> {
    let mut blocks = Vec::new();
    let mut positions = BTreeSet::new();
    for t in 0..cond.num_seeds() {
        for block in seed_blocks(cond, t, with_tensor)? {
            positions.extend(block.vperp.elements());
            blocks.push(block);
        }
    }
    Ok(QueryPlan {
        n: cond.n(),
        r: cond.r(),
        seeds: cond.num_seeds(),
        with_tensor,
        blocks,
        positions: positions.into_iter().collect(),
    })
}

/// Largest n for which fetched spectral values live in a flat table.
const FLAT_CACHE_BITS: usize = 22;

/// Spectral values read so far.
enum SpectrumCache {
    Flat { values: Vec<f64>, known: Vec<bool>, len: usize },
    Map(HashMap<u64, f64>),
}

impl SpectrumCache {
    fn new(n: usize) -> Self {
        if n <= FLAT_CACHE_BITS {
            SpectrumCache::Flat {
                values: vec![0.0; 1 << n],
                known: vec![false; 1 << n],
                len: 0,
            }
        } else {
            SpectrumCache::Map(HashMap::new())
        }
    }

    #[inline]
    fn get(&self, j: u64) -> Option<f64> {
        match self {
            SpectrumCache::Flat { values, known, .. } => {
                known.get(j as usize).copied().unwrap_or(false).then(|| values[j as usize])
            }
            SpectrumCache::Map(m) => m.get(&j).copied(),
        }
    }

    fn insert(&mut self, j: u64, v: f64) {
        match self {
            SpectrumCache::Flat { values, known, len } => {
                if !known[j as usize] {
                    known[j as usize] = true;
                    *len += 1;
                }
                values[j as usize] = v;
            }
            SpectrumCache::Map(m) => {
                m.insert(j, v);
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            SpectrumCache::Flat { len, .. } => *len,
            SpectrumCache::Map(m) => m.len(),
        }
    }
}

/// Spectral values already fetched; any other position is refused.
struct Fetched<'a> {
    n: usize,
    scale: SpectralScale,
    values: &'a SpectrumCache,
}

impl SpectrumOracle for Fetched<'_> {
    fn n(&self) -> usize {
        self.n
    }

    fn scale(&self) -> SpectralScale {
        self.scale
    }

    fn query(&self, j: u64) -> Result<f64> {
        self.values.get(j).ok_or(Error::PlanViolation(j))
    }

    fn query_count(&self) -> u64 {
        0
    }
}

/// Coset sums of one block, indexed by the block map's output.
fn block_sums<O: SpectrumOracle + ?Sized>(oracle: &O, block: &BlockPlan) -> Result<Vec<f64>> {
    let sums = subspace_sums(oracle, &block.w, &block.vperp)?;
    let images: Vec<u64> = block.w.basis().iter().map(|&b| block.matrix.apply(b)).collect();
    let mut out = vec![0.0; 1usize << block.matrix.num_rows()];
    // rows outside the image of the map stay zero
    for (j, s) in enumerate_span(&images).into_iter().zip(sums) {
        out[j as usize] = s;
    }
    Ok(out)
}

/// The sketch of a signal under one condenser.
#[derive(Clone, Debug, PartialEq)]
pub struct Sketch {
    pub n: usize,
    pub r: usize,
    pub seeds: u64,
    pub with_tensor: bool,
    entries: Vec<f64>,
    /// For b ≥ 1, the bucket sums over indices with bit b clear, same layout
    /// as the tensor rows. Not persisted.
    complement: Option<Vec<f64>>,
}

impl Sketch {
    pub fn zeros(n: usize, r: usize, seeds: u64, with_tensor: bool) -> Self {
        let rows = if with_tensor { n + 1 } else { 1 };
        Sketch {
            n,
            r,
            seeds,
            with_tensor,
            entries: vec![0.0; rows * seeds as usize * (1usize << r)],
            complement: None,
        }
    }

    pub fn from_entries(
        n: usize,
        r: usize,
        seeds: u64,
        with_tensor: bool,
        entries: Vec<f64>,
    ) -> Result<Self> {
        let mut s = Sketch::zeros(n, r, seeds, with_tensor);
        if entries.len() != s.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: s.entries.len(),
                actual: entries.len(),
            });
        }
        s.entries = entries;
        Ok(s)
    }

    #[inline]
    pub fn index(&self, j: u64, t: u64, b: usize) -> usize {
        ((b * self.seeds as usize + t as usize) << self.r) + j as usize
    }

    pub fn get(&self, j: u64, t: u64, b: usize) -> f64 {
        self.entries[self.index(j, t, b)]
    }

    /// Row b of seed t, 2^r entries.
    pub fn block(&self, t: u64, b: usize) -> &[f64] {
        let start = self.index(0, t, b);
        &self.entries[start..start + (1usize << self.r)]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        if self.with_tensor {
            self.n + 1
        } else {
            1
        }
    }

    /// Largest |tensor + complement − plain| over all (j, t, b ≥ 1); `None`
    /// when the complement halves were not kept.
    pub fn consistency_gap(&self) -> Option<f64> {
        let comp = self.complement.as_ref()?;
        let mut gap = 0.0f64;
        for b in 1..self.rows() {
            for t in 0..self.seeds {
                for j in 0..1u64 << self.r {
                    let i = self.index(j, t, b);
                    gap = gap.max((self.entries[i] + comp[i] - self.get(j, t, 0)).abs());
                }
            }
        }
        Some(gap)
    }

    fn fill_seed(&mut self, t: u64, blocks: &[(usize, Vec<f64>)]) {
        let size = 1usize << self.r;
        for (b, sums) in blocks {
            let start = self.index(0, t, *b);
            if *b == 0 {
                self.entries[start..start + size].copy_from_slice(sums);
            } else {
                // output bit r is x(b)
                self.entries[start..start + size].copy_from_slice(&sums[size..]);
                let comp = self
                    .complement
                    .get_or_insert_with(|| vec![0.0; self.entries.len()]);
                comp[start..start + size].copy_from_slice(&sums[..size]);
            }
        }
    }
}

/// Queries every plan position once, then assembles all blocks from those
/// values. The oracle sees exactly `plan.len()` queries.
pub fn build_sketch<O: SpectrumOracle + ?Sized>(
    oracle: &O,
    cond: &LinearCondenser,
    with_tensor: bool,
) -> Result<Sketch> {
    let plan = plan_queries(cond, with_tensor)?;
    build_sketch_from_plan(oracle, &plan)
}

pub fn build_sketch_from_plan<O: SpectrumOracle + ?Sized>(
    oracle: &O,
    plan: &QueryPlan,
) -> Result<Sketch> {
    if oracle.n() != plan.n {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            actual: oracle.n(),
        });
    }
    let mut values = SpectrumCache::new(plan.n);
    for &j in &plan.positions {
        values.insert(j, oracle.query(j)?);
    }
    let fetched = Fetched {
        n: plan.n,
        scale: oracle.scale(),
        values: &values,
    };
    let mut sketch = Sketch::zeros(plan.n, plan.r, plan.seeds, plan.with_tensor);
    for chunk in plan.blocks.chunk_by(|a, b| a.t == b.t) {
        let sums = chunk
            .iter()
            .map(|block| Ok((block.b, block_sums(&fetched, block)?)))
            .collect::<Result<Vec<_>>>()?;
        sketch.fill_seed(chunk[0].t, &sums);
    }
    Ok(sketch)
}

/// Adds `M w` (and with `with_bits`, every `(M⊗B_b) w`) into `out`, laid out
/// as `rows` consecutive blocks of 2^r.
pub fn scatter(m: &F2Matrix, w: &SparseVec, with_bits: bool, out: &mut [f64]) {
    let size = 1usize << m.num_rows();
    for &(i, v) in w.iter() {
        let j = m.apply(i) as usize;
        out[j] += v;
        if with_bits {
            let mut bits = i;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize + 1;
                out[b * size + j] += v;
                bits &= bits - 1;
            }
        }
    }
}

/// `M^t w`, followed by `(M^t⊗B_b) w` for b = 1..n when `with_bits`.
pub fn sparse_matvec(
    cond: &LinearCondenser,
    t: u64,
    w: &SparseVec,
    with_bits: bool,
) -> Result<Vec<Vec<f64>>> {
    let m = cond.matrix(t)?;
    if let Some(&(i, _)) = w.iter().find(|e| e.0 >> cond.n() != 0) {
        return Err(Error::ValueOutOfRange {
            value: i,
            bits: cond.n(),
        });
    }
    let rows = if with_bits { cond.n() + 1 } else { 1 };
    let size = 1usize << cond.r();
    let mut flat = vec![0.0; rows * size];
    scatter(&m, w, with_bits, &mut flat);
    Ok(flat.chunks(size).map(<[f64]>::to_vec).collect())
}

/// A sketch whose seeds are materialized on first use, reading each spectral
/// position from the oracle at most once.
pub struct LazySketch<'a, O: SpectrumOracle + ?Sized> {
    oracle: &'a O,
    cond: &'a LinearCondenser,
    values: RefCell<SpectrumCache>,
    seeds: HashMap<u64, (F2Matrix, Vec<f64>)>,
}

impl<'a, O: SpectrumOracle + ?Sized> LazySketch<'a, O> {
    pub fn new(oracle: &'a O, cond: &'a LinearCondenser) -> Result<Self> {
        if oracle.n() != cond.n() {
            return Err(Error::DimensionMismatch {
                expected: cond.n(),
                actual: oracle.n(),
            });
        }
        Ok(LazySketch {
            oracle,
            cond,
            values: RefCell::new(SpectrumCache::new(cond.n())),
            seeds: HashMap::new(),
        })
    }

    /// Matrix of seed t and its n+1 rows of sketch entries.
    pub fn seed(&mut self, t: u64) -> Result<(&F2Matrix, &[f64])> {
        if !self.seeds.contains_key(&t) {
            let blocks = seed_blocks(self.cond, t, true)?;
            let size = 1usize << self.cond.r();
            let mut rows = vec![0.0; (self.cond.n() + 1) * size];
            let adapter = Caching {
                inner: self.oracle,
                values: &self.values,
            };
            for block in &blocks {
                let sums = block_sums(&adapter, block)?;
                let dst = &mut rows[block.b * size..(block.b + 1) * size];
                if block.b == 0 {
                    dst.copy_from_slice(&sums);
                } else {
                    dst.copy_from_slice(&sums[size..]);
                }
            }
            self.seeds.insert(t, (blocks[0].matrix.clone(), rows));
        }
        let (m, rows) = &self.seeds[&t];
        Ok((m, rows))
    }

    pub fn seeds_touched(&self) -> usize {
        self.seeds.len()
    }

    /// Distinct spectral positions read so far.
    pub fn positions_read(&self) -> usize {
        self.values.borrow().len()
    }
}

struct Caching<'a, O: SpectrumOracle + ?Sized> {
    inner: &'a O,
    values: &'a RefCell<SpectrumCache>,
}

impl<O: SpectrumOracle + ?Sized> SpectrumOracle for Caching<'_, O> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn scale(&self) -> SpectralScale {
        self.inner.scale()
    }

    fn query(&self, j: u64) -> Result<f64> {
        let mut values = self.values.borrow_mut();
        if let Some(v) = values.get(j) {
            return Ok(v);
        }
        let v = self.inner.query(j)?;
        values.insert(j, v);
        Ok(v)
    }

    fn query_count(&self) -> u64 {
        self.inner.query_count()
    }
}

/// Header `n r D tensor_flag`, then one entry per line in layout order.
pub fn write_sketch(sketch: &Sketch) -> String {
    let mut out = format!(
        "{} {} {} {}\n",
        sketch.n,
        sketch.r,
        sketch.seeds,
        u8::from(sketch.with_tensor)
    );
    for v in &sketch.entries {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn read_sketch(text: &str) -> Result<Sketch> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty sketch file".into(),
    })?;
    let parse_err = |line: usize, what: &str| Error::Parse {
        line,
        message: format!("cannot parse {what:?}"),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `n r D tensor_flag`".into(),
        });
    }
    let n: usize = fields[0].parse().map_err(|_| parse_err(1, fields[0]))?;
    let r: usize = fields[1].parse().map_err(|_| parse_err(1, fields[1]))?;
    let seeds: u64 = fields[2].parse().map_err(|_| parse_err(1, fields[2]))?;
    let with_tensor = match fields[3] {
        "0" => false,
        "1" => true,
        other => return Err(parse_err(1, other)),
    };
    let entries = lines
        .map(|(i, l)| l.trim().parse::<f64>().map_err(|_| parse_err(i + 1, l)))
        .collect::<Result<Vec<_>>>()?;
    Sketch::from_entries(n, r, seeds, with_tensor, entries)
}
