//! Walsh–Hadamard transform, spectral oracles, and coset sums from spectra.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use crate::error::{Error, Result};
use crate::gf2::{parity, F2Matrix, Subspace};

/// A real vector of length 2ⁿ indexed by F₂ⁿ (LSB-first).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSignal {
    n: usize,
    values: Vec<f64>,
}

impl DenseSignal {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n >= 48 {
            return Err(Error::TooWide(n));
        }
        if values.len() != 1usize << n {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n,
                actual: values.len(),
            });
        }
        Ok(DenseSignal { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; 1usize << n.min(47)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc + v.abs())
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Unnormalized butterfly: `v[j] ← Σᵢ (−1)^⟨i,j⟩ v[i]`. Length must be a power of 2.
pub fn fwht_in_place(v: &mut [f64]) {
    debug_assert!(v.len().is_power_of_two());
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// x̂(j) = N^{−1/2} Σᵢ (−1)^⟨i,j⟩ x(i).
pub fn fwht(x: &DenseSignal) -> DenseSignal {
    let mut values = x.values.clone();
    fwht_in_place(&mut values);
    let scale = 1.0 / (values.len() as f64).sqrt();
    for v in &mut values {
        *v *= scale;
    }
    DenseSignal { n: x.n, values }
}

/// What an oracle returns at position j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralScale {
    /// x̂(j) with the 1/√N normalization.
    Normalized,
    /// √N·x̂(j), an integer whenever x is.
    Integer,
}

/// Query access to a spectrum.
pub trait SpectrumOracle {
    fn n(&self) -> usize;
    fn scale(&self) -> SpectralScale;
    /// Value at spectral position `j`, counted once per call.
    fn query(&self, j: u64) -> Result<f64>;
    fn query_count(&self) -> u64;
}

/// Oracle backed by a dense spectrum array.
#[derive(Debug)]
pub struct DenseOracle {
    n: usize,
    scale: SpectralScale,
    spectrum: Vec<f64>,
    count: AtomicU64,
    allowed: RwLock<Option<HashSet<u64>>>,
    log: Mutex<Option<Vec<u64>>>,
}

impl DenseOracle {
    /// Serves `spectrum` as given, interpreted at `scale`.
    pub fn new(spectrum: DenseSignal, scale: SpectralScale) -> Self {
        DenseOracle {
            n: spectrum.n,
            scale,
            spectrum: spectrum.values,
            count: AtomicU64::new(0),
            allowed: RwLock::new(None),
            log: Mutex::new(None),
        }
    }

    /// Transforms `x` and serves its spectrum at `scale`.
    pub fn from_signal(x: &DenseSignal, scale: SpectralScale) -> Self {
        let spectrum = match scale {
            SpectralScale::Normalized => fwht(x),
            SpectralScale::Integer => {
                let mut v = x.values.clone();
                fwht_in_place(&mut v);
                DenseSignal { n: x.n, values: v }
            }
        };
        Self::new(spectrum, scale)
    }

    /// Rejects every later query outside `positions`.
    pub fn arm<I: IntoIterator<Item = u64>>(&self, positions: I) {
        *self.allowed.write().expect("lock poisoned") = Some(positions.into_iter().collect());
    }

    pub fn disarm(&self) {
        *self.allowed.write().expect("lock poisoned") = None;
    }

    /// Starts recording every accepted query position.
    pub fn record_queries(&self) {
        *self.log.lock().expect("lock poisoned") = Some(Vec::new());
    }

    pub fn take_log(&self) -> Vec<u64> {
        self.log
            .lock()
            .expect("lock poisoned")
            .as_mut()
            .map(std::mem::take)
            .unwrap_or_default()
    }

    pub fn reset_count(&self) {
        self.count.store(0, Ordering::SeqCst);
    }
}

impl SpectrumOracle for DenseOracle {
    fn n(&self) -> usize {
        self.n
    }

    fn scale(&self) -> SpectralScale {
        self.scale
    }

    fn query(&self, j: u64) -> Result<f64> {
        let value = *self
            .spectrum
            .get(j as usize)
            .filter(|_| j >> self.n == 0)
            .ok_or(Error::ValueOutOfRange {
                value: j,
                bits: self.n,
            })?;
        if let Some(allowed) = self.allowed.read().expect("lock poisoned").as_ref() {
            if !allowed.contains(&j) {
                return Err(Error::PlanViolation(j));
            }
        }
        self.count.fetch_add(1, Ordering::SeqCst);
        if let Some(log) = self.log.lock().expect("lock poisoned").as_mut() {
            log.push(j);
        }
        Ok(value)
    }

    fn query_count(&self) -> u64 {
        self.count.load(Ordering::SeqCst)
    }
}

/// Oracle serving `xhat` at the normalized scale.
pub fn oracle_from_dense(xhat: DenseSignal) -> DenseOracle {
    DenseOracle::new(xhat, SpectralScale::Normalized)
}

/// Applies S(c, d) = (−1)^{cᵀGd} to `z`, i.e. `out[c] = Σ_d S(c,d) z[d]`,
/// where `gram[i]` holds row i of the r×r matrix G as a bit mask.
///
/// Splitting off the last coordinate of c and d gives
/// `top = S′z₀ + D S′z₁` and `bottom = S′D′z₀ + s·D S′D′z₁`, with D, D′ the
/// diagonal signs from the last column and row of G and s = (−1)^{G_rr}.
/// When the last row of G vanishes off the diagonal, D′ = I and the two
/// sub-transforms are shared.
pub fn gram_transform(gram: &[u64], z: &[f64]) -> Vec<f64> {
    let r = gram.len();
    debug_assert_eq!(z.len(), 1usize << r);
    if r == 0 {
        return z.to_vec();
    }
    let half = 1usize << (r - 1);
    let sub = &gram[..r - 1];
    let low = (1u64 << (r - 1)) - 1;
    let last_row = gram[r - 1] & low;
    let last_col: u64 = sub
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &row)| acc | (((row >> (r - 1)) & 1) << i));
    let s = if (gram[r - 1] >> (r - 1)) & 1 == 1 { -1.0 } else { 1.0 };
    let sign = |mask: u64, idx: usize| if parity(mask & idx as u64) { -1.0 } else { 1.0 };
    let (z0, z1) = z.split_at(half);
    let (a0, a1, b0, b1) = if last_row == 0 {
        let a0 = gram_transform(sub, z0);
        let a1 = gram_transform(sub, z1);
        (a0.clone(), a1.clone(), a0, a1)
    } else {
        let twist = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .map(|(d, &x)| sign(last_row, d) * x)
                .collect()
        };
        (
            gram_transform(sub, z0),
            gram_transform(sub, z1),
            gram_transform(sub, &twist(z0)),
            gram_transform(sub, &twist(z1)),
        )
    };
    let mut out = vec![0.0; 2 * half];
    for c in 0..half {
        let dc = sign(last_col, c);
        out[c] = a0[c] + dc * a1[c];
        out[half + c] = b0[c] + s * dc * b1[c];
    }
    out
}

/// Dual basis of `vperp` against `w`: ⟨w_i, v′_k⟩ = δ_ik.
fn dual_basis(w: &Subspace, vperp: &Subspace) -> Result<Vec<u64>> {
    let r = w.dim();
    let wb = w.basis();
    let vb = vperp.basis();
    let gram: Vec<u64> = wb
        .iter()
        .map(|&wi| {
            vb.iter()
                .enumerate()
                .fold(0u64, |acc, (k, &vk)| acc | ((parity(wi & vk) as u64) << k))
        })
        .collect();
    let g = F2Matrix::new(r.max(1), gram).expect("r ≤ 64");
    let inv = if r == 0 {
        g
    } else {
        g.inverse().ok_or(Error::NotComplementary)?
    };
    Ok((0..r)
        .map(|k| {
            (0..r).fold(0u64, |acc, l| {
                if (inv.row_words()[l] >> k) & 1 == 1 {
                    acc ^ vb[l]
                } else {
                    acc
                }
            })
        })
        .collect())
}

/// Spectral positions used by [`subspace_sums`]: V⊥ in the dual-basis order.
pub fn subspace_query_positions(w: &Subspace, vperp: &Subspace) -> Result<Vec<u64>> {
    check_pair(w, vperp)?;
    let dual = dual_basis(w, vperp)?;
    Ok(enumerate_span(&dual))
}

/// XOR combinations of `basis` in binary coefficient order.
pub(crate) fn enumerate_span(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; 1usize << basis.len()];
    for (k, &b) in basis.iter().enumerate() {
        let half = 1usize << k;
        for i in 0..half {
            out[half + i] = out[i] ^ b;
        }
    }
    out
}

fn check_pair(w: &Subspace, vperp: &Subspace) -> Result<()> {
    if w.ambient_dim() != vperp.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: vperp.ambient_dim(),
            actual: w.ambient_dim(),
        });
    }
    if w.dim() != vperp.dim() {
        return Err(Error::DimensionMismatch {
            expected: vperp.dim(),
            actual: w.dim(),
        });
    }
    Ok(())
}

/// Coset sums x(a+V) for every a ∈ W, where V = (V⊥)⊥, from the 2ʳ spectral
/// values on V⊥. Output is indexed by the coefficients of a in W's basis.
pub fn subspace_sums<O: SpectrumOracle + ?Sized>(
    oracle: &O,
    w: &Subspace,
    vperp: &Subspace,
) -> Result<Vec<f64>> {
    check_pair(w, vperp)?;
    let n = oracle.n();
    if w.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: w.ambient_dim(),
        });
    }
    let r = w.dim();
    let positions = subspace_query_positions(w, vperp)?;
    let z = positions
        .iter()
        .map(|&j| oracle.query(j))
        .collect::<Result<Vec<f64>>>()?;
    // the dual basis makes the Gram matrix the identity, where the
    // recurrence is the plain butterfly
    let mut out = z;
    fwht_in_place(&mut out);
    let factor = match oracle.scale() {
        SpectralScale::Normalized => 2f64.powi((n - r) as i32) / 2f64.powf(n as f64 / 2.0),
        SpectralScale::Integer => 1.0 / 2f64.powi(r as i32),
    };
    for v in &mut out {
        *v *= factor;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{complement_space, orthogonal_complement};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> DenseSignal {
        DenseSignal::new(n, (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn integer_signal(rng: &mut ChaCha8Rng, n: usize) -> DenseSignal {
        DenseSignal::new(
            n,
            (0..1 << n).map(|_| rng.gen_range(-50i32..=50) as f64).collect(),
        )
        .unwrap()
    }

    #[test]
    fn fwht_examples() {
        let x = DenseSignal::new(1, vec![3.0, 1.0]).unwrap();
        let h = fwht(&x);
        let s = 2f64.sqrt();
        assert!((h.values()[0] - 4.0 / s).abs() < 1e-12);
        assert!((h.values()[1] - 2.0 / s).abs() < 1e-12);

        let mut e0 = DenseSignal::zeros(6).unwrap();
        e0.values_mut()[0] = 1.0;
        assert!(fwht(&e0).values().iter().all(|&v| (v - 0.125).abs() < 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_signal(&mut rng, 10);
        let back = fwht(&fwht(&x));
        for (a, b) in back.values().iter().zip(x.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fwht_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_signal(&mut rng, 6);
        let h = fwht(&x);
        for j in 0..64u64 {
            let direct: f64 = (0..64u64)
                .map(|i| if parity(i & j) { -x.values()[i as usize] } else { x.values()[i as usize] })
                .sum::<f64>()
                / 8.0;
            assert!((direct - h.values()[j as usize]).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 4, 9, 16] {
            let x = random_signal(&mut rng, n);
            let (a, b) = (x.l2_norm(), fwht(&x).l2_norm());
            assert!((a - b).abs() <= 1e-9 * a);
        }
    }

    #[test]
    fn oracle_contract() {
        let xhat = DenseSignal::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let o = oracle_from_dense(xhat);
        assert_eq!(o.query(2).unwrap(), 3.0);
        assert_eq!(o.query(2).unwrap(), 3.0);
        assert_eq!(o.query_count(), 2);
        o.arm([0, 1]);
        assert_eq!(o.query(2), Err(Error::PlanViolation(2)));
        assert_eq!(o.query(1).unwrap(), 2.0);
        assert_eq!(o.query_count(), 3);
        o.disarm();
        assert!(o.query(2).is_ok());
        assert!(o.query(4).is_err());
    }

    fn brute_coset_sums(x: &DenseSignal, w: &Subspace, v: &Subspace) -> Vec<f64> {
        (0..1u64 << w.dim())
            .map(|c| {
                let a = w.element(c);
                v.elements().iter().map(|&e| x.values()[(a ^ e) as usize]).sum()
            })
            .collect()
    }

    fn random_subspace(rng: &mut ChaCha8Rng, n: usize, r: usize) -> Subspace {
        loop {
            let s = Subspace::span(n, (0..r).map(|_| rng.gen::<u64>() & ((1 << n) - 1))).unwrap();
            if s.dim() == r {
                return s;
            }
        }
    }

    /// A random complement of V, not just the coordinate one.
    fn random_complement(rng: &mut ChaCha8Rng, v: &Subspace) -> Subspace {
        let base = complement_space(v);
        let shifted = base
            .basis()
            .iter()
            .map(|&b| b ^ v.element(rng.gen::<u64>() & ((1 << v.dim()) - 1)))
            .collect::<Vec<_>>();
        Subspace::span(v.ambient_dim(), shifted).unwrap()
    }

    #[test]
    fn subspace_sums_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 8;
        let x = integer_signal(&mut rng, n);
        let int_oracle = DenseOracle::from_signal(&x, SpectralScale::Integer);
        let float_oracle = DenseOracle::from_signal(&x, SpectralScale::Normalized);
        let tol = 1e-9 * x.l1_norm();
        for trial in 0..50 {
            let r = trial % (n + 1);
            let vperp = random_subspace(&mut rng, n, r);
            let v = orthogonal_complement(&vperp);
            let w = random_complement(&mut rng, &v);
            let expect = brute_coset_sums(&x, &w, &v);
            let before = int_oracle.query_count();
            let exact = subspace_sums(&int_oracle, &w, &vperp).unwrap();
            assert_eq!(int_oracle.query_count() - before, 1 << r);
            assert_eq!(exact, expect, "r = {r}");
            let approx = subspace_sums(&float_oracle, &w, &vperp).unwrap();
            for (a, b) in approx.iter().zip(&expect) {
                assert!((a - b).abs() <= tol);
            }
        }
    }

    #[test]
    fn subspace_sums_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = integer_signal(&mut rng, 5);
        let o = DenseOracle::from_signal(&x, SpectralScale::Integer);
        // V = everything
        let zero = Subspace::zero(5).unwrap();
        let total = subspace_sums(&o, &zero, &zero).unwrap();
        assert_eq!(total, vec![x.values().iter().sum::<f64>()]);
        // V = {0} recovers x itself
        let full = Subspace::full(5).unwrap();
        assert_eq!(subspace_sums(&o, &full, &full).unwrap(), x.values());
        // mismatched dimensions
        let line = Subspace::span(5, [1]).unwrap();
        assert!(subspace_sums(&o, &line, &zero).is_err());
    }

    #[test]
    fn armed_oracle_rejects_sampler_outside_plan() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = integer_signal(&mut rng, 4);
        let o = DenseOracle::from_signal(&x, SpectralScale::Integer);
        let vperp = Subspace::span(4, [0b0011, 0b0100]).unwrap();
        let w = complement_space(&orthogonal_complement(&vperp));
        let positions = subspace_query_positions(&w, &vperp).unwrap();
        o.arm(positions[..3].iter().copied());
        assert!(matches!(subspace_sums(&o, &w, &vperp), Err(Error::PlanViolation(_))));
        o.arm(vperp.elements());
        assert!(subspace_sums(&o, &w, &vperp).is_ok());
    }

    fn direct_gram(gram: &[u64], z: &[f64]) -> Vec<f64> {
        let r = gram.len();
        (0..1usize << r)
            .map(|c| {
                (0..1usize << r)
                    .map(|d| {
                        let e = (0..r).fold(false, |acc, i| {
                            acc ^ (((c >> i) & 1 == 1) && parity(gram[i] & d as u64))
                        });
                        if e {
                            -z[d]
                        } else {
                            z[d]
                        }
                    })
                    .sum()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn gram_recurrence_matches_direct(
            r in 0usize..6,
            rows in proptest::collection::vec(any::<u64>(), 6),
            zs in proptest::collection::vec(-100i32..100, 64),
        ) {
            let gram: Vec<u64> = rows[..r].iter().map(|g| g & ((1 << r) - 1)).collect();
            let z: Vec<f64> = zs[..1 << r].iter().map(|&v| v as f64).collect();
            prop_assert_eq!(gram_transform(&gram, &z), direct_gram(&gram, &z));
            let identity: Vec<u64> = (0..r).map(|i| 1u64 << i).collect();
            let mut butterfly = z.clone();
            fwht_in_place(&mut butterfly);
            prop_assert_eq!(gram_transform(&identity, &z), butterfly);
        }

        #[test]
        fn fwht_is_linear(a in proptest::collection::vec(-1e3f64..1e3, 16),
                          b in proptest::collection::vec(-1e3f64..1e3, 16)) {
            let x = DenseSignal::new(4, a.clone()).unwrap();
            let y = DenseSignal::new(4, b.clone()).unwrap();
            let s = DenseSignal::new(4, a.iter().zip(&b).map(|(p, q)| p + q).collect()).unwrap();
            let (hx, hy, hs) = (fwht(&x), fwht(&y), fwht(&s));
            for i in 0..16 {
                prop_assert!((hx.values()[i] + hy.values()[i] - hs.values()[i]).abs() < 1e-9);
            }
        }
    }
}
