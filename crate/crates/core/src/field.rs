//! Arithmetic in GF(2^m) and in polynomial rings over GF(2^m).
//!
//! Field elements are bit patterns: bit `j` is the coefficient of `x^j`. Each
//! degree `m ≤ 64` uses one fixed modulus, the lexicographically first
//! irreducible trinomial over F₂, or the first pentanomial when no trinomial
//! exists (degree 1 uses `x`).

use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::low_mask;

// ---------------------------------------------------------------------------
// F₂[x] on u128 words, used only to build the modulus table.

fn clmul_mod(a: u128, b: u128, f: u128, deg: u32) -> u128 {
    let top = 1u128 << deg;
    let mut a = a;
    let mut b = b;
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= f;
        }
    }
    acc
}

fn f2_degree(a: u128) -> i32 {
    127 - a.leading_zeros() as i32
}

fn f2_rem(mut a: u128, b: u128) -> u128 {
    let db = f2_degree(b);
    while a != 0 && f2_degree(a) >= db {
        a ^= b << (f2_degree(a) - db);
    }
    a
}

fn f2_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = f2_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test over F₂ for a polynomial of degree `deg`.
fn f2_irreducible(f: u128, deg: u32) -> bool {
    let x = 2u128;
    let mut h = x;
    for _ in 1..=deg / 2 {
        h = clmul_mod(h, h, f, deg);
        if f2_gcd(f, h ^ x) != 1 {
            return false;
        }
    }
    true
}

fn search_modulus(m: u32) -> u64 {
    if m == 1 {
        return 0;
    }
    let lead = 1u128 << m;
    for a in 1..m {
        let f = lead | (1u128 << a) | 1;
        if f2_irreducible(f, m) {
            return (f & low_mask(m as usize) as u128) as u64;
        }
    }
    for c in 3..m {
        for b in 2..c {
            for a in 1..b {
                let f = lead | (1u128 << c) | (1u128 << b) | (1u128 << a) | 1;
                if f2_irreducible(f, m) {
                    return (f & low_mask(m as usize) as u128) as u64;
                }
            }
        }
    }
    unreachable!("every degree up to 64 has an irreducible trinomial or pentanomial")
}

static MODULI: [OnceLock<u64>; 65] = [const { OnceLock::new() }; 65];

/// Low bits of the fixed modulus for GF(2^m), the `x^m` term implied.
pub fn modulus_low_bits(m: u32) -> Result<u64> {
    check_degree(m)?;
    Ok(*MODULI[m as usize].get_or_init(|| search_modulus(m)))
}

fn check_degree(m: u32) -> Result<()> {
    if m == 0 || m > 64 {
        return Err(Error::InvalidParameter(format!(
            "field degree {m} outside 1..=64"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------

/// GF(2^m) with its fixed modulus, operating on raw words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2m {
    m: u32,
    low: u64,
    mask: u64,
}

impl Gf2m {
    pub fn new(m: u32) -> Result<Self> {
        Ok(Gf2m {
            m,
            low: modulus_low_bits(m)?,
            mask: low_mask(m as usize),
        })
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements, when it fits in a u64.
    pub fn order(&self) -> Option<u64> {
        (self.m < 64).then(|| 1u64 << self.m)
    }

    #[inline]
    pub fn contains(&self, a: u64) -> bool {
        a & !self.mask == 0
    }

    /// Shift-and-reduce multiplication.
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let top = self.m - 1;
        let mut a = a;
        let mut b = b;
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            let carry = (a >> top) & 1 == 1;
            a = (a << 1) & self.mask;
            if carry {
                a ^= self.low;
            }
        }
        acc
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via a^(2^m − 2); zero maps to zero.
    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, (1u128 << self.m) - 2)
    }
}

/// An element of GF(2^m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    m: u32,
    bits: u64,
}

impl FieldElem {
    pub fn new(m: u32, bits: u64) -> Result<Self> {
        check_degree(m)?;
        if bits & !low_mask(m as usize) != 0 {
            return Err(Error::ValueOutOfRange {
                value: bits,
                bits: m as usize,
            });
        }
        Ok(FieldElem { m, bits })
    }

    pub fn zero(m: u32) -> Result<Self> {
        Self::new(m, 0)
    }

    pub fn one(m: u32) -> Result<Self> {
        Self::new(m, 1)
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        same_field(self.m, other.m)?;
        Ok(FieldElem {
            m: self.m,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn pow(&self, e: u128) -> FieldElem {
        let f = Gf2m::new(self.m).expect("degree validated at construction");
        FieldElem {
            m: self.m,
            bits: f.pow(self.bits, e),
        }
    }

    pub fn inverse(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        let f = Gf2m::new(self.m).expect("degree validated at construction");
        Some(FieldElem {
            m: self.m,
            bits: f.inv(self.bits),
        })
    }
}

fn same_field(a: u32, b: u32) -> Result<()> {
    if a != b {
        return Err(Error::FieldMismatch(a, b));
    }
    Ok(())
}

/// Product in GF(2^m) under the fixed modulus.
pub fn gf_mul(a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
    same_field(a.m, b.m)?;
    let f = Gf2m::new(a.m)?;
    Ok(FieldElem {
        m: a.m,
        bits: f.mul(a.bits, b.bits),
    })
}

// ---------------------------------------------------------------------------

/// A polynomial over GF(2^base_m); `coeffs[i]` is the coefficient of `X^i`.
/// Trailing zero coefficients are always trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    base_m: u32,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(base_m: u32, coeffs: Vec<u64>) -> Result<Self> {
        check_degree(base_m)?;
        let mask = low_mask(base_m as usize);
        if let Some(&bad) = coeffs.iter().find(|&&c| c & !mask != 0) {
            return Err(Error::ValueOutOfRange {
                value: bad,
                bits: base_m as usize,
            });
        }
        let mut p = Poly { base_m, coeffs };
        p.trim();
        Ok(p)
    }

    pub fn zero(base_m: u32) -> Result<Self> {
        Self::new(base_m, Vec::new())
    }

    pub fn constant(c: &FieldElem) -> Poly {
        let mut p = Poly {
            base_m: c.m,
            coeffs: vec![c.bits],
        };
        p.trim();
        p
    }

    /// `X^d`.
    pub fn monomial(base_m: u32, d: usize) -> Result<Self> {
        let mut coeffs = vec![0u64; d + 1];
        coeffs[d] = 1;
        Self::new(base_m, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn base_degree(&self) -> u32 {
        self.base_m
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn field(&self) -> Gf2m {
        Gf2m::new(self.base_m).expect("degree validated at construction")
    }

    fn check(&self, other: &Poly) -> Result<()> {
        same_field(self.base_m, other.base_m)
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) ^ other.coeff(i)).collect();
        let mut p = Poly {
            base_m: self.base_m,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.base_m);
        }
        let f = self.field();
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] ^= f.mul(a, b);
            }
        }
        let mut p = Poly {
            base_m: self.base_m,
            coeffs: out,
        };
        p.trim();
        Ok(p)
    }

    pub fn scale(&self, c: u64) -> Poly {
        let f = self.field();
        let mut p = Poly {
            base_m: self.base_m,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        };
        p.trim();
        p
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check(divisor)?;
        let dd = divisor.degree().ok_or(Error::ZeroModulus)?;
        let f = self.field();
        let lead_inv = f.inv(divisor.coeffs[dd]);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = rem[top];
            if c != 0 {
                let factor = f.mul(c, lead_inv);
                let shift = top - dd;
                quot[shift] = factor;
                for (i, &d) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] ^= f.mul(factor, d);
                }
            }
            rem.pop();
        }
        let mut q = Poly {
            base_m: self.base_m,
            coeffs: quot,
        };
        q.trim();
        let mut r = Poly {
            base_m: self.base_m,
            coeffs: rem,
        };
        r.trim();
        Ok((q, r))
    }

    pub fn rem(&self, modulus: &Poly) -> Result<Poly> {
        Ok(self.div_rem(modulus)?.1)
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly) -> Result<Poly> {
        self.mul(other)?.rem(modulus)
    }

    /// Formal derivative; only odd-degree terms survive in characteristic 2.
    pub fn derivative(&self) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();
        let mut p = Poly {
            base_m: self.base_m,
            coeffs,
        };
        p.trim();
        p
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        self.check(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let lead = *a.coeffs.last().expect("nonzero");
        let f = self.field();
        Ok(a.scale(f.inv(lead)))
    }

    /// Frobenius-style power `self^(2^s) mod modulus` by repeated squaring.
    fn square_mod(&self, modulus: &Poly) -> Result<Poly> {
        let f = self.field();
        let mut coeffs = vec![0u64; self.coeffs.len().max(1) * 2];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = f.mul(c, c);
        }
        let mut sq = Poly {
            base_m: self.base_m,
            coeffs,
        };
        sq.trim();
        sq.rem(modulus)
    }
}

/// `F^e mod g` by square-and-multiply over the bits of `e`.
pub fn poly_mod_pow(base: &Poly, e: &BigUint, g: &Poly) -> Result<Poly> {
    base.check(g)?;
    match g.degree() {
        None | Some(0) => return Err(Error::ZeroModulus),
        _ => {}
    }
    let reduced = base.rem(g)?;
    let mut acc = Poly::constant(&FieldElem::one(base.base_m)?);
    for bit in (0..e.bits()).rev() {
        acc = acc.square_mod(g)?;
        if e.bit(bit) {
            acc = acc.mul_mod(&reduced, g)?;
        }
    }
    Ok(acc)
}

/// Horner evaluation of `F` at `z`.
pub fn poly_eval(poly: &Poly, z: &FieldElem) -> Result<FieldElem> {
    same_field(poly.base_m, z.m)?;
    let f = poly.field();
    let bits = poly
        .coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| f.mul(acc, z.bits) ^ c);
    Ok(FieldElem { m: z.m, bits })
}

/// Cheap necessary conditions: nonzero constant term and squarefree.
fn passes_prefilter(g: &Poly) -> Result<bool> {
    if g.coeff(0) == 0 {
        return Ok(false);
    }
    Ok(g.gcd(&g.derivative())?.degree() == Some(0))
}

/// Ben-Or: `g` of degree m is irreducible iff gcd(X^(q^i) − X, g) = 1 for
/// every i ≤ m/2.
fn ben_or(g: &Poly, m: usize) -> Result<bool> {
    let x = Poly::monomial(g.base_m, 1)?;
    let mut h = x.clone();
    for _ in 1..=m / 2 {
        for _ in 0..g.base_m {
            h = h.square_mod(g)?;
        }
        let diff = h.add(&x)?;
        if diff.is_zero() || g.gcd(&diff)?.degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_irreducible(g: &Poly) -> Result<bool> {
    let m = match g.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(d) => d,
    };
    Ok(passes_prefilter(g)? && ben_or(g, m)?)
}

/// Work the ordered search may spend before switching to seeded random
/// candidates, in units of one field multiplication (a full test of a
/// degree-m candidate over GF(2^d) costs about m³·d/2).
pub const LEX_SEARCH_BUDGET: u64 = 1 << 24;

/// A deterministic monic irreducible polynomial of degree `m` over
/// GF(2^q_degree).
///
/// Candidates are first visited in lexicographic order of the coefficient
/// vector read from the top (the constant term is the least significant
/// digit), which yields the lexicographically first irreducible whenever it
/// is reached within [`LEX_SEARCH_BUDGET`]. Some degrees start with long
/// runs of reducible affine polynomials (degree 16 over GF(2^8) needs about
/// 2^24 candidates), so past the budget the search draws candidates from a
/// ChaCha stream seeded by `(m, q_degree)`.
pub fn find_irreducible(m: usize, q_degree: u32) -> Result<Poly> {
    if m == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    check_degree(q_degree)?;
    if m == 1 {
        return Poly::monomial(q_degree, 1);
    }
    let digit_mask = low_mask(q_degree as usize);
    let monic = |lower: &[u64]| {
        let mut coeffs = lower.to_vec();
        coeffs.push(1);
        Poly::new(q_degree, coeffs)
    };
    let mut lower = vec![0u64; m];
    let cost = (m as u64).pow(3) * q_degree as u64 / 2;
    let mut spent = 0u64;
    while spent < LEX_SEARCH_BUDGET {
        let candidate = monic(&lower)?;
        if passes_prefilter(&candidate)? {
            spent += cost;
            if ben_or(&candidate, m)? {
                return Ok(candidate);
            }
        }
        // advance the counter, constant term first
        let mut i = 0;
        loop {
            if i == m {
                unreachable!("irreducible polynomials of every degree exist");
            }
            if lower[i] == digit_mask {
                lower[i] = 0;
                i += 1;
            } else {
                lower[i] += 1;
                break;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(((m as u64) << 8) | q_degree as u64);
    loop {
        for c in lower.iter_mut() {
            *c = rng.gen::<u64>() & digit_mask;
        }
        let candidate = monic(&lower)?;
        if is_irreducible(&candidate)? {
            return Ok(candidate);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(m: u32, v: u64) -> FieldElem {
        FieldElem::new(m, v).unwrap()
    }

    #[test]
    fn small_moduli_match_known_values() {
        assert_eq!(modulus_low_bits(2).unwrap(), 0b11); // x^2+x+1
        assert_eq!(modulus_low_bits(3).unwrap(), 0b011); // x^3+x+1
        assert_eq!(modulus_low_bits(4).unwrap(), 0b0011); // x^4+x+1
        // no irreducible trinomial of degree 8
        assert_eq!(modulus_low_bits(8).unwrap().count_ones(), 4);
    }

    #[test]
    fn moduli_are_irreducible() {
        for m in 2..=12u32 {
            let low = modulus_low_bits(m).unwrap();
            let mut coeffs: Vec<u64> = (0..m).map(|j| (low >> j) & 1).collect();
            coeffs.push(1);
            let p = Poly::new(1, coeffs).unwrap();
            assert!(is_irreducible(&p).unwrap(), "m = {m}");
        }
        // all 64 degrees resolve
        for m in 1..=64 {
            modulus_low_bits(m).unwrap();
        }
    }

    #[test]
    fn mul_examples() {
        let a = fe(4, 0b1011);
        assert_eq!(gf_mul(&a, &fe(4, 1)).unwrap(), a);
        assert_eq!(gf_mul(&a, &fe(4, 0)).unwrap(), fe(4, 0));
        // GF(4): x·x = x+1
        assert_eq!(gf_mul(&fe(2, 0b10), &fe(2, 0b10)).unwrap(), fe(2, 0b11));
        assert_eq!(
            gf_mul(&fe(2, 1), &fe(3, 1)),
            Err(Error::FieldMismatch(2, 3))
        );
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for m in 1..=8u32 {
            let f = Gf2m::new(m).unwrap();
            for a in 1..(1u64 << m) {
                let inv = f.pow(a, (1u128 << m) - 2);
                assert_eq!(f.mul(a, inv), 1, "m={m} a={a}");
            }
        }
    }

    #[test]
    fn field_axioms_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [2u32, 3, 4, 8, 17, 64] {
            let f = Gf2m::new(m).unwrap();
            let mask = low_mask(m as usize);
            for _ in 0..1000 {
                let (a, b, c) = (
                    rng.gen::<u64>() & mask,
                    rng.gen::<u64>() & mask,
                    rng.gen::<u64>() & mask,
                );
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            }
        }
    }

    #[test]
    fn find_irreducible_examples() {
        assert_eq!(find_irreducible(1, 1).unwrap(), Poly::new(1, vec![0, 1]).unwrap());
        assert_eq!(
            find_irreducible(2, 1).unwrap(),
            Poly::new(1, vec![1, 1, 1]).unwrap()
        );
        assert_eq!(
            find_irreducible(3, 1).unwrap(),
            Poly::new(1, vec![1, 1, 0, 1]).unwrap()
        );
    }

    #[test]
    fn search_past_reducible_runs() {
        // lexicographic order from the top reaches these early
        let g = find_irreducible(8, 4).unwrap();
        assert_eq!(g.coeffs(), &[2, 1, 0, 1, 0, 0, 0, 0, 1]);
        let g = find_irreducible(12, 7).unwrap();
        assert_eq!(&g.coeffs()[..3], &[8, 1, 0]);
        // degree 16 starts with affine polynomials, which hits the fallback
        for d in [8u32, 17] {
            let g = find_irreducible(16, d).unwrap();
            assert_eq!(g.degree(), Some(16));
            assert!(g.is_monic());
            assert!(is_irreducible(&g).unwrap());
            assert_eq!(g, find_irreducible(16, d).unwrap());
        }
    }

    #[test]
    fn irreducibility_agrees_with_trial_division() {
        // degree ≤ 3 over GF(4): reducible iff a root exists
        let f = Gf2m::new(2).unwrap();
        for d in 2..=3usize {
            for code in 0..(1u64 << (2 * d)) {
                let mut coeffs: Vec<u64> = (0..d).map(|i| (code >> (2 * i)) & 3).collect();
                coeffs.push(1);
                let p = Poly::new(2, coeffs.clone()).unwrap();
                let has_root = (0..4u64).any(|z| {
                    coeffs.iter().rev().fold(0u64, |acc, &c| f.mul(acc, z) ^ c) == 0
                });
                assert_eq!(is_irreducible(&p).unwrap(), !has_root, "{coeffs:?}");
            }
        }
    }

    #[test]
    fn mod_pow_examples() {
        let g = Poly::new(1, vec![1, 1, 1]).unwrap();
        let x = Poly::monomial(1, 1).unwrap();
        assert_eq!(
            poly_mod_pow(&x, &BigUint::from(2u32), &g).unwrap(),
            Poly::new(1, vec![1, 1]).unwrap()
        );
        let f = Poly::new(1, vec![1, 0, 1, 1]).unwrap();
        assert_eq!(
            poly_mod_pow(&f, &BigUint::from(1u32), &g).unwrap(),
            f.rem(&g).unwrap()
        );
        let c = Poly::constant(&fe(4, 0b0110));
        let g4 = find_irreducible(3, 4).unwrap();
        for e in [0u32, 1, 5, 17] {
            let expect = Poly::constant(&fe(4, 0b0110).pow(e as u128));
            assert_eq!(poly_mod_pow(&c, &BigUint::from(e), &g4).unwrap(), expect);
        }
        assert_eq!(
            poly_mod_pow(&x, &BigUint::from(3u32), &Poly::constant(&fe(1, 1))),
            Err(Error::ZeroModulus)
        );
    }

    #[test]
    fn eval_examples() {
        let c = fe(2, 0b10);
        assert_eq!(poly_eval(&Poly::constant(&c), &fe(2, 1)).unwrap(), c);
        let z = fe(2, 0b11);
        assert_eq!(poly_eval(&Poly::monomial(2, 1).unwrap(), &z).unwrap(), z);
        // X² at x gives x+1 in GF(4)
        assert_eq!(
            poly_eval(&Poly::monomial(2, 2).unwrap(), &fe(2, 0b10)).unwrap(),
            fe(2, 0b11)
        );
        assert!(poly_eval(&Poly::monomial(2, 2).unwrap(), &fe(3, 1)).is_err());
    }

    fn random_poly(rng: &mut ChaCha8Rng, m: u32, deg: usize) -> Poly {
        let mask = low_mask(m as usize);
        Poly::new(m, (0..=deg).map(|_| rng.gen::<u64>() & mask).collect()).unwrap()
    }

    #[test]
    fn mod_pow_adds_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = find_irreducible(4, 3).unwrap();
        for _ in 0..40 {
            let f = random_poly(&mut rng, 3, 5);
            let a: u64 = rng.gen_range(0..200);
            let b: u64 = rng.gen_range(0..200);
            let lhs = poly_mod_pow(&f, &BigUint::from(a + b), &g).unwrap();
            let rhs = poly_mod_pow(&f, &BigUint::from(a), &g)
                .unwrap()
                .mul_mod(&poly_mod_pow(&f, &BigUint::from(b), &g).unwrap(), &g)
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn frobenius_powers_are_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = find_irreducible(5, 4).unwrap();
        for _ in 0..40 {
            let f1 = random_poly(&mut rng, 4, 6);
            let f2 = random_poly(&mut rng, 4, 6);
            let e = BigUint::from(1u32) << rng.gen_range(0..80usize);
            let lhs = poly_mod_pow(&f1.add(&f2).unwrap(), &e, &g).unwrap();
            let rhs = poly_mod_pow(&f1, &e, &g)
                .unwrap()
                .add(&poly_mod_pow(&f2, &e, &g).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn div_rem_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a = random_poly(&mut rng, 5, 9);
            let mut b = random_poly(&mut rng, 5, 4);
            if b.is_zero() {
                b = Poly::monomial(5, 1).unwrap();
            }
            let (q, r) = a.div_rem(&b).unwrap();
            assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
            assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        }
    }
}
