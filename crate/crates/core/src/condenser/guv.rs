//! The algebraic condenser: the input bits are the coefficients of a
//! polynomial F over F_q, and the seed picks the evaluation point for
//! F, F^u, …, F^(u^(ℓ−1)) taken modulo a fixed irreducible g.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{find_irreducible, poly_eval, poly_mod_pow, FieldElem, Gf2m, Poly};
use crate::gf2::{low_mask, F2Matrix};

/// Parameters of the algebraic condenser for characteristic 2.
#[derive(Clone, Debug, PartialEq)]
pub struct GuvParams {
    pub alpha: f64,
    pub n: usize,
    pub kappa: usize,
    pub eps: f64,
    pub u: u64,
    pub ell: usize,
    pub q: u64,
    pub d: u32,
    pub r_bits: usize,
    pub g: Poly,
}

impl GuvParams {
    /// (n−1)(u−1)ℓ/q.
    pub fn error_bound(&self) -> f64 {
        (self.n as f64 - 1.0) * (self.u as f64 - 1.0) * self.ell as f64 / self.q as f64
    }
}

fn next_pow2_at_least(x: f64) -> Option<(u64, u32)> {
    let mut v = 1u64;
    let mut log = 0u32;
    while (v as f64) < x {
        if log == 63 {
            return None;
        }
        v <<= 1;
        log += 1;
    }
    Some((v, log))
}

/// Smallest admissible u and q for the requested entropy and error.
pub fn guv_params(alpha: f64, n: usize, kappa: usize, eps: f64) -> Result<GuvParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    if kappa < 1 || kappa > n {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} outside 1..={n}"
        )));
    }
    if n > 64 {
        return Err(Error::TooWide(n));
    }
    let u0 = (8.0 * n as f64 * kappa as f64 / eps).powf(1.0 / alpha);
    // u = 1 would make every block redundant, so at least 2
    let (u, log_u) = next_pow2_at_least(u0.max(2.0))
        .ok_or_else(|| Error::Unsupported(format!("u₀ = {u0} exceeds 2^63")))?;
    let ell = kappa.div_ceil(log_u as usize);
    let q0 = n as f64 * u as f64 * ell as f64 / eps;
    let (q, d) = next_pow2_at_least(q0).ok_or_else(|| {
        Error::Unsupported(format!("field size q₀ = {q0} exceeds the 2^63 seed cap"))
    })?;
    let g = find_irreducible(n, d)?;
    let params = GuvParams {
        alpha,
        n,
        kappa,
        eps,
        u,
        ell,
        q,
        d,
        r_bits: ell * d as usize,
        g,
    };
    assert!(
        params.error_bound() <= eps,
        "error bound {} exceeds eps {eps}",
        params.error_bound()
    );
    Ok(params)
}

/// A GUV instance with `X^(j·u^i) mod g` precomputed for the basis inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct GuvCondenser {
    params: GuvParams,
    field: Gf2m,
    // basis[i][j] = X^(j·u^i) mod g
    basis: Vec<Vec<Poly>>,
}

impl GuvCondenser {
    pub fn new(params: GuvParams) -> Result<Self> {
        if params.r_bits > 64 {
            return Err(Error::TooWide(params.r_bits));
        }
        if params.g.degree() != Some(params.n) || params.g.base_degree() != params.d {
            return Err(Error::InvalidParameter(
                "modulus degree does not match n and q".into(),
            ));
        }
        let field = Gf2m::new(params.d)?;
        let x = Poly::monomial(params.d, 1)?;
        let one = Poly::constant(&FieldElem::one(params.d)?);
        let mut basis = Vec::with_capacity(params.ell);
        let mut exponent = BigUint::from(1u32);
        for _ in 0..params.ell {
            let p = poly_mod_pow(&x, &exponent, &params.g)?;
            let mut row = Vec::with_capacity(params.n);
            let mut acc = one.clone();
            for _ in 0..params.n {
                row.push(acc.clone());
                acc = acc.mul_mod(&p, &params.g)?;
            }
            basis.push(row);
            exponent *= params.u;
        }
        Ok(GuvCondenser {
            params,
            field,
            basis,
        })
    }

    pub fn params(&self) -> &GuvParams {
        &self.params
    }

    fn check_seed(&self, t: u64) -> Result<()> {
        if t >= self.params.q {
            return Err(Error::SeedOutOfRange {
                seed: t,
                seeds: self.params.q,
            });
        }
        Ok(())
    }

    /// Direct evaluation through modular powers of the input polynomial.
    pub fn eval(&self, x: u64, t: u64) -> Result<u64> {
        self.check_seed(t)?;
        let p = &self.params;
        let coeffs = (0..p.n).map(|j| (x >> j) & 1).collect();
        let f = Poly::new(p.d, coeffs)?;
        let z = FieldElem::new(p.d, t)?;
        let mut out = 0u64;
        let mut exponent = BigUint::from(1u32);
        for i in 0..p.ell {
            let fi = poly_mod_pow(&f, &exponent, &p.g)?;
            out |= poly_eval(&fi, &z)?.bits() << (i * p.d as usize);
            exponent *= p.u;
        }
        Ok(out)
    }

    /// The r×n matrix of the seed-`t` map.
    pub fn matrix(&self, t: u64) -> Result<F2Matrix> {
        self.check_seed(t)?;
        let p = &self.params;
        let d = p.d as usize;
        let mut rows = vec![0u64; p.r_bits];
        for (i, block) in self.basis.iter().enumerate() {
            for (j, poly) in block.iter().enumerate() {
                let v = poly
                    .coeffs()
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &c| self.field.mul(acc, t) ^ c);
                for b in 0..d {
                    if (v >> b) & 1 == 1 {
                        rows[i * d + b] |= 1u64 << j;
                    }
                }
            }
        }
        debug_assert!(rows.iter().all(|&r| r & !low_mask(p.n) == 0));
        F2Matrix::new(p.n, rows)
    }
}
