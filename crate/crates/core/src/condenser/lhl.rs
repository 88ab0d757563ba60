//! Multiply-and-truncate hashing in GF(2^n): h_β(x) keeps the low r bits of
//! β·x. Seeds are all field elements, so D = 2^n.

use crate::error::{Error, Result};
use crate::field::Gf2m;
use crate::gf2::{low_mask, F2Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct LhlFamily {
    n: usize,
    r: usize,
    kappa: usize,
    eps: f64,
    field: Gf2m,
}

/// Low `r` bits of β·x in GF(2^n).
pub fn lhl_eval(n: usize, r: usize, x: u64, beta: u64) -> Result<u64> {
    if r > n {
        return Err(Error::InvalidParameter(format!("r = {r} exceeds n = {n}")));
    }
    let f = Gf2m::new(n as u32)?;
    if !f.contains(x) || !f.contains(beta) {
        return Err(Error::ValueOutOfRange {
            value: x.max(beta),
            bits: n,
        });
    }
    Ok(f.mul(beta, x) & low_mask(r))
}

impl LhlFamily {
    /// Accepts only output lengths with r ≥ κ + 2·log₂(1/ε).
    pub fn new(n: usize, r: usize, kappa: usize, eps: f64) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::Unsupported(format!(
                "n = {n}: the seed count 2^n must fit in 63 bits"
            )));
        }
        if r > n {
            return Err(Error::InvalidParameter(format!("r = {r} exceeds n = {n}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
        }
        let need = kappa as f64 + 2.0 * (1.0 / eps).log2();
        if (r as f64) < need - 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "r = {r} below κ + 2log₂(1/ε) = {need:.3}"
            )));
        }
        Ok(LhlFamily {
            n,
            r,
            kappa,
            eps,
            field: Gf2m::new(n as u32)?,
        })
    }

    /// Smallest admissible r for the given entropy and error.
    pub fn min_output_bits(kappa: usize, eps: f64) -> usize {
        (kappa as f64 + 2.0 * (1.0 / eps).log2() - 1e-9).ceil() as usize
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seeds(&self) -> u64 {
        1u64 << self.n
    }

    #[inline]
    pub fn eval(&self, x: u64, beta: u64) -> u64 {
        self.field.mul(beta, x) & low_mask(self.r)
    }

    pub fn matrix(&self, beta: u64) -> Result<F2Matrix> {
        if beta >= self.seeds() {
            return Err(Error::SeedOutOfRange {
                seed: beta,
                seeds: self.seeds(),
            });
        }
        let mut rows = vec![0u64; self.r];
        for j in 0..self.n {
            let col = self.eval(1u64 << j, beta);
            for (i, row) in rows.iter_mut().enumerate() {
                *row |= ((col >> i) & 1) << j;
            }
        }
        F2Matrix::new(self.n, rows)
    }
}
