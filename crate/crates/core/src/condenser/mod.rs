//! Seeded linear hash families h: F₂ⁿ × [D] → F₂ʳ.

mod descriptor;
mod guv;
mod lhl;
mod random;
mod verify;

pub use descriptor::{read_descriptor, write_descriptor};
pub use guv::{guv_params, GuvCondenser, GuvParams};
pub use lhl::{lhl_eval, LhlFamily};
pub use random::{certified_random_family, CertifiedFamily, MAX_ATTEMPTS};
pub use verify::{
    exhaustive_cost, neighbor_count, verify_expansion, verify_universality, ExpansionReport,
    UniversalityReport, VerifyMode, DEFAULT_BUDGET, DEFAULT_TRIALS,
};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, F2Matrix};

#[derive(Clone, Debug, PartialEq)]
pub enum Backend {
    Guv(GuvCondenser),
    Lhl(LhlFamily),
    Certified(CertifiedFamily),
}

/// A family of D linear maps F₂ⁿ → F₂ʳ indexed by seed.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCondenser {
    pub(crate) n: usize,
    pub(crate) r: usize,
    pub(crate) seeds: u64,
    pub(crate) backend: Backend,
}

impl LinearCondenser {
    pub fn guv(params: GuvParams) -> Result<Self> {
        if params.r_bits > params.n {
            return Err(Error::Unsupported(format!(
                "output length {} exceeds input length {}",
                params.r_bits, params.n
            )));
        }
        let (n, r, seeds) = (params.n, params.r_bits, params.q);
        Ok(LinearCondenser {
            n,
            r,
            seeds,
            backend: Backend::Guv(GuvCondenser::new(params)?),
        })
    }

    pub fn lhl(n: usize, r: usize, kappa: usize, eps: f64) -> Result<Self> {
        let family = LhlFamily::new(n, r, kappa, eps)?;
        Ok(LinearCondenser {
            n,
            r,
            seeds: family.seeds(),
            backend: Backend::Lhl(family),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Seed count D.
    pub fn num_seeds(&self) -> u64 {
        self.seeds
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn backend_name(&self) -> &'static str {
        match self.backend {
            Backend::Guv(_) => "guv",
            Backend::Lhl(_) => "lhl",
            Backend::Certified(_) => "certified",
        }
    }

    fn check_seed(&self, t: u64) -> Result<()> {
        if t >= self.seeds {
            return Err(Error::SeedOutOfRange {
                seed: t,
                seeds: self.seeds,
            });
        }
        Ok(())
    }

    /// h(x, t) on raw words.
    pub fn eval_word(&self, x: u64, t: u64) -> Result<u64> {
        self.check_seed(t)?;
        match &self.backend {
            Backend::Guv(g) => g.eval(x, t),
            Backend::Lhl(l) => Ok(l.eval(x, t)),
            Backend::Certified(c) => Ok(c.matrices[t as usize].apply(x)),
        }
    }

    pub fn eval(&self, x: &BitVec, t: u64) -> Result<BitVec> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        BitVec::from_int(self.r, self.eval_word(x.to_int(), t)?)
    }

    /// The r×n matrix of h(·, t).
    pub fn matrix(&self, t: u64) -> Result<F2Matrix> {
        self.check_seed(t)?;
        match &self.backend {
            Backend::Guv(g) => g.matrix(t),
            Backend::Lhl(l) => l.matrix(t),
            Backend::Certified(c) => Ok(c.matrices[t as usize].clone()),
        }
    }

    /// All D matrices in seed order.
    pub fn matrices(&self) -> Result<Vec<F2Matrix>> {
        (0..self.seeds).map(|t| self.matrix(t)).collect()
    }
}

/// The r×n matrix of h(·, t).
pub fn matrix(cond: &LinearCondenser, t: u64) -> Result<F2Matrix> {
    cond.matrix(t)
}
