//! Random linear families, regenerated until the expansion check passes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::verify::{verify_expansion_matrices, VerifyMode};
use super::{Backend, LinearCondenser};
use crate::error::{Error, Result};
use crate::gf2::{low_mask, F2Matrix};

/// Families regenerated at most this many times before giving up.
pub const MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedFamily {
    pub k: usize,
    pub eps: f64,
    pub seed: u64,
    pub matrices: Vec<F2Matrix>,
}

fn random_full_rank(rng: &mut ChaCha8Rng, n: usize, r: usize) -> F2Matrix {
    let mask = low_mask(n);
    loop {
        let rows = (0..r).map(|_| rng.gen::<u64>() & mask).collect();
        let m = F2Matrix::new(n, rows).expect("n ≤ 64");
        if m.rank() == r {
            return m;
        }
    }
}

/// `seeds` random full-rank r×n maps whose associated graph passed
/// `verify_expansion` at (k, eps) under `mode`. Deterministic in `seed`.
pub fn certified_random_family(
    n: usize,
    r: usize,
    seeds: u64,
    k: usize,
    eps: f64,
    seed: u64,
    mode: VerifyMode,
) -> Result<LinearCondenser> {
    if n == 0 || n > 63 {
        return Err(Error::Unsupported(format!("n = {n} outside 1..=63")));
    }
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!("r = {r} outside 1..={n}")));
    }
    if seeds == 0 {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    if k == 0 || (1u128 << r) < 4 * k as u128 {
        return Err(Error::InvalidParameter(format!(
            "2^r = {} is below 4k = {}",
            1u128 << r,
            4 * k
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for attempt in 0..MAX_ATTEMPTS {
        let matrices: Vec<F2Matrix> = (0..seeds).map(|_| random_full_rank(&mut rng, n, r)).collect();
        let mode = match mode {
            VerifyMode::Sampled { trials, seed: s } => VerifyMode::Sampled {
                trials,
                seed: s ^ (attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
            },
            m => m,
        };
        let report = verify_expansion_matrices(n, &matrices, k, eps, mode)?;
        if report.pass {
            return Ok(LinearCondenser {
                n,
                r,
                seeds,
                backend: Backend::Certified(CertifiedFamily {
                    k,
                    eps,
                    seed,
                    matrices,
                }),
            });
        }
        best = best.max(report.worst_ratio);
    }
    Err(Error::CertificationFailed {
        n,
        r,
        seeds,
        k,
        eps,
        attempts: MAX_ATTEMPTS,
        best_ratio: best,
    })
}
