//! Condenser choices used by the CLI, benches and acceptance runs.

use crate::condenser::{certified_random_family, guv_params, LhlFamily, LinearCondenser, VerifyMode};
use crate::error::Result;

/// Seeds in the default certified family.
pub const CERTIFIED_SEEDS: u64 = 8;
/// Expansion error the default certified family is checked at.
pub const CERTIFIED_EPS: f64 = 0.25;
/// Output bits beyond ⌈log₂ 4k⌉ in the default certified family.
pub const CERTIFIED_EXTRA_BITS: usize = 2;

/// min(n, ⌈log₂ 4k⌉ + extra).
pub fn certified_output_bits(n: usize, k: usize, extra: usize) -> usize {
    let log4k = (usize::BITS - (4 * k - 1).leading_zeros()) as usize;
    (log4k + extra).min(n)
}

/// Random family on 4k-sets, sampled certification.
pub fn certified_for_recovery(n: usize, k: usize, seed: u64) -> Result<LinearCondenser> {
    certified_with_seeds(n, k, CERTIFIED_SEEDS, seed)
}

/// [`certified_for_recovery`] with `seeds` seeds instead of the default.
pub fn certified_with_seeds(n: usize, k: usize, seeds: u64, seed: u64) -> Result<LinearCondenser> {
    certified_random_family(
        n,
        certified_output_bits(n, k, CERTIFIED_EXTRA_BITS),
        seeds,
        4 * k,
        CERTIFIED_EPS,
        seed,
        VerifyMode::sampled(certification_seed(seed)),
    )
}

/// Seed of the subset sample used to certify the family built from `seed`.
pub fn certification_seed(seed: u64) -> u64 {
    seed ^ 0x5eed
}

/// Leftover-hash family for sources of 4k points at error ε′.
pub fn lhl_for_recovery(n: usize, k: usize, eps_prime: f64) -> Result<LinearCondenser> {
    let kappa = certified_output_bits(n, k, 0);
    let r = LhlFamily::min_output_bits(kappa, eps_prime).min(n);
    LinearCondenser::lhl(n, r, kappa, eps_prime)
}

/// The algebraic family at α = 8 and ε = 1/2, which stays at desk scale.
pub fn guv_desk(n: usize, kappa: usize) -> Result<LinearCondenser> {
    LinearCondenser::guv(guv_params(8.0, n, kappa, 0.5)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_bits() {
        assert_eq!(certified_output_bits(14, 1, 3), 5);
        assert_eq!(certified_output_bits(14, 4, 3), 7);
        assert_eq!(certified_output_bits(14, 5, 2), 7);
        assert_eq!(certified_output_bits(6, 8, 3), 6);
    }
}
