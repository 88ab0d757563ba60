//! Brute-force checks of the expansion and universality properties.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LinearCondenser;
use crate::error::{Error, Result};
use crate::gf2::F2Matrix;

/// Default cap on the number of subsets an exhaustive check may visit.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Default number of random subsets per size class.
pub const DEFAULT_TRIALS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive { budget: u128 },
    Sampled { trials: usize, seed: u64 },
}

impl VerifyMode {
    pub fn exhaustive() -> Self {
        VerifyMode::Exhaustive {
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn sampled(seed: u64) -> Self {
        VerifyMode::Sampled {
            trials: DEFAULT_TRIALS,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub pass: bool,
    /// Minimum of |Γ(S)| / (D·|S|) over the sets examined.
    pub worst_ratio: f64,
    /// A set attaining the worst ratio, reported only on failure.
    pub witness: Option<Vec<u64>>,
    pub sets_checked: u64,
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of subsets of size 1..=k_max drawn from 2^n points.
pub fn exhaustive_cost(n: usize, k_max: usize) -> u128 {
    let pts = 1u128 << n;
    (1..=k_max as u128).fold(0u128, |acc, s| acc.saturating_add(binom(pts, s)))
}

/// Advances `idx` to the next s-subset of 0..points in lexicographic order.
fn next_combination(idx: &mut [u64], points: u64) -> bool {
    let s = idx.len();
    for i in (0..s).rev() {
        if idx[i] < points - (s - i) as u64 {
            idx[i] += 1;
            for j in i + 1..s {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Distinct neighbors of `set`, summed over seeds.
pub fn neighbor_count(matrices: &[F2Matrix], set: &[u64]) -> u64 {
    let mut buf = Vec::with_capacity(set.len());
    matrices
        .iter()
        .map(|m| {
            buf.clear();
            buf.extend(set.iter().map(|&x| m.apply(x)));
            buf.sort_unstable();
            buf.dedup();
            buf.len() as u64
        })
        .sum()
}

struct Tracker {
    seeds: u64,
    threshold: f64,
    worst: f64,
    worst_set: Vec<u64>,
    checked: u64,
}

impl Tracker {
    fn record(&mut self, gamma: u64, set: &[u64]) {
        self.checked += 1;
        let ratio = gamma as f64 / (self.seeds as f64 * set.len() as f64);
        if ratio < self.worst {
            self.worst = ratio;
            self.worst_set = set.to_vec();
        }
    }

    fn finish(self) -> ExpansionReport {
        let pass = self.worst >= self.threshold;
        ExpansionReport {
            pass,
            worst_ratio: self.worst,
            witness: (!pass).then_some(self.worst_set),
            sets_checked: self.checked,
        }
    }
}

/// Checks |Γ(S)| ≥ (1−ε)·D·|S| for sets of size at most `k_max`.
pub fn verify_expansion(
    cond: &LinearCondenser,
    k_max: usize,
    eps: f64,
    mode: VerifyMode,
) -> Result<ExpansionReport> {
    let matrices = cond.matrices()?;
    verify_expansion_matrices(cond.n(), &matrices, k_max, eps, mode)
}

pub(crate) fn verify_expansion_matrices(
    n: usize,
    matrices: &[F2Matrix],
    k_max: usize,
    eps: f64,
    mode: VerifyMode,
) -> Result<ExpansionReport> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let mut tracker = Tracker {
        seeds: matrices.len() as u64,
        threshold: 1.0 - eps,
        worst: 1.0,
        worst_set: Vec::new(),
        checked: 0,
    };
    let points = 1u64 << n;
    match mode {
        VerifyMode::Exhaustive { budget } => {
            let needed = exhaustive_cost(n, k_max);
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            // images[t][x]
            let images: Vec<Vec<u64>> = matrices
                .iter()
                .map(|m| (0..points).map(|x| m.apply(x)).collect())
                .collect();
            let mut set = Vec::with_capacity(k_max);
            let mut buf = Vec::with_capacity(k_max);
            let size = (k_max as u64).min(points) as usize;
            for s in 1..=size {
                let mut idx: Vec<u64> = (0..s as u64).collect();
                loop {
                    set.clear();
                    set.extend_from_slice(&idx);
                    let gamma: u64 = images
                        .iter()
                        .map(|img| {
                            buf.clear();
                            buf.extend(set.iter().map(|&x| img[x as usize]));
                            buf.sort_unstable();
                            buf.dedup();
                            buf.len() as u64
                        })
                        .sum();
                    tracker.record(gamma, &set);
                    if !next_combination(&mut idx, points) {
                        break;
                    }
                }
            }
        }
        VerifyMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut set = Vec::with_capacity(k_max);
            for s in 1..=k_max {
                if s as u64 > points {
                    break;
                }
                for _ in 0..trials {
                    set.clear();
                    set.extend(
                        index::sample(&mut rng, points as usize, s)
                            .into_iter()
                            .map(|i| i as u64),
                    );
                    tracker.record(neighbor_count(matrices, &set), &set);
                }
            }
        }
    }
    Ok(tracker.finish())
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniversalityReport {
    pub n: usize,
    pub r: usize,
    /// Largest number of seeds on which two distinct inputs collide.
    pub max_collisions: u64,
    /// `max_collisions / 2^n`.
    pub max_collision_prob: f64,
    /// Whether the maximum is at most 2^−r.
    pub pass: bool,
}

/// Exhaustive collision count for the multiply-and-truncate family.
///
/// β·x and β·x′ agree on their low r bits exactly when β·(x⊕x′) does, so
/// every pair is covered by scanning the nonzero differences.
pub fn verify_universality(n: usize, r: usize, budget: u128) -> Result<UniversalityReport> {
    if n == 0 || n > 20 {
        return Err(Error::Unsupported(format!(
            "universality check needs 1 ≤ n ≤ 20, got {n}"
        )));
    }
    if r > n {
        return Err(Error::InvalidParameter(format!("r = {r} exceeds n = {n}")));
    }
    let needed = 1u128 << (2 * n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let field = crate::field::Gf2m::new(n as u32)?;
    let mask = crate::gf2::low_mask(r);
    let seeds = 1u64 << n;
    let max_collisions = (1..seeds)
        .map(|delta| {
            (0..seeds)
                .filter(|&beta| field.mul(beta, delta) & mask == 0)
                .count() as u64
        })
        .max()
        .unwrap_or(0);
    Ok(UniversalityReport {
        n,
        r,
        max_collisions,
        max_collision_prob: max_collisions as f64 / seeds as f64,
        pass: max_collisions <= 1u64 << (n - r),
    })
}
