//! Iterative k-sparse reconstruction from a sketch.

mod engine;
mod report;

pub use engine::{
    end_to_end, recover_deterministic, recover_randomized, Recovery, RecoveryOutcome,
};
pub use report::{l1_error, l1_tail, Report};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gf2::F2Matrix;
use crate::sketch::SparseVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Deterministic,
    Randomized,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Deterministic => "det",
            Mode::Randomized => "rand",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryConfig {
    pub k: usize,
    /// Condenser error the family was built for.
    pub eps: f64,
    /// Iteration count; `None` picks ⌈log₂(N·L)⌉ + 2.
    pub s0: Option<usize>,
    /// Magnitude bound L of the integer signal.
    pub mag_bound: f64,
    pub mode: Mode,
    /// Seeds per multiset in randomized mode; `None` picks the default.
    pub q: Option<usize>,
    pub eta: f64,
    /// Relative error floor; `None` means 1/(4NL).
    pub nu: Option<f64>,
    pub rng_seed: u64,
}

pub const DEFAULT_EPS: f64 = 1.0 / 16.0;
pub const DEFAULT_MAG_BOUND: f64 = (1u64 << 20) as f64;

impl RecoveryConfig {
    pub fn deterministic(k: usize) -> Self {
        RecoveryConfig {
            k,
            eps: DEFAULT_EPS,
            s0: None,
            mag_bound: DEFAULT_MAG_BOUND,
            mode: Mode::Deterministic,
            q: None,
            eta: 0.1,
            nu: None,
            rng_seed: 0,
        }
    }

    pub fn randomized(k: usize, rng_seed: u64) -> Self {
        RecoveryConfig {
            mode: Mode::Randomized,
            rng_seed,
            ..Self::deterministic(k)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {} outside (0, 1)", self.eps)));
        }
        if self.s0 == Some(0) {
            return Err(Error::InvalidParameter("s0 must be at least 1".into()));
        }
        if self.q == Some(0) {
            return Err(Error::InvalidParameter("q must be at least 1".into()));
        }
        if self.mag_bound.is_nan() || self.mag_bound < 1.0 {
            return Err(Error::InvalidParameter("L must be at least 1".into()));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {} outside (0, 1)", self.eta)));
        }
        Ok(())
    }

    /// ⌈log₂(N·L)⌉ + 2 unless set explicitly.
    pub fn resolved_s0(&self, n: usize) -> usize {
        self.s0
            .unwrap_or_else(|| n + self.mag_bound.log2().ceil().max(0.0) as usize + 2)
    }

    /// ε′ = ε/2.
    pub fn eps_prime(&self) -> f64 {
        self.eps / 2.0
    }

    /// ⌈(4/ε′²)·ln(3·s0/η)⌉ unless set explicitly.
    pub fn resolved_q(&self, n: usize) -> usize {
        self.q.unwrap_or_else(|| {
            let e = self.eps_prime();
            let s0 = self.resolved_s0(n) as f64;
            ((4.0 / (e * e)) * (3.0 * s0 / self.eta).ln()).ceil() as usize
        })
    }

    pub fn resolved_nu(&self, n: usize) -> f64 {
        self.nu
            .unwrap_or_else(|| 1.0 / (4.0 * 2f64.powi(n as i32) * self.mag_bound))
    }
}

/// Keeps the k largest-magnitude entries; ties go to the smaller index.
pub fn hk_truncate(x: &SparseVec, k: usize) -> SparseVec {
    if x.nnz() <= k {
        return x.clone();
    }
    let mut order: Vec<(u64, f64)> = x.entries().to_vec();
    order.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    order.truncate(k);
    SparseVec::from_pairs(order)
}

/// Dense variant of [`hk_truncate`].
pub fn hk_truncate_dense(x: &[f64], k: usize) -> SparseVec {
    hk_truncate(&SparseVec::from_dense(x), k)
}

/// Bit b of the result is set iff |y_b(j)| ≥ |y_0(j)|/2; `rows` holds the
/// n+1 residual rows of one seed, each of length 2^r.
pub fn search(j: u64, rows: &[f64], n: usize, r: usize) -> u64 {
    let size = 1usize << r;
    let head = rows[j as usize].abs() / 2.0;
    (1..=n).fold(0u64, |acc, b| {
        if rows[b * size + j as usize].abs() >= head {
            acc | (1u64 << (b - 1))
        } else {
            acc
        }
    })
}

/// Indices of the `count` largest nonzero |values|, ties to the smaller index.
pub(crate) fn top_buckets(values: &[f64], count: usize) -> Vec<u64> {
    let mut idx: Vec<u64> = (0..values.len() as u64)
        .filter(|&j| values[j as usize] != 0.0)
        .collect();
    idx.sort_by(|&a, &b| {
        values[b as usize]
            .abs()
            .total_cmp(&values[a as usize].abs())
            .then(a.cmp(&b))
    });
    idx.truncate(count);
    idx
}

/// Candidate update Δ from one seed's residual rows.
pub fn estimate(m: &F2Matrix, rows: &[f64], n: usize, k: usize) -> SparseVec {
    let r = m.num_rows();
    let size = 1usize << r;
    let head = &rows[..size];
    let top = top_buckets(head, 2 * k);
    let mut members = top.clone();
    members.sort_unstable();
    let mut delta = BTreeMap::new();
    for &j in &top {
        let u = search(j, rows, n, r);
        let h = m.apply(u);
        if members.binary_search(&h).is_ok() {
            delta.insert(u, head[h as usize]);
        }
    }
    SparseVec::from_pairs(delta)
}

/// Nearest integer, halves away from zero; zeros dropped.
pub fn round_to_integers(x: &SparseVec) -> SparseVec {
    SparseVec::from_pairs(x.iter().map(|&(i, v)| (i, v.round())))
}
