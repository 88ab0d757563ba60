//! Shared fixtures for the criterion benches.

use sht_core::presets::certified_for_recovery;
use sht_core::signal::{generate_signal, to_dense, SignalModel};
use sht_core::{DenseOracle, LinearCondenser, SpectralScale, SparseVec};

/// A certified family for (n, k) with an exactly k-sparse signal on it.
pub struct Fixture {
    pub cond: LinearCondenser,
    pub x: SparseVec,
}

impl Fixture {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        Fixture {
            cond: certified_for_recovery(n, k, seed).expect("family certifies"),
            x: generate_signal(n, k, SignalModel::Exact, 1000, seed).expect("valid signal"),
        }
    }

    /// A fresh oracle, so each iteration's query count starts at zero.
    pub fn oracle(&self) -> DenseOracle {
        let dense = to_dense(self.cond.n(), &self.x).expect("signal fits");
        DenseOracle::from_signal(&dense, SpectralScale::Integer)
    }
}
