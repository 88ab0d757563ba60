use serde::Serialize;

use super::hk_truncate;
use crate::sketch::SparseVec;

/// ‖x − x̃‖₁.
pub fn l1_error(truth: &SparseVec, estimate: &SparseVec) -> f64 {
    truth.l1_distance(estimate)
}

/// ‖x − H_k(x)‖₁.
pub fn l1_tail(truth: &SparseVec, k: usize) -> f64 {
    truth.l1_distance(&hk_truncate(truth, k))
}

/// Summary of one recovery run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub n: usize,
    pub k: usize,
    pub mode: String,
    pub condenser: String,
    pub queries: u64,
    pub seeds_touched: u64,
    pub iterations: usize,
    pub l1_error: f64,
    pub l1_tail: f64,
    /// l1_error / l1_tail; zero for exact recovery, null when the tail is
    /// zero but the recovery is not exact.
    pub ratio: Option<f64>,
    pub exact: bool,
    pub wall_ms: f64,
}

impl Report {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        k: usize,
        mode: &str,
        condenser: &str,
        queries: u64,
        seeds_touched: u64,
        iterations: usize,
        truth: &SparseVec,
        estimate: &SparseVec,
        wall_ms: f64,
    ) -> Self {
        let err = l1_error(truth, estimate);
        let tail = l1_tail(truth, k);
        let exact = estimate == truth;
        let ratio = if exact {
            Some(0.0)
        } else if tail > 0.0 {
            Some(err / tail)
        } else {
            None
        };
        Report {
            n,
            k,
            mode: mode.to_string(),
            condenser: condenser.to_string(),
            queries,
            seeds_touched,
            iterations,
            l1_error: err,
            l1_tail: tail,
            ratio,
            exact,
            wall_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields serialize")
    }
}
