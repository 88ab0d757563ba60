//! Sparse Walsh–Hadamard recovery from non-adaptive spectral queries.
//!
//! A k-sparse (or nearly sparse) integer signal x over F₂ⁿ is reconstructed
//! from a small set of entries of its Hadamard spectrum x̂. Each seed of a
//! linear lossless condenser hashes F₂ⁿ into 2ʳ buckets; every bucket sum is
//! a coset sum of x and so a sum over a subspace of x̂. An iterative
//! Search / Estimate loop then recovers the heavy coordinates.

pub mod condenser;
pub mod error;
pub mod field;
pub mod gf2;
pub mod presets;
pub mod recover;
pub mod signal;
pub mod sketch;
pub mod wht;

pub use condenser::LinearCondenser;
pub use error::{Error, Result};
pub use gf2::{BitVec, F2Matrix, Subspace};
pub use recover::{end_to_end, Mode, Recovery, RecoveryConfig, Report};
pub use sketch::{plan_queries, QueryPlan, Sketch, SparseVec};
pub use wht::{DenseOracle, SpectralScale, SpectrumOracle};
