//! Test-signal generation and the text signal format.
//!
//! A signal file holds `n` on line 1, then either `dense` and 2ⁿ values one
//! per line, or `sparse` and `index value` lines.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sketch::SparseVec;
use crate::wht::DenseSignal;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalModel {
    /// Exactly k nonzeros.
    Exact,
    /// k large entries plus an integer tail of ℓ1 mass ⌊tail_l1⌋.
    Noisy { tail_l1: f64 },
}

/// k distinct uniform positions with magnitudes uniform in [1, L] and random
/// signs; the noisy model then adds ⌊F⌋ unit steps at uniformly random
/// positions off the support, each step moving away from zero in a sign fixed
/// per position.
pub fn generate_signal(
    n: usize,
    k: usize,
    model: SignalModel,
    mag_max: u64,
    seed: u64,
) -> Result<SparseVec> {
    if n == 0 || n > 40 {
        return Err(Error::InvalidParameter(format!("n = {n} outside 1..=40")));
    }
    let size = 1u64 << n;
    if k as u64 > size {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds 2^{n}")));
    }
    if mag_max == 0 {
        return Err(Error::InvalidParameter("L must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = index::sample(&mut rng, size as usize, k);
    let mut pairs: Vec<(u64, f64)> = support
        .iter()
        .map(|i| {
            let mag = rng.gen_range(1..=mag_max) as f64;
            (i as u64, if rng.gen::<bool>() { mag } else { -mag })
        })
        .collect();
    if let SignalModel::Noisy { tail_l1 } = model {
        if tail_l1.is_nan() || tail_l1 < 0.0 {
            return Err(Error::InvalidParameter("tail mass must be non-negative".into()));
        }
        let units = tail_l1.floor() as u64;
        if units > 0 && k as u64 == size {
            return Err(Error::InvalidParameter("no room for a tail".into()));
        }
        let taken: BTreeSet<u64> = pairs.iter().map(|p| p.0).collect();
        let mut tail: std::collections::BTreeMap<u64, f64> = Default::default();
        for _ in 0..units {
            let i = loop {
                let i = rng.gen_range(0..size);
                if !taken.contains(&i) {
                    break i;
                }
            };
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let v = tail.entry(i).or_insert(0.0);
            *v += if *v == 0.0 { sign } else { v.signum() };
        }
        pairs.extend(tail);
    }
    Ok(SparseVec::from_pairs(pairs))
}

pub fn to_dense(n: usize, x: &SparseVec) -> Result<DenseSignal> {
    if let Some(&(i, _)) = x.iter().find(|e| e.0 >> n != 0) {
        return Err(Error::ValueOutOfRange { value: i, bits: n });
    }
    DenseSignal::new(n, x.to_dense(1usize << n))
}

pub fn write_signal(n: usize, x: &SparseVec, dense: bool) -> String {
    let mut out = format!("{n}\n");
    if dense {
        out.push_str("dense\n");
        for v in x.to_dense(1usize << n) {
            let _ = writeln!(out, "{v}");
        }
    } else {
        out.push_str("sparse\n");
        for &(i, v) in x.iter() {
            let _ = writeln!(out, "{i} {v}");
        }
    }
    out
}

pub fn read_signal(text: &str) -> Result<(usize, SparseVec)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let (l1, first) = lines.next().ok_or_else(|| bad(1, "empty signal file".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| bad(l1, format!("cannot parse n from {first:?}")))?;
    if n == 0 || n > 40 {
        return Err(bad(l1, format!("n = {n} outside 1..=40")));
    }
    let (l2, kind) = lines.next().ok_or_else(|| bad(2, "missing layout line".into()))?;
    let size = 1u64 << n;
    let x = match kind {
        "dense" => {
            let values = lines
                .map(|(l, v)| v.parse::<f64>().map_err(|_| bad(l, format!("bad value {v:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if values.len() as u64 != size {
                return Err(bad(l2, format!("expected {size} values, found {}", values.len())));
            }
            SparseVec::from_dense(&values)
        }
        "sparse" => {
            let mut seen = BTreeSet::new();
            let mut pairs = Vec::new();
            for (l, line) in lines {
                let mut it = line.split_whitespace();
                let (Some(i), Some(v), None) = (it.next(), it.next(), it.next()) else {
                    return Err(bad(l, "expected `index value`".into()));
                };
                let i: u64 = i.parse().map_err(|_| bad(l, format!("bad index {i:?}")))?;
                let v: f64 = v.parse().map_err(|_| bad(l, format!("bad value {v:?}")))?;
                if i >= size {
                    return Err(bad(l, format!("index {i} outside 0..{size}")));
                }
                if !seen.insert(i) {
                    return Err(bad(l, format!("index {i} repeated")));
                }
                pairs.push((i, v));
            }
            SparseVec::from_pairs(pairs)
        }
        other => return Err(bad(l2, format!("unknown layout {other:?}"))),
    };
    Ok((n, x))
}
