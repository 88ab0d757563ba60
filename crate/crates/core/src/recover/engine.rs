use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{estimate, hk_truncate, round_to_integers, Mode, RecoveryConfig};
use crate::condenser::{Backend, LinearCondenser};
use crate::error::{Error, Result};
use crate::gf2::F2Matrix;
use crate::sketch::{build_sketch_from_plan, plan_queries, scatter, LazySketch, Sketch, SparseVec};
use crate::wht::SpectrumOracle;

/// Trace of one reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryOutcome {
    /// The selected iterate x*, before rounding.
    pub estimate: SparseVec,
    /// x⁰ = 0, x¹, …, x^{s₀}.
    pub history: Vec<SparseVec>,
    /// Selection objective ‖Mx − Mx^s‖₁ for each entry of `history`, over
    /// the seeds used for the final choice.
    pub objective: Vec<f64>,
    /// Index into `history` of the returned iterate.
    pub selected: usize,
    /// Seed t₀ picked at each iteration.
    pub chosen_seeds: Vec<u64>,
    pub seeds_touched: usize,
}

impl RecoveryOutcome {
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

/// Per-seed matrix and its n+1 sketch rows, contiguous.
trait SeedSource {
    fn seed(&mut self, t: u64) -> Result<(F2Matrix, Vec<f64>)>;
}

struct DenseSeeds {
    matrices: Vec<F2Matrix>,
    rows: Vec<Vec<f64>>,
}

impl SeedSource for DenseSeeds {
    fn seed(&mut self, t: u64) -> Result<(F2Matrix, Vec<f64>)> {
        Ok((self.matrices[t as usize].clone(), self.rows[t as usize].clone()))
    }
}

impl<O: SpectrumOracle + ?Sized> SeedSource for LazySketch<'_, O> {
    fn seed(&mut self, t: u64) -> Result<(F2Matrix, Vec<f64>)> {
        let (m, rows) = LazySketch::seed(self, t)?;
        Ok((m.clone(), rows.to_vec()))
    }
}

fn negated(x: &SparseVec) -> SparseVec {
    SparseVec::from_pairs(x.iter().map(|&(i, v)| (i, -v)))
}

/// ‖res − M·delta‖₁ given ‖res‖₁ = `base`, touching only the buckets hit.
fn adjusted_l1(res: &[f64], base: f64, m: &F2Matrix, delta: &SparseVec) -> f64 {
    let mut hits: Vec<(u64, f64)> = delta.iter().map(|&(i, v)| (m.apply(i), v)).collect();
    hits.sort_by_key(|h| h.0);
    let mut total = base;
    let mut i = 0;
    while i < hits.len() {
        let j = hits[i].0;
        let mut c = 0.0;
        while i < hits.len() && hits[i].0 == j {
            c += hits[i].1;
            i += 1;
        }
        let y = res[j as usize];
        total += (y - c).abs() - y.abs();
    }
    total
}

fn multiplicities(seeds: &[u64]) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for &t in seeds {
        *out.entry(t).or_insert(0) += 1;
    }
    out
}

struct Residual {
    m: F2Matrix,
    rows: Vec<f64>,
    base: f64,
}

fn residual<S: SeedSource + ?Sized>(src: &mut S, t: u64, x: &SparseVec) -> Result<Residual> {
    let (m, mut rows) = src.seed(t)?;
    scatter(&m, &negated(x), true, &mut rows);
    let size = 1usize << m.num_rows();
    let base = rows[..size].iter().map(|v| v.abs()).sum();
    Ok(Residual { m, rows, base })
}

/// Σ_t c_t·‖y_t − M_t x‖₁ over the judge multiset.
fn objective<S: SeedSource + ?Sized>(
    src: &mut S,
    judges: &BTreeMap<u64, usize>,
    x: &SparseVec,
) -> Result<f64> {
    let mut total = 0.0;
    for (&t, &c) in judges {
        let (m, rows) = src.seed(t)?;
        let size = 1usize << m.num_rows();
        let mut head = rows[..size].to_vec();
        scatter(&m, &negated(x), false, &mut head);
        total += c as f64 * head.iter().map(|v| v.abs()).sum::<f64>();
    }
    Ok(total)
}

/// One pass: Δ for every candidate seed, the seed whose update best fits
/// the judges, and the truncated next iterate.
fn step<S: SeedSource + ?Sized>(
    src: &mut S,
    n: usize,
    k: usize,
    x: &SparseVec,
    candidates: &BTreeMap<u64, usize>,
    judges: &BTreeMap<u64, usize>,
) -> Result<(SparseVec, u64)> {
    let mut cache: BTreeMap<u64, Residual> = BTreeMap::new();
    for &t in candidates.keys().chain(judges.keys()) {
        if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(t) {
            e.insert(residual(src, t, x)?);
        }
    }
    let mut best: Option<(f64, u64, SparseVec)> = None;
    for &t in candidates.keys() {
        let res = &cache[&t];
        let delta = estimate(&res.m, &res.rows, n, k);
        let cost: f64 = judges
            .iter()
            .map(|(t2, &c)| {
                let r2 = &cache[t2];
                c as f64 * adjusted_l1(&r2.rows, r2.base, &r2.m, &delta)
            })
            .sum();
        // strict comparison keeps the smallest seed on ties
        if best.as_ref().is_none_or(|b| cost < b.0) {
            best = Some((cost, t, delta));
        }
    }
    let (_, t0, delta) = best.expect("at least one candidate seed");
    Ok((hk_truncate(&x.add(&delta), k), t0))
}

fn select(objective: &[f64]) -> usize {
    objective
        .iter()
        .enumerate()
        .fold(0, |best, (s, &v)| if v < objective[best] { s } else { best })
}

fn check_shape(sketch: &Sketch, cond: &LinearCondenser) -> Result<()> {
    let shape = (sketch.n, sketch.r, sketch.seeds);
    let want = (cond.n(), cond.r(), cond.num_seeds());
    if shape != want {
        return Err(Error::InvalidParameter(format!(
            "sketch shape (n, r, D) = {shape:?} does not match condenser {want:?}"
        )));
    }
    if !sketch.with_tensor {
        return Err(Error::InvalidParameter(
            "recovery needs the bit-masked rows".into(),
        ));
    }
    Ok(())
}

/// Every seed proposes an update each round and every seed judges it.
pub fn recover_deterministic(
    sketch: &Sketch,
    cond: &LinearCondenser,
    config: &RecoveryConfig,
) -> Result<RecoveryOutcome> {
    config.validate()?;
    check_shape(sketch, cond)?;
    let n = cond.n();
    let d = cond.num_seeds();
    let rows = (0..d)
        .map(|t| (0..=n).flat_map(|b| sketch.block(t, b).iter().copied()).collect())
        .collect();
    let mut src = DenseSeeds {
        matrices: cond.matrices()?,
        rows,
    };
    let all: BTreeMap<u64, usize> = (0..d).map(|t| (t, 1)).collect();
    let s0 = config.resolved_s0(n);
    let mut history = vec![SparseVec::new()];
    let mut chosen = Vec::with_capacity(s0);
    for _ in 0..s0 {
        let (next, t0) = step(&mut src, n, config.k, history.last().unwrap(), &all, &all)?;
        history.push(next);
        chosen.push(t0);
    }
    let objective = history
        .iter()
        .map(|x| objective(&mut src, &all, x))
        .collect::<Result<Vec<_>>>()?;
    let selected = select(&objective);
    Ok(RecoveryOutcome {
        estimate: history[selected].clone(),
        history,
        objective,
        selected,
        chosen_seeds: chosen,
        seeds_touched: d as usize,
    })
}

/// The sampled variant: fresh random seed multisets for proposing, for
/// judging, and for the final choice, all drawn before any sketch entry is
/// read. Only sampled seeds are ever materialized.
pub fn recover_randomized<O: SpectrumOracle + ?Sized>(
    lazy: &mut LazySketch<'_, O>,
    cond: &LinearCondenser,
    config: &RecoveryConfig,
) -> Result<RecoveryOutcome> {
    config.validate()?;
    let n = cond.n();
    let d = cond.num_seeds();
    let s0 = config.resolved_s0(n);
    let q = config.resolved_q(n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<u64> { (0..q).map(|_| rng.gen_range(0..d)).collect() };
    let rounds: Vec<(Vec<u64>, Vec<u64>)> = (0..s0).map(|_| (draw(&mut rng), draw(&mut rng))).collect();
    let last = draw(&mut rng);

    let mut history = vec![SparseVec::new()];
    let mut chosen = Vec::with_capacity(s0);
    for (cands, judges) in &rounds {
        let (next, t0) = step(
            lazy,
            n,
            config.k,
            history.last().unwrap(),
            &multiplicities(cands),
            &multiplicities(judges),
        )?;
        history.push(next);
        chosen.push(t0);
    }
    let judges = multiplicities(&last);
    let objective = history
        .iter()
        .map(|x| objective(lazy, &judges, x))
        .collect::<Result<Vec<_>>>()?;
    let selected = select(&objective);
    Ok(RecoveryOutcome {
        estimate: history[selected].clone(),
        history,
        objective,
        selected,
        chosen_seeds: chosen,
        seeds_touched: lazy.seeds_touched(),
    })
}

/// Result of [`end_to_end`].
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    /// Rounded k-sparse estimate.
    pub estimate: SparseVec,
    pub outcome: RecoveryOutcome,
    /// Oracle queries issued by this call.
    pub queries: u64,
}

/// Plans, sketches, reconstructs and rounds.
pub fn end_to_end<O: SpectrumOracle + ?Sized>(
    oracle: &O,
    cond: &LinearCondenser,
    config: &RecoveryConfig,
) -> Result<Recovery> {
    config.validate()?;
    if oracle.n() != cond.n() {
        return Err(Error::DimensionMismatch {
            expected: cond.n(),
            actual: oracle.n(),
        });
    }
    let before = oracle.query_count();
    let outcome = match config.mode {
        Mode::Deterministic => {
            if matches!(cond.backend(), Backend::Lhl(_)) {
                return Err(Error::Unsupported(
                    "deterministic recovery would enumerate all 2^n hash seeds".into(),
                ));
            }
            let plan = plan_queries(cond, true)?;
            let sketch = build_sketch_from_plan(oracle, &plan)?;
            recover_deterministic(&sketch, cond, config)?
        }
        Mode::Randomized => {
            let mut lazy = LazySketch::new(oracle, cond)?;
            recover_randomized(&mut lazy, cond, config)?
        }
    };
    Ok(Recovery {
        estimate: round_to_integers(&outcome.estimate),
        queries: oracle.query_count() - before,
        outcome,
    })
}
