use std::error::Error;
use std::fs;
use std::time::Instant;

use serde::Serialize;

use sht_core::condenser::{
    read_descriptor, verify_expansion, verify_universality, write_descriptor, Backend,
    LinearCondenser, VerifyMode,
};
use sht_core::presets::{
    certification_seed, certified_output_bits, certified_with_seeds, guv_desk, lhl_for_recovery,
};
use sht_core::recover::{end_to_end, Mode, RecoveryConfig, Report};
use sht_core::signal::{generate_signal, read_signal, to_dense, write_signal, SignalModel};
use sht_core::sketch::{build_sketch, plan_queries, write_sketch, SparseVec};
use sht_core::wht::{fwht, fwht_in_place, DenseOracle, SpectralScale};

use crate::{
    BenchArgs, Check, Command, CondenserArgs, CondenserChoice, GenArgs, Kind, Model, ModeArg,
    RecoverArgs, Scale, SketchArgs, Sweep, TransformArgs, VerifyArgs, VerifyModeArg,
};

type CmdResult = Result<u8, Box<dyn Error>>;

/// println! that tolerates a closed stdout (e.g. piped into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Exit status for a run whose guarantee check failed.
const BREACH: u8 = 2;

pub fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Transform(a) => transform(a),
        Command::Condenser(a) => condenser(a),
        Command::Sketch(a) => sketch(a),
        Command::Recover(a) => recover(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    }
}

fn build_condenser(c: &CondenserChoice, n: usize, k: usize, eps: f64) -> sht_core::Result<LinearCondenser> {
    match c.condenser {
        Kind::Certified => certified_with_seeds(n, k, c.seeds, c.family_seed),
        Kind::Guv => guv_desk(n, certified_output_bits(n, k, 0)),
        Kind::Lhl => lhl_for_recovery(n, k, eps / 2.0),
    }
}

fn load_signal(path: &str) -> Result<(usize, SparseVec), Box<dyn Error>> {
    let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    Ok(read_signal(&text)?)
}

fn gen(a: GenArgs) -> CmdResult {
    let model = match a.model {
        Model::Exact => SignalModel::Exact,
        Model::Noisy => SignalModel::Noisy { tail_l1: a.noise_l1 },
    };
    let x = generate_signal(a.n, a.k, model, a.mag_max, a.seed)?;
    fs::write(&a.out, write_signal(a.n, &x, a.dense))?;
    Ok(0)
}

fn transform(a: TransformArgs) -> CmdResult {
    let (n, x) = load_signal(&a.input)?;
    let dense = to_dense(n, &x)?;
    let values = match a.scale {
        Scale::Normalized => fwht(&dense).into_values(),
        Scale::Integer => {
            let mut v = dense.into_values();
            fwht_in_place(&mut v);
            v
        }
    };
    fs::write(&a.out, write_signal(n, &SparseVec::from_dense(&values), true))?;
    Ok(0)
}

fn condenser(a: CondenserArgs) -> CmdResult {
    let cond = build_condenser(&a.choice, a.n, a.k, a.eps)?;
    fs::write(&a.out, write_descriptor(&cond))?;
    say!(
        "{} n={} r={} D={}",
        cond.backend_name(),
        cond.n(),
        cond.r(),
        cond.num_seeds()
    );
    Ok(0)
}

fn sketch(a: SketchArgs) -> CmdResult {
    let cond = read_descriptor(&fs::read_to_string(&a.descriptor)?)?;
    let (n, x) = load_signal(&a.input)?;
    if matches!(cond.backend(), Backend::Lhl(_)) {
        return Err("a full sketch over the leftover-hash family has 2^n seeds".into());
    }
    let oracle = DenseOracle::from_signal(&to_dense(n, &x)?, SpectralScale::Integer);
    let s = build_sketch(&oracle, &cond, a.tensor)?;
    fs::write(&a.out, write_sketch(&s))?;
    say!("{} entries from {} spectral queries", s.entries().len(), sht_core::SpectrumOracle::query_count(&oracle));
    Ok(0)
}

#[derive(Serialize)]
struct ConfigEcho {
    input: String,
    k: usize,
    condenser: String,
    family_seed: u64,
    seeds: u64,
    r: usize,
    eps: f64,
    mode: String,
    s0: usize,
    q: Option<usize>,
    eta: f64,
    nu: Option<f64>,
    mag_max: f64,
    seed: u64,
}

#[derive(Serialize)]
struct RunReport {
    #[serde(flatten)]
    report: Report,
    command: String,
    config: ConfigEcho,
}

fn recover(a: RecoverArgs) -> CmdResult {
    let (n, x) = load_signal(&a.input)?;
    let mode = match a.mode {
        ModeArg::Det => Mode::Deterministic,
        ModeArg::Rand => Mode::Randomized,
    };
    let config = RecoveryConfig {
        k: a.k,
        eps: a.eps,
        s0: a.s0,
        mag_bound: a.mag_max,
        mode,
        q: a.q,
        eta: a.eta,
        nu: a.nu,
        rng_seed: a.seed,
    };
    config.validate()?;
    let cond = match &a.descriptor {
        Some(path) => read_descriptor(&fs::read_to_string(path)?)?,
        None => build_condenser(&a.choice, n, a.k, a.eps)?,
    };
    if cond.n() != n {
        return Err(format!("condenser input length {} differs from signal length {n}", cond.n()).into());
    }
    // the harness side: the library only ever sees spectral queries
    let oracle = DenseOracle::from_signal(&to_dense(n, &x)?, SpectralScale::Integer);
    let start = Instant::now();
    let rec = end_to_end(&oracle, &cond, &config)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = Report::new(
        n,
        a.k,
        mode.as_str(),
        cond.backend_name(),
        rec.queries,
        rec.outcome.seeds_touched as u64,
        rec.outcome.iterations(),
        &x,
        &rec.estimate,
        wall_ms,
    );
    let mut allowed = (3.0 / a.eps + 8.0) * report.l1_tail;
    if mode == Mode::Randomized {
        allowed += config.resolved_nu(n) * x.l1_norm();
    }
    let breach = report.l1_error > allowed;
    let run = RunReport {
        report,
        command: "recover".into(),
        config: ConfigEcho {
            input: a.input.clone(),
            k: a.k,
            condenser: cond.backend_name().into(),
            family_seed: a.choice.family_seed,
            seeds: cond.num_seeds(),
            r: cond.r(),
            eps: a.eps,
            mode: mode.as_str().into(),
            s0: config.resolved_s0(n),
            q: (mode == Mode::Randomized).then(|| config.resolved_q(n)),
            eta: a.eta,
            nu: (mode == Mode::Randomized).then(|| config.resolved_nu(n)),
            mag_max: a.mag_max,
            seed: a.seed,
        },
    };
    let json = serde_json::to_string_pretty(&run)?;
    if let Some(path) = &a.report {
        fs::write(path, format!("{json}\n"))?;
    }
    say!("{json}");
    if breach {
        eprintln!("guarantee breached: l1 error {} exceeds {allowed}", run.report.l1_error);
        return Ok(BREACH);
    }
    Ok(0)
}

fn verify(a: VerifyArgs) -> CmdResult {
    let cond = match &a.descriptor {
        Some(path) => Some(read_descriptor(&fs::read_to_string(path)?)?),
        None => None,
    };
    match a.check {
        Check::Universality => {
            let (n, r) = match &cond {
                Some(c) if matches!(c.backend(), Backend::Lhl(_)) => (c.n(), a.r.unwrap_or(c.r())),
                Some(_) => return Err("universality applies to the leftover-hash family only".into()),
                None => {
                    if a.choice.condenser != Kind::Lhl {
                        return Err("universality applies to --condenser lhl only".into());
                    }
                    let n = a.n.ok_or("--n is required")?;
                    (n, a.r.ok_or("--r is required")?)
                }
            };
            let rep = verify_universality(n, r, a.budget)?;
            say!(
                "universality n={n} r={r}: max collisions {} of {} seeds, max collision prob {} (bound {}) {}",
                rep.max_collisions,
                1u64 << n,
                rep.max_collision_prob,
                2f64.powi(-(r as i32)),
                if rep.pass { "PASS" } else { "FAIL" }
            );
            Ok(if rep.pass { 0 } else { BREACH })
        }
        Check::Expansion => {
            let cond = match cond {
                Some(c) => c,
                // the leftover-hash family is built at the checked error
                None => build_condenser(&a.choice, a.n.ok_or("--n is required")?, a.k, 2.0 * a.eps)?,
            };
            let k_max = a.max_set.unwrap_or(4 * a.k);
            let mode = match a.mode {
                VerifyModeArg::Exhaustive => VerifyMode::Exhaustive { budget: a.budget },
                VerifyModeArg::Sampled => VerifyMode::Sampled {
                    trials: a.trials,
                    seed: a.seed.unwrap_or(certification_seed(a.choice.family_seed)),
                },
            };
            let rep = verify_expansion(&cond, k_max, a.eps, mode)?;
            say!(
                "expansion {} n={} r={} D={} |S|<={k_max} eps={}: worst ratio {:.6} over {} sets {}",
                cond.backend_name(),
                cond.n(),
                cond.r(),
                cond.num_seeds(),
                a.eps,
                rep.worst_ratio,
                rep.sets_checked,
                if rep.pass { "PASS" } else { "FAIL" }
            );
            if let Some(w) = &rep.witness {
                let pts: Vec<String> = w.iter().map(|v| v.to_string()).collect();
                say!("witness {{{}}}", pts.join(", "));
            }
            Ok(if rep.pass { 0 } else { BREACH })
        }
    }
}

fn bench(a: BenchArgs) -> CmdResult {
    if a.from > a.to {
        return Err("--from exceeds --to".into());
    }
    if a.repeats == 0 {
        return Err("--repeats must be at least 1".into());
    }
    say!("n\tk\tD\tr\tqueries\tplan\tbound\t2^n\tseeds\twall_ms\twall_sd\tratio");
    for v in a.from..=a.to {
        let (n, k, d) = match a.sweep {
            Sweep::N => (v as usize, a.k, a.d),
            Sweep::K => (a.n, v as usize, a.d),
            Sweep::D => (a.n, a.k, v),
        };
        let cond = certified_with_seeds(n, k, d, a.seed)?;
        let plan = plan_queries(&cond, true)?;
        let x = generate_signal(n, k, SignalModel::Exact, a.mag_max, a.seed)?;
        let dense = to_dense(n, &x)?;
        let config = RecoveryConfig {
            mag_bound: a.mag_max as f64,
            ..RecoveryConfig::deterministic(k)
        };
        let mut walls = Vec::with_capacity(a.repeats);
        let mut counts = Vec::with_capacity(a.repeats);
        let mut last = None;
        for _ in 0..a.repeats {
            let oracle = DenseOracle::from_signal(&dense, SpectralScale::Integer);
            let start = Instant::now();
            let rec = end_to_end(&oracle, &cond, &config)?;
            walls.push(start.elapsed().as_secs_f64() * 1e3);
            counts.push(rec.queries);
            last = Some(rec);
        }
        if counts.iter().any(|&c| c != counts[0]) {
            return Err(format!("query counts differ across repeats: {counts:?}").into());
        }
        let rec = last.expect("at least one repeat");
        let report = Report::new(n, k, "det", cond.backend_name(), rec.queries, d, rec.outcome.iterations(), &x, &rec.estimate, 0.0);
        let mean = walls.iter().sum::<f64>() / walls.len() as f64;
        let sd = (walls.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / walls.len() as f64).sqrt();
        let ratio = report.ratio.map_or("null".to_string(), |r| format!("{r:.3}"));
        say!(
            "{n}\t{k}\t{d}\t{}\t{}\t{}\t{}\t{}\t{d}\t{mean:.2}\t{sd:.2}\t{ratio}",
            cond.r(),
            rec.queries,
            plan.len(),
            plan.size_bound(),
            1u64 << n
        );
        if rec.queries != plan.len() as u64 {
            return Err(format!("n={n}: {} queries but the plan has {}", rec.queries, plan.len()).into());
        }
    }
    Ok(0)
}
