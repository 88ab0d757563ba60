use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "sht", version, about = "Sparse Walsh-Hadamard recovery toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a k-sparse integer test signal.
    Gen(GenArgs),
    /// Write the Hadamard spectrum of a signal.
    Transform(TransformArgs),
    /// Build a condenser and write its descriptor.
    Condenser(CondenserArgs),
    /// Sketch a signal through a condenser descriptor.
    Sketch(SketchArgs),
    /// Recover a signal from spectral queries and report the error.
    Recover(RecoverArgs),
    /// Check expansion or universality of a condenser.
    Verify(VerifyArgs),
    /// Sweep parameters and tabulate query counts and timings.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Exact,
    Noisy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Certified,
    Guv,
    Lhl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Det,
    Rand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Expansion,
    Universality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sweep {
    N,
    K,
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scale {
    Normalized,
    Integer,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "exact")]
    model: Model,
    /// ℓ1 mass of the integer tail (noisy model).
    #[arg(long, default_value_t = 0.0)]
    noise_l1: f64,
    #[arg(long, default_value_t = 1000)]
    mag_max: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write all 2^n values instead of the nonzeros.
    #[arg(long)]
    dense: bool,
    #[arg(long)]
    out: String,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value = "normalized")]
    scale: Scale,
    #[arg(long)]
    out: String,
}

/// Condenser selection shared by several commands.
#[derive(Args, Debug, Clone)]
struct CondenserChoice {
    #[arg(long, value_enum, default_value = "certified")]
    condenser: Kind,
    /// Seed of the random certified family.
    #[arg(long = "family-seed", default_value_t = 0)]
    family_seed: u64,
    /// Seeds D of the certified family.
    #[arg(long = "seeds", default_value_t = sht_core::presets::CERTIFIED_SEEDS)]
    seeds: u64,
}

#[derive(Args, Debug)]
struct CondenserArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = sht_core::recover::DEFAULT_EPS)]
    eps: f64,
    #[command(flatten)]
    choice: CondenserChoice,
    #[arg(long)]
    out: String,
}

#[derive(Args, Debug)]
struct SketchArgs {
    #[arg(long)]
    input: String,
    /// Descriptor written by `sht condenser`.
    #[arg(long)]
    descriptor: String,
    /// Also write the bit-masked rows.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    tensor: bool,
    #[arg(long)]
    out: String,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(long)]
    input: String,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    choice: CondenserChoice,
    /// Use this descriptor instead of building a condenser.
    #[arg(long)]
    descriptor: Option<String>,
    #[arg(long, default_value_t = sht_core::recover::DEFAULT_EPS)]
    eps: f64,
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long)]
    s0: Option<usize>,
    #[arg(long)]
    nu: Option<f64>,
    /// Magnitude bound L of the signal entries.
    #[arg(long, default_value_t = sht_core::recover::DEFAULT_MAG_BOUND)]
    mag_max: f64,
    /// Seed of the randomized seed draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    choice: CondenserChoice,
    #[arg(long)]
    descriptor: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity the family is built for; expansion is checked on 4k-sets.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Largest set size to check, overriding 4k.
    #[arg(long)]
    max_set: Option<usize>,
    /// Output bits, for the universality check.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = sht_core::presets::CERTIFIED_EPS)]
    eps: f64,
    #[arg(long, value_enum, default_value = "expansion")]
    check: Check,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: VerifyModeArg,
    #[arg(long, default_value_t = sht_core::condenser::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = sht_core::condenser::DEFAULT_BUDGET)]
    budget: u128,
    /// Seed of the sampled subsets; defaults to the certification sample.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum)]
    sweep: Sweep,
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value_t = sht_core::presets::CERTIFIED_SEEDS)]
    d: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 1000)]
    mag_max: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
