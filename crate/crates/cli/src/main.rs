use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use incsp_cli::report::report_lines;
use incsp_cli::run;
use incsp_cli::text::{format_instance, format_offline, parse_instance, parse_offline, ParsedInstance};
use incsp_core::apsp::Variant;
use incsp_core::graph::{generate_random_sequence, generate_source_sequence};
use incsp_core::offline::OfflineSssp;
use incsp_core::oracle::{verify_replay, StructureKind};
use incsp_core::{Instance, Op};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "incsp", version, about = "Incremental and offline approximate shortest paths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Replay source-edge updates, answering `?s v` markers.
    RunSssp(RunArgs),
    /// Replay updates, answering `? u v` markers.
    RunApsp(RunArgs),
    /// Build the offline structure, answering `?off v t` and `?s v` markers.
    RunOffline(OfflineArgs),
    /// Replay with oracle checks; exits with 2 on any violation.
    Verify(CheckArgs),
    /// Replay and write work counters as CSV.
    Bench(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Det,
    Rand,
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Sssp,
    Apsp,
    Offline,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenMode {
    /// Inserts and decreases anywhere.
    Mixed,
    /// Only edges leaving the source.
    Source,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryKind {
    Pair,
    Source,
    Offline,
}

#[derive(Args)]
struct Common {
    #[arg(long = "in", value_name = "PATH")]
    input: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    source: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "det")]
    variant: VariantArg,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OfflineArgs {
    #[command(flatten)]
    common: Common,
    /// Write the built structure here.
    #[arg(long, value_name = "PATH")]
    save: Option<String>,
    /// Answer from a saved structure instead of building one.
    #[arg(long, value_name = "PATH", conflicts_with = "save")]
    load: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum, default_value = "sssp")]
    structure: StructureArg,
    #[arg(long, default_value_t = 1)]
    check_every: usize,
    #[arg(long, value_name = "PATH")]
    bench_csv: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Largest edge weight `W`.
    #[arg(long, default_value_t = 10)]
    max_weight: u64,
    #[arg(long)]
    updates: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "mixed")]
    mode: GenMode,
    #[arg(long, default_value_t = 0)]
    source: usize,
    /// Emit a query marker after every this many updates (0 = none).
    #[arg(long, default_value_t = 0)]
    query_every: usize,
    #[arg(long, value_enum, default_value = "pair")]
    query_kind: QueryKind,
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_instance(path: &str) -> Result<ParsedInstance> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    parse_instance(&src).with_context(|| format!("parsing {path}"))
}

fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {p}")),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        bail!("--epsilon must lie in (0, 1), got {eps}");
    }
    Ok(())
}

fn variant_of(r: &RunArgs) -> Result<(Variant, u64)> {
    match (r.variant, r.seed) {
        (VariantArg::Det, seed) => Ok((Variant::Deterministic, seed.unwrap_or(0))),
        (VariantArg::Rand, Some(seed)) => Ok((Variant::Randomized, seed)),
        (VariantArg::Rand, None) => bail!("--variant rand requires --seed"),
    }
}

fn execute(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Gen(a) => {
            emit(a.out.as_deref(), &format_instance(&generate(&a)?))?;
        }
        Command::RunSssp(a) => {
            check_epsilon(a.common.epsilon)?;
            let p = read_instance(&a.common.input)?;
            emit(a.common.out.as_deref(), &run::run_sssp(&p, a.common.source, a.common.epsilon)?)?;
        }
        Command::RunApsp(a) => {
            check_epsilon(a.common.epsilon)?;
            let (variant, seed) = variant_of(&a)?;
            let p = read_instance(&a.common.input)?;
            emit(a.common.out.as_deref(), &run::run_apsp(&p, a.common.epsilon, variant, seed)?)?;
        }
        Command::RunOffline(a) => {
            check_epsilon(a.common.epsilon)?;
            let p = read_instance(&a.common.input)?;
            let off = match &a.load {
                Some(path) => {
                    let src = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                    let parts = parse_offline(&src).with_context(|| format!("parsing {path}"))?;
                    OfflineSssp::from_parts(parts)?
                }
                None => run::build_offline(&p, a.common.source, a.common.epsilon)?,
            };
            if let Some(path) = &a.save {
                fs::write(path, format_offline(&off.to_parts())).with_context(|| format!("writing {path}"))?;
            }
            emit(a.common.out.as_deref(), &run::answer_offline(&p, &off)?)?;
        }
        Command::Verify(a) => {
            let c = &a.run.common;
            check_epsilon(c.epsilon)?;
            let (variant, seed) = variant_of(&a.run)?;
            let p = read_instance(&c.input)?;
            let (kind, name) = match a.structure {
                StructureArg::Sssp => (StructureKind::Sssp { source: c.source }, "sssp"),
                StructureArg::Apsp => (StructureKind::Apsp { variant, seed }, "apsp"),
                StructureArg::Offline => (StructureKind::Offline { source: c.source }, "offline"),
            };
            if c.source >= p.instance.n {
                bail!("source {} out of range for n = {}", c.source, p.instance.n);
            }
            let report = verify_replay(kind, &p.instance, c.epsilon, a.check_every)?;
            let mut text = report_lines(name, &report).join("\n");
            text.push('\n');
            emit(c.out.as_deref(), &text)?;
            if !report.passed() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Bench(a) => {
            let c = &a.run.common;
            check_epsilon(c.epsilon)?;
            let (variant, seed) = variant_of(&a.run)?;
            let p = read_instance(&c.input)?;
            let rows = match a.structure {
                StructureArg::Sssp => run::bench_sssp(&p, c.source, c.epsilon, a.check_every)?,
                StructureArg::Apsp => run::bench_apsp(&p, c.epsilon, variant, seed, a.check_every)?,
                StructureArg::Offline => bail!("bench supports sssp and apsp"),
            };
            let mut buf = Vec::new();
            run::write_csv(&mut buf, &rows)?;
            let target = a.bench_csv.as_deref().or(c.out.as_deref());
            emit(target, std::str::from_utf8(&buf)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn generate(a: &GenArgs) -> Result<Instance> {
    if a.n == 0 {
        bail!("--n must be positive");
    }
    if a.max_weight == 0 {
        bail!("--max-weight must be positive");
    }
    if a.source >= a.n {
        bail!("--source {} out of range for n = {}", a.source, a.n);
    }
    let (g, seq) = match a.mode {
        GenMode::Mixed => generate_random_sequence(a.n, a.m, a.max_weight, a.updates, a.seed),
        GenMode::Source => generate_source_sequence(a.n, a.m, a.max_weight, a.updates, a.source, a.seed),
    };
    let mut inst = Instance::from_parts(&g, &seq);
    if a.query_every > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ 0x5eed_0f_9e7);
        let mut ops = Vec::with_capacity(inst.ops.len() * 2);
        for (i, op) in inst.ops.iter().enumerate() {
            ops.push(*op);
            if (i + 1) % a.query_every == 0 {
                let v = rng.gen_range(0..a.n);
                ops.push(match a.query_kind {
                    QueryKind::Pair => Op::Pair(rng.gen_range(0..a.n), v),
                    QueryKind::Source => Op::Source(v),
                    QueryKind::Offline => Op::Offline(v, rng.gen_range(0..=seq.len())),
                });
            }
        }
        inst.ops = ops;
    }
    Ok(inst)
}
