//! `linefree`: build, verify, tabulate and search line-free sets in F_p^3.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on
//! usage or input errors.

use std::fs::File;
use std::io::{BufReader, BufWriter, IsTerminal, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use linefree::bounds::{table_to_csv, table_to_json, BoundsRow};
use linefree::certificate::{certify_built, certify_set, Certificate, DEFAULT_SEED};
use linefree::construction::Construction;
use linefree::field::{primes_in, PrimeModulus};
use linefree::oracle::{default_node_budget, max_line_free};
use linefree::pointset::PointSet;
use linefree::verifier::{is_blocking_with, is_line_free_with, VerifyOptions};
use linefree::Dim;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "linefree",
    version,
    about = "Build and exhaustively certify line-free sets in F_p^3"
)]
struct Cli {
    /// Verifier worker threads (0 = all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Seed recorded in certificates (reserved for seeded cross-checks).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Binary,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the line-free set for a prime and write it to a file.
    Build {
        /// Odd prime p >= 3.
        p: u64,
        /// Output path for the point set.
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = FileFormat::Binary)]
        format: FileFormat,
    },
    /// Verify a built set (by prime or from a file); prints the
    /// certificate JSON to stdout.
    Verify {
        /// A prime, or a path to a point-set file.
        target: String,
    },
    /// Verify and additionally write the certificate JSON to a file.
    Certify {
        /// A prime, or a path to a point-set file.
        target: String,
        /// Output path for the certificate.
        cert: PathBuf,
    },
    /// Tabulate sizes and bounds for every prime in a range.
    Table {
        p_min: u64,
        p_max: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Skip the exhaustive verification pass (sizes only).
        #[arg(long)]
        no_verify: bool,
    },
    /// Exact maximum line-free set size on a tiny instance.
    Oracle {
        /// Odd prime p >= 3.
        p: u64,
        /// Dimension, 2 or 3.
        n: u8,
        /// Node budget for the search.
        #[arg(long)]
        budget: Option<u64>,
    },
}

fn parse_prime(p: u64) -> Result<PrimeModulus> {
    PrimeModulus::new(p).map_err(|e| anyhow!("{e}"))
}

fn read_point_set(path: &Path) -> Result<PointSet> {
    let mut f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut magic = [0u8; 4];
    let is_binary = match f.read_exact(&mut magic) {
        Ok(()) => magic == linefree::pointset::MAGIC,
        Err(_) => false,
    };
    f.seek(SeekFrom::Start(0))?;
    let mut reader = BufReader::new(f);
    let set = if is_binary {
        PointSet::read_binary(&mut reader)?
    } else {
        PointSet::read_text(&mut reader)?
    };
    Ok(set)
}

fn progress_to_stderr() -> Option<Box<dyn Fn(u64, u64) + Sync>> {
    if !std::io::stderr().is_terminal() {
        return None;
    }
    Some(Box::new(|done: u64, total: u64| {
        let pct = done * 100 / total.max(1);
        if pct % 10 == 0 {
            eprint!("\r{done}/{total} lines ({pct}%)");
            if done == total {
                eprintln!();
            }
        }
    }))
}

fn cmd_build(m: PrimeModulus, output: &Path, format: FileFormat) -> Result<u8> {
    let c = Construction::build(m);
    if c.params.degenerate() {
        eprintln!(
            "note: p = {} is degenerate (l = 0); the construction is the hypercube",
            m.p()
        );
    }
    let f = File::create(output)
        .with_context(|| format!("cannot create {}", output.display()))?;
    let mut w = BufWriter::new(f);
    match format {
        FileFormat::Binary => c.set.write_binary(&mut w)?,
        FileFormat::Text => c.set.write_text(&mut w)?,
    }
    w.flush()?;
    println!(
        "p = {}: (r, s, l) = ({}, {}, {}), |S*| = {}, removed = {}, |S| = {}, written to {}",
        m.p(),
        c.params.r(),
        c.params.s(),
        c.params.l(),
        c.initial.cardinality(),
        c.removed(),
        c.set.cardinality(),
        output.display()
    );
    Ok(0)
}

fn certify_target(target: &str, opts: &VerifyOptions, seed: u64) -> Result<Certificate> {
    if let Ok(p) = target.parse::<u64>() {
        Ok(certify_built(parse_prime(p)?, opts, seed))
    } else {
        let set = read_point_set(Path::new(target))?;
        Ok(certify_set(&set, opts, seed)?)
    }
}

fn summarize(cert: &Certificate) {
    let checkmark = |ok: bool| if ok { "ok" } else { "FAILED" };
    eprintln!(
        "p = {}: |S| = {} (complement {}), line-free {}, complement blocking {}, \
         bound {}, windows {}, formulas {}, matches construction {}",
        cert.p,
        cert.sizes.s,
        cert.sizes.complement,
        checkmark(cert.checks.line_free.ok),
        checkmark(cert.checks.complement_blocking.ok),
        checkmark(cert.checks.thm3_ok),
        checkmark(cert.checks.param_window_ok),
        checkmark(cert.checks.layer_formula_ok),
        checkmark(cert.checks.matches_construction),
    );
}

fn cmd_verify(target: &str, cert_path: Option<&Path>, opts: &VerifyOptions, seed: u64) -> Result<u8> {
    let cert = certify_target(target, opts, seed)?;
    summarize(&cert);
    println!("{}", cert.to_json());
    if let Some(path) = cert_path {
        std::fs::write(path, cert.to_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("certificate written to {}", path.display());
    }
    Ok(if cert.all_ok() { 0 } else { EXIT_CHECK_FAILED })
}

fn cmd_table(
    p_min: u64,
    p_max: u64,
    format: TableFormat,
    no_verify: bool,
    opts: &VerifyOptions,
) -> Result<u8> {
    let primes = primes_in(p_min, p_max);
    if primes.is_empty() {
        return Err(anyhow!("no primes in range [{p_min}, {p_max}]"));
    }
    let mut rows = Vec::with_capacity(primes.len());
    let mut failures = Vec::new();
    for &q in &primes {
        let m = parse_prime(q)?;
        let c = Construction::build(m);
        if !no_verify {
            let lf = is_line_free_with(&c.set, opts);
            let bl = is_blocking_with(&c.set.complement(), opts);
            if !lf.ok || !bl.ok {
                failures.push(q);
            }
        }
        rows.push(BoundsRow::from_construction(&c));
    }
    match format {
        TableFormat::Csv => print!("{}", table_to_csv(&rows)),
        TableFormat::Json => println!("{:#}", table_to_json(&rows)),
    }
    if !failures.is_empty() {
        eprintln!("verification FAILED for primes: {failures:?}");
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(0)
}

fn cmd_oracle(m: PrimeModulus, n: u8, budget: Option<u64>, seed: u64) -> Result<u8> {
    let dim = Dim::from_u8(n).ok_or_else(|| anyhow!("dimension must be 2 or 3, got {n}"))?;
    let budget = budget.unwrap_or_else(|| default_node_budget(m, dim));
    let res = max_line_free(m, dim, budget);
    let reverify = linefree::verifier::is_line_free(&res.best_set);
    let hypercube_size = (m.p() as u64 - 1).pow(dim.n() as u32);
    println!(
        "p = {}, n = {}: best_size = {}, exact = {}, nodes = {}, matches_hypercube_bound = {}, \
         best_set_line_free = {}, seed = {}",
        m.p(),
        n,
        res.best_size,
        res.exact,
        res.nodes_explored,
        res.best_size == hypercube_size,
        reverify.ok,
        seed
    );
    if !res.exact {
        eprintln!("warning: node budget {budget} exhausted; result is a lower bound, not exact");
    }
    if !reverify.ok {
        return Err(anyhow!("oracle produced a set that is not line-free"));
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let progress = progress_to_stderr();
    let opts = VerifyOptions {
        jobs: cli.jobs,
        progress: progress.as_deref(),
    };
    match cli.cmd {
        Cmd::Build { p, output, format } => cmd_build(parse_prime(p)?, &output, format),
        Cmd::Verify { target } => cmd_verify(&target, None, &opts, cli.seed),
        Cmd::Certify { target, cert } => cmd_verify(&target, Some(&cert), &opts, cli.seed),
        Cmd::Table {
            p_min,
            p_max,
            format,
            no_verify,
        } => cmd_table(p_min, p_max, format, no_verify, &opts),
        Cmd::Oracle { p, n, budget } => cmd_oracle(parse_prime(p)?, n, budget, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
