//! The `shanks` command line.
//!
//! Exit codes: 0 success, 1 malformed input or configuration, 2 composite
//! modulus, 3 input is not a quadratic residue. `check` exits 1 on `FAIL`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::bench::{self, BenchSettings};
use crate::error::Error;
use crate::exec::ExecMode;
use crate::field::{PrimeContext, MODULUS_LIMIT};
use crate::sqrt::{Algorithm, SqrtOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_COMPOSITE: i32 = 2;
pub const EXIT_NONRESIDUE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "shanks",
    version,
    about = "Modular square roots for primes p = 2^n q + 1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a square root of a modulo the prime p.
    Sqrt {
        #[arg(short = 'p', long = "prime")]
        p: u64,
        #[arg(short = 'a', long = "residue")]
        a: u64,
        #[arg(long, default_value = "v1")]
        algo: Algorithm,
        /// Print min(x, p - x).
        #[arg(long)]
        canonical: bool,
        /// Also print operation counts as key=value lines.
        #[arg(long)]
        stats: bool,
        /// Execution mode of the v3 refresh rounds.
        #[arg(long, default_value = "concurrent")]
        mode: ExecMode,
    },
    /// Check whether x^2 = a (mod p).
    Check {
        #[arg(short = 'p', long = "prime")]
        p: u64,
        #[arg(short = 'a', long = "residue")]
        a: u64,
        #[arg(short = 'x', long = "root")]
        x: u64,
    },
    /// Sweep primes and algorithms, writing aggregate counts as CSV.
    Bench {
        /// TOML file with bench settings; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated 2-adic valuations for the Proth prime search.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        /// Largest odd q tried per n.
        #[arg(long)]
        q_max: Option<u64>,
        /// Comma-separated explicit primes, instead of --n.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<String>>,
        #[arg(long)]
        v3_mode: Option<String>,
        /// Verify loop invariants on every sample.
        #[arg(long)]
        check_invariants: bool,
        /// Write the CSV here instead of standard output.
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match cli.command {
        Command::Sqrt {
            p,
            a,
            algo,
            canonical,
            stats,
            mode,
        } => cmd_sqrt(p, a, algo, canonical, stats, mode, out, err),
        Command::Check { p, a, x } => cmd_check(p, a, x, out, err),
        Command::Bench {
            config,
            n,
            q_max,
            primes,
            samples,
            seed,
            algos,
            v3_mode,
            check_invariants,
            output,
        } => {
            let flags = BenchSettings {
                primes,
                n,
                q_max,
                samples,
                seed,
                algos,
                v3_mode,
                check_invariants: check_invariants.then_some(true),
            };
            cmd_bench(config, flags, output, out, err)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sqrt(
    p: u64,
    a: u64,
    algo: Algorithm,
    canonical: bool,
    stats: bool,
    mode: ExecMode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if !(3..MODULUS_LIMIT).contains(&p) {
        let _ = writeln!(err, "error: p must be an odd prime in [3, 2^63)");
        return EXIT_MALFORMED;
    }
    let ctx = match PrimeContext::new(p) {
        Ok(ctx) => ctx,
        Err(Error::InvalidModulus(_)) | Err(Error::CompositeModulus(_)) => {
            let _ = writeln!(err, "error: {p} is composite");
            return EXIT_COMPOSITE;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_MALFORMED;
        }
    };
    let md = ctx.modulus();
    let opts = SqrtOptions::default().with_mode(mode);
    let outcome = match algo.solve(md.reduce(a), &ctx, &opts) {
        Ok(o) => o,
        Err(Error::NotAResidue(_)) => {
            let _ = writeln!(err, "error: {a} is not a quadratic residue modulo {p}");
            return EXIT_NONRESIDUE;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_MALFORMED;
        }
    };
    let root = if canonical {
        outcome.canonical_root(md)
    } else {
        outcome.root
    };
    let _ = writeln!(out, "{root}");
    if stats {
        let c = &outcome.counter;
        let rounds = outcome.rounds.map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(out, "mul_init={}", c.mul_init);
        let _ = writeln!(out, "mul_loop={}", c.mul_loop);
        let _ = writeln!(out, "lookups={}", c.lookups);
        let _ = writeln!(out, "rounds={rounds}");
        let _ = writeln!(out, "loop_iterations={}", outcome.loop_iterations);
    }
    EXIT_OK
}

fn cmd_check(p: u64, a: u64, x: u64, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if p == 0 {
        let _ = writeln!(err, "error: p must be positive");
        return EXIT_MALFORMED;
    }
    let m = p as u128;
    let lhs = (x as u128 % m) * (x as u128 % m) % m;
    if lhs == a as u128 % m {
        let _ = writeln!(out, "OK");
        EXIT_OK
    } else {
        let _ = writeln!(out, "FAIL");
        EXIT_MALFORMED
    }
}

fn cmd_bench(
    config: Option<PathBuf>,
    flags: BenchSettings,
    output: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let base = match config {
        Some(path) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return EXIT_MALFORMED;
                }
            };
            match BenchSettings::from_toml(&text) {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return EXIT_MALFORMED;
                }
            }
        }
        None => BenchSettings::default(),
    };
    let cfg = match base.merge(flags).into_config() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_MALFORMED;
        }
    };
    match cfg.resolve_primes() {
        Ok((_, skipped)) => {
            if let Some(msg) = bench::describe_skipped(&skipped) {
                let _ = writeln!(err, "warning: {msg}");
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: primes: {e}");
            return EXIT_MALFORMED;
        }
    }
    let records = match bench::run_sweep(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_MALFORMED;
        }
    };
    let csv = bench::emit_csv(&records);
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                return EXIT_MALFORMED;
            }
        }
        None => {
            let _ = out.write_all(csv.as_bytes());
        }
    }
    EXIT_OK
}
