//! Benchmark sweeps over Proth primes `q 2^n + 1`.
//!
//! Each cell (prime, algorithm) draws its own stream of uniform `r` in
//! `[1, p)` and solves `a = r^2 mod p`, so inputs are residues by
//! construction. Cell streams depend only on the global seed, `p` and the
//! algorithm tag, which keeps results independent of cell scheduling.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exec::{map_items, ExecMode};
use crate::field::{PrimeContext, MODULUS_LIMIT};
use crate::oracle::is_prime_deterministic;
use crate::sqrt::{Algorithm, SqrtOptions, SqrtOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProthPrime {
    pub p: u64,
    pub n: u32,
    pub q: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProthSearch {
    pub primes: Vec<ProthPrime>,
    /// Values of `n` for which no odd `q <= q_max` gave a prime below 2^63.
    pub skipped: Vec<u32>,
}

/// For each `n`, the smallest odd `q <= q_max` with `q 2^n + 1` prime.
pub fn generate_proth_primes(n_list: &[u32], q_max: u64) -> ProthSearch {
    let mut out = ProthSearch::default();
    for &n in n_list {
        let found = (1..=q_max).step_by(2).find_map(|q| {
            let p = q.checked_shl(n).filter(|v| v >> n == q)?.checked_add(1)?;
            (p < MODULUS_LIMIT && is_prime_deterministic(p)).then_some(ProthPrime { p, n, q })
        });
        match found {
            Some(pp) if n >= 1 => out.primes.push(pp),
            _ => out.skipped.push(n),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSource {
    Explicit(Vec<u64>),
    Proth { n_list: Vec<u32>, q_max: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub primes: PrimeSource,
    pub samples_per_prime: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Execution mode of the parallel variant inside each sample.
    pub v3_mode: ExecMode,
    pub check_invariants: bool,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_prime == 0 {
            return Err(Error::Config("samples: must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config(
                "algos: must name at least one algorithm".into(),
            ));
        }
        match &self.primes {
            PrimeSource::Explicit(ps) if ps.is_empty() => {
                Err(Error::Config("primes: must not be empty".into()))
            }
            PrimeSource::Proth { n_list, .. } if n_list.is_empty() => {
                Err(Error::Config("n: must not be empty".into()))
            }
            PrimeSource::Proth { n_list, .. } if n_list.iter().any(|&n| n == 0 || n > 62) => {
                Err(Error::Config("n: every entry must be in 1..=62".into()))
            }
            _ => Ok(()),
        }
    }

    /// Verified contexts for every prime, plus the `n` values the Proth
    /// search had to skip.
    pub fn resolve_primes(&self) -> Result<(Vec<PrimeContext>, Vec<u32>)> {
        match &self.primes {
            PrimeSource::Explicit(ps) => {
                let ctxs = ps
                    .iter()
                    .map(|&p| PrimeContext::new(p))
                    .collect::<Result<_>>()?;
                Ok((ctxs, Vec::new()))
            }
            PrimeSource::Proth { n_list, q_max } => {
                let found = generate_proth_primes(n_list, *q_max);
                let ctxs = found
                    .primes
                    .iter()
                    .map(|pp| PrimeContext::new(pp.p))
                    .collect::<Result<_>>()?;
                Ok((ctxs, found.skipped))
            }
        }
    }

    fn options(&self) -> SqrtOptions {
        SqrtOptions {
            check_invariants: self.check_invariants,
            mode: self.v3_mode,
        }
    }
}

/// Partial bench settings as read from a TOML file or command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSettings {
    pub primes: Option<Vec<u64>>,
    pub n: Option<Vec<u32>>,
    pub q_max: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub algos: Option<Vec<String>>,
    pub v3_mode: Option<String>,
    pub check_invariants: Option<bool>,
}

pub const DEFAULT_N_LIST: [u32; 5] = [16, 24, 32, 40, 48];
pub const DEFAULT_Q_MAX: u64 = 100_001;
pub const DEFAULT_SAMPLES: usize = 1000;

impl BenchSettings {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    /// Fields set in `over` win.
    pub fn merge(self, over: BenchSettings) -> BenchSettings {
        BenchSettings {
            primes: over.primes.or(self.primes),
            n: over.n.or(self.n),
            q_max: over.q_max.or(self.q_max),
            samples: over.samples.or(self.samples),
            seed: over.seed.or(self.seed),
            algos: over.algos.or(self.algos),
            v3_mode: over.v3_mode.or(self.v3_mode),
            check_invariants: over.check_invariants.or(self.check_invariants),
        }
    }

    pub fn into_config(self) -> Result<BenchConfig> {
        let primes = match (self.primes, self.n) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("primes: cannot be combined with n".into()));
            }
            (Some(ps), None) => PrimeSource::Explicit(ps),
            (None, n) => PrimeSource::Proth {
                n_list: n.unwrap_or_else(|| DEFAULT_N_LIST.to_vec()),
                q_max: self.q_max.unwrap_or(DEFAULT_Q_MAX),
            },
        };
        let algorithms = match self.algos {
            Some(names) => names
                .iter()
                .map(|s| {
                    s.parse()
                        .map_err(|e: Error| Error::Config(format!("algos: {e}")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => Algorithm::ALL.to_vec(),
        };
        let v3_mode = match self.v3_mode {
            Some(s) => s
                .parse()
                .map_err(|e: Error| Error::Config(format!("v3_mode: {e}")))?,
            None => ExecMode::SequentialSimulated,
        };
        let cfg = BenchConfig {
            primes,
            samples_per_prime: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(0),
            algorithms,
            v3_mode,
            check_invariants: self.check_invariants.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One solved benchmark input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub r: u64,
    pub a: u64,
    pub outcome: SqrtOutcome,
}

/// The random stream of one sweep cell.
pub fn cell_rng(seed: u64, p: u64, algorithm: Algorithm) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&p.to_le_bytes());
    let tag = algorithm.tag().as_bytes();
    key[16..16 + tag.len()].copy_from_slice(tag);
    ChaCha8Rng::from_seed(key)
}

/// Draws `samples` inputs for one cell and solves each, checking the root.
pub fn sample_cell(
    ctx: &PrimeContext,
    algorithm: Algorithm,
    samples: usize,
    seed: u64,
    opts: &SqrtOptions,
) -> Result<Vec<Sample>> {
    let p = ctx.p();
    let mut rng = cell_rng(seed, p, algorithm);
    let md = ctx.modulus();
    (0..samples)
        .map(|_| {
            let r = rng.random_range(1..p);
            let a = ((r as u128 * r as u128) % p as u128) as u64;
            let fail = |reason: String| Error::SampleFailed {
                p,
                r,
                algorithm: algorithm.tag(),
                reason,
            };
            let outcome = algorithm
                .solve(md.reduce(a), ctx, opts)
                .map_err(|e| fail(e.to_string()))?;
            let x = outcome.root.value() as u128;
            if (x * x % p as u128) as u64 != a {
                return Err(fail(format!("returned {x}, which does not square to {a}")));
            }
            Ok(Sample { r, a, outcome })
        })
        .collect()
}

/// Per-cell aggregate; one CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    pub algorithm: Algorithm,
    pub samples: usize,
    pub mean_mul_loop: f64,
    pub mean_mul_total: f64,
    pub mean_lookups: f64,
    pub mean_rounds: Option<f64>,
    pub max_loop_iterations: u32,
}

impl BenchRecord {
    pub fn aggregate(ctx: &PrimeContext, algorithm: Algorithm, samples: &[Sample]) -> Self {
        let count = samples.len();
        let mean = |f: &dyn Fn(&SqrtOutcome) -> u64| {
            samples.iter().map(|s| f(&s.outcome)).sum::<u64>() as f64 / count as f64
        };
        let mean_rounds =
            (algorithm == Algorithm::V3).then(|| mean(&|o| o.rounds.unwrap_or(0) as u64));
        BenchRecord {
            p: ctx.p(),
            n: ctx.n(),
            q: ctx.q(),
            algorithm,
            samples: count,
            mean_mul_loop: mean(&|o| o.counter.mul_loop),
            mean_mul_total: mean(&|o| o.counter.mul_total()),
            mean_lookups: mean(&|o| o.counter.lookups),
            mean_rounds,
            max_loop_iterations: samples
                .iter()
                .map(|s| s.outcome.loop_iterations)
                .max()
                .unwrap_or(0),
        }
    }
}

/// Runs every (prime, algorithm) cell, cells concurrently when the
/// `parallel` feature is enabled. Records come out prime-major in
/// configuration order.
pub fn run_sweep(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    run_sweep_with(cfg, ExecMode::Concurrent)
}

pub fn run_sweep_with(cfg: &BenchConfig, cell_mode: ExecMode) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let (ctxs, _) = cfg.resolve_primes()?;
    let cells: Vec<(PrimeContext, Algorithm)> = ctxs
        .iter()
        .flat_map(|c| cfg.algorithms.iter().map(move |&a| (*c, a)))
        .collect();
    let opts = cfg.options();
    map_items(cell_mode, &cells, |(ctx, alg)| {
        let samples = sample_cell(ctx, *alg, cfg.samples_per_prime, cfg.seed, &opts)?;
        Ok(BenchRecord::aggregate(ctx, *alg, &samples))
    })
    .into_iter()
    .collect()
}

pub const CSV_HEADER: [&str; 10] = [
    "p",
    "n",
    "q",
    "algorithm",
    "samples",
    "mean_mul_loop",
    "mean_mul_total",
    "mean_lookups",
    "mean_rounds",
    "max_loop_iterations",
];

pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.p.to_string(),
            r.n.to_string(),
            r.q.to_string(),
            r.algorithm.tag().to_string(),
            r.samples.to_string(),
            format!("{:.6}", r.mean_mul_loop),
            format!("{:.6}", r.mean_mul_total),
            format!("{:.6}", r.mean_lookups),
            r.mean_rounds.map(|v| format!("{v:.6}")).unwrap_or_default(),
            r.max_loop_iterations.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd
        .headers()
        .map_err(|e| Error::Config(format!("csv: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config("csv: unexpected header".into()));
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row.map_err(|e| Error::Config(format!("csv: {e}")))?;
        let line = i + 2;
        let field = |j: usize| row.get(j).unwrap_or("");
        fn num<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
            s.parse()
                .map_err(|_| Error::Config(format!("csv line {line}: bad {name} `{s}`")))
        }
        out.push(BenchRecord {
            p: num(field(0), "p", line)?,
            n: num(field(1), "n", line)?,
            q: num(field(2), "q", line)?,
            algorithm: field(3)
                .parse()
                .map_err(|e| Error::Config(format!("csv line {line}: {e}")))?,
            samples: num(field(4), "samples", line)?,
            mean_mul_loop: num(field(5), "mean_mul_loop", line)?,
            mean_mul_total: num(field(6), "mean_mul_total", line)?,
            mean_lookups: num(field(7), "mean_lookups", line)?,
            mean_rounds: match field(8) {
                "" => None,
                s => Some(num(s, "mean_rounds", line)?),
            },
            max_loop_iterations: num(field(9), "max_loop_iterations", line)?,
        });
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let len = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / len;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Human-readable summary of skipped `n` values, if any.
pub fn describe_skipped(skipped: &[u32]) -> Option<String> {
    if skipped.is_empty() {
        return None;
    }
    let mut s = String::from("no Proth prime found for n =");
    for n in skipped {
        let _ = write!(s, " {n}");
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn proth_examples() {
        let found = generate_proth_primes(&[16, 23, 30], 1001);
        let ps: Vec<u64> = found.primes.iter().map(|pp| pp.p).collect();
        assert_eq!(ps[0], 65537);
        assert_eq!(ps[2], 3_221_225_473);
        for pp in &found.primes {
            assert!(is_prime_deterministic(pp.p));
            assert_eq!((pp.q << pp.n) + 1, pp.p);
            // No smaller odd q works.
            for q in (1..pp.q).step_by(2) {
                assert!(!is_prime_deterministic((q << pp.n) + 1));
            }
        }
        assert!(found.skipped.is_empty());
    }

    #[test]
    fn proth_skips_unreachable_n() {
        let found = generate_proth_primes(&[62, 16], 1);
        assert_eq!(found.skipped, [62]);
        assert_eq!(found.primes.len(), 1);
    }

    fn small_cfg(algs: Vec<Algorithm>) -> BenchConfig {
        BenchConfig {
            primes: PrimeSource::Explicit(vec![13]),
            samples_per_prime: 3,
            seed: 42,
            algorithms: algs,
            v3_mode: ExecMode::Concurrent,
            check_invariants: true,
        }
    }

    #[test]
    fn sampled_roots_verify() {
        let ctx = PrimeContext::new(13).unwrap();
        let samples = sample_cell(&ctx, Algorithm::V1, 3, 42, &SqrtOptions::checked()).unwrap();
        assert_eq!(samples.len(), 3);
        for s in &samples {
            assert_eq!(s.r * s.r % 13, s.a);
            let x = s.outcome.root.value();
            assert_eq!(x * x % 13, s.a);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = small_cfg(Algorithm::ALL.to_vec());
        let a = emit_csv(&run_sweep(&cfg).unwrap());
        let b = emit_csv(&run_sweep_with(&cfg, ExecMode::SequentialSimulated).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn composite_prime_rejected() {
        let mut cfg = small_cfg(vec![Algorithm::V1]);
        cfg.primes = PrimeSource::Explicit(vec![15]);
        assert_eq!(run_sweep(&cfg), Err(Error::CompositeModulus(15)));
    }

    #[test]
    fn settings_validation() {
        let zero = BenchSettings {
            samples: Some(0),
            ..Default::default()
        };
        assert!(matches!(zero.into_config(), Err(Error::Config(m)) if m.starts_with("samples")));
        let both = BenchSettings {
            primes: Some(vec![13]),
            n: Some(vec![16]),
            ..Default::default()
        };
        assert!(both.into_config().is_err());
        let bad = BenchSettings {
            algos: Some(vec!["v9".into()]),
            ..Default::default()
        };
        assert!(matches!(bad.into_config(), Err(Error::Config(m)) if m.starts_with("algos")));
    }

    #[test]
    fn toml_settings_and_diagnostics() {
        let s = BenchSettings::from_toml("seed = 7\nsamples = 10\nn = [16]\nalgos = [\"v2\"]\n")
            .unwrap();
        let cfg = s.clone().into_config().unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.algorithms, [Algorithm::V2]);
        let over = s.merge(BenchSettings {
            seed: Some(9),
            ..Default::default()
        });
        assert_eq!(over.seed, Some(9));
        assert_eq!(over.samples, Some(10));

        let err = BenchSettings::from_toml("seed = 1\nsampels = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sampels") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(emit_csv(&[]), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn v1_row_has_empty_rounds() {
        let ctx = PrimeContext::new(13).unwrap();
        let samples = sample_cell(&ctx, Algorithm::V1, 4, 1, &SqrtOptions::default()).unwrap();
        let rec = BenchRecord::aggregate(&ctx, Algorithm::V1, &samples);
        let text = emit_csv(&[rec]);
        let row = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[3], "v1");
        assert_eq!(fields[8], "");
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [2.0f64, 3.0, 5.0, 8.0]
            .iter()
            .map(|&x| (x, 3.0 * x.powf(1.5)))
            .collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }

    fn micros() -> impl Strategy<Value = f64> {
        (0u64..10_000_000_000).prop_map(|k| k as f64 / 1e6)
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in proptest::collection::vec(
                (3u64..(1 << 62), 1u32..63, 1u64..1_000_000, 0usize..3, 1usize..100_000,
                 micros(), micros(), micros(), proptest::option::of(micros()), 0u32..63),
                0..8,
            )
        ) {
            let records: Vec<BenchRecord> = rows
                .into_iter()
                .map(|(p, n, q, alg, samples, l, t, k, rounds, it)| BenchRecord {
                    p, n, q,
                    algorithm: Algorithm::ALL[alg],
                    samples,
                    mean_mul_loop: l,
                    mean_mul_total: t,
                    mean_lookups: k,
                    mean_rounds: rounds,
                    max_loop_iterations: it,
                })
                .collect();
            prop_assert_eq!(parse_csv(&emit_csv(&records)).unwrap(), records);
        }
    }
}
