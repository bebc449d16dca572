//! Types shared by the three square-root variants.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::field::{Modulus, OpCounter, PrimeContext, Residue};
use crate::{baseline, parallel, tabulated};

/// Breakdown of where the multiplications of a run went.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostBreakdown {
    /// Multiplications spent locating `m` in each iteration.
    pub search_muls: u64,
    /// Multiplications charged while evaluating powers of `z`. Repeated
    /// squaring in the classic loop; zero when powers come from a table.
    pub z_power_muls: u64,
    pub z_power_lookups: u64,
    /// Loop-phase multiplications spent rebuilding or refreshing the b table.
    pub table_muls: u64,
    pub z_table_builds: u32,
    pub b_table_builds: u32,
    /// Modeled parallel time of the fork-join variant: initialization, the
    /// serial multiplications of each iteration, and one unit per round.
    pub critical_path: Option<u64>,
}

/// Result of one square-root computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtOutcome {
    pub root: Residue,
    pub counter: OpCounter,
    /// Fork-join rounds (parallel variant only).
    pub rounds: Option<u32>,
    pub loop_iterations: u32,
    /// The `m` found by each loop iteration, in order.
    pub m_sequence: Vec<u32>,
    pub costs: CostBreakdown,
}

impl SqrtOutcome {
    pub(crate) fn zero() -> Self {
        SqrtOutcome {
            root: Residue::ZERO,
            counter: OpCounter::new(),
            rounds: None,
            loop_iterations: 0,
            m_sequence: Vec::new(),
            costs: CostBreakdown::default(),
        }
    }

    /// `min(x, p - x)` for the returned root `x`.
    pub fn canonical_root(&self, m: Modulus) -> Residue {
        self.root.min(m.neg(self.root))
    }
}

/// Per-call knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SqrtOptions {
    /// Verify the loop invariants after every iteration with uncounted
    /// arithmetic; a failure aborts with [`Error::InvariantViolation`].
    pub check_invariants: bool,
    /// How the parallel variant runs its refresh rounds.
    pub mode: ExecMode,
}

impl Default for SqrtOptions {
    fn default() -> Self {
        SqrtOptions {
            check_invariants: cfg!(debug_assertions),
            mode: ExecMode::default(),
        }
    }
}

impl SqrtOptions {
    pub fn checked() -> Self {
        SqrtOptions {
            check_invariants: true,
            ..Self::default()
        }
    }

    pub fn with_mode(self, mode: ExecMode) -> Self {
        SqrtOptions { mode, ..self }
    }
}

/// The three variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Shanks' classic loop.
    V1,
    /// Tabulated powers with blocks of `ceil(sqrt(n))` iterations.
    V2,
    /// Live b table refreshed by one fork-join round per iteration.
    V3,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::V1, Algorithm::V2, Algorithm::V3];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::V1 => "v1",
            Algorithm::V2 => "v2",
            Algorithm::V3 => "v3",
        }
    }

    pub fn solve(self, a: Residue, ctx: &PrimeContext, opts: &SqrtOptions) -> Result<SqrtOutcome> {
        match self {
            Algorithm::V1 => baseline::sqrt_v1_with(a, ctx, opts),
            Algorithm::V2 => tabulated::sqrt_v2_with(a, ctx, opts),
            Algorithm::V3 => parallel::sqrt_v3_with(a, ctx, opts.mode, opts),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "v1" => Ok(Algorithm::V1),
            "v2" => Ok(Algorithm::V2),
            "v3" => Ok(Algorithm::V3),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected v1, v2 or v3)"
            ))),
        }
    }
}

/// Validates the input of a square-root routine. `Ok(None)` means `a = 0`,
/// whose root is 0 with no work.
pub(crate) fn admit(a: Residue, ctx: &PrimeContext) -> Result<Option<Residue>> {
    if a.value() >= ctx.p() {
        return Err(Error::NotReduced {
            value: a.value(),
            modulus: ctx.p(),
        });
    }
    if a == Residue::ZERO {
        return Ok(None);
    }
    if !ctx.euler_is_qr(a) {
        return Err(Error::NotAResidue(a.value()));
    }
    Ok(Some(a))
}

/// Step 1 shared by all variants: `x = a^((q+1)/2)` and `b = a^q`,
/// charged to the counter's current phase.
pub(crate) fn initial_xb(
    a: Residue,
    ctx: &PrimeContext,
    ctr: &mut OpCounter,
) -> (Residue, Residue) {
    // q is odd, so (q + 1) / 2 = q / 2 + 1.
    let x = ctx.pow_mod(a, ctx.q() / 2 + 1, ctr);
    let b = ctx.pow_mod(a, ctx.q(), ctr);
    (x, b)
}

/// Uncounted check of `x^2 = a b`.
pub(crate) fn check_xab(
    m: Modulus,
    x: Residue,
    a: Residue,
    b: Residue,
    iteration: u32,
) -> Result<()> {
    ensure(
        m.mul_uncounted(x, x) == m.mul_uncounted(a, b),
        "x^2 = a b",
        iteration,
    )
}

pub(crate) fn ensure(cond: bool, what: &'static str, iteration: u32) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvariantViolation { what, iteration })
    }
}

/// `ceil(sqrt(n))`, at least 1.
pub fn block_size(n: u32) -> u32 {
    (1u32..).find(|s| s * s >= n).unwrap()
}
