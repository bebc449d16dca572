//! Square roots modulo a prime `p = 2^n q + 1`, `q` odd.
//!
//! Three variants of Shanks' algorithm share one cost model, where every
//! modular multiplication and every table lookup is counted:
//!
//! - [`baseline::sqrt_v1`]: the classic loop, `O(log q + n^2)`
//!   multiplications.
//! - [`tabulated::sqrt_v2`]: tabulated powers in blocks of `ceil(sqrt n)`,
//!   `O(log q + n^(3/2))`.
//! - [`parallel::sqrt_v3`]: one fork-join round per iteration, modeled time
//!   `O(log q + n)` with `n` workers.
//!
//! [`oracle`] holds independent ground truth and [`bench`] drives sweeps
//! over Proth primes.

pub mod baseline;
pub mod bench;
pub mod cli;
pub mod error;
pub mod exec;
pub mod field;
pub mod oracle;
pub mod parallel;
pub mod sqrt;
pub mod table;
pub mod tabulated;

pub use baseline::sqrt_v1;
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use field::{build_context, Modulus, OpCounter, Phase, PrimeContext, Residue};
pub use parallel::sqrt_v3;
pub use sqrt::{Algorithm, CostBreakdown, SqrtOptions, SqrtOutcome};
pub use table::{PowerTable, ZRef};
pub use tabulated::sqrt_v2;
