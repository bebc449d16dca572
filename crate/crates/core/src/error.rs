use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} must be odd and in [3, 2^63)")]
    InvalidModulus(u64),
    #[error("modulus {0} is composite")]
    CompositeModulus(u64),
    #[error("{value} is not reduced modulo {modulus}")]
    NotReduced { value: u64, modulus: u64 },
    #[error("{0} is not a quadratic residue")]
    NotAResidue(u64),
    #[error("b did not reach 1 within {bound} squarings")]
    OrderExceedsBound { bound: u32 },
    #[error("table index {index} out of range for table of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    /// A loop invariant failed while invariant checking was enabled.
    #[error("invariant `{what}` violated at iteration {iteration}")]
    InvariantViolation { what: &'static str, iteration: u32 },
    #[error("modulus {0} is above the exhaustive-search bound")]
    ModulusTooLarge(u64),
    #[error("{0}")]
    Config(String),
    /// A benchmark sample failed; `r` reproduces it as input `r^2 mod p`.
    #[error("{algorithm} failed for p = {p}, r = {r}: {reason}")]
    SampleFailed {
        p: u64,
        r: u64,
        algorithm: &'static str,
        reason: String,
    },
}
