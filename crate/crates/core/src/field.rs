//! Arithmetic modulo an odd prime below 2^63 with operation counting.
//!
//! Every semantic modular multiplication (squarings included) charges exactly
//! one unit to an [`OpCounter`]; table reads charge one lookup. Counts are
//! split by [`Phase`] so initialization cost can be reported apart from the
//! main loop.

use std::fmt;

use crate::error::{Error, Result};
use crate::oracle;

/// Largest admissible modulus (exclusive).
pub const MODULUS_LIMIT: u64 = 1 << 63;

/// An integer in `[0, p)` for the ambient modulus `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Residue(u64);

impl Residue {
    pub const ZERO: Residue = Residue(0);
    pub const ONE: Residue = Residue(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 1
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which part of an algorithm multiplications are charged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Phase {
    #[default]
    Init,
    Loop,
}

/// Tallies of modular multiplications and table lookups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct OpCounter {
    pub mul_init: u64,
    pub mul_loop: u64,
    pub lookups: u64,
    phase: Phase,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh counter charging to `phase`.
    pub fn in_phase(phase: Phase) -> Self {
        OpCounter {
            phase,
            ..Self::default()
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    #[inline]
    pub fn charge_mul(&mut self) {
        match self.phase {
            Phase::Init => self.mul_init += 1,
            Phase::Loop => self.mul_loop += 1,
        }
    }

    #[inline]
    pub fn charge_lookup(&mut self) {
        self.lookups += 1;
    }

    pub fn mul_total(&self) -> u64 {
        self.mul_init + self.mul_loop
    }

    /// Adds the tallies of `other`; the phase of `self` is kept.
    pub fn absorb(&mut self, other: &OpCounter) {
        self.mul_init += other.mul_init;
        self.mul_loop += other.mul_loop;
        self.lookups += other.lookups;
    }
}

/// An odd modulus `3 <= p < 2^63`. Primality is not checked here; see
/// [`PrimeContext::new`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || p >= MODULUS_LIMIT {
            return Err(Error::InvalidModulus(p));
        }
        Ok(Modulus(p))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    /// Wraps `v`, which must already be reduced.
    pub fn residue(self, v: u64) -> Result<Residue> {
        if v < self.0 {
            Ok(Residue(v))
        } else {
            Err(Error::NotReduced {
                value: v,
                modulus: self.0,
            })
        }
    }

    #[inline]
    pub fn reduce(self, v: u64) -> Residue {
        Residue(v % self.0)
    }

    #[inline]
    pub fn minus_one(self) -> Residue {
        Residue(self.0 - 1)
    }

    #[inline]
    pub fn neg(self, a: Residue) -> Residue {
        if a.0 == 0 {
            a
        } else {
            Residue(self.0 - a.0)
        }
    }

    /// `a * b mod p` without touching any counter. Reserved for invariant
    /// checks, which must not perturb the cost model.
    #[inline]
    pub(crate) fn mul_uncounted(self, a: Residue, b: Residue) -> Residue {
        Residue(((a.0 as u128 * b.0 as u128) % self.0 as u128) as u64)
    }

    /// `a * b mod p`, charging one multiplication.
    #[inline]
    pub fn mul(self, a: Residue, b: Residue, ctr: &mut OpCounter) -> Residue {
        ctr.charge_mul();
        self.mul_uncounted(a, b)
    }

    #[inline]
    pub fn square(self, a: Residue, ctr: &mut OpCounter) -> Residue {
        self.mul(a, a, ctr)
    }

    /// `a^e mod p` by left-to-right binary exponentiation.
    ///
    /// Charges `floor(log2 e)` squarings plus one multiplication per set bit
    /// below the top one, so at most `2 floor(log2 e)` and nothing for
    /// `e <= 1`.
    pub fn pow(self, a: Residue, e: u64, ctr: &mut OpCounter) -> Residue {
        if e == 0 {
            return Residue::ONE;
        }
        let top = 63 - e.leading_zeros();
        let mut acc = a;
        for bit in (0..top).rev() {
            acc = self.square(acc, ctr);
            if (e >> bit) & 1 == 1 {
                acc = self.mul(acc, a, ctr);
            }
        }
        acc
    }

    pub(crate) fn pow_uncounted(self, a: Residue, e: u64) -> Residue {
        self.pow(a, e, &mut OpCounter::new())
    }

    /// Euler's criterion. Zero is reported as a nonresidue.
    fn is_qr(self, a: Residue) -> bool {
        a.0 != 0 && self.pow_uncounted(a, (self.0 - 1) / 2).is_one()
    }
}

/// Splits `p - 1 = 2^n * q` with `q` odd.
pub fn decompose(p: u64) -> Result<(u32, u64)> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::InvalidModulus(p));
    }
    let m = p - 1;
    let n = m.trailing_zeros();
    Ok((n, m >> n))
}

/// A verified prime `p = 2^n q + 1` together with its smallest quadratic
/// nonresidue `u` and `z0 = u^q`, which has order exactly `2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    modulus: Modulus,
    n: u32,
    q: u64,
    u: Residue,
    z0: Residue,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        let modulus = Modulus::new(p)?;
        if !oracle::is_prime_deterministic(p) {
            return Err(Error::CompositeModulus(p));
        }
        let (n, q) = decompose(p)?;
        let u = (2..p)
            .map(Residue)
            .find(|&v| modulus.pow_uncounted(v, (p - 1) / 2) == modulus.minus_one())
            .expect("every odd prime has a quadratic nonresidue");
        let z0 = modulus.pow_uncounted(u, q);
        Ok(PrimeContext {
            modulus,
            n,
            q,
            u,
            z0,
        })
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.modulus.0
    }

    /// 2-adic valuation of `p - 1`.
    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Odd part of `p - 1`.
    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// The quadratic nonresidue.
    #[inline]
    pub fn u(&self) -> Residue {
        self.u
    }

    /// `u^q`, the generator of the 2-Sylow subgroup.
    #[inline]
    pub fn z0(&self) -> Residue {
        self.z0
    }

    pub fn residue(&self, v: u64) -> Result<Residue> {
        self.modulus.residue(v)
    }

    pub fn mul(&self, a: Residue, b: Residue, ctr: &mut OpCounter) -> Residue {
        self.modulus.mul(a, b, ctr)
    }

    pub fn pow_mod(&self, a: Residue, e: u64, ctr: &mut OpCounter) -> Residue {
        self.modulus.pow(a, e, ctr)
    }

    /// `true` iff `a^((p-1)/2) = 1`. Zero is not a residue here.
    pub fn euler_is_qr(&self, a: Residue) -> bool {
        self.modulus.is_qr(a)
    }
}

/// Builds the context for a prime `p`; fails with
/// [`Error::CompositeModulus`] when `p` is not prime.
pub fn build_context(p: u64) -> Result<PrimeContext> {
    PrimeContext::new(p)
}
