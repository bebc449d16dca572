//! Shanks' classic square-root loop.
//!
//! After `x = a^((q+1)/2)`, `b = a^q`, `z = u^q`, `k = n`, each iteration
//! finds the least `m` with `b^(2^m) = 1` by repeated squaring, then sets
//! `t = z^(2^(k-m-1))`, `z = t^2`, `b = b z`, `x = x t`, `k = m`, until
//! `b = 1`. Throughout, `x^2 = a b`.
//!
//! Per iteration this charges `m` squarings for the search, `k - m - 1` for
//! `t`, and one each for `z`, `b` and `x`: `k + 2` in total.

use crate::error::{Error, Result};
use crate::field::{Modulus, OpCounter, Phase, PrimeContext, Residue};
use crate::sqrt::{self, check_xab, ensure, CostBreakdown, SqrtOptions, SqrtOutcome};

/// Least `m >= 0` with `b^(2^m) = 1`, found by squaring `b` until it
/// reaches 1. Charges exactly `m` multiplications.
///
/// Fails with [`Error::OrderExceedsBound`] if 1 is not reached within
/// `k_max` squarings.
pub fn least_order_exponent(
    b: Residue,
    k_max: u32,
    m: Modulus,
    ctr: &mut OpCounter,
) -> Result<u32> {
    let mut cur = b;
    let mut e = 0;
    while !cur.is_one() {
        if e == k_max {
            return Err(Error::OrderExceedsBound { bound: k_max });
        }
        cur = m.square(cur, ctr);
        e += 1;
    }
    Ok(e)
}

pub fn sqrt_v1(a: Residue, ctx: &PrimeContext) -> Result<SqrtOutcome> {
    sqrt_v1_with(a, ctx, &SqrtOptions::default())
}

pub fn sqrt_v1_with(a: Residue, ctx: &PrimeContext, opts: &SqrtOptions) -> Result<SqrtOutcome> {
    let Some(a) = sqrt::admit(a, ctx)? else {
        return Ok(SqrtOutcome::zero());
    };
    let md = ctx.modulus();
    let checks = opts.check_invariants;

    let mut ctr = OpCounter::new();
    let (mut x, mut b) = sqrt::initial_xb(a, ctx, &mut ctr);
    let mut z = ctx.z0();
    let mut k = ctx.n();
    ctr.set_phase(Phase::Loop);

    let mut costs = CostBreakdown::default();
    let mut m_sequence = Vec::new();
    let mut iters = 0u32;
    if checks {
        check_xab(md, x, a, b, 0)?;
    }

    while !b.is_one() {
        if checks {
            check_orders(md, z, b, k, iters)?;
        }
        // ord(b) < ord(z) = 2^k, so 1 must appear within k - 1 squarings.
        let before = ctr.mul_total();
        let m =
            least_order_exponent(b, k.saturating_sub(1), md, &mut ctr).map_err(|e| match e {
                Error::OrderExceedsBound { .. } => Error::NotAResidue(a.value()),
                other => other,
            })?;
        costs.search_muls += ctr.mul_total() - before;

        let before = ctr.mul_total();
        let mut t = z;
        for _ in 0..(k - m - 1) {
            t = md.square(t, &mut ctr);
        }
        z = md.square(t, &mut ctr);
        costs.z_power_muls += ctr.mul_total() - before;
        b = md.mul(b, z, &mut ctr);
        x = md.mul(x, t, &mut ctr);
        k = m;

        iters += 1;
        m_sequence.push(m);
        if checks {
            check_xab(md, x, a, b, iters)?;
        }
    }

    Ok(SqrtOutcome {
        root: x,
        counter: ctr,
        rounds: None,
        loop_iterations: iters,
        m_sequence,
        costs,
    })
}

/// `ord(z) = 2^k` exactly and `ord(b) < 2^k`.
fn check_orders(md: Modulus, z: Residue, b: Residue, k: u32, iteration: u32) -> Result<()> {
    let pow2 = |v: Residue, e: u32| (0..e).fold(v, |acc, _| md.mul_uncounted(acc, acc));
    ensure(k >= 1, "k >= 1", iteration)?;
    ensure(pow2(z, k).is_one(), "z^(2^k) = 1", iteration)?;
    ensure(!pow2(z, k - 1).is_one(), "z^(2^(k-1)) != 1", iteration)?;
    ensure(pow2(b, k - 1).is_one(), "b^(2^(k-1)) = 1", iteration)
}
