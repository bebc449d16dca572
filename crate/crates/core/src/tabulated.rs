//! Tabulated variant of Shanks' loop.
//!
//! The powers `z0^(2^j)` are tabulated once, so every `z` the loop touches is
//! a [`ZRef`] and raising it to `2^m` is a lookup. Iterations are grouped in
//! blocks of `ceil(sqrt(n))`. At block start `b0 = b` and a table of
//! `b0^(2^j)` is built. Inside a block the least `m` is found from
//! `b0^(2^m) z_1^(2^m) ... z_i^(2^m)` using lookups and `i` multiplications
//! per candidate, never by squaring `b`. The running `b` is only compared
//! against 1.
//!
//! The first block's table (up to `n`) counts as initialization along with
//! the z table; later block tables are built only up to the current `k`.

use crate::error::Result;
use crate::field::{Modulus, OpCounter, Phase, PrimeContext, Residue};
use crate::sqrt::{self, block_size, check_xab, ensure, CostBreakdown, SqrtOptions, SqrtOutcome};
use crate::table::{PowerTable, ZRef};

/// State of one block of inner iterations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockState {
    /// Current order bound: `ord(z) = 2^k`.
    pub k: u32,
    /// `b` at block start.
    pub b0: Residue,
    /// `z_1 .. z_i`, the factors multiplied into `b` since block start.
    pub z_refs: Vec<ZRef>,
    /// Powers of `b0` up to exponent `k` at block start.
    pub b_table: PowerTable,
    pub x: Residue,
    /// Running `b = b0 z_1 ... z_i`.
    pub b: Residue,
}

impl BlockState {
    /// Opens a block at `b`, building its power table up to exponent `k`.
    pub fn start(b: Residue, x: Residue, k: u32, md: Modulus, ctr: &mut OpCounter) -> Self {
        BlockState {
            k,
            b0: b,
            z_refs: Vec::new(),
            b_table: PowerTable::build(b, k as usize, md, ctr),
            x,
            b,
        }
    }

    /// Number of z factors accumulated in this block.
    pub fn i(&self) -> usize {
        self.z_refs.len()
    }

    /// Whether `b0^(2^m) z_1^(2^m) ... z_i^(2^m) = 1`, using `i + 1`
    /// lookups and `i` multiplications.
    pub fn product_is_one_at(
        &self,
        m: u32,
        z_table: &PowerTable,
        md: Modulus,
        ctr: &mut OpCounter,
    ) -> Result<bool> {
        self.product_at(m, z_table, md, ctr, &mut CostBreakdown::default())
    }

    /// Least `m` for which the block product is 1, scanning downward from
    /// `k - 1` until the product is not 1. Costs `(k - m) i`
    /// multiplications.
    pub fn find_least_m(
        &self,
        z_table: &PowerTable,
        md: Modulus,
        ctr: &mut OpCounter,
    ) -> Result<u32> {
        self.find_least_m_tallied(z_table, md, ctr, &mut CostBreakdown::default())
    }

    fn find_least_m_tallied(
        &self,
        z_table: &PowerTable,
        md: Modulus,
        ctr: &mut OpCounter,
        tally: &mut CostBreakdown,
    ) -> Result<u32> {
        for cand in (0..self.k).rev() {
            if !self.product_at(cand, z_table, md, ctr, tally)? {
                return Ok(cand + 1);
            }
        }
        Ok(0)
    }

    fn product_at(
        &self,
        m: u32,
        z_table: &PowerTable,
        md: Modulus,
        ctr: &mut OpCounter,
        tally: &mut CostBreakdown,
    ) -> Result<bool> {
        let m = m as usize;
        let mut acc = self.b_table.lookup(m, ctr)?;
        for z in &self.z_refs {
            let before = ctr.mul_total();
            let zp = z.pow2(m, z_table, ctr)?;
            tally.z_power_muls += ctr.mul_total() - before;
            tally.z_power_lookups += 1;
            acc = md.mul(acc, zp, ctr);
        }
        Ok(acc.is_one())
    }

    /// Uncounted check of `b = b0 z_1 ... z_i`.
    fn running_product_holds(&self, z_table: &PowerTable, md: Modulus) -> bool {
        let prod = self.z_refs.iter().fold(self.b0, |acc, z| {
            md.mul_uncounted(acc, z_table.entries()[z.shift])
        });
        prod == self.b
    }
}

pub fn sqrt_v2(a: Residue, ctx: &PrimeContext) -> Result<SqrtOutcome> {
    sqrt_v2_with(a, ctx, &SqrtOptions::default())
}

pub fn sqrt_v2_with(a: Residue, ctx: &PrimeContext, opts: &SqrtOptions) -> Result<SqrtOutcome> {
    let Some(a) = sqrt::admit(a, ctx)? else {
        return Ok(SqrtOutcome::zero());
    };
    let md = ctx.modulus();
    let n = ctx.n();
    let checks = opts.check_invariants;
    let block = block_size(n) as usize;

    let mut ctr = OpCounter::new();
    let mut costs = CostBreakdown::default();
    let (x, b) = sqrt::initial_xb(a, ctx, &mut ctr);
    let z_table = PowerTable::build(ctx.z0(), n as usize, md, &mut ctr);
    costs.z_table_builds = 1;
    let mut st = BlockState::start(b, x, n, md, &mut ctr);
    costs.b_table_builds = 1;
    ctr.set_phase(Phase::Loop);

    // Current z, of order 2^k; its shift is always n - k.
    let mut z = ZRef::GENERATOR;
    let mut m_sequence = Vec::new();
    let mut iters = 0u32;
    if checks {
        check_xab(md, st.x, a, st.b, 0)?;
    }

    while !st.b.is_one() {
        ensure(st.k >= 1, "k >= 1", iters)?;
        let before = ctr.mul_total();
        let m = st.find_least_m_tallied(&z_table, md, &mut ctr, &mut costs)?;
        costs.search_muls += ctr.mul_total() - before;
        ensure(m >= 1 && m < st.k, "0 < m < k", iters)?;

        let t = z.squared((st.k - m - 1) as usize);
        let z_next = t.squared(1);
        let before = ctr.mul_total();
        let t_val = t.value(&z_table, &mut ctr)?;
        let z_val = z_next.value(&z_table, &mut ctr)?;
        costs.z_power_muls += ctr.mul_total() - before;
        costs.z_power_lookups += 2;
        st.b = md.mul(st.b, z_val, &mut ctr);
        st.x = md.mul(st.x, t_val, &mut ctr);
        st.z_refs.push(z_next);
        st.k = m;
        z = z_next;

        iters += 1;
        m_sequence.push(m);
        if checks {
            check_xab(md, st.x, a, st.b, iters)?;
            ensure(
                st.running_product_holds(&z_table, md),
                "b = b0 z_1 ... z_i",
                iters,
            )?;
            ensure(z.shift == (n - st.k) as usize, "shift(z) = n - k", iters)?;
            ensure(st.i() <= block, "i <= ceil(sqrt n)", iters)?;
        }

        if !st.b.is_one() && st.i() >= block {
            let before = ctr.mul_total();
            st = BlockState::start(st.b, st.x, st.k, md, &mut ctr);
            costs.table_muls += ctr.mul_total() - before;
            costs.b_table_builds += 1;
        }
    }

    Ok(SqrtOutcome {
        root: st.x,
        counter: ctr,
        rounds: None,
        loop_iterations: iters,
        m_sequence,
        costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::sqrt_v1_with;
    use crate::field::build_context;

    fn m17() -> Modulus {
        Modulus::new(17).unwrap()
    }

    fn block(b0: u64, k: u32) -> BlockState {
        let md = m17();
        BlockState::start(
            md.residue(b0).unwrap(),
            Residue::ONE,
            k,
            md,
            &mut OpCounter::new(),
        )
    }

    #[test]
    fn product_examples() {
        let md = m17();
        let zt = PowerTable::build(md.residue(3).unwrap(), 4, md, &mut OpCounter::new());
        let mut ctr = OpCounter::new();
        let ones = block(1, 3);
        for m in 0..=3 {
            assert!(ones.product_is_one_at(m, &zt, md, &mut ctr).unwrap());
        }
        let four = block(4, 3);
        assert!(four.product_is_one_at(2, &zt, md, &mut ctr).unwrap());
        assert!(!four.product_is_one_at(1, &zt, md, &mut ctr).unwrap());
        assert_eq!(ctr.mul_total(), 0);
        assert_eq!(ctr.lookups, 6);
    }

    #[test]
    fn product_charges_i_multiplications() {
        let md = m17();
        let zt = PowerTable::build(md.residue(3).unwrap(), 4, md, &mut OpCounter::new());
        let mut st = block(4, 3);
        st.z_refs = vec![ZRef::new(1), ZRef::new(2)];
        let mut ctr = OpCounter::new();
        // 4^2 * 9^2 * 13^2 = 16 * 13 * 16 mod 17 = 13
        assert!(!st.product_is_one_at(1, &zt, md, &mut ctr).unwrap());
        assert_eq!((ctr.mul_total(), ctr.lookups), (2, 3));
        st.z_refs.push(ZRef::new(4));
        assert!(st.product_is_one_at(1, &zt, md, &mut ctr).is_err());
    }

    #[test]
    fn find_least_m_examples() {
        let md = m17();
        let zt = PowerTable::build(md.residue(3).unwrap(), 4, md, &mut OpCounter::new());
        let mut ctr = OpCounter::new();
        assert_eq!(block(4, 3).find_least_m(&zt, md, &mut ctr).unwrap(), 2);
        assert_eq!(block(16, 2).find_least_m(&zt, md, &mut ctr).unwrap(), 1);
        assert_eq!(block(1, 3).find_least_m(&zt, md, &mut ctr).unwrap(), 0);
    }

    #[test]
    fn sqrt_examples() {
        let c7 = build_context(7).unwrap();
        let x = sqrt_v2(c7.residue(2).unwrap(), &c7).unwrap().root.value();
        assert!(x == 3 || x == 4);
        let out = sqrt_v2(Residue::ZERO, &c7).unwrap();
        assert_eq!(out.root, Residue::ZERO);
        assert_eq!(out.costs.z_table_builds, 0);
    }

    #[test]
    fn matches_classic_loop_on_large_prime() {
        let c = build_context(998_244_353).unwrap();
        let opts = SqrtOptions::checked();
        let mut r = 1u64;
        for _ in 0..1000 {
            r = (r * 48271 + 11) % c.p();
            let a = c.modulus().reduce(r * r % c.p());
            let v1 = sqrt_v1_with(a, &c, &opts).unwrap();
            let v2 = sqrt_v2_with(a, &c, &opts).unwrap();
            assert_eq!(v1.m_sequence, v2.m_sequence);
            assert_eq!(v1.root, v2.root);
            assert_eq!(v2.costs.z_table_builds, 1);
            assert_eq!(v2.costs.z_power_muls, 0);
            let n = c.n();
            let bs = block_size(n);
            assert!(v2.costs.b_table_builds <= n.div_ceil(bs) + 1);
            if let (Some(&first), Some(&last)) = (v2.m_sequence.first(), v2.m_sequence.last()) {
                let bound = (first - last) as u64 * bs as u64 + n as u64;
                assert!(v2.costs.search_muls <= bound);
            }
            assert_eq!(
                v2.counter.mul_loop,
                v2.costs.table_muls + v2.costs.search_muls + 2 * v2.loop_iterations as u64
            );
        }
    }
}
