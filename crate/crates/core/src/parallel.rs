//! Fork-join variant of Shanks' loop.
//!
//! Both `z0^(2^j)` and `b^(2^j)` are kept in tables. The least `m` is a scan
//! of the b table, with no multiplications. After `z` moves (an index shift)
//! and `x = x t`, every entry of the new b table is
//! `b^(2^j) z^(2^j)`, one independent multiplication per `j`. Those
//! `m + 1` products form one fork-join round.

use crate::error::{Error, Result};
use crate::exec::{fork_join, ExecMode};
use crate::field::{Modulus, OpCounter, Phase, PrimeContext, Residue};
use crate::sqrt::{self, check_xab, ensure, CostBreakdown, SqrtOptions, SqrtOutcome};
use crate::table::{PowerTable, ZRef};

/// Computes the powers of `b z` up to exponent `m` from the stored powers of
/// `b` and of `z` (at `z.shift + j` in `z_table`).
///
/// Each entry is one multiplication and two lookups, with no dependency
/// between entries. Tasks tally into private counters that are merged into
/// `ctr` after the barrier, so totals do not depend on `mode`.
pub fn refresh_powers(
    b_table: &PowerTable,
    z_table: &PowerTable,
    z: ZRef,
    m: usize,
    md: Modulus,
    mode: ExecMode,
    ctr: &mut OpCounter,
) -> Result<PowerTable> {
    if m > b_table.max_exponent() {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: b_table.entries().len(),
        });
    }
    if z.shift + m > z_table.max_exponent() {
        return Err(Error::IndexOutOfRange {
            index: z.shift + m,
            len: z_table.entries().len(),
        });
    }
    let phase = ctr.phase();
    let results = fork_join(mode, m + 1, |j| {
        let mut local = OpCounter::in_phase(phase);
        let bj = b_table.lookup(j, &mut local)?;
        let zj = z.pow2(j, z_table, &mut local)?;
        Ok((md.mul(bj, zj, &mut local), local))
    });
    let mut entries = Vec::with_capacity(m + 1);
    for r in results {
        let (v, local) = r?;
        ctr.absorb(&local);
        entries.push(v);
    }
    Ok(PowerTable::from_entries(entries))
}

/// Loop state of the fork-join variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelState {
    /// Current order bound: `ord(z) = 2^k`.
    pub k: u32,
    pub x: Residue,
    /// Current `z` as a position in the master table.
    pub z: ZRef,
    /// `b^(2^j)` for the current `b`, `0 <= j <= k`.
    pub b_table: PowerTable,
    pub rounds: u32,
}

impl ParallelState {
    pub fn b(&self) -> Residue {
        self.b_table.base()
    }

    /// Replaces the b table by the powers of `b z` up to exponent `m`, as
    /// one fork-join round.
    pub fn refresh_b_table(
        &mut self,
        m: u32,
        z_table: &PowerTable,
        md: Modulus,
        mode: ExecMode,
        ctr: &mut OpCounter,
    ) -> Result<()> {
        self.b_table = refresh_powers(&self.b_table, z_table, self.z, m as usize, md, mode, ctr)?;
        self.rounds += 1;
        Ok(())
    }

    /// Least `m >= 1` with `b^(2^m) = 1`, read off the b table. Lookups only.
    fn scan_least_m(&self, ctr: &mut OpCounter) -> Result<Option<u32>> {
        for j in 1..=self.k as usize {
            if self.b_table.lookup(j, ctr)?.is_one() {
                return Ok(Some(j as u32));
            }
        }
        Ok(None)
    }
}

pub fn sqrt_v3(a: Residue, ctx: &PrimeContext, mode: ExecMode) -> Result<SqrtOutcome> {
    sqrt_v3_with(a, ctx, mode, &SqrtOptions::default())
}

pub fn sqrt_v3_with(
    a: Residue,
    ctx: &PrimeContext,
    mode: ExecMode,
    opts: &SqrtOptions,
) -> Result<SqrtOutcome> {
    let Some(a) = sqrt::admit(a, ctx)? else {
        let mut out = SqrtOutcome::zero();
        out.rounds = Some(0);
        out.costs.critical_path = Some(0);
        return Ok(out);
    };
    let md = ctx.modulus();
    let n = ctx.n();
    let checks = opts.check_invariants;

    let mut ctr = OpCounter::new();
    let mut costs = CostBreakdown::default();
    let (x, b) = sqrt::initial_xb(a, ctx, &mut ctr);
    let z_table = PowerTable::build(ctx.z0(), n as usize, md, &mut ctr);
    costs.z_table_builds = 1;
    let mut st = ParallelState {
        k: n,
        x,
        z: ZRef::GENERATOR,
        b_table: PowerTable::build(b, n as usize, md, &mut ctr),
        rounds: 0,
    };
    costs.b_table_builds = 1;
    ctr.set_phase(Phase::Loop);

    let mut m_sequence = Vec::new();
    let mut iters = 0u32;
    let mut serial_muls = 0u64;
    if checks {
        check_xab(md, st.x, a, st.b(), 0)?;
    }

    while !st.b().is_one() {
        let before = ctr.mul_total();
        let m = st
            .scan_least_m(&mut ctr)?
            .filter(|&m| m < st.k)
            .ok_or(Error::NotAResidue(a.value()))?;
        costs.search_muls += ctr.mul_total() - before;

        let t = st.z.squared((st.k - m - 1) as usize);
        let before = ctr.mul_total();
        let t_val = t.value(&z_table, &mut ctr)?;
        costs.z_power_muls += ctr.mul_total() - before;
        costs.z_power_lookups += 1;
        st.x = md.mul(st.x, t_val, &mut ctr);
        serial_muls += 1;
        st.z = t.squared(1);
        st.k = m;

        let before = ctr.mul_total();
        let lookups_before = ctr.lookups;
        st.refresh_b_table(m, &z_table, md, mode, &mut ctr)?;
        costs.table_muls += ctr.mul_total() - before;
        // Half of a refresh's lookups read z powers.
        costs.z_power_lookups += (ctr.lookups - lookups_before) / 2;

        iters += 1;
        m_sequence.push(m);
        if checks {
            check_xab(md, st.x, a, st.b(), iters)?;
            ensure(
                st.b_table.is_consistent(md),
                "b table entries are successive squares",
                iters,
            )?;
            ensure(
                st.b_table.max_exponent() == st.k as usize,
                "b table covers exponent k",
                iters,
            )?;
            ensure(st.z.shift == (n - st.k) as usize, "shift(z) = n - k", iters)?;
        }
    }

    costs.critical_path = Some(ctr.mul_init + serial_muls + st.rounds as u64);
    Ok(SqrtOutcome {
        root: st.x,
        counter: ctr,
        rounds: Some(st.rounds),
        loop_iterations: iters,
        m_sequence,
        costs,
    })
}
