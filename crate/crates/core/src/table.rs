//! Tables of repeated squares.
//!
//! A [`PowerTable`] for `base` stores `base^(2^j)` for `j = 0..=L`, so raising
//! a tabulated element to `2^m` is an index shift rather than `m` squarings.

use crate::error::{Error, Result};
use crate::field::{Modulus, OpCounter, Residue};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerTable {
    entries: Vec<Residue>,
}

impl PowerTable {
    /// Builds `[base, base^2, base^4, ..., base^(2^len_exp)]`, charging
    /// exactly `len_exp` multiplications.
    pub fn build(base: Residue, len_exp: usize, m: Modulus, ctr: &mut OpCounter) -> Self {
        let mut entries = Vec::with_capacity(len_exp + 1);
        entries.push(base);
        let mut cur = base;
        for _ in 0..len_exp {
            cur = m.square(cur, ctr);
            entries.push(cur);
        }
        PowerTable { entries }
    }

    /// Caller guarantees `entries[j + 1] = entries[j]^2`.
    pub(crate) fn from_entries(entries: Vec<Residue>) -> Self {
        debug_assert!(!entries.is_empty());
        PowerTable { entries }
    }

    pub fn base(&self) -> Residue {
        self.entries[0]
    }

    /// Highest stored exponent `L`.
    pub fn max_exponent(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn entries(&self) -> &[Residue] {
        &self.entries
    }

    /// `base^(2^j)`, charging one lookup.
    pub fn lookup(&self, j: usize, ctr: &mut OpCounter) -> Result<Residue> {
        let v = self.entries.get(j).copied().ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.entries.len(),
        })?;
        ctr.charge_lookup();
        Ok(v)
    }

    /// Whether every entry is the square of its predecessor, checked
    /// without charging the counter.
    pub fn is_consistent(&self, m: Modulus) -> bool {
        self.entries
            .windows(2)
            .all(|w| m.mul_uncounted(w[0], w[0]) == w[1])
    }
}

/// Free-function form of [`PowerTable::build`].
pub fn build_power_table(
    base: Residue,
    len_exp: usize,
    m: Modulus,
    ctr: &mut OpCounter,
) -> PowerTable {
    PowerTable::build(base, len_exp, m, ctr)
}

/// Free-function form of [`PowerTable::lookup`].
pub fn table_lookup(table: &PowerTable, j: usize, ctr: &mut OpCounter) -> Result<Residue> {
    table.lookup(j, ctr)
}

/// A power of the 2-Sylow generator `z0 = u^q`, stored as its position
/// `shift` in the master table: the referenced value is `z0^(2^shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZRef {
    pub shift: usize,
}

impl ZRef {
    pub const GENERATOR: ZRef = ZRef { shift: 0 };

    pub fn new(shift: usize) -> Self {
        ZRef { shift }
    }

    /// The element obtained by squaring this one `times` times. No
    /// arithmetic happens; only the index moves.
    #[inline]
    pub fn squared(self, times: usize) -> ZRef {
        ZRef {
            shift: self.shift + times,
        }
    }

    /// The referenced value, one lookup.
    pub fn value(self, z_table: &PowerTable, ctr: &mut OpCounter) -> Result<Residue> {
        z_table.lookup(self.shift, ctr)
    }

    /// `z^(2^m)` for the referenced `z`, one lookup.
    pub fn pow2(self, m: usize, z_table: &PowerTable, ctr: &mut OpCounter) -> Result<Residue> {
        z_table.lookup(self.shift + m, ctr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vals(t: &PowerTable) -> Vec<u64> {
        t.entries().iter().map(|r| r.value()).collect()
    }

    #[test]
    fn build_examples() {
        let m = Modulus::new(17).unwrap();
        let mut ctr = OpCounter::new();
        let t = build_power_table(m.residue(2).unwrap(), 3, m, &mut ctr);
        assert_eq!(vals(&t), [2, 4, 16, 1]);
        assert_eq!(ctr.mul_total(), 3);

        let ones = build_power_table(Residue::ONE, 9, m, &mut ctr);
        assert!(ones.entries().iter().all(|r| r.is_one()));

        let neg = build_power_table(m.minus_one(), 2, m, &mut ctr);
        assert_eq!(vals(&neg), [16, 1, 1]);
        assert_eq!(ctr.mul_total(), 3 + 9 + 2);
        assert_eq!(ctr.lookups, 0);
    }

    #[test]
    fn lookup_examples() {
        let m = Modulus::new(17).unwrap();
        let mut ctr = OpCounter::new();
        let t = build_power_table(m.residue(2).unwrap(), 3, m, &mut ctr);
        let built = ctr;
        assert_eq!(table_lookup(&t, 0, &mut ctr).unwrap(), t.base());
        assert_eq!(table_lookup(&t, 2, &mut ctr).unwrap().value(), 16);
        assert_eq!(
            table_lookup(&t, 5, &mut ctr),
            Err(Error::IndexOutOfRange { index: 5, len: 4 })
        );
        assert_eq!(ctr.lookups, 2);
        assert_eq!(ctr.mul_total(), built.mul_total());
    }

    #[test]
    fn zref_shifts_cost_nothing() {
        let m = Modulus::new(17).unwrap();
        let mut ctr = OpCounter::new();
        let zt = build_power_table(m.residue(3).unwrap(), 4, m, &mut ctr);
        let before = ctr.mul_total();
        let z = ZRef::GENERATOR.squared(1);
        assert_eq!(z.value(&zt, &mut ctr).unwrap().value(), 9);
        assert_eq!(z.pow2(2, &zt, &mut ctr).unwrap().value(), 16);
        assert!(z.pow2(4, &zt, &mut ctr).is_err());
        assert_eq!(ctr.mul_total(), before);
        assert_eq!(ctr.lookups, 2);
    }

    proptest! {
        #[test]
        fn successive_entries_are_squares(base in 0u64..998_244_353, len in 0usize..40) {
            let m = Modulus::new(998_244_353).unwrap();
            let mut ctr = OpCounter::new();
            let t = PowerTable::build(m.residue(base).unwrap(), len, m, &mut ctr);
            prop_assert_eq!(ctr.mul_total(), len as u64);
            prop_assert!(t.is_consistent(m));
            for j in 0..len {
                let x = t.lookup(j, &mut ctr).unwrap();
                let y = t.lookup(j + 1, &mut ctr).unwrap();
                prop_assert_eq!(m.mul(x, x, &mut ctr), y);
            }
        }
    }
}
