//! Ground truth independent of the square-root code: exhaustive root
//! enumeration, deterministic Miller-Rabin, and the closed-form average
//! loop cost of the classic algorithm.

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest modulus [`brute_force_roots`] will scan.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// All square roots of `a` modulo `p`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSet {
    pub a: u64,
    pub roots: Vec<u64>,
}

impl RootSet {
    pub fn contains(&self, x: u64) -> bool {
        self.roots.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// `{ x in [0, p) : x^2 = a mod p }` by full scan.
pub fn brute_force_roots(a: u64, p: u64) -> Result<RootSet> {
    if p > EXHAUSTIVE_LIMIT {
        return Err(Error::ModulusTooLarge(p));
    }
    if a >= p {
        return Err(Error::NotReduced {
            value: a,
            modulus: p,
        });
    }
    let roots = (0..p).filter(|&x| x * x % p == a).collect();
    Ok(RootSet { a, roots })
}

/// Every QR of `[0, p)` mapped to its roots, from one pass over `x`.
pub fn root_table(p: u64) -> Result<Vec<Vec<u64>>> {
    if p > EXHAUSTIVE_LIMIT {
        return Err(Error::ModulusTooLarge(p));
    }
    let mut table = vec![Vec::new(); p as usize];
    for x in 0..p {
        table[(x * x % p) as usize].push(x);
    }
    Ok(table)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

// The first twelve primes as Miller-Rabin bases are deterministic for all
// n < 3.3 * 10^24.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Exact primality for any `u64`.
pub fn is_prime_deterministic(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Lindhurst's average number of loop multiplications for the classic
/// algorithm: `(n^2 + 7n - 12) / 4 + 1 / 2^(n-1)`, exactly.
///
/// # Panics
///
/// If `n` is outside `1..=63`.
pub fn lindhurst_expected(n: u32) -> Ratio<i128> {
    assert!((1..=63).contains(&n), "n = {n} out of range");
    let n_i = n as i128;
    let pow = 1i128 << (n - 1);
    Ratio::new(n_i * n_i + 7 * n_i - 12, 4) + Ratio::new(1, pow)
}

/// [`lindhurst_expected`] as a float.
pub fn lindhurst_expected_f64(n: u32) -> f64 {
    let r = lindhurst_expected(n);
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_roots(2, 7).unwrap().roots, [3, 4]);
        assert_eq!(brute_force_roots(0, 13).unwrap().roots, [0]);
        assert!(brute_force_roots(3, 5).unwrap().is_empty());
        assert_eq!(
            brute_force_roots(1, 1_000_003),
            Err(Error::ModulusTooLarge(1_000_003))
        );
        assert!(brute_force_roots(9, 7).is_err());
    }

    #[test]
    fn root_table_agrees_with_scan() {
        let t = root_table(97).unwrap();
        for a in 0..97 {
            assert_eq!(t[a as usize], brute_force_roots(a, 97).unwrap().roots);
        }
    }

    #[test]
    fn nonzero_root_sets_have_size_zero_or_two() {
        for p in (3..2000u64).filter(|&p| trial_division(p)) {
            let t = root_table(p).unwrap();
            assert_eq!(t[0], [0]);
            for (a, roots) in t.iter().enumerate().skip(1) {
                assert!(roots.is_empty() || roots.len() == 2, "p = {p}, a = {a}");
                if roots.len() == 2 {
                    assert_eq!(roots[0] + roots[1], p);
                }
            }
        }
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime_deterministic(998_244_353));
        assert!(is_prime_deterministic(3 * (1 << 30) + 1));
        assert!(!is_prime_deterministic(1 << 16));
        assert!(is_prime_deterministic(65537));
        assert!(is_prime_deterministic((1u64 << 63) - 25));
        assert!(is_prime_deterministic(u64::MAX - 58));
        // Strong pseudoprimes to bases {2, 3, 5, 7} and to the first nine primes.
        assert!(!is_prime_deterministic(3_215_031_751));
        assert!(!is_prime_deterministic(3_825_123_056_546_413_051));
        assert!(!is_prime_deterministic(0));
        assert!(!is_prime_deterministic(1));
    }

    #[test]
    fn primality_matches_trial_division_below_one_million() {
        let mut sieve = vec![true; 1_000_000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..1000 {
            if sieve[i] {
                for j in (i * i..1_000_000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for n in 0..1_000_000u64 {
            assert_eq!(is_prime_deterministic(n), sieve[n as usize], "n = {n}");
        }
        for n in [2u64, 3, 91, 561, 7919, 999_983] {
            assert_eq!(trial_division(n), sieve[n as usize]);
        }
    }

    #[test]
    fn lindhurst_examples() {
        assert_eq!(lindhurst_expected(4), Ratio::new(65, 8));
        assert_eq!(lindhurst_expected(1), Ratio::from_integer(0));
        assert_eq!(
            lindhurst_expected(30),
            Ratio::new(549, 2) + Ratio::new(1, 1 << 29)
        );
        assert!((lindhurst_expected_f64(30) - 274.5).abs() < 1e-8);
    }
}
