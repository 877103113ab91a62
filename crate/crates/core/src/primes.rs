//! Prime generation, factorization and sums of prime reciprocals.
//!
//! Two containers are provided. [`Primes`] is the ordered list of primes up to
//! a limit, produced by an odd-only sieve of Eratosthenes; it is all that the
//! independent-model routines need and stays cheap at `10^8`. [`PrimeTable`]
//! adds a smallest-prime-factor index built by a one-pass linear sieve, which
//! gives `O(log m)` factorization of every `m <= limit`.
//!
//! The smallest-prime-factor index stores, for every odd `m`, the position of
//! `spf(m)` in the prime list (or `0` when `m` is itself prime). A composite
//! `m <= 2^31` has `spf(m) <= 46341`, and there are fewer than `2^16` primes
//! below that, so the index fits in a `u16` and the table costs one byte per
//! integer.

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Largest sieve limit accepted by [`Primes::sieve`] and [`PrimeTable::new`].
pub const MAX_LIMIT: u64 = 1 << 31;

/// Largest `N` accepted by [`omega_sieve`].
pub const OMEGA_SIEVE_MAX: u64 = 100_000_000;

/// Ordered primes `p_1 < p_2 < ...` not exceeding `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Primes {
    limit: u64,
    primes: Vec<u64>,
}

impl Primes {
    /// Sieve of Eratosthenes over odd numbers.
    pub fn sieve(limit: u64) -> Result<Self> {
        check_limit(limit)?;
        let half = (limit as usize - 1) / 2; // odd numbers 3, 5, ..., <= limit
        let mut composite = vec![false; half + 1]; // index i <-> 2i + 1
        let mut i = 1usize;
        while (2 * i + 1) * (2 * i + 1) <= limit as usize {
            if !composite[i] {
                let p = 2 * i + 1;
                let mut j = (p * p - 1) / 2;
                while j <= half {
                    composite[j] = true;
                    j += p;
                }
            }
            i += 1;
        }
        let mut primes = Vec::with_capacity(estimate_pi(limit));
        primes.push(2);
        primes.extend(
            composite
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, &c)| !c)
                .map(|(i, _)| 2 * i as u64 + 1),
        );
        Ok(Primes { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `p <= n`. Errors when `n` exceeds the sieve limit.
    pub fn up_to(&self, n: u64) -> Result<&[u64]> {
        if n > self.limit {
            return Err(Error::capacity("n", n, self.limit));
        }
        Ok(&self.primes[..self.count_up_to(n)])
    }

    /// `pi(n)` for `n <= limit` (saturates above).
    pub fn count_up_to(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }

    /// Zero-based position of `p` in the ordered list, if `p` is a listed prime.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    pub fn is_prime(&self, m: u64) -> bool {
        self.index_of(m).is_some()
    }

    /// Sums of `1/p` over `p <= n`, split by the parity of the one-based prime
    /// index. `total` is defined as `odd_index + even_index`.
    pub fn mertens_sums(&self, n: u64) -> Result<MertensSums> {
        let primes = self.up_to(n)?;
        let mut odd = CompensatedSum::new();
        let mut even = CompensatedSum::new();
        for pair in primes.chunks(2) {
            odd.add(1.0 / pair[0] as f64);
            if let Some(&p) = pair.get(1) {
                even.add(1.0 / p as f64);
            }
        }
        let odd_index = odd.value();
        let even_index = even.value();
        Ok(MertensSums {
            total: odd_index + even_index,
            odd_index,
            even_index,
        })
    }
}

/// `sum_{p<=n} 1/p` and its split over odd- and even-indexed primes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MertensSums {
    pub total: f64,
    /// Over `p_1, p_3, p_5, ...` (so `p_1 = 2` is here).
    pub odd_index: f64,
    pub even_index: f64,
}

/// Primes up to `limit` together with a smallest-prime-factor index.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Primes,
    /// `spf_index[m / 2]` for odd `m`: position of `spf(m)` in `primes`, or 0
    /// when `m` is prime (or `m = 1`).
    spf_index: Vec<u16>,
}

impl PrimeTable {
    /// Linear sieve: every odd composite is written exactly once, by its
    /// smallest prime factor.
    pub fn new(limit: u64) -> Result<Self> {
        check_limit(limit)?;
        let lim = limit as usize;
        let mut spf_index = vec![0u16; lim / 2 + 1];
        let mut primes: Vec<u64> = Vec::with_capacity(estimate_pi(limit));
        primes.push(2);
        let mut i = 3usize;
        while i <= lim {
            let own = spf_index[i / 2];
            let spf_i = if own == 0 {
                primes.push(i as u64);
                i
            } else {
                primes[own as usize] as usize
            };
            for (j, &p) in primes.iter().enumerate().skip(1) {
                let p = p as usize;
                if p > spf_i {
                    break;
                }
                match i.checked_mul(p) {
                    Some(m) if m <= lim => spf_index[m / 2] = j as u16,
                    _ => break,
                }
            }
            i += 2;
        }
        Ok(PrimeTable {
            primes: Primes { limit, primes },
            spf_index,
        })
    }

    pub fn limit(&self) -> u64 {
        self.primes.limit
    }

    pub fn primes(&self) -> &Primes {
        &self.primes
    }

    /// Smallest prime factor of `m`, for `2 <= m <= limit`.
    pub fn spf(&self, m: u64) -> Result<u64> {
        if m < 2 {
            return Err(Error::domain(format!("spf undefined for m = {m}")));
        }
        if m > self.limit() {
            return Err(Error::capacity("m", m, self.limit()));
        }
        Ok(self.spf_unchecked(m))
    }

    #[inline]
    fn spf_unchecked(&self, m: u64) -> u64 {
        if m % 2 == 0 {
            return 2;
        }
        match self.spf_index[(m / 2) as usize] {
            0 => m,
            j => self.primes.primes[j as usize],
        }
    }

    /// Prime factorization as `(prime, exponent)` pairs in increasing prime
    /// order; `factorize(1)` is empty. Inputs above the table limit are
    /// handled by trial division as long as `m <= limit^2`.
    pub fn factorize(&self, m: u64) -> Result<Vec<(u64, u32)>> {
        if m < 1 {
            return Err(Error::domain("cannot factorize 0"));
        }
        let limit = self.limit();
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut push = |p: u64| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        if m <= limit {
            let mut r = m;
            while r > 1 {
                let p = self.spf_unchecked(r);
                push(p);
                r /= p;
            }
            return Ok(out);
        }
        if (m as u128) > (limit as u128) * (limit as u128) {
            return Err(Error::capacity("m", m, (limit as u128) * (limit as u128)));
        }
        let mut r = m;
        for &p in &self.primes.primes {
            if r <= limit {
                break;
            }
            if p * p > r {
                break;
            }
            while r % p == 0 {
                push(p);
                r /= p;
            }
        }
        if r > limit {
            // no factor up to sqrt(r) remained, so r is prime
            push(r);
        } else {
            while r > 1 {
                let p = self.spf_unchecked(r);
                push(p);
                r /= p;
            }
        }
        Ok(out)
    }

    pub fn mertens_sums(&self, n: u64) -> Result<MertensSums> {
        self.primes.mertens_sums(n)
    }
}

/// `omega[m]` = number of distinct primes dividing `m`, for `0 <= m <= n`
/// (`omega[0]` and `omega[1]` are 0).
pub fn omega_sieve(n: u64) -> Result<Vec<u8>> {
    if n < 1 {
        return Err(Error::domain("omega_sieve needs N >= 1"));
    }
    if n > OMEGA_SIEVE_MAX {
        return Err(Error::capacity("N", n, OMEGA_SIEVE_MAX));
    }
    let mut omega = vec![0u8; n as usize + 1];
    if n >= 2 {
        let primes = Primes::sieve(n)?;
        for &p in primes.as_slice() {
            let p = p as usize;
            let mut m = p;
            while m <= n as usize {
                omega[m] += 1;
                m += p;
            }
        }
    }
    Ok(omega)
}

/// Deterministic trial-division primality test.
pub fn is_prime_trial(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m < 4 {
        return true;
    }
    if m % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn check_limit(limit: u64) -> Result<()> {
    if limit < 2 {
        return Err(Error::domain(format!("prime limit must be >= 2, got {limit}")));
    }
    if limit > MAX_LIMIT {
        return Err(Error::capacity("limit", limit, MAX_LIMIT));
    }
    Ok(())
}

fn estimate_pi(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        assert_eq!(Primes::sieve(10).unwrap().as_slice(), &[2, 3, 5, 7]);
        assert_eq!(Primes::sieve(2).unwrap().as_slice(), &[2]);
        assert_eq!(PrimeTable::new(10).unwrap().primes().as_slice(), &[2, 3, 5, 7]);
        assert_eq!(PrimeTable::new(2).unwrap().primes().as_slice(), &[2]);
        assert_eq!(PrimeTable::new(3).unwrap().primes().as_slice(), &[2, 3]);
    }

    #[test]
    fn rejects_bad_limits() {
        assert!(matches!(Primes::sieve(1), Err(Error::Domain(_))));
        assert!(matches!(PrimeTable::new(0), Err(Error::Domain(_))));
        assert!(matches!(
            PrimeTable::new(MAX_LIMIT + 1),
            Err(Error::Capacity { parameter: "limit", .. })
        ));
    }

    #[test]
    fn sieves_agree_with_trial_division() {
        let table = PrimeTable::new(20_000).unwrap();
        let plain = Primes::sieve(20_000).unwrap();
        assert_eq!(table.primes(), &plain);
        let brute: Vec<u64> = (2..=20_000).filter(|&m| is_prime_trial(m)).collect();
        assert_eq!(plain.as_slice(), brute.as_slice());
    }

    #[test]
    fn spf_is_smallest_prime_divisor() {
        let table = PrimeTable::new(5_000).unwrap();
        for m in 2..=5_000u64 {
            let s = table.spf(m).unwrap();
            assert_eq!(m % s, 0);
            assert!(is_prime_trial(s));
            assert!((2..s).all(|d| m % d != 0), "m = {m}");
        }
        assert!(table.spf(1).is_err());
        assert!(table.spf(5_001).is_err());
    }

    #[test]
    fn factorize_examples() {
        let table = PrimeTable::new(1 << 20).unwrap();
        assert_eq!(table.factorize(60).unwrap(), vec![(2, 2), (3, 1), (5, 1)]);
        assert_eq!(table.factorize(97).unwrap(), vec![(97, 1)]);
        assert_eq!(table.factorize(1 << 20).unwrap(), vec![(2, 20)]);
        assert_eq!(table.factorize(1).unwrap(), vec![]);
        assert!(matches!(table.factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_beyond_limit() {
        let table = PrimeTable::new(100).unwrap();
        assert_eq!(table.factorize(9_973).unwrap(), vec![(9_973, 1)]);
        assert_eq!(table.factorize(2 * 3 * 1_009).unwrap(), vec![(2, 1), (3, 1), (1_009, 1)]);
        assert_eq!(table.factorize(97 * 97).unwrap(), vec![(97, 2)]);
        assert_eq!(table.factorize(10_000).unwrap(), vec![(2, 4), (5, 4)]);
        assert!(matches!(
            table.factorize(10_001),
            Err(Error::Capacity { parameter: "m", .. })
        ));
    }

    #[test]
    fn mertens_small() {
        let table = PrimeTable::new(100).unwrap();
        let s = table.mertens_sums(10).unwrap();
        let direct = 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0;
        assert!((s.total - direct).abs() < 1e-15);
        assert!((s.odd_index - (0.5 + 0.2)).abs() < 1e-15);
        assert!((s.even_index - (1.0 / 3.0 + 1.0 / 7.0)).abs() < 1e-15);
        assert_eq!(s.total, s.odd_index + s.even_index);
        assert!(matches!(
            table.mertens_sums(101),
            Err(Error::Capacity { parameter: "n", .. })
        ));
    }

    #[test]
    fn omega_examples() {
        let w = omega_sieve(30).unwrap();
        assert_eq!(w[12], 2);
        assert_eq!(w[11], 1);
        assert_eq!(w[1], 0);
        assert_eq!(w[30], 3);
        assert_eq!(omega_sieve(1).unwrap(), vec![0, 0]);
        assert!(omega_sieve(0).is_err());
        assert!(matches!(
            omega_sieve(OMEGA_SIEVE_MAX + 1),
            Err(Error::Capacity { parameter: "N", .. })
        ));
    }
}
