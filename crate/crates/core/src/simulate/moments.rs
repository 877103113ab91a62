//! Exact rational comparisons between the divisibility model and the
//! independent model.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::distribution::{lattice_coordinates, LATTICE_ENUM_MAX};
use super::lattice::Lattice;
use crate::additive::AdditiveFunctionSpec;
use crate::error::{Error, Result};
use crate::primes::{is_prime_trial, Primes};

/// Joint moment `E[prod Z_p]` against `E[prod Y_p]` for one set of primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointMomentGap {
    /// `floor(n / P) / n`
    pub z_moment: Ratio<u128>,
    /// `1 / P`
    pub y_moment: Ratio<u128>,
    /// `y_moment - z_moment = (n mod P) / (n P)`
    pub gap: Ratio<u128>,
}

pub fn joint_moment_gap(n: u64, primes: &[u64]) -> Result<JointMomentGap> {
    if n < 1 {
        return Err(Error::domain("n must be at least 1"));
    }
    let mut product: u128 = 1;
    for (i, &p) in primes.iter().enumerate() {
        if !is_prime_trial(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if primes[..i].contains(&p) {
            return Err(Error::domain(format!("prime {p} repeated")));
        }
        product = product
            .checked_mul(p as u128)
            .ok_or_else(|| Error::capacity("product of primes", u128::MAX, u128::MAX))?;
    }
    let n = n as u128;
    let denom = n
        .checked_mul(product)
        .ok_or_else(|| Error::capacity("n * product of primes", product, u128::MAX / n))?;
    Ok(JointMomentGap {
        z_moment: Ratio::new(n / product, n),
        y_moment: Ratio::new(1, product),
        gap: Ratio::new(n % product, denom),
    })
}

/// One row of [`moment_gap_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentGapRow {
    pub r: u32,
    pub z_moment: f64,
    pub y_moment: f64,
    pub gap: f64,
    pub bound: f64,
    /// Decided in exact arithmetic.
    pub pass: bool,
}

/// Exact `E[S_n^r]` and `E[S~_n^r]` for `r = 0..=r_max`, where both sums run
/// over primes `p <= q` with `|g(p)| <= cutoff`, compared with `(cutoff q)^r / n`.
pub fn moment_gap_bound_check(
    n: u64,
    q: u64,
    cutoff: f64,
    r_max: u32,
    spec: &AdditiveFunctionSpec,
) -> Result<Vec<MomentGapRow>> {
    spec.validate()?;
    if !(1..=LATTICE_ENUM_MAX).contains(&n) {
        return Err(Error::capacity("n", n, LATTICE_ENUM_MAX));
    }
    if q < 2 {
        return Err(Error::domain("Q must be at least 2"));
    }
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::domain(format!("cutoff must be finite and non-negative, got {cutoff}")));
    }
    let primes = Primes::sieve(q)?;
    let in_b: Vec<(u64, f64)> = primes
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, spec.value_at(i, p)))
        .filter(|&(_, g)| g.abs() <= cutoff)
        .collect();
    const MAX_B: usize = 5000;
    if in_b.len() > MAX_B {
        return Err(Error::capacity("|B| (primes in the product)", in_b.len() as u64, MAX_B as u64));
    }
    let values: Vec<f64> = spec.value_set().into_iter().filter(|v| v.abs() <= cutoff).collect();
    let lattice = Lattice::for_values(if values.is_empty() { &[0.0] } else { &values })?;

    // Z side: histogram of coordinates over m = 1..=n
    let coords = lattice_coordinates(n, spec, &lattice, |i, p| {
        p <= q && spec.value_at(i, p).abs() <= cutoff
    })?;
    let z_hist = histogram(&coords[1..]);

    // Y side: numerators over D = prod p, N'[s] = (p - 1) N[s] + N[s - k]
    let mut y_first: i64 = 0;
    let mut y_num: Vec<BigInt> = vec![BigInt::one()];
    let mut denom = BigInt::one();
    for &(p, g) in &in_b {
        let k = lattice.index_of(g).expect("value set covers every prime value");
        let pm1 = BigInt::from(p - 1);
        denom *= p;
        if k == 0 {
            for v in &mut y_num {
                *v *= p;
            }
            continue;
        }
        let lo = y_first.min(y_first + k);
        let hi = (y_first + y_num.len() as i64 - 1).max(y_first + y_num.len() as i64 - 1 + k);
        let mut next = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (j, v) in y_num.iter().enumerate() {
            let s = y_first + j as i64;
            next[(s - lo) as usize] += &pm1 * v;
            next[(s + k - lo) as usize] += v;
        }
        y_num = next;
        y_first = lo;
    }

    let step = lattice.step_exact();
    let n_big = BigRational::from_integer(BigInt::from(n));
    let scale = BigRational::from_float(cutoff * q as f64).ok_or_else(|| Error::domain("bound is not finite"))?;
    let mut rows = Vec::with_capacity(r_max as usize + 1);
    for r in 0..=r_max {
        let step_r = pow(&step, r);
        let z_sum: BigInt = z_hist
            .iter()
            .map(|&(s, c)| BigInt::from(c) * BigInt::from(s).pow(r))
            .sum();
        let y_sum: BigInt = y_num
            .iter()
            .enumerate()
            .map(|(j, c)| c * BigInt::from(y_first + j as i64).pow(r))
            .sum();
        let z = BigRational::new(z_sum, BigInt::from(n)) * &step_r;
        let y = BigRational::new(y_sum, denom.clone()) * &step_r;
        let gap = (&z - &y).abs();
        let bound = pow(&scale, r) / &n_big;
        rows.push(MomentGapRow {
            r,
            z_moment: to_f64(&z),
            y_moment: to_f64(&y),
            gap: to_f64(&gap),
            bound: to_f64(&bound),
            pass: gap <= bound,
        });
    }
    Ok(rows)
}

fn histogram(coords: &[i64]) -> Vec<(i64, u64)> {
    let mut h = std::collections::BTreeMap::new();
    for &c in coords {
        *h.entry(c).or_insert(0u64) += 1;
    }
    h.into_iter().collect()
}

fn pow(x: &BigRational, r: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..r {
        acc *= x;
    }
    acc
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joint_gap_examples() {
        let g = joint_moment_gap(10, &[2, 3]).unwrap();
        assert_eq!(g.z_moment, Ratio::new(1, 10));
        assert_eq!(g.y_moment, Ratio::new(1, 6));
        assert_eq!(g.gap, Ratio::new(1, 15));
        let g = joint_moment_gap(12, &[2, 3]).unwrap();
        assert_eq!(g.z_moment, g.y_moment);
        assert_eq!(g.gap, Ratio::new(0, 1));
        let g = joint_moment_gap(10, &[11]).unwrap();
        assert_eq!(g.z_moment, Ratio::new(0, 1));
        assert_eq!(g.y_moment, Ratio::new(1, 11));
        assert!(joint_moment_gap(10, &[2, 2]).is_err());
        assert!(joint_moment_gap(10, &[4]).is_err());
        let big: Vec<u64> = Primes::sieve(200).unwrap().as_slice().to_vec();
        assert!(matches!(joint_moment_gap(10, &big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn first_moment_is_reciprocal_sum() {
        let rows = moment_gap_bound_check(1000, 50, 1.0, 1, &AdditiveFunctionSpec::constant(1.0).unwrap()).unwrap();
        assert_eq!(rows[0].gap, 0.0);
        assert!(rows[0].pass);
        let primes = Primes::sieve(50).unwrap();
        let y: f64 = primes.as_slice().iter().map(|&p| 1.0 / p as f64).sum();
        let z: f64 = primes.as_slice().iter().map(|&p| (1000 / p) as f64 / 1000.0).sum();
        assert!((rows[1].y_moment - y).abs() < 1e-14);
        assert!((rows[1].z_moment - z).abs() < 1e-14);
        assert!(rows[1].pass);
    }

    #[test]
    fn second_moment_small_case() {
        // n = 6, Q = 3: S = Z_2 + Z_3 takes 0,1,1,1,0,2 on 1..6
        let rows = moment_gap_bound_check(6, 3, 1.0, 2, &AdditiveFunctionSpec::constant(1.0).unwrap()).unwrap();
        assert!((rows[2].z_moment - 7.0 / 6.0).abs() < 1e-15);
        // E[(Y_2 + Y_3)^2] = 1/2 + 1/3 + 2/6
        assert!((rows[2].y_moment - 7.0 / 6.0).abs() < 1e-15);
        assert_eq!(rows[2].gap, 0.0);
    }
}
