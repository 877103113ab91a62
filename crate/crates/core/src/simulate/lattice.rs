//! Common rational lattice for the values of a lattice-valued `g`.

use std::collections::HashMap;

use num_integer::Integer;
use num_rational::BigRational;
use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Largest lattice denominator accepted.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
/// A value is on the lattice when it matches its rational approximation to
/// within this many units of relative rounding.
const MATCH_ULPS: f64 = 8.0;

/// Lattice `step * Z` with `step = numer / denom`, plus the integer
/// coordinate of every registered value.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    numer: i64,
    denom: u64,
    index: HashMap<u64, i64>,
}

impl Lattice {
    /// Smallest lattice containing every value in `values`.
    pub fn for_values(values: &[f64]) -> Result<Self> {
        let mut approx = Vec::with_capacity(values.len());
        let mut denom: u64 = 1;
        for &v in values {
            let (a, b) = rational_approx(v, MAX_DENOMINATOR)
                .ok_or_else(|| Error::UnsupportedSpec(format!("g value {v} is not rational with denominator <= {MAX_DENOMINATOR}")))?;
            denom = denom.lcm(&b);
            if denom > MAX_DENOMINATOR {
                return Err(Error::UnsupportedSpec(format!(
                    "g values need a common denominator above {MAX_DENOMINATOR}"
                )));
            }
            approx.push((v, a, b));
        }
        let scaled: Vec<(f64, i64)> = approx.iter().map(|&(v, a, b)| (v, a * (denom / b) as i64)).collect();
        let g = scaled.iter().fold(0i64, |g, &(_, k)| g.gcd(&k));
        let numer = if g == 0 { 1 } else { g };
        let index = scaled.into_iter().map(|(v, k)| (key(v), k / numer)).collect();
        Ok(Lattice { numer, denom, index })
    }

    pub fn step(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// The step as an exact rational.
    pub fn step_exact(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numer), BigInt::from(self.denom))
    }

    /// Integer coordinate of a registered value.
    pub fn index_of(&self, v: f64) -> Option<i64> {
        self.index.get(&key(v)).copied()
    }
}

fn key(v: f64) -> u64 {
    // +0.0 and -0.0 share a coordinate
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// Best rational approximation `a/b` with `b <= max_den` (continued
/// fractions), accepted only if it reproduces `v` to rounding.
pub fn rational_approx(v: f64, max_den: u64) -> Option<(i64, u64)> {
    if !v.is_finite() || v.abs() > 9.0e15 {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - v).abs() <= MATCH_ULPS * f64::EPSILON * v.abs() {
            return Some((h1 as i64, k1 as u64));
        }
        let frac = x - a;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_values() {
        assert_eq!(rational_approx(0.5, 10), Some((1, 2)));
        assert_eq!(rational_approx(-2.25, 10), Some((-9, 4)));
        assert_eq!(rational_approx(1.0 / 3.0, 10), Some((1, 3)));
        assert_eq!(rational_approx(std::f64::consts::PI, 1_000_000), None);
        assert_eq!(rational_approx(0.0, 10), Some((0, 1)));
    }

    #[test]
    fn common_lattice() {
        let l = Lattice::for_values(&[1.0, 2.0]).unwrap();
        assert_eq!(l.step(), 1.0);
        assert_eq!(l.index_of(2.0), Some(2));
        let l = Lattice::for_values(&[0.0, 5.0]).unwrap();
        assert_eq!(l.step(), 5.0);
        assert_eq!(l.index_of(5.0), Some(1));
        assert_eq!(l.index_of(-0.0), Some(0));
        let l = Lattice::for_values(&[0.5, -1.5, 2.0]).unwrap();
        assert_eq!(l.step(), 0.5);
        assert_eq!(l.index_of(-1.5), Some(-3));
        let l = Lattice::for_values(&[0.0]).unwrap();
        assert_eq!(l.step(), 1.0);
        assert!(Lattice::for_values(&[std::f64::consts::E]).is_err());
        assert!(Lattice::for_values(&[1.0 / 999_983.0, 1.0 / 999_979.0]).is_err());
    }
}
