//! Exact lattice laws: the independent model by sequential convolution and
//! the divisibility model by full enumeration.

use serde::{Deserialize, Serialize};

use super::lattice::Lattice;
use crate::additive::AdditiveFunctionSpec;
use crate::error::{Error, Result};
use crate::primes::{omega_sieve, Primes, OMEGA_SIEVE_MAX};
use crate::sum::CompensatedSum;

/// Masses below this are dropped from the ends of the support.
pub const TRIM_THRESHOLD: f64 = 1e-300;
/// Largest `N` for enumeration of a general lattice `g`.
pub const LATTICE_ENUM_MAX: u64 = 10_000_000;
/// Relative slack, in lattice steps, when comparing a threshold to atoms.
const LATTICE_EPS: f64 = 1e-9;

/// Law on the lattice `offset + i * step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    pub offset: f64,
    pub step: f64,
    pub probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(offset: f64, step: f64, probs: Vec<f64>) -> Result<Self> {
        let d = DiscreteDistribution { offset, step, probs };
        d.validate()?;
        Ok(d)
    }

    pub fn point_mass(value: f64) -> Self {
        DiscreteDistribution {
            offset: value,
            step: 1.0,
            probs: vec![1.0],
        }
    }

    /// Histogram of integer lattice coordinates; `counts[i]` is the number of
    /// outcomes at coordinate `first + i`.
    pub fn from_counts(first: i64, step: f64, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::domain("empty histogram"));
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let mut d = DiscreteDistribution {
            offset: first as f64 * step,
            step,
            probs,
        };
        d.trim();
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) || !self.offset.is_finite() {
            return Err(Error::domain("lattice step must be positive and offset finite"));
        }
        if self.probs.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::domain("probabilities must be finite and non-negative"));
        }
        let total = self.total_mass();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.offset + i as f64 * self.step
    }

    /// `(value, prob)` pairs in increasing order of value.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.probs.iter().enumerate().map(|(i, &p)| (self.value(i), p))
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// Raw moment `E[S^r]`.
    pub fn moment(&self, r: i32) -> f64 {
        self.iter().map(|(v, p)| p * v.powi(r)).collect::<CompensatedSum>().value()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(v, p)| p * (v - m) * (v - m)).collect::<CompensatedSum>().value()
    }

    /// `P(S >= t)`, summed from the far end.
    pub fn tail_ge(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (i, &p) in self.probs.iter().enumerate().rev() {
            if self.value(i) < t - LATTICE_EPS * self.step {
                break;
            }
            acc.add(p);
        }
        acc.value()
    }

    /// `P(S <= t)`, summed from the far end.
    pub fn tail_le(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (i, &p) in self.probs.iter().enumerate() {
            if self.value(i) > t + LATTICE_EPS * self.step {
                break;
            }
            acc.add(p);
        }
        acc.value()
    }

    /// `log E[e^{theta S}]`, shifted by the largest exponent.
    pub fn log_mgf(&self, theta: f64) -> f64 {
        let exps: Vec<(f64, f64)> = self
            .iter()
            .filter(|&(_, p)| p > 0.0)
            .map(|(v, p)| (theta * v, p))
            .collect();
        let shift = exps.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return shift;
        }
        let s: f64 = exps.iter().map(|&(e, p)| p * (e - shift).exp()).collect::<CompensatedSum>().value();
        shift + s.ln()
    }

    /// Total-variation distance to a law on the same lattice step.
    pub fn total_variation(&self, other: &DiscreteDistribution) -> Result<f64> {
        if (self.step - other.step).abs() > 1e-12 * self.step {
            return Err(Error::domain("total variation needs a common lattice step"));
        }
        let shift = ((other.offset - self.offset) / self.step).round() as i64;
        let lo = 0.min(shift);
        let hi = (self.len() as i64).max(shift + other.len() as i64);
        let get = |d: &DiscreteDistribution, i: i64| {
            if i >= 0 && (i as usize) < d.len() {
                d.probs[i as usize]
            } else {
                0.0
            }
        };
        let s: f64 = (lo..hi)
            .map(|i| (get(self, i) - get(other, i - shift)).abs())
            .collect::<CompensatedSum>()
            .value();
        Ok(0.5 * s)
    }

    fn trim(&mut self) {
        while self.probs.last().is_some_and(|&p| p < TRIM_THRESHOLD) && self.probs.len() > 1 {
            self.probs.pop();
        }
        let lead = self.probs.iter().take_while(|&&p| p < TRIM_THRESHOLD).count();
        let lead = lead.min(self.probs.len() - 1);
        if lead > 0 {
            self.probs.drain(..lead);
            self.offset += lead as f64 * self.step;
        }
    }
}

/// Law of `sum g(p) Y_p` over primes `p <= q` with `|g(p)| <= cutoff`, the
/// `Y_p` independent Bernoulli(`1/p`).
pub fn exact_y_distribution(
    primes: &Primes,
    q: u64,
    spec: &AdditiveFunctionSpec,
    cutoff: f64,
) -> Result<DiscreteDistribution> {
    spec.validate()?;
    if !(cutoff >= 0.0) {
        return Err(Error::domain(format!("cutoff must be non-negative, got {cutoff}")));
    }
    let ps = primes.up_to(q)?;
    let values: Vec<f64> = spec.value_set().into_iter().filter(|v| v.abs() <= cutoff).collect();
    if values.is_empty() {
        return Ok(DiscreteDistribution::point_mass(0.0));
    }
    let lattice = Lattice::for_values(&values)?;

    // probs[i] is the mass at coordinate first + i
    let mut probs = vec![1.0f64];
    let mut first: i64 = 0;
    for (i, &p) in ps.iter().enumerate() {
        let g = spec.value_at(i, p);
        if g.abs() > cutoff {
            continue;
        }
        let k = lattice.index_of(g).expect("value set covers every prime value");
        if k == 0 {
            continue;
        }
        let hit = 1.0 / p as f64;
        let stay = 1.0 - hit;
        let ku = k.unsigned_abs() as usize;
        if k > 0 {
            let old = probs.len();
            probs.resize(old + ku, 0.0);
            for j in (ku..old + ku).rev() {
                probs[j] = probs[j] * stay + probs[j - ku] * hit;
            }
            for v in &mut probs[..ku] {
                *v *= stay;
            }
        } else {
            probs.splice(0..0, std::iter::repeat_n(0.0, ku));
            first -= ku as i64;
            let len = probs.len();
            for j in 0..len - ku {
                probs[j] = probs[j] * stay + probs[j + ku] * hit;
            }
            for v in &mut probs[len - ku..] {
                *v *= stay;
            }
        }
        while probs.len() > 1 && *probs.last().unwrap() < TRIM_THRESHOLD {
            probs.pop();
        }
        let lead = probs.iter().take_while(|&&p| p < TRIM_THRESHOLD).count().min(probs.len() - 1);
        if lead > 0 {
            probs.drain(..lead);
            first += lead as i64;
        }
    }
    let step = lattice.step();
    Ok(DiscreteDistribution {
        offset: first as f64 * step,
        step,
        probs,
    })
}

/// Integer histogram of `g(m)` over `m = 1..=n` in lattice coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ZHistogram {
    pub n: u64,
    pub step: f64,
    /// Coordinate of `counts[0]`.
    pub first: i64,
    pub counts: Vec<u64>,
}

impl ZHistogram {
    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::from_counts(self.first, self.step, &self.counts)
    }
}

/// Exact law of `g(V)` with `V` uniform on `{1, ..., n}`.
pub fn exact_z_distribution(n: u64, spec: &AdditiveFunctionSpec) -> Result<DiscreteDistribution> {
    exact_z_histogram(n, spec)?.to_distribution()
}

pub fn exact_z_histogram(n: u64, spec: &AdditiveFunctionSpec) -> Result<ZHistogram> {
    spec.validate()?;
    if n < 1 {
        return Err(Error::domain("N must be at least 1"));
    }
    if let AdditiveFunctionSpec::Constant { lambda } = *spec {
        if n > OMEGA_SIEVE_MAX {
            return Err(Error::capacity("N", n, OMEGA_SIEVE_MAX));
        }
        if lambda == 0.0 {
            return Ok(ZHistogram {
                n,
                step: 1.0,
                first: 0,
                counts: vec![n],
            });
        }
        let omega = omega_sieve(n)?;
        let mut counts = vec![0u64; 16];
        for &w in &omega[1..] {
            counts[w as usize] += 1;
        }
        while counts.len() > 1 && *counts.last().unwrap() == 0 {
            counts.pop();
        }
        // lambda < 0 reverses the order of the coordinates
        let (first, counts) = if lambda > 0.0 {
            (0, counts)
        } else {
            let top = counts.len() as i64 - 1;
            (-top, counts.into_iter().rev().collect())
        };
        return Ok(ZHistogram {
            n,
            step: lambda.abs(),
            first,
            counts,
        });
    }
    if n > LATTICE_ENUM_MAX {
        return Err(Error::capacity("N", n, LATTICE_ENUM_MAX));
    }
    let lattice = Lattice::for_values(&spec.value_set())?;
    let coords = lattice_coordinates(n, spec, &lattice, |_, _| true)?;
    let lo = coords[1..].iter().copied().min().unwrap_or(0);
    let hi = coords[1..].iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; (hi - lo + 1) as usize];
    for &c in &coords[1..] {
        counts[(c - lo) as usize] += 1;
    }
    Ok(ZHistogram {
        n,
        step: lattice.step(),
        first: lo,
        counts,
    })
}

/// `coords[m]` = lattice coordinate of the sum of `g(p)` over the primes
/// `p | m` accepted by `keep(index, p)`, for `0 <= m <= n`.
pub(crate) fn lattice_coordinates(
    n: u64,
    spec: &AdditiveFunctionSpec,
    lattice: &Lattice,
    keep: impl Fn(usize, u64) -> bool,
) -> Result<Vec<i64>> {
    let mut coords = vec![0i64; n as usize + 1];
    if n < 2 {
        return Ok(coords);
    }
    let primes = Primes::sieve(n)?;
    for (i, &p) in primes.as_slice().iter().enumerate() {
        if !keep(i, p) {
            continue;
        }
        let g = spec.value_at(i, p);
        let k = lattice
            .index_of(g)
            .ok_or_else(|| Error::UnsupportedSpec(format!("g({p}) = {g} is off the lattice")))?;
        if k == 0 {
            continue;
        }
        let mut m = p as usize;
        while m <= n as usize {
            coords[m] += k;
            m += p as usize;
        }
    }
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega_spec() -> AdditiveFunctionSpec {
        AdditiveFunctionSpec::constant(1.0).unwrap()
    }

    #[test]
    fn y_law_two_primes() {
        let primes = Primes::sieve(100).unwrap();
        let d = exact_y_distribution(&primes, 3, &omega_spec(), 1.0).unwrap();
        assert_eq!(d.offset, 0.0);
        let want = [1.0 / 3.0, 0.5, 1.0 / 6.0];
        for (p, w) in d.probs.iter().zip(want) {
            assert!((p - w).abs() < 1e-16);
        }
    }

    #[test]
    fn y_law_brute_force_two_values() {
        let primes = Primes::sieve(100).unwrap();
        let spec = AdditiveFunctionSpec::two_value_by_index(1.0, 2.0).unwrap();
        let d = exact_y_distribution(&primes, 10, &spec, 5.0).unwrap();
        // enumerate the 16 outcomes over {2, 3, 5, 7} with g = 1, 2, 1, 2
        let ps = [2.0, 3.0, 5.0, 7.0];
        let gs = [1usize, 2, 1, 2];
        let mut want = [0.0f64; 7];
        for mask in 0..16u32 {
            let mut prob = 1.0;
            let mut s = 0;
            for j in 0..4 {
                if mask >> j & 1 == 1 {
                    prob *= 1.0 / ps[j];
                    s += gs[j];
                } else {
                    prob *= 1.0 - 1.0 / ps[j];
                }
            }
            want[s] += prob;
        }
        assert_eq!(d.len(), 7);
        for (p, w) in d.probs.iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
    }

    #[test]
    fn y_law_negative_values_and_cutoff() {
        let primes = Primes::sieve(100).unwrap();
        let spec = AdditiveFunctionSpec::two_value_by_index(-1.0, 3.0).unwrap();
        let d = exact_y_distribution(&primes, 5, &spec, 2.0).unwrap();
        // only p = 2 and 5 (g = -1) survive the cutoff
        assert_eq!(d.offset, -2.0);
        let want = [0.1, 0.5, 0.4];
        for (p, w) in d.probs.iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
        let none = exact_y_distribution(&primes, 50, &spec, 0.5).unwrap();
        assert_eq!(none.probs, vec![1.0]);
        let pi = AdditiveFunctionSpec::constant(std::f64::consts::PI).unwrap();
        assert!(matches!(
            exact_y_distribution(&primes, 50, &pi, 10.0),
            Err(Error::UnsupportedSpec(_))
        ));
    }

    #[test]
    fn z_law_small() {
        let d = exact_z_distribution(10, &omega_spec()).unwrap();
        assert_eq!(d.probs, vec![0.1, 0.7, 0.2]);
        let d = exact_z_distribution(30, &omega_spec()).unwrap();
        assert_eq!(d.probs[3], 1.0 / 30.0);
        let zero = AdditiveFunctionSpec::constant(0.0).unwrap();
        assert_eq!(exact_z_distribution(1000, &zero).unwrap().probs, vec![1.0]);
    }

    #[test]
    fn z_law_general_lattice_matches_constant_path() {
        let a = exact_z_distribution(1000, &AdditiveFunctionSpec::constant(2.0).unwrap()).unwrap();
        let table = AdditiveFunctionSpec::table([(3, 2.0)], 2.0).unwrap();
        let b = exact_z_distribution(1000, &table).unwrap();
        assert_eq!(a, b);
        let neg = exact_z_distribution(10, &AdditiveFunctionSpec::constant(-1.0).unwrap()).unwrap();
        assert_eq!(neg.offset, -2.0);
        assert_eq!(neg.probs, vec![0.2, 0.7, 0.1]);
    }

    #[test]
    fn tails_and_moments() {
        let d = DiscreteDistribution::new(-1.0, 0.5, vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(d.mean(), -0.5);
        assert_eq!(d.tail_ge(-0.5), 0.75);
        assert_eq!(d.tail_ge(-0.49), 0.25);
        assert_eq!(d.tail_le(-0.5), 0.75);
        assert_eq!(d.tail_ge(10.0), 0.0);
        assert!((d.variance() - 0.125).abs() < 1e-15);
        assert!((d.log_mgf(0.0)).abs() < 1e-15);
        let same = DiscreteDistribution::new(-0.5, 0.5, vec![0.5, 0.5]).unwrap();
        assert!((d.total_variation(&same).unwrap() - 0.25).abs() < 1e-15);
        assert!(DiscreteDistribution::new(0.0, 1.0, vec![0.5]).is_err());
    }
}
