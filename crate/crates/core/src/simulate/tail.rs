//! Chernoff bounds and empirical deviation rates for exact finite laws.

use serde::{Deserialize, Serialize};

use super::distribution::DiscreteDistribution;
use crate::additive::{AdditiveFunctionSpec, ModerateScaling};
use crate::error::{Error, Result};
use crate::primes::Primes;
use crate::sum::CompensatedSum;

/// Tails with `-log P` above this are reported as infinite-rate.
pub const MAX_LOG_TAIL: f64 = 690.0;

/// `sum g(p) Y_p` over primes `p <= q` with `|g(p)| <= cutoff`, kept as the
/// list of Bernoulli parameters grouped by value.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSystem {
    groups: Vec<(f64, Vec<f64>)>,
}

impl BernoulliSystem {
    pub fn new(primes: &Primes, q: u64, spec: &AdditiveFunctionSpec, cutoff: f64) -> Result<Self> {
        spec.validate()?;
        let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
        for (i, &p) in primes.up_to(q)?.iter().enumerate() {
            let g = spec.value_at(i, p);
            if g.abs() > cutoff || g == 0.0 {
                continue;
            }
            let inv = 1.0 / p as f64;
            match groups.iter_mut().find(|(v, _)| *v == g) {
                Some((_, ps)) => ps.push(inv),
                None => groups.push((g, vec![inv])),
            }
        }
        Ok(BernoulliSystem { groups })
    }

    /// `log E[e^{theta S}] = sum log(1 + (e^{theta g} - 1)/p)`.
    pub fn log_mgf(&self, theta: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (g, inv) in &self.groups {
            let e = (theta * g).exp_m1();
            for &w in inv {
                acc.add((e * w).ln_1p());
            }
        }
        acc.value()
    }

    pub fn mean(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|(g, inv)| inv.iter().map(move |w| g * w))
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn variance(&self) -> f64 {
        self.groups
            .iter()
            .flat_map(|(g, inv)| inv.iter().map(move |w| g * g * w * (1.0 - w)))
            .collect::<CompensatedSum>()
            .value()
    }
}

/// `min over theta in grid of exp(cumulant(theta) - theta t)`.
pub fn chernoff_tail_bound(cumulant: impl Fn(f64) -> f64, threshold: f64, grid: &[f64]) -> f64 {
    chernoff_tail_bounds(cumulant, &[threshold], grid)[0]
}

/// [`chernoff_tail_bound`] for several thresholds, evaluating the cumulant
/// once per grid point.
pub fn chernoff_tail_bounds(cumulant: impl Fn(f64) -> f64, thresholds: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; thresholds.len()];
    for &theta in grid {
        let c = cumulant(theta);
        for (b, &t) in best.iter_mut().zip(thresholds) {
            let exponent = if theta == 0.0 { c } else { c - theta * t };
            let v = exponent.exp();
            if v < *b {
                *b = v;
            }
        }
    }
    best
}

/// Normalization for [`deviation_rate_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeviationScaling {
    /// Speed `L_n`: rate `-(1/L_n) log P(S >= a L_n)`.
    Ldp { speed: f64 },
    /// Rate `-(sigma_n^2/a_n^2) log P(S - mu_n >= x a_n)` for `x >= 0`, and the
    /// lower tail `P(S - mu_n <= x a_n)` for `x < 0`.
    Mdp(ModerateScaling),
}

pub fn deviation_rate_estimate(dist: &DiscreteDistribution, scaling: DeviationScaling, a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::domain(format!("a must be finite, got {a}")));
    }
    let (tail, threshold, speed) = match scaling {
        DeviationScaling::Ldp { speed } => {
            if !(speed > 0.0 && speed.is_finite()) {
                return Err(Error::domain(format!("speed must be positive, got {speed}")));
            }
            let t = a * speed;
            (dist.tail_ge(t), t, speed)
        }
        DeviationScaling::Mdp(s) => {
            let t = s.mu_n + a * s.a_n;
            let tail = if a >= 0.0 { dist.tail_ge(t) } else { dist.tail_le(t) };
            (tail, t, s.speed)
        }
    };
    let log_tail = tail.ln();
    if !(log_tail > -MAX_LOG_TAIL) {
        return Err(Error::InfiniteRate { tail, threshold });
    }
    Ok(-log_tail / speed)
}
