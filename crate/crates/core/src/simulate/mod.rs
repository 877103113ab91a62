//! The divisibility model `Z_p = 1{p | V}` and the independent model with
//! `Y_p ~ Bernoulli(1/p)`: exact laws, joint moments, sampling and tail
//! estimators.

mod distribution;
mod lattice;
mod moments;
mod sampling;
mod tail;

pub use distribution::{
    exact_y_distribution, exact_z_distribution, exact_z_histogram, DiscreteDistribution, ZHistogram,
    LATTICE_ENUM_MAX, TRIM_THRESHOLD,
};
pub use lattice::{rational_approx, Lattice, MAX_DENOMINATOR};
pub use moments::{joint_moment_gap, moment_gap_bound_check, JointMomentGap, MomentGapRow};
pub use sampling::{sample_y, sample_z, Model, SampleBatch, CHUNK};
pub use tail::{
    chernoff_tail_bound, chernoff_tail_bounds, deviation_rate_estimate, BernoulliSystem, DeviationScaling,
    MAX_LOG_TAIL,
};

use serde::Serialize;

use crate::additive::ModerateScaling;
use crate::error::{Error, Result};
use crate::primes::Primes;
use crate::sum::CompensatedSum;

/// Prime cutoffs separating the dominant small primes from the tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSchedule {
    pub n: u64,
    /// `n^{1/(log log n)^2}`
    pub ldp_k_n: f64,
    /// `n^{a_n/sigma_n^2}`
    pub mdp_k_n: f64,
    pub cutoff: f64,
}

/// `sum_{k <= p <= n} 1/p` next to `log log n - log log k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LargePrimeMass {
    pub k: f64,
    pub sum: f64,
    pub predicted: f64,
    pub difference: f64,
}

impl TruncationSchedule {
    pub fn new(n: u64, scaling: &ModerateScaling, cutoff: f64) -> Result<Self> {
        let ll = log_log(n)?;
        let ln_n = (n as f64).ln();
        Ok(TruncationSchedule {
            n,
            ldp_k_n: (ln_n / (ll * ll)).exp(),
            mdp_k_n: (ln_n * scaling.a_n / scaling.sigma2_n).exp(),
            cutoff,
        })
    }

    /// Reciprocal sum over `k <= p <= n`; `primes` must reach `n`.
    pub fn large_prime_mass(&self, primes: &Primes, k: f64) -> Result<LargePrimeMass> {
        if !(k > 1.0) {
            return Err(Error::domain(format!("k must exceed 1, got {k}")));
        }
        let ps = primes.up_to(self.n)?;
        let sum = ps
            .iter()
            .filter(|&&p| p as f64 >= k)
            .map(|&p| 1.0 / p as f64)
            .collect::<CompensatedSum>()
            .value();
        let predicted = (self.n as f64).ln().ln() - k.ln().ln();
        Ok(LargePrimeMass {
            k,
            sum,
            predicted,
            difference: sum - predicted,
        })
    }
}

fn log_log(n: u64) -> Result<f64> {
    let ll = (n as f64).ln().ln();
    if !(ll > 0.0) {
        return Err(Error::domain(format!("log log n must be positive, got n = {n}")));
    }
    Ok(ll)
}

/// `(X - log log n) / sqrt(log log n)` for every sample.
pub fn clt_statistic(batch: &SampleBatch, n: u64) -> Result<Vec<f64>> {
    let ll = log_log(n)?;
    let s = ll.sqrt();
    Ok(batch.values.iter().map(|&x| (x - ll) / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(values: Vec<f64>) -> SampleBatch {
        SampleBatch {
            model: Model::Z,
            parameter: 0,
            seed: 0,
            values,
        }
    }

    #[test]
    fn clt_examples() {
        let n = 1_000_000u64;
        let ll = (n as f64).ln().ln();
        assert_eq!(clt_statistic(&batch(vec![ll]), n).unwrap(), vec![0.0]);
        // n = 15 is the largest integer below e^e: log log n < 1 but positive
        assert!(clt_statistic(&batch(vec![1.0]), 15).is_ok());
        assert!(clt_statistic(&batch(vec![1.0]), 2).is_err());
        let e_e = std::f64::consts::E.exp();
        let s = (e_e.ln().ln()).sqrt();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_bounds() {
        let primes = Primes::sieve(1_000_000).unwrap();
        let spec = crate::additive::AdditiveFunctionSpec::constant(1.0).unwrap();
        for n in [100u64, 10_000, 1_000_000] {
            let s = crate::additive::mu_sigma(&spec, &primes, n, None).unwrap();
            let t = TruncationSchedule::new(n, &s, 1.0).unwrap();
            assert!(t.ldp_k_n >= 2.0 && t.ldp_k_n <= n as f64);
            assert!(t.mdp_k_n.is_finite());
            let m = t.large_prime_mass(&primes, t.ldp_k_n).unwrap();
            assert!(m.sum > 0.0 && m.difference.is_finite());
        }
    }
}
