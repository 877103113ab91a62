//! Large and moderate deviations for strongly additive arithmetic functions.
//!
//! The crate computes rate functions for `g(V)/log log n`, where `V` is
//! uniform on `{1, ..., n}` and `g` is strongly additive, and checks them
//! against exact finite-`n` laws:
//!
//! - [`primes`]: sieving, factorization, sums of prime reciprocals.
//! - [`additive`]: additive functions, the prime-weighted empirical measure
//!   `rho_n`, moderate-deviation scaling constants, and the oscillating
//!   counterexample schedule.
//! - [`measures`]: limit measures and the truncated cumulant functional.
//! - [`ratefn`]: Legendre-Fenchel transform, closed forms, Lambert W.
//! - [`simulate`]: the divisibility model and its independent Bernoulli
//!   surrogate, exact laws, moment comparisons and tail estimators.

pub mod additive;
pub mod error;
pub mod measures;
pub mod primes;
pub mod ratefn;
pub mod simulate;
pub mod sum;

pub use additive::{
    counterexample_schedule, empirical_rho, g_eval, mu_sigma, AdditiveFunctionSpec, CounterexampleSchedule,
    EmpiricalMeasure, ModerateScaling,
};
pub use error::{Error, Result};
pub use measures::{CumulantValue, LimitMeasure};
pub use primes::{omega_sieve, MertensSums, PrimeTable, Primes};
pub use ratefn::{
    closed_form_rate, lambert_w, legendre_rate, mdp_rate, ClosedFormFamily, RateFunctionResult, RateStatus,
};
pub use simulate::{
    chernoff_tail_bound, clt_statistic, deviation_rate_estimate, exact_y_distribution, exact_z_distribution,
    joint_moment_gap, moment_gap_bound_check, sample_y, sample_z, DiscreteDistribution, SampleBatch,
    TruncationSchedule,
};
