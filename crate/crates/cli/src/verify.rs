//! Verification suites: each check records what was measured, the bound it
//! is held to, and a verdict.

use ekdev_core::measures::LimitMeasure;
use ekdev_core::simulate::{
    chernoff_tail_bound, chernoff_tail_bounds, deviation_rate_estimate, exact_y_distribution, exact_z_distribution,
    exact_z_histogram, joint_moment_gap, moment_gap_bound_check, BernoulliSystem, DeviationScaling,
};
use ekdev_core::{
    closed_form_rate, counterexample_schedule, legendre_rate, mdp_rate, mu_sigma, AdditiveFunctionSpec,
    ClosedFormFamily, Primes,
};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::Report;
use crate::error::CliError;
use crate::output::{Cell, Series, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Duality,
    Oracle,
    Moments,
    Mdp,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Informational; never fails the run.
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, measured: f64, bound: f64, pass: bool) -> Self {
        Check {
            suite,
            name: name.into(),
            measured,
            bound,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        }
    }

    fn report(suite: &'static str, name: impl Into<String>, measured: f64, reference: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            measured,
            bound: reference,
            verdict: Verdict::Report,
        }
    }
}

/// The seven families with an asserted closed form.
pub fn duality_families() -> Vec<ClosedFormFamily> {
    use ClosedFormFamily as F;
    vec![
        F::Constant { lambda: 1.0 },
        F::Constant { lambda: 2.5 },
        F::TwoAtomRatio2 { lambda1: 1.0 },
        F::Poisson { lambda: 1.0 },
        F::Poisson { lambda: 3.0 },
        F::Binomial1 { beta: 0.3 },
        F::Gaussian,
    ]
}

/// 200 points across the interior of the family's domain.
pub fn duality_grid(family: ClosedFormFamily) -> Vec<f64> {
    let (lo, hi) = match family {
        ClosedFormFamily::Gaussian => (-5.0, 5.0),
        ClosedFormFamily::Binomial1 { .. } | ClosedFormFamily::Binomial2 { .. } => (0.005, 0.995),
        f => {
            let mean = f.measure().map(|m| m.mean()).unwrap_or(1.0);
            (0.01 * mean, 5.0 * mean)
        }
    };
    (0..200).map(|i| lo + (hi - lo) * i as f64 / 199.0).collect()
}

fn max_duality_gap(family: ClosedFormFamily) -> Result<f64, CliError> {
    let rho = family.measure()?;
    let mut worst = 0.0f64;
    for x in duality_grid(family) {
        let c = closed_form_rate(family, x)?.value;
        let n = legendre_rate(&rho, x, f64::INFINITY)?.value;
        worst = worst.max((c - n).abs());
    }
    Ok(worst)
}

fn duality(out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "duality";
    for f in duality_families() {
        let gap = max_duality_gap(f)?;
        out.push(Check::new(S, format!("max |closed - numeric| {}", f.name()), gap, 1e-8, gap <= 1e-8));
    }
    let b2 = ClosedFormFamily::Binomial2 { beta: 0.3 };
    out.push(Check::report(S, "max |printed - numeric| binomial2(0.3)", max_duality_gap(b2)?, 0.0));
    let one = LimitMeasure::atoms(vec![(1.0, 1.0)])?;
    let i1 = legendre_rate(&one, 1.0, f64::INFINITY)?.value;
    let i0 = legendre_rate(&one, 0.0, f64::INFINITY)?.value;
    out.push(Check::new(S, "I(1) for g = 1", i1, 1e-10, i1.abs() <= 1e-10));
    out.push(Check::new(S, "|I(0) - 1| for g = 1", (i0 - 1.0).abs(), 1e-10, (i0 - 1.0).abs() <= 1e-10));
    let neg = legendre_rate(&one, -0.5, f64::INFINITY)?;
    out.push(Check::new(S, "I(-0.5) infinite for g = 1", neg.value, f64::INFINITY, neg.is_infinite()));
    Ok(())
}

fn oracle(out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "oracle";
    let one = AdditiveFunctionSpec::constant(1.0)?;
    let z10 = exact_z_distribution(10, &one)?;
    let ok = z10.offset == 0.0 && z10.probs == [0.1, 0.7, 0.2];
    out.push(Check::new(S, "Z law at N = 10 is {0: 0.1, 1: 0.7, 2: 0.2}", ok as u8 as f64, 1.0, ok));
    let primes = Primes::sieve(1_000_000)?;
    for n in [1_000u64, 1_000_000] {
        let h = exact_z_histogram(n, &one)?;
        let z: u64 = h.counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
        let y: u64 = primes.up_to(n)?.iter().map(|&p| n / p).sum();
        let diff = Ratio::new(z, n) - Ratio::new(y, n);
        let err = diff.numer().abs_diff(0) as f64 / n as f64;
        out.push(Check::new(S, format!("E[omega(V)] = sum floor(n/p)/n at n = {n}"), err, 0.0, z == y));
    }
    let y3 = exact_y_distribution(&primes, 3, &one, 1.0)?;
    let err3 = y3
        .probs
        .iter()
        .zip([1.0 / 3.0, 0.5, 1.0 / 6.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.push(Check::new(S, "Y law at Q = 3", err3, 1e-15, err3 <= 1e-15 && y3.len() == 3));
    let q = 1_000_000;
    let d = exact_y_distribution(&primes, q, &one, 1.0)?;
    let err = (d.mean() - primes.mertens_sums(q)?.total).abs();
    out.push(Check::new(S, "Y mean vs sum 1/p at Q = 1e6", err, 1e-10, err <= 1e-10));
    let mass = (d.total_mass() - 1.0).abs();
    out.push(Check::new(S, "Y total mass at Q = 1e6", mass, 1e-12, mass <= 1e-12));
    let q = 10_000;
    let d = exact_y_distribution(&primes, q, &one, 1.0)?;
    let sys = BernoulliSystem::new(&primes, q, &one, 1.0)?;
    let (worst, pass) = chernoff_consistency(&d, &sys);
    out.push(Check::new(S, "max exact tail / Chernoff bound at Q = 1e4", worst, 1.0, pass));
    Ok(())
}

/// 50 thresholds from the mean to the top of the support; returns the
/// largest `tail / bound` ratio and whether `tail <= bound` held everywhere.
pub fn chernoff_consistency(
    d: &ekdev_core::DiscreteDistribution,
    sys: &BernoulliSystem,
) -> (f64, bool) {
    let mean = d.mean();
    let top = d.value(d.len() - 1);
    let ts: Vec<f64> = (0..50).map(|i| mean + (top - mean) * i as f64 / 49.0).collect();
    let grid: Vec<f64> = (1..=200).map(|i| 0.025 * i as f64).collect();
    let bounds = chernoff_tail_bounds(|t| sys.log_mgf(t), &ts, &grid);
    let mut worst = 0.0f64;
    let mut pass = true;
    for (t, b) in ts.iter().zip(bounds) {
        let tail = d.tail_ge(*t);
        pass &= tail <= b;
        worst = worst.max(tail / b);
    }
    (worst, pass)
}

fn moments(out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "moments";
    let one = AdditiveFunctionSpec::constant(1.0)?;
    for row in moment_gap_bound_check(100_000, 50, 1.0, 5, &one)? {
        out.push(Check::new(S, format!("|E S^r - E S~^r|, r = {}", row.r), row.gap, row.bound, row.pass));
    }
    let small = Primes::sieve(100)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut pass = true;
    for _ in 0..100 {
        let size = rng.gen_range(1..=6);
        let ps: Vec<u64> = small.as_slice().choose_multiple(&mut rng, size).copied().collect();
        let n = rng.gen_range(1..=1_000_000u64);
        let g = joint_moment_gap(n, &ps)?;
        pass &= g.gap >= Ratio::new(0, 1) && g.gap <= Ratio::new(1, n as u128);
        worst = worst.max(*g.gap.numer() as f64 / *g.gap.denom() as f64 * n as f64);
    }
    out.push(Check::new(S, "max n * joint moment gap over 100 prime sets", worst, 1.0, pass));
    Ok(())
}

/// Upper- and lower-tail moderate deviation rates of the exact Y law at
/// `Q = 1e6`, `a_n = sigma_n^1.5`.
pub struct MdpRates {
    pub xs: Vec<f64>,
    pub rates: Vec<f64>,
    pub chernoff: Vec<f64>,
}

pub fn mdp_rates(xs: &[f64]) -> Result<MdpRates, CliError> {
    let q = 1_000_000;
    let one = AdditiveFunctionSpec::constant(1.0)?;
    let primes = Primes::sieve(q)?;
    let scaling = mu_sigma(&one, &primes, q, None)?;
    let d = exact_y_distribution(&primes, q, &one, 1.0)?;
    let sys = BernoulliSystem::new(&primes, q, &one, 1.0)?;
    let grid: Vec<f64> = (1..=400).map(|i| 0.01 * i as f64).collect();
    let mut rates = Vec::new();
    let mut chernoff = Vec::new();
    for &x in xs {
        rates.push(deviation_rate_estimate(&d, DeviationScaling::Mdp(scaling), x)?);
        let b = chernoff_tail_bound(|t| sys.log_mgf(t), scaling.mu_n + x * scaling.a_n, &grid);
        chernoff.push(-b.ln() / scaling.speed);
    }
    Ok(MdpRates {
        xs: xs.to_vec(),
        rates,
        chernoff,
    })
}

fn mdp(out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "mdp";
    let m = mdp_rates(&[0.5, 1.0])?;
    for ((&x, &r), &c) in m.xs.iter().zip(&m.rates).zip(&m.chernoff) {
        out.push(Check::new(S, format!("rate at x = {x} finite and positive"), r, 0.0, r.is_finite() && r > 0.0));
        out.push(Check::new(S, format!("rate at x = {x} >= Chernoff rate"), r, c, r >= c));
        out.push(Check::report(S, format!("rate at x = {x} vs x^2/2"), r, mdp_rate(x)));
    }
    out.push(Check::new(S, "rate increasing in x", m.rates[1] - m.rates[0], 0.0, m.rates[1] > m.rates[0]));
    Ok(())
}

fn counterexample(out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "counterexample";
    let s = counterexample_schedule(1.0, 2.0, 0.1, 1.0, 6)?;
    for (i, &c) in s.cumulants.iter().enumerate() {
        let check = if i % 2 == 0 {
            Check::new(S, format!("u_{} cumulant <= lower threshold", i + 1), c, s.lower_threshold, c <= s.lower_threshold)
        } else {
            Check::new(S, format!("u_{} cumulant >= upper threshold", i + 1), c, s.upper_threshold, c >= s.upper_threshold)
        };
        out.push(check);
    }
    Ok(())
}

pub fn run_checks(suite: Suite) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Duality {
        duality(&mut out)?;
    }
    if all || suite == Suite::Oracle {
        oracle(&mut out)?;
    }
    if all || suite == Suite::Moments {
        moments(&mut out)?;
    }
    if all || suite == Suite::Mdp {
        mdp(&mut out)?;
    }
    if all || suite == Suite::Counterexample {
        counterexample(&mut out)?;
    }
    Ok(out)
}

pub fn cmd_verify(suite: Suite) -> Result<Report, CliError> {
    let checks = run_checks(suite)?;
    let mut table = Table::new(["suite", "check", "measured", "bound", "verdict"]);
    let mut points = Vec::new();
    for (i, c) in checks.iter().enumerate() {
        let verdict = match c.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Report => "report",
        };
        table.push(vec![
            c.suite.into(),
            c.name.clone().into(),
            c.measured.into(),
            c.bound.into(),
            Cell::Text(verdict.into()),
        ]);
        points.push((i as f64, if c.verdict == Verdict::Fail { 0.0 } else { 1.0 }));
    }
    Ok(Report {
        title: format!("verification: {suite:?}").to_lowercase(),
        x_label: "check".into(),
        y_label: "passed".into(),
        series: vec![Series::new("verdict", points)],
        passed: checks.iter().all(|c| c.verdict != Verdict::Fail),
        table,
    })
}
