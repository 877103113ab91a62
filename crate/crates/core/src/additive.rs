//! Strongly additive functions and the prime-weighted measures built from them.
//!
//! A strongly additive `g` is determined by its values on primes:
//! `g(m) = sum_{p | m} g(p)`, with exponents ignored. The empirical measure
//! `rho_n` places mass proportional to `1/p` at `g(p)` for every `p <= n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{PrimeTable, Primes};
use crate::sum::CompensatedSum;

/// Tolerance used to merge table-derived atoms with nearly equal values.
pub const TABLE_MERGE_TOL: f64 = 1e-12;

/// A strongly additive function, described by its values on primes.
///
/// JSON encoding (tag `kind`):
///
/// ```text
/// {"kind": "constant", "lambda": 1.0}
/// {"kind": "two_value_by_index", "lambda1": 1.0, "lambda2": 2.0}
/// {"kind": "interval_oscillating", "lambda1": 1.0, "lambda2": 2.0, "breakpoints": [10, 1000]}
/// {"kind": "table", "values": {"2": 5.0}, "default": 0.0}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub enum AdditiveFunctionSpec {
    /// `g(p) = lambda` for every prime.
    Constant { lambda: f64 },
    /// `g(p_k) = lambda1` for odd `k`, `lambda2` for even `k` (one-based prime index).
    TwoValueByIndex { lambda1: f64, lambda2: f64 },
    /// With breakpoints `a_1 < a_2 < ...` and `a_0 = 0`: `g(p) = lambda1` on
    /// `a_{2k} < p <= a_{2k+1}` and `lambda2` on `a_{2k+1} < p <= a_{2k+2}`.
    /// Past the last breakpoint the parity pattern continues.
    IntervalOscillating {
        lambda1: f64,
        lambda2: f64,
        breakpoints: Vec<u64>,
    },
    /// Explicit values on selected primes, `default` elsewhere.
    Table {
        values: BTreeMap<u64, f64>,
        default: f64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecRepr {
    Constant {
        lambda: f64,
    },
    TwoValueByIndex {
        lambda1: f64,
        lambda2: f64,
    },
    IntervalOscillating {
        lambda1: f64,
        lambda2: f64,
        breakpoints: Vec<u64>,
    },
    Table {
        values: BTreeMap<u64, f64>,
        #[serde(default)]
        default: f64,
    },
}

impl TryFrom<SpecRepr> for AdditiveFunctionSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = match r {
            SpecRepr::Constant { lambda } => Self::Constant { lambda },
            SpecRepr::TwoValueByIndex { lambda1, lambda2 } => Self::TwoValueByIndex { lambda1, lambda2 },
            SpecRepr::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            } => Self::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            },
            SpecRepr::Table { values, default } => Self::Table { values, default },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<AdditiveFunctionSpec> for SpecRepr {
    fn from(s: AdditiveFunctionSpec) -> Self {
        match s {
            AdditiveFunctionSpec::Constant { lambda } => SpecRepr::Constant { lambda },
            AdditiveFunctionSpec::TwoValueByIndex { lambda1, lambda2 } => SpecRepr::TwoValueByIndex { lambda1, lambda2 },
            AdditiveFunctionSpec::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            } => SpecRepr::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            },
            AdditiveFunctionSpec::Table { values, default } => SpecRepr::Table { values, default },
        }
    }
}

impl AdditiveFunctionSpec {
    pub fn constant(lambda: f64) -> Result<Self> {
        let s = Self::Constant { lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn two_value_by_index(lambda1: f64, lambda2: f64) -> Result<Self> {
        let s = Self::TwoValueByIndex { lambda1, lambda2 };
        s.validate()?;
        Ok(s)
    }

    pub fn interval_oscillating(lambda1: f64, lambda2: f64, breakpoints: Vec<u64>) -> Result<Self> {
        let s = Self::IntervalOscillating {
            lambda1,
            lambda2,
            breakpoints,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn table(values: impl IntoIterator<Item = (u64, f64)>, default: f64) -> Result<Self> {
        let s = Self::Table {
            values: values.into_iter().collect(),
            default,
        };
        s.validate()?;
        Ok(s)
    }

    /// Rejects non-finite values and non-increasing breakpoints.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("g value {name} = {v} is not finite")))
            }
        };
        match self {
            Self::Constant { lambda } => finite("lambda", *lambda),
            Self::TwoValueByIndex { lambda1, lambda2 } => {
                finite("lambda1", *lambda1)?;
                finite("lambda2", *lambda2)
            }
            Self::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            } => {
                finite("lambda1", *lambda1)?;
                finite("lambda2", *lambda2)?;
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::domain("breakpoints must be strictly increasing"));
                }
                Ok(())
            }
            Self::Table { values, default } => {
                finite("default", *default)?;
                for (p, v) in values {
                    finite(&format!("values[{p}]"), *v)?;
                }
                Ok(())
            }
        }
    }

    /// `g(p)` for the prime `p` at zero-based position `index` in the ordered
    /// list of primes.
    pub fn value_at(&self, index: usize, p: u64) -> f64 {
        match self {
            Self::Constant { lambda } => *lambda,
            Self::TwoValueByIndex { lambda1, lambda2 } => {
                if index % 2 == 0 {
                    *lambda1
                } else {
                    *lambda2
                }
            }
            Self::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            } => {
                let segment = breakpoints.partition_point(|&a| a < p);
                if segment % 2 == 0 {
                    *lambda1
                } else {
                    *lambda2
                }
            }
            Self::Table { values, default } => values.get(&p).copied().unwrap_or(*default),
        }
    }

    /// Whether `value_at` depends on the prime's position in the list.
    pub fn needs_index(&self) -> bool {
        matches!(self, Self::TwoValueByIndex { .. })
    }

    /// A finite superset of the values `g` takes on primes.
    pub fn value_set(&self) -> Vec<f64> {
        let mut v = match self {
            Self::Constant { lambda } => vec![*lambda],
            Self::TwoValueByIndex { lambda1, lambda2 }
            | Self::IntervalOscillating { lambda1, lambda2, .. } => vec![*lambda1, *lambda2],
            Self::Table { values, default } => {
                let mut v: Vec<f64> = values.values().copied().collect();
                v.push(*default);
                v
            }
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Scales every prime value by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let s = match self {
            Self::Constant { lambda } => Self::Constant { lambda: c * lambda },
            Self::TwoValueByIndex { lambda1, lambda2 } => Self::TwoValueByIndex {
                lambda1: c * lambda1,
                lambda2: c * lambda2,
            },
            Self::IntervalOscillating {
                lambda1,
                lambda2,
                breakpoints,
            } => Self::IntervalOscillating {
                lambda1: c * lambda1,
                lambda2: c * lambda2,
                breakpoints: breakpoints.clone(),
            },
            Self::Table { values, default } => Self::Table {
                values: values.iter().map(|(&p, &v)| (p, c * v)).collect(),
                default: c * default,
            },
        };
        s.validate()?;
        Ok(s)
    }

    fn merge_tolerance(&self) -> f64 {
        match self {
            Self::Table { .. } => TABLE_MERGE_TOL,
            _ => 0.0,
        }
    }
}

/// `g(m) = sum of g(p)` over the distinct primes dividing `m`; `g(1) = 0`.
pub fn g_eval(spec: &AdditiveFunctionSpec, m: u64, table: &PrimeTable) -> Result<f64> {
    let factors = table.factorize(m)?;
    let mut acc = 0.0;
    for (p, _) in factors {
        let index = if spec.needs_index() {
            table
                .primes()
                .index_of(p)
                .ok_or_else(|| Error::capacity("prime index for p", p, table.limit()))?
        } else {
            0
        };
        acc += spec.value_at(index, p);
    }
    Ok(acc)
}

/// Prime-weighted empirical measure of the values of `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    /// `(value, weight)` sorted by value, values distinct, weights positive.
    pub atoms: Vec<(f64, f64)>,
    /// `sum_{p<=n} 1/p`.
    pub normalizer: f64,
}

impl EmpiricalMeasure {
    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// `sum value^k * weight`.
    pub fn moment(&self, k: i32) -> f64 {
        self.atoms.iter().map(|&(v, w)| w * v.powi(k)).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::domain("empirical measure has no atoms"));
        }
        if !(self.normalizer.is_finite() && self.normalizer > 0.0) {
            return Err(Error::domain("empirical normalizer must be positive"));
        }
        if self.atoms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::domain("empirical atoms must be sorted with distinct values"));
        }
        validate_atoms(&self.atoms)
    }
}

pub(crate) fn validate_atoms(atoms: &[(f64, f64)]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::domain("measure needs at least one atom"));
    }
    for &(v, w) in atoms {
        if !v.is_finite() {
            return Err(Error::domain(format!("atom value {v} is not finite")));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::domain(format!("atom weight {w} must be positive")));
        }
    }
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("atom weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// `rho_n`: mass `(sum_{g(p)=v, p<=n} 1/p) / (sum_{p<=n} 1/p)` at each value `v`.
pub fn empirical_rho(spec: &AdditiveFunctionSpec, primes: &Primes, n: u64) -> Result<EmpiricalMeasure> {
    let ps = primes.up_to(n)?;
    if ps.is_empty() {
        return Err(Error::domain(format!("no primes <= {n}")));
    }
    let mut pairs: Vec<(f64, f64)> = ps
        .iter()
        .enumerate()
        .map(|(i, &p)| (spec.value_at(i, p), 1.0 / p as f64))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let tol = spec.merge_tolerance();
    let mut groups: Vec<(f64, CompensatedSum)> = Vec::new();
    let mut normalizer = CompensatedSum::new();
    for (v, w) in pairs {
        normalizer.add(w);
        match groups.last_mut() {
            Some((v0, acc)) if v - *v0 <= tol * v0.abs().max(1.0) => acc.add(w),
            _ => {
                let mut acc = CompensatedSum::new();
                acc.add(w);
                groups.push((v, acc));
            }
        }
    }
    let normalizer = normalizer.value();
    let atoms = groups
        .into_iter()
        .map(|(v, acc)| (v, acc.value() / normalizer))
        .collect();
    Ok(EmpiricalMeasure { atoms, normalizer })
}

/// Centering and scaling constants for moderate deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModerateScaling {
    /// `sum_{p<=n} g(p)/p`
    pub mu_n: f64,
    /// `sum_{p<=n} g(p)^2/p`
    pub sigma2_n: f64,
    pub a_n: f64,
    /// `a_n^2 / sigma2_n`
    pub speed: f64,
}

impl ModerateScaling {
    /// `a_n = sigma_n^1.5`, the geometric midpoint of the admissible window.
    pub const DEFAULT_A_EXPONENT: f64 = 1.5;

    pub fn new(mu_n: f64, sigma2_n: f64, a_n: f64) -> Result<Self> {
        if !(sigma2_n > 0.0) {
            return Err(Error::DegenerateFunction);
        }
        if !(a_n.is_finite() && a_n > 0.0) {
            return Err(Error::domain(format!("a_n must be positive, got {a_n}")));
        }
        Ok(ModerateScaling {
            mu_n,
            sigma2_n,
            a_n,
            speed: a_n * a_n / sigma2_n,
        })
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma2_n.sqrt()
    }

    /// `sigma_n <= a_n <= sigma_n^2`. Callers should warn when this fails.
    pub fn in_moderate_window(&self) -> bool {
        let s = self.sigma_n();
        s <= self.a_n && self.a_n <= self.sigma2_n
    }
}

/// `mu_n` and `sigma_n^2` over primes `p <= n`. `a_n` defaults to `sigma_n^1.5`.
pub fn mu_sigma(spec: &AdditiveFunctionSpec, primes: &Primes, n: u64, a_n: Option<f64>) -> Result<ModerateScaling> {
    let ps = primes.up_to(n)?;
    let mut mu = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for (i, &p) in ps.iter().enumerate() {
        let g = spec.value_at(i, p);
        let inv = 1.0 / p as f64;
        mu.add(g * inv);
        s2.add(g * g * inv);
    }
    let sigma2 = s2.value();
    if !(sigma2 > 0.0) {
        return Err(Error::DegenerateFunction);
    }
    let a = a_n.unwrap_or_else(|| sigma2.sqrt().powf(ModerateScaling::DEFAULT_A_EXPONENT));
    ModerateScaling::new(mu.value(), sigma2, a)
}

/// Breakpoints of a two-level `g` in the Mertens coordinate
/// `u = sum_{p<=x} 1/p`, chosen so that the running average of
/// `e^{theta g(u)} - 1` alternates between the two levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleSchedule {
    pub lambda1: f64,
    pub lambda2: f64,
    pub delta: f64,
    pub theta: f64,
    /// `u_1 < u_2 < ... < u_K`; `g = lambda1` on `(u_{k-1}, u_k]` for odd `k`.
    pub breakpoints: Vec<f64>,
    /// `(1/u_k) * integral_0^{u_k} (e^{theta g(u)} - 1) du`.
    pub cumulants: Vec<f64>,
    /// `e^{theta lambda1} - 1 + delta`; odd-k cumulants lie at or below it.
    pub lower_threshold: f64,
    /// `e^{theta lambda2} - 1 - delta`; even-k cumulants lie at or above it.
    pub upper_threshold: f64,
}

impl CounterexampleSchedule {
    /// Whether every breakpoint satisfies its alternating inequality.
    pub fn alternates(&self) -> bool {
        self.cumulants.iter().enumerate().all(|(i, &c)| {
            if i % 2 == 0 {
                c <= self.lower_threshold
            } else {
                c >= self.upper_threshold
            }
        })
    }

    /// Normalized cumulant at an arbitrary `u in (0, u_K]`.
    pub fn cumulant_at(&self, u: f64) -> f64 {
        let a = (self.theta * self.lambda1).exp_m1();
        let b = (self.theta * self.lambda2).exp_m1();
        let mut acc = 0.0;
        let mut left = 0.0;
        for (k, &right) in self.breakpoints.iter().enumerate() {
            let level = if k % 2 == 0 { a } else { b };
            let r = right.min(u);
            if r > left {
                acc += (r - left) * level;
            }
            if u <= right {
                break;
            }
            left = right;
        }
        acc / u
    }
}

/// Builds `K` breakpoints where the normalized cumulant lands halfway inside
/// each band: at `a + delta/2` for odd `k` and `b - delta/2` for even `k`.
pub fn counterexample_schedule(lambda1: f64, lambda2: f64, delta: f64, theta: f64, k: usize) -> Result<CounterexampleSchedule> {
    if ![lambda1, lambda2, delta, theta].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("counterexample parameters must be finite"));
    }
    let a = (theta * lambda1).exp_m1();
    let b = (theta * lambda2).exp_m1();
    let max_delta = ((theta * lambda2).exp() - (theta * lambda1).exp()) / 2.0;
    if delta >= max_delta {
        return Err(Error::InfeasibleGap { delta, max_delta });
    }
    if !(lambda1 > 0.0 && lambda1 < lambda2) {
        return Err(Error::domain("need 0 < lambda1 < lambda2"));
    }
    if !(delta > 0.0 && theta > 0.0) {
        return Err(Error::domain("need delta > 0 and theta > 0"));
    }
    if k == 0 {
        return Err(Error::domain("need at least one breakpoint"));
    }

    let mut breakpoints = Vec::with_capacity(k);
    let mut cumulants = Vec::with_capacity(k);
    let mut u = 1.0;
    let mut integral = a; // integral over (0, 1] of the first lambda1 segment
    breakpoints.push(u);
    cumulants.push(integral / u);
    for step in 1..k {
        let f = integral / u;
        let (level, target) = if step % 2 == 1 {
            (b, b - delta / 2.0)
        } else {
            (a, a + delta / 2.0)
        };
        // (u f + (u' - u) level) / u' = target  =>  u' = u (level - f) / (level - target)
        let next = u * (level - f) / (level - target);
        integral += (next - u) * level;
        u = next;
        breakpoints.push(u);
        cumulants.push(integral / u);
    }

    Ok(CounterexampleSchedule {
        lambda1,
        lambda2,
        delta,
        theta,
        breakpoints,
        cumulants,
        lower_threshold: a + delta,
        upper_threshold: b - delta,
    })
}
