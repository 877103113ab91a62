//! Limit measures and the truncated cumulant functional
//! `Lambda_C(theta) = integral_{|y|<=C} (e^{theta y} - 1) rho(dy)`.
//!
//! Poisson, binomial and Gaussian measures use closed forms when `C = inf`.
//! Finite cutoffs fall back to exact finite sums (lattice measures) or
//! composite Gauss-Legendre quadrature (Gaussian). The interval is closed:
//! an atom sitting exactly at `+-C` is included.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::additive::{validate_atoms, EmpiricalMeasure};
use crate::error::{Error, Result};

/// Largest exponent allowed inside `exp` before a cumulant is considered to
/// overflow.
const EXP_GUARD: f64 = 700.0;
/// Exponent budget for Poisson/binomial closed forms, leaving room for the
/// polynomial prefactors of the second derivative.
const CLOSED_FORM_GUARD: f64 = 650.0;
/// `theta^2/2 + ln(1 + theta^2) <= 700` holds for `|theta| <= 36`.
const GAUSSIAN_THETA_MAX: f64 = 36.0;
/// Half-width of the Gaussian integration window around the tilted mode.
const GAUSSIAN_WINDOW: f64 = 40.0;
const GL_NODES: usize = 64;
const GL_PANEL_WIDTH: f64 = 2.0;
/// Series terms below this fraction of the running sum end a truncated sum.
const SERIES_TAIL: f64 = 1e-18;

/// A probability measure on the line with finite exponential moments.
///
/// JSON encoding (tag `kind`):
///
/// ```text
/// {"kind": "atoms", "atoms": [[1.0, 0.5], [2.0, 0.5]]}
/// {"kind": "poisson", "lambda": 1.0}
/// {"kind": "binomial", "n": 2, "beta": 0.3}
/// {"kind": "gaussian"}
/// {"kind": "empirical", "atoms": [[0.0, 0.6], [5.0, 0.4]], "normalizer": 1.17}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub enum LimitMeasure {
    /// Finitely many `(value, weight)` atoms.
    Atoms(Vec<(f64, f64)>),
    Poisson { lambda: f64 },
    Binomial { n: u32, beta: f64 },
    /// Standard normal.
    Gaussian,
    Empirical(EmpiricalMeasure),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum MeasureRepr {
    Atoms { atoms: Vec<(f64, f64)> },
    Poisson { lambda: f64 },
    Binomial { n: u32, beta: f64 },
    Gaussian {},
    Empirical { atoms: Vec<(f64, f64)>, normalizer: f64 },
}

impl TryFrom<MeasureRepr> for LimitMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        let m = match r {
            MeasureRepr::Atoms { atoms } => LimitMeasure::Atoms(atoms),
            MeasureRepr::Poisson { lambda } => LimitMeasure::Poisson { lambda },
            MeasureRepr::Binomial { n, beta } => LimitMeasure::Binomial { n, beta },
            MeasureRepr::Gaussian {} => LimitMeasure::Gaussian,
            MeasureRepr::Empirical { atoms, normalizer } => LimitMeasure::Empirical(EmpiricalMeasure { atoms, normalizer }),
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<LimitMeasure> for MeasureRepr {
    fn from(m: LimitMeasure) -> Self {
        match m {
            LimitMeasure::Atoms(atoms) => MeasureRepr::Atoms { atoms },
            LimitMeasure::Poisson { lambda } => MeasureRepr::Poisson { lambda },
            LimitMeasure::Binomial { n, beta } => MeasureRepr::Binomial { n, beta },
            LimitMeasure::Gaussian => MeasureRepr::Gaussian {},
            LimitMeasure::Empirical(e) => MeasureRepr::Empirical {
                atoms: e.atoms,
                normalizer: e.normalizer,
            },
        }
    }
}

/// `Lambda_C`, `Lambda_C'` and `Lambda_C''` at one `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantValue {
    pub lambda: f64,
    pub dlambda: f64,
    pub d2lambda: f64,
}

/// Mass of the truncated measure split by sign of the support point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignMasses {
    pub negative: f64,
    pub zero: f64,
    pub positive: f64,
}

impl LimitMeasure {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = LimitMeasure::Atoms(atoms);
        m.validate()?;
        Ok(m)
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        let m = LimitMeasure::Poisson { lambda };
        m.validate()?;
        Ok(m)
    }

    pub fn binomial(n: u32, beta: f64) -> Result<Self> {
        let m = LimitMeasure::Binomial { n, beta };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LimitMeasure::Atoms(atoms) => validate_atoms(atoms),
            LimitMeasure::Poisson { lambda } => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::domain(format!("poisson lambda must be positive, got {lambda}")))
                }
            }
            LimitMeasure::Binomial { n, beta } => {
                if *n == 0 {
                    Err(Error::domain("binomial n must be positive"))
                } else if !(*beta > 0.0 && *beta < 1.0) {
                    Err(Error::domain(format!("binomial beta must lie in (0, 1), got {beta}")))
                } else {
                    Ok(())
                }
            }
            LimitMeasure::Gaussian => Ok(()),
            LimitMeasure::Empirical(e) => e.validate(),
        }
    }

    fn atom_slice(&self) -> Option<&[(f64, f64)]> {
        match self {
            LimitMeasure::Atoms(a) => Some(a),
            LimitMeasure::Empirical(e) => Some(&e.atoms),
            _ => None,
        }
    }

    /// Interval of `theta` on which the cumulant can be evaluated without
    /// floating-point overflow.
    pub fn theta_bounds(&self, cutoff: f64) -> (f64, f64) {
        match self {
            LimitMeasure::Atoms(_) | LimitMeasure::Empirical(_) => {
                let atoms = self.atom_slice().unwrap_or(&[]);
                let inside = atoms.iter().filter(|a| a.0.abs() <= cutoff);
                let (mut lo, mut hi) = (0.0f64, 0.0f64);
                for &(v, _) in inside {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                let pos = if hi > 0.0 { EXP_GUARD / hi } else { f64::INFINITY };
                let neg = if lo < 0.0 { EXP_GUARD / lo } else { f64::NEG_INFINITY };
                (neg, pos)
            }
            LimitMeasure::Poisson { lambda } => (f64::NEG_INFINITY, (CLOSED_FORM_GUARD / lambda).ln_1p()),
            LimitMeasure::Binomial { n, beta } => (
                f64::NEG_INFINITY,
                ((CLOSED_FORM_GUARD / *n as f64).exp_m1() / beta).ln_1p(),
            ),
            LimitMeasure::Gaussian => (-GAUSSIAN_THETA_MAX, GAUSSIAN_THETA_MAX),
        }
    }

    /// Truncated cumulant and its first two derivatives.
    pub fn cumulant(&self, theta: f64, cutoff: f64) -> Result<CumulantValue> {
        check_cutoff(cutoff)?;
        if !theta.is_finite() {
            return Err(Error::domain(format!("theta must be finite, got {theta}")));
        }
        let (lo, hi) = self.theta_bounds(cutoff);
        if theta < lo || theta > hi {
            return Err(Error::Range {
                theta,
                min_theta: lo,
                max_theta: hi,
            });
        }
        let value = match self {
            LimitMeasure::Atoms(_) | LimitMeasure::Empirical(_) => {
                atoms_cumulant(self.atom_slice().unwrap_or(&[]), theta, cutoff)
            }
            LimitMeasure::Poisson { lambda } => {
                if cutoff.is_infinite() {
                    poisson_closed(*lambda, theta)
                } else {
                    lattice_series(poisson_log_pmf(*lambda), cutoff.floor() as u64, theta, *lambda)
                }
            }
            LimitMeasure::Binomial { n, beta } => {
                if cutoff >= *n as f64 {
                    binomial_closed(*n, *beta, theta)
                } else {
                    lattice_series(binomial_log_pmf(*n, *beta), cutoff.floor() as u64, theta, *n as f64)
                }
            }
            LimitMeasure::Gaussian => {
                if cutoff.is_infinite() {
                    let e = (0.5 * theta * theta).exp();
                    CumulantValue {
                        lambda: (0.5 * theta * theta).exp_m1(),
                        dlambda: theta * e,
                        d2lambda: (1.0 + theta * theta) * e,
                    }
                } else {
                    gaussian_truncated(theta, cutoff)
                }
            }
        };
        Ok(value)
    }

    /// Truncated moment `integral_{|y|<=C} y^k rho(dy)` for `k` in `{1, 2}`.
    pub fn moment(&self, k: u32, cutoff: f64) -> Result<f64> {
        let c = self.cumulant(0.0, cutoff)?;
        match k {
            1 => Ok(c.dlambda),
            2 => Ok(c.d2lambda),
            _ => Err(Error::domain(format!("moment order must be 1 or 2, got {k}"))),
        }
    }

    /// `Lambda'(0)`, the mean of the (untruncated) measure.
    pub fn mean(&self) -> f64 {
        match self {
            LimitMeasure::Atoms(_) | LimitMeasure::Empirical(_) => {
                self.atom_slice().unwrap_or(&[]).iter().map(|&(v, w)| v * w).sum()
            }
            LimitMeasure::Poisson { lambda } => *lambda,
            LimitMeasure::Binomial { n, beta } => *n as f64 * beta,
            LimitMeasure::Gaussian => 0.0,
        }
    }

    /// Masses of `{y < 0}`, `{y = 0}`, `{y > 0}` inside `|y| <= C`.
    pub fn sign_masses(&self, cutoff: f64) -> Result<SignMasses> {
        check_cutoff(cutoff)?;
        let mut m = SignMasses {
            negative: 0.0,
            zero: 0.0,
            positive: 0.0,
        };
        match self {
            LimitMeasure::Atoms(_) | LimitMeasure::Empirical(_) => {
                for &(v, w) in self.atom_slice().unwrap_or(&[]) {
                    if v.abs() > cutoff {
                        continue;
                    }
                    if v < 0.0 {
                        m.negative += w;
                    } else if v > 0.0 {
                        m.positive += w;
                    } else {
                        m.zero += w;
                    }
                }
            }
            LimitMeasure::Poisson { lambda } => {
                m.zero = (-lambda).exp();
                m.positive = if cutoff.is_infinite() {
                    -(-lambda).exp_m1()
                } else {
                    positive_lattice_mass(poisson_log_pmf(*lambda), cutoff.floor() as u64, *lambda)
                };
            }
            LimitMeasure::Binomial { n, beta } => {
                m.zero = (*n as f64 * (-beta).ln_1p()).exp();
                m.positive = if cutoff >= *n as f64 {
                    -(*n as f64 * (-beta).ln_1p()).exp_m1()
                } else {
                    positive_lattice_mass(binomial_log_pmf(*n, *beta), cutoff.floor() as u64, *n as f64)
                };
            }
            LimitMeasure::Gaussian => {
                let half = if cutoff.is_infinite() {
                    0.5
                } else {
                    integrate(0.0, cutoff.min(GAUSSIAN_WINDOW), |y| [std_normal_pdf(y), 0.0, 0.0])[0]
                };
                m.negative = half;
                m.positive = half;
            }
        }
        Ok(m)
    }
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if cutoff > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("cutoff C must be positive, got {cutoff}")))
    }
}

fn atoms_cumulant(atoms: &[(f64, f64)], theta: f64, cutoff: f64) -> CumulantValue {
    let mut out = CumulantValue {
        lambda: 0.0,
        dlambda: 0.0,
        d2lambda: 0.0,
    };
    for &(v, w) in atoms.iter().filter(|a| a.0.abs() <= cutoff) {
        let e = (theta * v).exp();
        out.lambda += w * (theta * v).exp_m1();
        out.dlambda += w * v * e;
        out.d2lambda += w * v * v * e;
    }
    out
}

fn poisson_closed(lambda: f64, theta: f64) -> CumulantValue {
    let t = lambda * theta.exp();
    let e = (lambda * theta.exp_m1()).exp();
    CumulantValue {
        lambda: (lambda * theta.exp_m1()).exp_m1(),
        dlambda: t * e,
        d2lambda: t * (1.0 + t) * e,
    }
}

fn binomial_closed(n: u32, beta: f64, theta: f64) -> CumulantValue {
    let nf = n as f64;
    let shift = beta * theta.exp_m1(); // q - 1
    let ln_q = shift.ln_1p();
    let t = beta * theta.exp();
    let q_n1 = ((nf - 1.0) * ln_q).exp();
    let q_n2 = ((nf - 2.0) * ln_q).exp();
    CumulantValue {
        lambda: (nf * ln_q).exp_m1(),
        dlambda: nf * t * q_n1,
        d2lambda: nf * t * q_n2 * ((1.0 + shift) + (nf - 1.0) * t),
    }
}

/// Log-pmf generator over `k = 0, 1, 2, ...`.
type LogPmf = Box<dyn Fn(u64) -> f64>;

fn poisson_log_pmf(lambda: f64) -> LogPmf {
    let ln_lambda = lambda.ln();
    Box::new(move |k| k as f64 * ln_lambda - lambda - ln_factorial(k))
}

fn binomial_log_pmf(n: u32, beta: f64) -> LogPmf {
    let (ln_b, ln_1b) = (beta.ln(), (-beta).ln_1p());
    let ln_n = ln_factorial(n as u64);
    Box::new(move |k| {
        if k > n as u64 {
            f64::NEG_INFINITY
        } else {
            ln_n - ln_factorial(k) - ln_factorial(n as u64 - k) + k as f64 * ln_b + (n as u64 - k) as f64 * ln_1b
        }
    })
}

fn ln_factorial(k: u64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(4097);
        t.push(0.0);
        for i in 1..=4096u64 {
            t.push(t[i as usize - 1] + (i as f64).ln());
        }
        t
    });
    if let Some(v) = table.get(k as usize) {
        return *v;
    }
    // Stirling series; k > 4096 so three terms are far below 1 ulp.
    let x = k as f64;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
}

/// Sum over lattice points `k = 0..=kmax` of `pmf(k) (e^{theta k} - 1)` and
/// the derivatives, ending early once the tilted terms are negligible.
/// `scale` is a rough location of the untilted mass.
fn lattice_series(log_pmf: LogPmf, kmax: u64, theta: f64, scale: f64) -> CumulantValue {
    let mut out = CumulantValue {
        lambda: 0.0,
        dlambda: 0.0,
        d2lambda: 0.0,
    };
    let tilted_mode = scale * theta.exp().max(1.0);
    for k in 0..=kmax {
        let lp = log_pmf(k);
        if lp == f64::NEG_INFINITY {
            break;
        }
        let kf = k as f64;
        let pmf = lp.exp();
        let t = (lp + theta * kf).exp();
        out.lambda += pmf * (theta * kf).exp_m1();
        out.dlambda += kf * t;
        out.d2lambda += kf * kf * t;
        if kf > tilted_mode + 10.0
            && kf * kf * t <= SERIES_TAIL * out.d2lambda
            && t <= SERIES_TAIL * out.dlambda.abs()
            && pmf <= SERIES_TAIL
        {
            break;
        }
    }
    out
}

fn positive_lattice_mass(log_pmf: LogPmf, kmax: u64, scale: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..=kmax {
        let lp = log_pmf(k);
        if lp == f64::NEG_INFINITY {
            break;
        }
        let p = lp.exp();
        acc += p;
        if k as f64 > scale + 10.0 && p <= SERIES_TAIL * acc {
            break;
        }
    }
    acc
}

fn std_normal_pdf(y: f64) -> f64 {
    (-0.5 * y * y).exp() / (2.0 * PI).sqrt()
}

fn gaussian_truncated(theta: f64, cutoff: f64) -> CumulantValue {
    let lo = (-cutoff).max((theta - GAUSSIAN_WINDOW).min(-GAUSSIAN_WINDOW));
    let hi = cutoff.min((theta + GAUSSIAN_WINDOW).max(GAUSSIAN_WINDOW));
    let [lambda, dlambda, d2lambda] = integrate(lo, hi, |y| {
        let phi = std_normal_pdf(y);
        let e = (theta * y - 0.5 * y * y).exp() / (2.0 * PI).sqrt();
        [phi * (theta * y).exp_m1(), y * e, y * y * e]
    });
    CumulantValue {
        lambda,
        dlambda,
        d2lambda,
    }
}

/// Composite Gauss-Legendre over `[a, b]`, `a <= 0 <= b`, applied to three
/// integrands at once. Panels sit on the fixed grid `k * GL_PANEL_WIDTH` and
/// each half-line is accumulated outward from 0, so widening the interval only
/// appends terms.
fn integrate(a: f64, b: f64, f: impl Fn(f64) -> [f64; 3]) -> [f64; 3] {
    let (nodes, weights) = gauss_legendre();
    let panel = |lo: f64, hi: f64, acc: &mut [f64; 3]| {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut sum = [0.0; 3];
        for (&x, &w) in nodes.iter().zip(weights) {
            let v = f(mid + half * x);
            for i in 0..3 {
                sum[i] += w * v[i];
            }
        }
        for i in 0..3 {
            acc[i] += half * sum[i];
        }
    };
    let mut right = [0.0; 3];
    let mut left = [0.0; 3];
    let mut edge = 0.0;
    while edge < b {
        let next = (edge + GL_PANEL_WIDTH).min(b);
        panel(edge, next, &mut right);
        edge = next;
    }
    edge = 0.0;
    while edge > a {
        let next = (edge - GL_PANEL_WIDTH).max(a);
        panel(next, edge, &mut left);
        edge = next;
    }
    [left[0] + right[0], left[1] + right[1], left[2] + right[2]]
}

/// 64-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre() -> (&'static [f64], &'static [f64]) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| {
        let n = GL_NODES;
        let mut xs = vec![0.0; n];
        let mut ws = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    });
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn all_measures() -> Vec<LimitMeasure> {
        vec![
            LimitMeasure::atoms(vec![(1.0, 1.0)]).unwrap(),
            LimitMeasure::atoms(vec![(-1.5, 0.25), (0.0, 0.25), (2.0, 0.5)]).unwrap(),
            LimitMeasure::poisson(1.0).unwrap(),
            LimitMeasure::poisson(3.0).unwrap(),
            LimitMeasure::binomial(1, 0.3).unwrap(),
            LimitMeasure::binomial(5, 0.6).unwrap(),
            LimitMeasure::Gaussian,
        ]
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m4: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn closed_form_examples() {
        let theta = 0.7f64;
        let a = LimitMeasure::atoms(vec![(1.0, 1.0)]).unwrap().cumulant(theta, INF).unwrap();
        assert!((a.lambda - (theta.exp() - 1.0)).abs() < 1e-15);
        assert!((a.dlambda - theta.exp()).abs() < 1e-15);

        let p = LimitMeasure::poisson(2.0).unwrap().cumulant(theta, INF).unwrap();
        assert!((p.lambda - ((2.0 * (theta.exp() - 1.0)).exp() - 1.0)).abs() < 1e-13);

        let g = LimitMeasure::Gaussian.cumulant(theta, INF).unwrap();
        assert!((g.lambda - ((0.5 * theta * theta).exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_at_origin_for_every_cutoff() {
        for m in all_measures() {
            for c in [0.5, 1.0, 2.0, 3.5, 10.0, INF] {
                assert_eq!(m.cumulant(0.0, c).unwrap().lambda, 0.0, "{m:?} C={c}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for m in all_measures() {
            for c in [2.0, INF] {
                let mut theta = -20.0;
                while theta <= 20.0 {
                    let (lo, hi) = m.theta_bounds(c);
                    if theta - h >= lo && theta + h <= hi {
                        let v = m.cumulant(theta, c).unwrap();
                        let up = m.cumulant(theta + h, c).unwrap();
                        let dn = m.cumulant(theta - h, c).unwrap();
                        assert!(v.d2lambda >= 0.0);
                        let fd = (up.lambda - dn.lambda) / (2.0 * h);
                        // central-difference truncation error is h^2/6 * Lambda'''
                        let third = (up.d2lambda - dn.d2lambda).abs() / (2.0 * h);
                        let tol = 1e-6 * v.dlambda.abs().max(1.0) + h * h / 3.0 * third;
                        assert!(
                            (fd - v.dlambda).abs() <= tol,
                            "{m:?} C={c} theta={theta}: fd {fd} vs {}",
                            v.dlambda
                        );
                    }
                    theta += 0.25;
                }
            }
        }
    }

    #[test]
    fn truncated_poisson_matches_closed_form_for_large_cutoff() {
        let m = LimitMeasure::poisson(3.0).unwrap();
        for theta in [-2.0, 0.0, 0.5, 1.5] {
            let a = m.cumulant(theta, INF).unwrap();
            let b = m.cumulant(theta, 1e6).unwrap();
            assert!((a.lambda - b.lambda).abs() <= 1e-12 * a.lambda.abs().max(1.0));
            assert!((a.d2lambda - b.d2lambda).abs() <= 1e-12 * a.d2lambda.max(1.0));
        }
    }

    #[test]
    fn truncated_gaussian_matches_closed_form_for_large_cutoff() {
        for theta in [-3.0, 0.0, 1.0, 4.0] {
            let a = LimitMeasure::Gaussian.cumulant(theta, INF).unwrap();
            let b = LimitMeasure::Gaussian.cumulant(theta, 100.0).unwrap();
            assert!((a.lambda - b.lambda).abs() <= 1e-12 * a.lambda.abs().max(1.0), "{theta}");
            assert!((a.dlambda - b.dlambda).abs() <= 1e-12 * a.d2lambda.max(1.0));
        }
    }

    #[test]
    fn moments() {
        assert!((LimitMeasure::Gaussian.moment(2, INF).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(LimitMeasure::atoms(vec![(1.0, 1.0)]).unwrap().moment(1, INF).unwrap(), 1.0);
        assert!((LimitMeasure::poisson(2.0).unwrap().moment(2, INF).unwrap() - 6.0).abs() < 1e-14);
        assert!(LimitMeasure::Gaussian.moment(3, INF).is_err());
    }

    #[test]
    fn poisson_second_moment_series_oracle() {
        // sum_k k^2 e^{-2} 2^k / k!, accumulated independently
        let mut term = (-2.0f64).exp();
        let mut acc = 0.0;
        for k in 1..200 {
            term *= 2.0 / k as f64;
            acc += (k * k) as f64 * term;
        }
        let m = LimitMeasure::poisson(2.0).unwrap();
        assert!((m.moment(2, INF).unwrap() - acc).abs() < 1e-13);
        assert!((m.moment(2, 1e9).unwrap() - acc).abs() < 1e-13);
    }

    #[test]
    fn truncation_is_monotone_and_closed() {
        let m = LimitMeasure::atoms(vec![(-3.0, 0.2), (1.0, 0.5), (2.0, 0.3)]).unwrap();
        assert_eq!(m.moment(2, 2.0).unwrap(), 0.5 + 0.3 * 4.0);
        let p = LimitMeasure::poisson(2.0).unwrap();
        let g = LimitMeasure::Gaussian;
        let mut prev = (0.0, 0.0, 0.0);
        for i in 1..40 {
            let c = 0.25 * i as f64;
            let cur = (m.moment(2, c).unwrap(), p.moment(2, c).unwrap(), g.moment(2, c).unwrap());
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1 && cur.2 >= prev.2, "C={c}: {cur:?} after {prev:?}");
            prev = cur;
        }
    }

    #[test]
    fn overflow_is_a_range_error() {
        let m = LimitMeasure::atoms(vec![(2.0, 1.0)]).unwrap();
        assert!(matches!(m.cumulant(351.0, INF), Err(Error::Range { max_theta, .. }) if max_theta == 350.0));
        assert!(matches!(LimitMeasure::Gaussian.cumulant(40.0, INF), Err(Error::Range { .. })));
        assert!(LimitMeasure::poisson(1.0).unwrap().cumulant(-1e4, INF).is_ok());
    }

    #[test]
    fn invalid_measures_rejected() {
        assert!(LimitMeasure::atoms(vec![(1.0, 0.5)]).is_err());
        assert!(LimitMeasure::atoms(vec![(1.0, 1.5), (2.0, -0.5)]).is_err());
        assert!(LimitMeasure::poisson(0.0).is_err());
        assert!(LimitMeasure::binomial(0, 0.5).is_err());
        assert!(LimitMeasure::binomial(2, 1.0).is_err());
        assert!(LimitMeasure::Gaussian.cumulant(1.0, 0.0).is_err());
    }

    #[test]
    fn sign_masses_of_poisson() {
        let m = LimitMeasure::poisson(1.0).unwrap().sign_masses(INF).unwrap();
        assert!((m.zero - (-1.0f64).exp()).abs() < 1e-16);
        assert!((m.positive - (1.0 - (-1.0f64).exp())).abs() < 1e-16);
        let t = LimitMeasure::poisson(1.0).unwrap().sign_masses(1.0).unwrap();
        assert!((t.positive - (-1.0f64).exp()).abs() < 1e-16);
    }
}
