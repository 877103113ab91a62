//! `I_C(x) = sup_theta { theta x - Lambda_C(theta) }` by safeguarded Newton.
//!
//! `Lambda_C` is convex, so the supremum is attained at the unique root of
//! `Lambda_C'(theta) = x` whenever `x` lies strictly inside the range of
//! `Lambda_C'`. The range endpoints are read off the sign of the support:
//! with no negative mass `Lambda_C'(theta) -> 0` as `theta -> -inf`, otherwise
//! it tends to `-inf` (and symmetrically on the right).

use super::{RateFunctionResult, RateStatus};
use crate::error::{Error, Result};
use crate::measures::{CumulantValue, LimitMeasure};

/// Convergence test on `|Lambda'(theta) - x| / max(1, |x|)`.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: u32 = 200;
const MAX_STEP: f64 = 2.0;
/// Bracket growth gives up past this `|theta|`.
const THETA_SEARCH_LIMIT: f64 = 1e6;

pub fn legendre_rate(rho: &LimitMeasure, x: f64, cutoff: f64) -> Result<RateFunctionResult> {
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    let masses = rho.sign_masses(cutoff)?;
    let has_neg = masses.negative > 0.0;
    let has_pos = masses.positive > 0.0;

    if !has_neg && !has_pos {
        // Lambda == 0
        return Ok(if x == 0.0 {
            RateFunctionResult {
                x,
                value: 0.0,
                theta_star: Some(0.0),
                iterations: 0,
                status: RateStatus::Interior,
            }
        } else {
            RateFunctionResult::infinite(x)
        });
    }
    if (!has_neg && x < 0.0) || (!has_pos && x > 0.0) {
        return Ok(RateFunctionResult::infinite(x));
    }
    if x == 0.0 && !has_neg {
        // theta -> -inf: Lambda -> -rho(0 < y <= C)
        return Ok(RateFunctionResult::boundary(x, masses.positive));
    }
    if x == 0.0 && !has_pos {
        return Ok(RateFunctionResult::boundary(x, masses.negative));
    }

    let (theta_lo, theta_hi) = rho.theta_bounds(cutoff);
    let eval = |theta: f64| rho.cumulant(theta, cutoff);
    let tol = NEWTON_TOL * x.abs().max(1.0);
    let mut iterations = 0u32;

    // Bracket [a, b] with Lambda'(a) <= x <= Lambda'(b), grown geometrically from 0.
    let at_zero = eval(0.0)?;
    let (mut a, mut b) = (0.0f64, 0.0f64);
    if at_zero.dlambda < x {
        let mut step = 1.0;
        loop {
            iterations += 1;
            let cand = (a + step).min(theta_hi);
            let c = eval(cand)?;
            if c.dlambda >= x {
                b = cand;
                break;
            }
            a = cand;
            if cand >= theta_hi || cand >= THETA_SEARCH_LIMIT {
                return Err(Error::Range {
                    theta: cand,
                    min_theta: theta_lo,
                    max_theta: theta_hi,
                });
            }
            step *= 2.0;
        }
    } else if at_zero.dlambda > x {
        let mut step = 1.0;
        loop {
            iterations += 1;
            let cand = (b - step).max(theta_lo);
            let c = eval(cand)?;
            if c.dlambda <= x {
                a = cand;
                break;
            }
            b = cand;
            if cand <= theta_lo || cand <= -THETA_SEARCH_LIMIT {
                return Err(Error::Range {
                    theta: cand,
                    min_theta: theta_lo,
                    max_theta: theta_hi,
                });
            }
            step *= 2.0;
        }
    }

    let finish = |theta: f64, c: CumulantValue, iterations: u32| RateFunctionResult {
        x,
        value: (theta * x - c.lambda).max(0.0),
        theta_star: Some(theta),
        iterations,
        status: RateStatus::Interior,
    };

    let mut theta = if a < 0.0 && b > 0.0 { 0.0 } else if a == b { a } else { 0.5 * (a + b) };
    let mut last_step = f64::INFINITY;
    while iterations < NEWTON_MAX_ITER {
        iterations += 1;
        let c = eval(theta)?;
        let resid = c.dlambda - x;
        if resid.abs() <= tol {
            return Ok(finish(theta, c, iterations));
        }
        if resid < 0.0 {
            a = theta;
        } else {
            b = theta;
        }
        if b - a <= 4.0 * f64::EPSILON * theta.abs().max(f64::MIN_POSITIVE) {
            // bracket collapsed to adjacent floats
            return Ok(finish(theta, c, iterations));
        }
        let step = (resid / c.d2lambda).clamp(-MAX_STEP, MAX_STEP);
        let newton = theta - step;
        // Newton inside the bracket; bisect when it leaves or is not halving
        let next = if c.d2lambda > 0.0 && newton > a && newton < b && 2.0 * step.abs() <= last_step {
            newton
        } else {
            0.5 * (a + b)
        };
        last_step = (next - theta).abs();
        theta = next;
    }
    Err(Error::NoConvergence {
        iterations,
        lo: a,
        hi: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn point_mass() -> LimitMeasure {
        LimitMeasure::atoms(vec![(1.0, 1.0)]).unwrap()
    }

    #[test]
    fn vanishes_at_mean() {
        let r = legendre_rate(&point_mass(), 1.0, INF).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.theta_star, Some(0.0));
        assert_eq!(r.status, RateStatus::Interior);
    }

    #[test]
    fn point_mass_at_two() {
        let r = legendre_rate(&point_mass(), 2.0, INF).unwrap();
        assert!((r.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
        assert!((r.theta_star.unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn boundary_and_infinite() {
        let r = legendre_rate(&point_mass(), 0.0, INF).unwrap();
        assert_eq!(r.status, RateStatus::Boundary);
        assert_eq!(r.value, 1.0);
        let r = legendre_rate(&point_mass(), -0.5, INF).unwrap();
        assert!(r.is_infinite());
        assert_eq!(r.value, INF);
        // only negative support
        let neg = LimitMeasure::atoms(vec![(-2.0, 1.0)]).unwrap();
        assert!(legendre_rate(&neg, 0.5, INF).unwrap().is_infinite());
        assert_eq!(legendre_rate(&neg, 0.0, INF).unwrap().value, 1.0);
        // everything truncated away
        assert!(legendre_rate(&LimitMeasure::atoms(vec![(5.0, 1.0)]).unwrap(), 1.0, 2.0)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn poisson_dense_grid_oracle() {
        // brute-force maximization of theta x - Lambda(theta) on [-30, 30]
        let (lambda, x) = (1.0f64, 3.0f64);
        let mut best = f64::NEG_INFINITY;
        let mut theta = -30.0f64;
        while theta <= 30.0 {
            let arg = lambda * theta.exp_m1();
            if arg < 700.0 {
                best = best.max(theta * x - arg.exp_m1());
            }
            theta += 1e-5;
        }
        let r = legendre_rate(&LimitMeasure::poisson(lambda).unwrap(), x, INF).unwrap();
        assert!((r.value - best).abs() < 1e-8, "{} vs {best}", r.value);
    }

    #[test]
    fn convex_nonnegative_and_monotone_theta() {
        let rho = LimitMeasure::atoms(vec![(-1.0, 0.3), (0.5, 0.3), (2.0, 0.4)]).unwrap();
        let xs: Vec<f64> = (0..81).map(|i| -3.0 + 0.1 * i as f64).collect();
        let rs: Vec<_> = xs.iter().map(|&x| legendre_rate(&rho, x, INF).unwrap()).collect();
        for w in rs.windows(3) {
            assert!(w[1].value >= 0.0);
            assert!(w[0].value + w[2].value - 2.0 * w[1].value >= -1e-10);
            assert!(w[0].theta_star.unwrap() < w[1].theta_star.unwrap());
        }
        let mean = rho.mean();
        assert!(legendre_rate(&rho, mean, INF).unwrap().value <= 1e-10);
    }

    #[test]
    fn interior_residual_is_small() {
        let rho = LimitMeasure::poisson(3.0).unwrap();
        for x in [0.01, 0.5, 3.0, 12.0, 200.0] {
            let r = legendre_rate(&rho, x, INF).unwrap();
            let c = rho.cumulant(r.theta_star.unwrap(), INF).unwrap();
            assert!((c.dlambda - x).abs() <= 1e-10 * x.max(1.0));
        }
    }

    #[test]
    fn truncation_matters() {
        let rho = LimitMeasure::atoms(vec![(1.0, 0.5), (4.0, 0.5)]).unwrap();
        // only the atom at 1 survives: sup theta - (e^theta - 1)/2 at theta = ln 2
        let cut = legendre_rate(&rho, 1.0, 2.0).unwrap();
        assert!((cut.value - (2f64.ln() - 0.5)).abs() < 1e-13);
        assert_eq!(legendre_rate(&rho, 0.0, 2.0).unwrap().value, 0.5);
    }
}
