//! Closed-form rate functions for limit measures where the stationarity
//! condition `Lambda'(theta) = x` can be solved explicitly.

use serde::{Deserialize, Serialize};

use super::lambert::lambert_w;
use super::{RateFunctionResult, RateStatus};
use crate::error::Result;
use crate::measures::LimitMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClosedFormFamily {
    /// `rho = delta_lambda`: `I(x) = (x/l) log(x/l) - x/l + 1`.
    Constant { lambda: f64 },
    /// `rho = (delta_l + delta_{2l}) / 2`.
    TwoAtomRatio2 { lambda1: f64 },
    /// `rho = Poisson(lambda)`, solved with Lambert W.
    Poisson { lambda: f64 },
    /// `rho = beta delta_1 + (1 - beta) delta_0`.
    Binomial1 { beta: f64 },
    /// `rho = Binomial(2, beta)`. Evaluated as the formula is commonly printed,
    /// which does not satisfy the stationarity condition; compare against
    /// [`super::legendre_rate`] before trusting it.
    Binomial2 { beta: f64 },
    /// `rho = N(0, 1)`, solved with Lambert W.
    Gaussian,
}

impl ClosedFormFamily {
    /// The limit measure whose transform this family evaluates.
    pub fn measure(&self) -> Result<LimitMeasure> {
        match *self {
            Self::Constant { lambda } => LimitMeasure::atoms(vec![(lambda, 1.0)]),
            Self::TwoAtomRatio2 { lambda1 } => LimitMeasure::atoms(vec![(lambda1, 0.5), (2.0 * lambda1, 0.5)]),
            Self::Poisson { lambda } => LimitMeasure::poisson(lambda),
            Self::Binomial1 { beta } => LimitMeasure::binomial(1, beta),
            Self::Binomial2 { beta } => LimitMeasure::binomial(2, beta),
            Self::Gaussian => Ok(LimitMeasure::Gaussian),
        }
    }

    /// Recognizes measures that have a closed form (binomial n = 2 excluded,
    /// its printed formula being unreliable).
    pub fn for_measure(rho: &LimitMeasure) -> Option<Self> {
        match rho {
            LimitMeasure::Atoms(atoms) => match atoms.as_slice() {
                [(v, _)] if *v > 0.0 => Some(Self::Constant { lambda: *v }),
                [(a, wa), (b, wb)] if *a > 0.0 && *b == 2.0 * a && (wa - 0.5).abs() < 1e-15 && (wb - 0.5).abs() < 1e-15 => {
                    Some(Self::TwoAtomRatio2 { lambda1: *a })
                }
                _ => None,
            },
            LimitMeasure::Poisson { lambda } => Some(Self::Poisson { lambda: *lambda }),
            LimitMeasure::Binomial { n: 1, beta } => Some(Self::Binomial1 { beta: *beta }),
            LimitMeasure::Gaussian => Some(Self::Gaussian),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant { lambda } => format!("constant({lambda})"),
            Self::TwoAtomRatio2 { lambda1 } => format!("two_atom_ratio2({lambda1})"),
            Self::Poisson { lambda } => format!("poisson({lambda})"),
            Self::Binomial1 { beta } => format!("binomial1({beta})"),
            Self::Binomial2 { beta } => format!("binomial2({beta})"),
            Self::Gaussian => "gaussian".to_string(),
        }
    }
}

/// Evaluates the closed form at `x`. Families supported on `[0, inf)` give
/// `+inf` for `x < 0`; at `x = 0` the value is the `theta -> -inf` limit.
pub fn closed_form_rate(family: ClosedFormFamily, x: f64) -> Result<RateFunctionResult> {
    use ClosedFormFamily as F;
    if !matches!(family, F::Gaussian) {
        if x < 0.0 {
            return Ok(RateFunctionResult::infinite(x));
        }
        if x == 0.0 {
            let value = match family {
                F::Constant { .. } | F::TwoAtomRatio2 { .. } => 1.0,
                F::Poisson { lambda } => -(-lambda).exp_m1(),
                F::Binomial1 { beta } => beta,
                F::Binomial2 { beta } => 1.0 - (1.0 - beta) * (1.0 - beta),
                F::Gaussian => unreachable!(),
            };
            return Ok(RateFunctionResult::boundary(x, value));
        }
    }
    let (theta, value) = match family {
        F::Constant { lambda } => {
            let r = x / lambda;
            (r.ln() / lambda, r * r.ln() - r + 1.0)
        }
        F::TwoAtomRatio2 { lambda1: l } => {
            // t = e^{theta l} solves l t^2 + (l/2) t = x
            let t = (-l + (l * l + 16.0 * l * x).sqrt()) / (4.0 * l);
            (t.ln() / l, (x / l) * t.ln() + 1.0 - 0.5 * t - 0.5 * t * t)
        }
        F::Poisson { lambda } => {
            let w = lambert_w(x * lambda.exp())?;
            let theta = (w / lambda).ln();
            (theta, x * theta + 1.0 - (w - lambda).exp())
        }
        F::Binomial1 { beta } => ((x / beta).ln(), x * (x / beta).ln() + beta - x),
        F::Binomial2 { beta } => {
            let q = 1.0 - beta;
            let arg = (-q + (q * q + x * x).sqrt()) / beta;
            (arg.ln(), x * arg.ln() + 1.0 - q * q - x * x)
        }
        F::Gaussian => {
            if x == 0.0 {
                (0.0, 0.0)
            } else {
                // I is even; theta* = sign(x) sqrt(W(x^2))
                let s = lambert_w(x * x)?.sqrt();
                let ax = x.abs();
                (s.copysign(x), s * ax + 1.0 - ax / s)
            }
        }
    };
    Ok(RateFunctionResult {
        x,
        value,
        theta_star: Some(theta),
        iterations: 0,
        status: RateStatus::Interior,
    })
}
