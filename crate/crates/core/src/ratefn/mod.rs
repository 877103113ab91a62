//! Rate functions: the numeric Legendre-Fenchel transform of the cumulant
//! functional, the closed forms available for special limit measures, and the
//! Gaussian moderate-deviation rate.

mod closed_form;
mod lambert;
mod legendre;

use serde::Serialize;

pub use closed_form::{closed_form_rate, ClosedFormFamily};
pub use lambert::{lambert_w, BRANCH_POINT};
pub use legendre::{legendre_rate, NEWTON_MAX_ITER, NEWTON_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateStatus {
    /// The supremum is attained at a finite `theta_star`.
    Interior,
    /// Finite value approached as `theta -> +-inf`.
    Boundary,
    /// `I(x) = +inf`.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFunctionResult {
    pub x: f64,
    pub value: f64,
    pub theta_star: Option<f64>,
    pub iterations: u32,
    pub status: RateStatus,
}

impl RateFunctionResult {
    pub(crate) fn infinite(x: f64) -> Self {
        RateFunctionResult {
            x,
            value: f64::INFINITY,
            theta_star: None,
            iterations: 0,
            status: RateStatus::Infinite,
        }
    }

    pub(crate) fn boundary(x: f64, value: f64) -> Self {
        RateFunctionResult {
            x,
            value,
            theta_star: None,
            iterations: 0,
            status: RateStatus::Boundary,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.status == RateStatus::Infinite
    }
}

/// Moderate-deviation rate `J(x) = x^2 / 2`.
pub fn mdp_rate(x: f64) -> f64 {
    0.5 * x * x
}
