//! Principal real branch of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// `-1/e` rounded to nearest.
pub const BRANCH_POINT: f64 = -0.36787944117144233;
/// `1/e - 0.36787944117144233`, the rounding error of `-BRANCH_POINT`.
const INV_E_LO: f64 = -1.2428753672788363e-17;

const MAX_ITER: usize = 64;

/// `W(z)` with `W(z) e^{W(z)} = z` and `W >= -1`, for `z >= -1/e`.
pub fn lambert_w(z: f64) -> Result<f64> {
    if z.is_nan() || z < BRANCH_POINT {
        return Err(Error::domain(format!("lambert_w needs z >= -1/e, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    // distance to the branch point, carried in two parts
    let dz = (z - BRANCH_POINT) + INV_E_LO;
    if dz <= 0.0 {
        return Ok(-1.0);
    }

    let mut w = if z < -0.25 {
        // series in p = sqrt(2 (e z + 1)) around the branch point
        let p = (2.0 * E * dz).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))))
    } else {
        // Winitzki's uniform approximation
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };

    for _ in 0..MAX_ITER {
        // f(w) e^{-w} = w - z e^{-w}; Halley step written to avoid e^{w}
        let r = w - z * (-w).exp();
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let step = r / (wp1 - (w + 2.0) * r / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 2.0 * f64::EPSILON * next.abs().max(1e-300);
        w = next;
        if done {
            break;
        }
    }
    Ok(w.max(-1.0))
}
