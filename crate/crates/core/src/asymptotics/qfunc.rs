use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{LossyError, Result};

/// Gaussian tail `Q(z) = Pr{N(0,1) > z}`.
pub fn q_function(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

fn density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Inverse of [`q_function`] on `(0, 1)`.
///
/// Safeguarded Newton iteration inside a shrinking bracket, run until the step is
/// below `1e-14`; the bracket alone guarantees `1e-10` accuracy in `z`.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LossyError::Domain(format!("Q^-1 needs p in (0, 1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return q_inverse(1.0 - p).map(|z| -z);
    }
    // Upper tail: Q(0) = 0.5 > p, Q(40) underflows far below any f64 p.
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    let mut z = (-2.0 * p.ln()).sqrt().min(hi);
    for _ in 0..200 {
        let f = q_function(z) - p;
        if f > 0.0 {
            lo = z;
        } else {
            hi = z;
        }
        let mut next = z + f / density(z);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - z).abs();
        z = next;
        if step < 1e-14 || hi - lo < 1e-14 {
            break;
        }
    }
    Ok(z)
}
