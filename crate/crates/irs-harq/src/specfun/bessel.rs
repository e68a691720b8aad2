//! Modified Bessel function of the first kind, real order ν ≥ −1/2.
//!
//! The ascending series Σ_k (x²/4)^k / (k!·Γ(ν+k+1)) has strictly positive
//! terms, so it is free of cancellation for every argument; it only needs
//! O(x) terms and periodic rescaling to dodge overflow of the partial sums.
//! Orders ±1/2 take their hyperbolic closed forms. The exponentially
//! scaled variant e^{−x}·I_ν(x) stays finite where I_ν itself overflows.

use crate::error::{Error, Result};
use crate::specfun::gamma::gamma_fn;

const MAX_TERMS: usize = 200_000;
/// Rescaling threshold for the running series sum.
const RESCALE: f64 = 1e270;
const LN_RESCALE: f64 = 621.6979751083923; // ln(1e270) = 270·ln(10)

fn check_domain(nu: f64, x: f64) -> Result<()> {
    if !nu.is_finite() || nu < -0.5 {
        return Err(Error::Domain("bessel_i requires finite order nu >= -1/2"));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain("bessel_i requires finite x >= 0"));
    }
    Ok(())
}

/// I_ν(x). Overflows to +∞ for x beyond roughly 709 + ν·ln x.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_i(nu, x)?.exp())
}

/// Exponentially scaled variant e^{−x}·I_ν(x).
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64> {
    check_domain(nu, x)?;
    if x == 0.0 {
        return Ok(limit_at_zero(nu));
    }
    if nu == -0.5 {
        // √(2/(πx))·cosh(x) scaled: (1 + e^{−2x})/2 · √(2/(πx))
        return Ok((2.0 / (std::f64::consts::PI * x)).sqrt() * 0.5 * (1.0 + (-2.0 * x).exp()));
    }
    if nu == 0.5 {
        return Ok((2.0 / (std::f64::consts::PI * x)).sqrt() * 0.5 * (1.0 - (-2.0 * x).exp()));
    }
    Ok((series_ln(nu, x)? - x).exp())
}

/// ln I_ν(x); −∞ at x = 0 for ν > 0, +∞ for ν < 0.
pub fn ln_bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_domain(nu, x)?;
    if x == 0.0 {
        return Ok(limit_at_zero(nu).ln());
    }
    if nu == -0.5 {
        // ln[√(2/(πx))·cosh(x)] = x + ln(1+e^{−2x}) − ln 2 + ½ln(2/(πx))
        return Ok(x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
            + 0.5 * (2.0 / (std::f64::consts::PI * x)).ln());
    }
    if nu == 0.5 {
        return Ok(x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
            + 0.5 * (2.0 / (std::f64::consts::PI * x)).ln());
    }
    series_ln(nu, x)
}

fn limit_at_zero(nu: f64) -> f64 {
    if nu == 0.0 {
        1.0
    } else if nu > 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// ln of the ascending series, rescaled as the partial sum grows.
fn series_ln(nu: f64, x: f64) -> Result<f64> {
    let q = x * x / 4.0;
    // Leading coefficient 1/Γ(ν+1); ν ≥ −1/2 keeps the argument positive.
    let mut term = 1.0 / gamma_fn(nu + 1.0)?;
    let mut sum = term;
    let mut log_scale = 0.0;

    for k in 1..=MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            log_scale += LN_RESCALE;
        }
        // Past the peak the term ratio is < 1 and falling, so the
        // remainder is below the last term once it is this small.
        if term < sum * 1e-17 && q < kf * (nu + kf) {
            return Ok(nu * (x / 2.0).ln() + sum.ln() + log_scale);
        }
    }
    Err(Error::Convergence {
        what: "modified Bessel series",
        iterations: MAX_TERMS,
    })
}
