//! Closed-form outage engine: per-round SNR density and distribution,
//! K-round chase-combining outage probability, and the large-N
//! asymptote with its constants.
//!
//! All probabilities are computed in linear SNR units; dB conversion
//! belongs to the interface layer ([`db_to_linear`], [`linear_to_db`]).

use crate::channel::GammaBarParams;
use crate::error::{Error, Result};
use crate::specfun::{gamma_fn, ln_bessel_i, marcum_q_complement, MarcumArgs};

/// 16 − π²
const SIXTEEN_MINUS_PI_SQ: f64 = 16.0 - std::f64::consts::PI * std::f64::consts::PI;

/// Parameters of one outage evaluation: per-round shape parameters, the
/// element count they were derived from, the round budget and the rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub params: GammaBarParams,
    pub n_reflectors: u32,
    pub rounds: u32,
    pub rate: f64,
}

impl OutageQuery {
    pub fn new(params: GammaBarParams, n_reflectors: u32, rounds: u32, rate: f64) -> Result<Self> {
        if n_reflectors < 1 {
            return Err(Error::Domain("n_reflectors must be >= 1"));
        }
        if rounds < 1 {
            return Err(Error::Domain("rounds must be >= 1"));
        }
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::Domain("rate must be finite and > 0"));
        }
        Ok(Self { params, n_reflectors, rounds, rate })
    }

    /// Convenience constructor from a full system configuration.
    pub fn from_config(cfg: &crate::channel::SystemConfig) -> Result<Self> {
        let params = crate::channel::avg_snr(cfg)?;
        Self::new(params, cfg.n_reflectors, cfg.max_rounds, cfg.rate)
    }
}

/// Outage SNR threshold Θ = 2^R − 1.
pub fn outage_threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

/// Distribution function of the per-round SNR,
/// F_γ(x) = 1 − Q_{1/2}(√λ/σ, √(x/γ̄)/σ).
pub fn snr_cdf(x: f64, params: &GammaBarParams) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain("snr_cdf requires finite x >= 0"));
    }
    let sigma = params.sigma2.sqrt();
    let args = MarcumArgs::new(
        0.5,
        params.lambda.sqrt() / sigma,
        (x / params.gamma_bar).sqrt() / sigma,
    )?;
    marcum_q_complement(&args)
}

/// Density of the per-round SNR (x > 0):
/// (2σ²γ̄)⁻¹ · (x/(γ̄λ))^{−1/4} · exp(−(x + λγ̄)/(2γ̄σ²)) · I_{−1/2}(√(xλ/(γ̄σ⁴))).
///
/// Assembled in log space; the Bessel kernel grows like e^z and the
/// exponential prefactor cancels it only after the product.
pub fn snr_pdf(x: f64, params: &GammaBarParams) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain("snr_pdf requires finite x > 0"));
    }
    let gb = params.gamma_bar;
    let lambda = params.lambda;
    let sigma2 = params.sigma2;
    let z = (x * lambda / (gb * sigma2 * sigma2)).sqrt();
    let ln_pdf = -(2.0 * sigma2 * gb).ln() - 0.25 * (x / (gb * lambda)).ln()
        - (x + lambda * gb) / (2.0 * gb * sigma2)
        + ln_bessel_i(-0.5, z)?;
    Ok(ln_pdf.exp())
}

/// K-round chase-combining outage probability,
/// P_out = 1 − Q_{K/2}(√(NK)·π/√(16−π²), √(16Θ/(N·(16−π²)·γ̄))).
///
/// Evaluated through the complement series, so the deep-tail values the
/// asymptotic analysis probes keep full relative precision.
pub fn outage_probability(query: &OutageQuery) -> Result<f64> {
    let n = f64::from(query.n_reflectors);
    let k = f64::from(query.rounds);
    let theta = outage_threshold(query.rate);
    let args = MarcumArgs::new(
        0.5 * k,
        (n * k).sqrt() * std::f64::consts::PI / SIXTEEN_MINUS_PI_SQ.sqrt(),
        (16.0 * theta / (n * SIXTEEN_MINUS_PI_SQ * query.params.gamma_bar)).sqrt(),
    )?;
    marcum_q_complement(&args)
}

/// Constants of the large-N outage asymptote
/// P_out ≃ exp(−C1·N)/N^{K/2} · C2/γ̄^{K/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstants {
    /// C1 = K·π²/(2·(16 − π²)); multiplies N in the exponent.
    pub c1: f64,
    /// C2 = (16Θ/(16 − π²))^{K/2} / (2^{K/2−1}·Γ(K/2)·K).
    pub c2: f64,
}

impl AsymptoticConstants {
    pub fn new(rounds: u32, threshold: f64) -> Result<Self> {
        if rounds < 1 {
            return Err(Error::Domain("rounds must be >= 1"));
        }
        if !threshold.is_finite() || threshold <= 0.0 {
            return Err(Error::Domain("threshold must be finite and > 0"));
        }
        let k = f64::from(rounds);
        let c1 = k * std::f64::consts::PI * std::f64::consts::PI / (2.0 * SIXTEEN_MINUS_PI_SQ);
        let c2 = (16.0 * threshold / SIXTEEN_MINUS_PI_SQ).powf(0.5 * k)
            / ((0.5 * k - 1.0).exp2() * gamma_fn(0.5 * k)? * k);
        if !(c2.is_finite() && c2 > 0.0) {
            // Γ(K/2) overflows around K ≈ 340 and the prefactor powers
            // follow; the constants stop being representable.
            return Err(Error::Domain(
                "asymptotic constants not representable for this round/rate combination",
            ));
        }
        Ok(Self { c1, c2 })
    }
}

/// Large-N outage asymptote, exp(−C1·N)·C2/(N·γ̄)^{K/2}, assembled in
/// log space so deep-tail values underflow gracefully instead of
/// producing 0/0 artifacts.
pub fn outage_asymptotic(query: &OutageQuery) -> Result<f64> {
    let n = f64::from(query.n_reflectors);
    let k = f64::from(query.rounds);
    let consts = AsymptoticConstants::new(query.rounds, outage_threshold(query.rate))?;
    let ln_p = -consts.c1 * n + consts.c2.ln()
        - 0.5 * k * (n.ln() + query.params.gamma_bar.ln());
    Ok(ln_p.exp())
}

/// Linear SNR for a dB value.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dB value for a linear SNR.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Bisection tolerance of the SNR inversion, in dB.
const GAIN_TOL_DB: f64 = 1e-4;

/// Transmit SNR (dB) at which the outage probability equals
/// `target_pout`, found by bisection; the γ̄ inside `query` is ignored
/// and replaced by the solver iterate.
pub fn snr_gain_db(query: &OutageQuery, target_pout: f64) -> Result<f64> {
    if !target_pout.is_finite() || target_pout <= 0.0 || target_pout >= 1.0 {
        return Err(Error::Domain("target_pout must lie strictly inside (0, 1)"));
    }

    let pout_at = |db: f64| -> Result<f64> {
        let params = GammaBarParams::from_gamma_bar(query.n_reflectors, db_to_linear(db))?;
        let q = OutageQuery { params, ..*query };
        outage_probability(&q)
    };

    // P_out is continuous and strictly decreasing in γ̄, so widen the
    // bracket until the target is enclosed.
    let mut lo = -60.0;
    let mut hi = 60.0;
    while pout_at(lo)? < target_pout {
        lo -= 60.0;
        if lo < -600.0 {
            return Err(Error::Bracketing("target outage not reachable from below"));
        }
    }
    while pout_at(hi)? > target_pout {
        hi += 60.0;
        if hi > 600.0 {
            return Err(Error::Bracketing("target outage not reachable from above"));
        }
    }

    while hi - lo > GAIN_TOL_DB {
        let mid = 0.5 * (lo + hi);
        if pout_at(mid)? > target_pout {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
