//! Monte Carlo link-level simulator for HARQ chase combining: samples
//! per-round SNRs over the fading channel, accumulates them across
//! rounds, applies the outage rule and reports relative-frequency
//! estimates with confidence intervals.
//!
//! Trials are embarrassingly parallel: every trial owns the ChaCha8
//! stream named by its trial index (see [`crate::channel::trial_rng`]),
//! so the estimate is a pure function of `(spec)` regardless of shard
//! count, worker count or execution order.

use rayon::prelude::*;

use crate::analysis::outage_threshold;
use crate::channel::{
    avg_snr, sample_round_snr, seed_prototype, GammaBarParams, SamplingMode, SystemConfig,
};
use crate::error::{Error, Result};

/// One Monte Carlo campaign: configuration, channel mode, trial budget
/// and the reproducibility contract (seed, shard count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRunSpec {
    pub cfg: SystemConfig,
    pub mode: SamplingMode,
    pub trials: u64,
    pub seed: u64,
    pub shards: u32,
}

impl McRunSpec {
    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.trials < 1_000 {
            return Err(Error::Domain("trials must be >= 1000"));
        }
        if self.shards < 1 {
            return Err(Error::Domain("shards must be >= 1"));
        }
        Ok(())
    }
}

/// Outage estimate with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Relative frequency of outage sessions.
    pub p_hat: f64,
    pub trials: u64,
    /// √(p̂(1−p̂)/trials).
    pub std_err: f64,
    /// 95% normal-approximation interval; rule-of-three at zero counts.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean number of rounds consumed per session (diagnostic; ≤ K).
    pub rounds_used_mean: f64,
    pub seed: u64,
}

/// Simulates one HARQ-CC session: fresh fades each round, SNR
/// accumulation, early stop once the accumulated SNR crosses the
/// threshold Θ = 2^R − 1 (equivalently, mutual information reaches R).
/// Early stopping only skips rounds that can no longer change the
/// outcome; the outage statistic is identical to the full-K evaluation.
pub fn run_session<R: rand::Rng + ?Sized>(
    cfg: &SystemConfig,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<(bool, u32)> {
    let params = avg_snr(cfg)?;
    let theta = outage_threshold(cfg.rate);
    Ok(session_common(&params, cfg.n_reflectors, cfg.max_rounds, theta, mode, rng))
}

/// Session with an explicit per-round γ̄ schedule (one entry per round).
/// The closed forms assume a common γ̄; this exists for experiments with
/// round-dependent link budgets.
pub fn run_session_per_round<R: rand::Rng + ?Sized>(
    per_round: &[GammaBarParams],
    n_reflectors: u32,
    threshold: f64,
    mode: SamplingMode,
    rng: &mut R,
) -> (bool, u32) {
    let mut accumulated = 0.0;
    for (k, params) in per_round.iter().enumerate() {
        accumulated += sample_round_snr(params, n_reflectors, mode, rng);
        if accumulated >= threshold {
            return (false, (k + 1) as u32);
        }
    }
    (true, per_round.len() as u32)
}

fn session_common<R: rand::Rng + ?Sized>(
    params: &GammaBarParams,
    n_reflectors: u32,
    max_rounds: u32,
    threshold: f64,
    mode: SamplingMode,
    rng: &mut R,
) -> (bool, u32) {
    let mut accumulated = 0.0;
    for k in 1..=max_rounds {
        accumulated += sample_round_snr(params, n_reflectors, mode, rng);
        if accumulated >= threshold {
            return (false, k);
        }
    }
    (true, max_rounds)
}

/// Runs the full campaign and reports the outage estimate.
///
/// Deterministic for a fixed spec: shard boundaries only partition the
/// trial range, and every trial derives its stream from its own index,
/// so `shards = 1` and `shards = S` produce bit-identical estimates.
pub fn run_outage_mc(spec: &McRunSpec) -> Result<McEstimate> {
    spec.validate()?;
    let params = avg_snr(&spec.cfg)?;
    let theta = outage_threshold(spec.cfg.rate);

    let shards = u64::from(spec.shards);
    let base = spec.trials / shards;
    // Last shard takes the remainder.
    let shard_range = |shard: u64| -> (u64, u64) {
        let start = shard * base;
        let end = if shard == shards - 1 { spec.trials } else { start + base };
        (start, end)
    };

    let prototype = seed_prototype(spec.seed);
    let (outages, rounds_sum) = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let (start, end) = shard_range(shard);
            let mut outages = 0u64;
            let mut rounds_sum = 0u64;
            for trial in start..end {
                // A fresh clone per trial: set_stream alone would keep the
                // word position of the previous trial, which would make the
                // draws depend on the shard layout.
                let mut rng = prototype.clone();
                rng.set_stream(trial);
                let (outage, rounds) = session_common(
                    &params,
                    spec.cfg.n_reflectors,
                    spec.cfg.max_rounds,
                    theta,
                    spec.mode,
                    &mut rng,
                );
                outages += u64::from(outage);
                rounds_sum += u64::from(rounds);
            }
            (outages, rounds_sum)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    Ok(estimate_from_counts(outages, rounds_sum, spec.trials, spec.seed))
}

fn estimate_from_counts(outages: u64, rounds_sum: u64, trials: u64, seed: u64) -> McEstimate {
    let n = trials as f64;
    let p_hat = outages as f64 / n;
    let std_err = (p_hat * (1.0 - p_hat) / n).sqrt();
    let (ci_low, ci_high) = if outages == 0 {
        (0.0, 3.0 / n)
    } else if outages == trials {
        (1.0 - 3.0 / n, 1.0)
    } else {
        let half = 1.959963984540054 * std_err;
        ((p_hat - half).max(0.0), (p_hat + half).min(1.0))
    };
    McEstimate {
        p_hat,
        trials,
        std_err,
        ci_low,
        ci_high,
        rounds_used_mean: rounds_sum as f64 / n,
        seed,
    }
}
