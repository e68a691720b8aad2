//! Outage analysis for hybrid-ARQ chase combining over an IRS-assisted
//! double-Rayleigh link.
//!
//! The crate has two halves that check each other:
//!
//! * closed forms ([`analysis`]) built on high-accuracy special
//!   functions ([`specfun`]) — per-round SNR law, K-round outage
//!   probability and its large-N asymptote;
//! * an independent Monte Carlo link simulator ([`mc`]) over the sampled
//!   channel ([`channel`]), reproducible down to the per-trial random
//!   stream.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod mc;
pub mod specfun;

pub use channel::{GammaBarParams, SamplingMode, SystemConfig};
pub use error::{Error, Result};
pub use mc::{McEstimate, McRunSpec};
