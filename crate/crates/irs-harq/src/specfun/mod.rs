//! Scalar special functions backing the outage closed forms: gamma,
//! regularized incomplete gamma, modified Bessel I of real order, and the
//! generalized Marcum Q-function.
//!
//! Everything here is a pure function of its arguments; all routines are
//! safe to call concurrently.

mod bessel;
mod gamma;
mod marcum;

pub use bessel::{bessel_i, bessel_i_scaled, ln_bessel_i};
pub use gamma::{gamma_fn, ln_gamma, reg_lower_gamma, reg_upper_gamma};
pub use marcum::{marcum_q, marcum_q_asymptotic_small_q, marcum_q_complement, MarcumArgs};

/// Complementary error function (thin wrapper over libm's erfc).
///
/// Used by the half-order Marcum closed form
/// Q_{1/2}(a, b) = ½·[erfc((b−a)/√2) + erfc((b+a)/√2)].
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
