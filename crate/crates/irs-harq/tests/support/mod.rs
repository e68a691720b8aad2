//! Shared oracles for the integration suites. Everything here is
//! deliberately independent of the library's own special-function
//! machinery: gamma factors come from libm, Bessel kernels from a local
//! series, integrals from adaptive Simpson quadrature.

#![allow(dead_code)]

/// Adaptive Simpson quadrature with Richardson acceptance. `tol` is an
/// absolute tolerance for the whole interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }

    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 60)
}

/// ln I_ν(x) by the ascending series with periodic rescaling; gamma
/// factors from libm's lgamma. Panics if 2·10^5 terms do not converge.
pub fn oracle_ln_bessel_i(nu: f64, x: f64) -> f64 {
    assert!(x > 0.0 && nu >= -0.5);
    let q = x * x / 4.0;
    let mut term = (-libm::lgamma(nu + 1.0)).exp();
    let mut sum = term;
    let mut log_scale = 0.0;
    for k in 1..200_000 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if sum > 1e270 {
            sum /= 1e270;
            term /= 1e270;
            log_scale += 270.0 * std::f64::consts::LN_10;
        }
        if term < sum * 1e-18 && q < kf * (nu + kf) {
            return nu * (x / 2.0).ln() + sum.ln() + log_scale;
        }
    }
    panic!("oracle Bessel series did not converge for nu={nu}, x={x}");
}

/// Independent quadrature oracle for the Marcum Q-function:
/// Q_m(p, q) = ∫_q^∞ x·(x/p)^{m−1}·e^{−(x²+p²)/2}·I_{m−1}(px) dx,
/// with the integrand assembled in log space. Requires p > 0.
pub fn oracle_marcum_q_quadrature(m: f64, p: f64, q: f64, tol: f64) -> f64 {
    assert!(p > 0.0, "quadrature oracle needs p > 0");
    if q == 0.0 {
        return 1.0;
    }
    let integrand = move |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln_f = x.ln() + (m - 1.0) * (x.ln() - p.ln()) - 0.5 * (x * x + p * p)
            + oracle_ln_bessel_i(m - 1.0, p * x);
        ln_f.exp()
    };
    // The kernel is a noncentral chi density in the radial variable: a
    // peak of width O(1) near x ≈ √(p² + 2m). A blind adaptive pass over
    // the whole range can step straight over the peak, so the interval
    // is pre-split at breakpoints bracketing it; 45 units of slack past
    // both the threshold and the peak bounds the truncated tail far
    // below the tolerance.
    let peak = (p * p + 2.0 * m).sqrt();
    let upper = peak.max(q) + 45.0;
    if upper <= q {
        return 0.0;
    }
    let mut cuts = vec![q];
    for candidate in [peak - 20.0, peak - 5.0, peak, peak + 5.0, peak + 20.0] {
        if candidate > q && candidate < upper {
            cuts.push(candidate);
        }
    }
    cuts.push(upper);
    let panel_tol = tol / (cuts.len() - 1) as f64;
    cuts.windows(2)
        .map(|w| adaptive_simpson(&integrand, w[0], w[1], panel_tol))
        .sum()
}

/// Half-order closed form Q_{1/2}(a, b) = ½[erfc((b−a)/√2) + erfc((b+a)/√2)],
/// built on libm's erfc.
pub fn half_order_marcum_q(a: f64, b: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    0.5 * (libm::erfc((b - a) / s) + libm::erfc((b + a) / s))
}

/// Oracle pair for the regularized incomplete gamma: P-series route and
/// Q-continued-fraction route, each with its own libm prefactor. Returns
/// (Q_from_series, Q_from_cf).
pub fn oracle_reg_upper_gamma_both_routes(s: f64, x: f64) -> (f64, f64) {
    assert!(s > 0.0 && x > 0.0);
    let log_prefactor = s * x.ln() - x - libm::lgamma(s);
    let prefactor = log_prefactor.exp();

    // Route 1: ascending series for P, Q = 1 − P. Converges for any x.
    let q_series = {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut denom = s;
        for _ in 0..1_000_000 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term < sum * 1e-18 {
                break;
            }
        }
        1.0 - prefactor * sum
    };

    // Route 2: Lentz continued fraction for Q directly.
    let q_cf = {
        const TINY: f64 = 1e-300;
        let b0 = x + 1.0 - s;
        let mut f = if b0.abs() < TINY { TINY } else { b0 };
        let mut c = f;
        let mut d = 0.0;
        for n in 1..1_000_000 {
            let nf = n as f64;
            let an = nf * (s - nf);
            let bn = x + 2.0 * nf + 1.0 - s;
            d = bn + an * d;
            if d.abs() < TINY {
                d = TINY;
            }
            d = 1.0 / d;
            c = bn + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        prefactor / f
    };

    (q_series, q_cf)
}

/// SplitMix64: a tiny deterministic generator for randomized test grids,
/// unrelated to the library's sampling streams.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Simple ordinary least squares for y ≈ c0 + c1·u + c2·v, used by the
/// asymptotic slope checks. Returns (c0, c1, c2).
pub fn fit_two_regressors(us: &[f64], vs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = ys.len() as f64;
    assert!(us.len() == ys.len() && vs.len() == ys.len() && ys.len() >= 3);
    // Normal equations for the 3x3 system.
    let (mut su, mut sv, mut sy) = (0.0, 0.0, 0.0);
    let (mut suu, mut svv, mut suv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..ys.len() {
        let (u, v, y) = (us[i], vs[i], ys[i]);
        su += u;
        sv += v;
        sy += y;
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suy += u * y;
        svy += v * y;
    }
    // Solve [n su sv; su suu suv; sv suv svv]·[c0 c1 c2]' = [sy suy svy]'
    let a = [[n, su, sv], [su, suu, suv], [sv, suv, svv]];
    let b = [sy, suy, svy];
    let det3 = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&a);
    let mut a0 = a;
    a0[0][0] = b[0];
    a0[1][0] = b[1];
    a0[2][0] = b[2];
    let mut a1 = a;
    a1[0][1] = b[0];
    a1[1][1] = b[1];
    a1[2][1] = b[2];
    let mut a2 = a;
    a2[0][2] = b[0];
    a2[1][2] = b[1];
    a2[2][2] = b[2];
    (det3(&a0) / d, det3(&a1) / d, det3(&a2) / d)
}
