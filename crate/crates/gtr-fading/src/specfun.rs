//! Special functions used by the closed forms: exponentially scaled modified
//! Bessel functions, the first-order Marcum Q-function, the exponential
//! integral Γ(0, x), Laguerre polynomials, erfc and the normalized sinc.
//!
//! The Bessel surface is scaled only (`I_ν(x)·e^{-|x|}`), which keeps every
//! formula that multiplies `e^{-K}` by `I₀(·)` finite for very large K.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Below this argument the Bessel power series is used, above it the
/// Hankel asymptotic expansion (whose smallest term is ~e^{-2x}).
const BESSEL_SERIES_LIMIT: f64 = 20.0;

/// Output of an iterative special-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult {
    pub value: f64,
    pub converged: bool,
    pub terms_or_evals: usize,
}

fn check_finite(function: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(function, format!("argument {x} is not finite")))
    }
}

/// `I₀(x)·e^{-|x|}`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check_finite("bessel_i0_scaled", x)?;
    Ok(i0e(x))
}

/// `I₁(x)·e^{-|x|}`; odd in `x`.
pub fn bessel_i1_scaled(x: f64) -> Result<f64> {
    check_finite("bessel_i1_scaled", x)?;
    Ok(i1e(x))
}

pub(crate) fn i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax < BESSEL_SERIES_LIMIT {
        let q = 0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
            k += 1.0;
        }
        sum * (-ax).exp()
    } else {
        hankel_scaled(ax, 0.0)
    }
}

pub(crate) fn i1e(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < BESSEL_SERIES_LIMIT {
        let q = 0.25 * ax * ax;
        let mut term = 0.5 * ax;
        let mut sum = term;
        let mut k = 1.0;
        loop {
            term *= q / (k * (k + 1.0));
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
            k += 1.0;
        }
        sum * (-ax).exp()
    } else {
        hankel_scaled(ax, 1.0)
    };
    v.copysign(x)
}

/// Large-argument expansion `I_ν(x)e^{-x} ~ (2πx)^{-1/2} Σ (-1)^k a_k(ν) x^{-k}`,
/// summed until the terms stop shrinking.
fn hankel_scaled(x: f64, nu: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// First-order Marcum Q-function `Q₁(a, b)`.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    marcum_q1_detailed(a, b).map(|r| r.value)
}

/// `Q₁(a, b)` with the number of series terms used.
pub fn marcum_q1_detailed(a: f64, b: f64) -> Result<SpecFunResult> {
    check_marcum_args(a, b)?;
    let m = marcum_pair(a, b);
    Ok(SpecFunResult {
        value: m.q,
        converged: m.converged,
        terms_or_evals: m.terms,
    })
}

/// `1 − Q₁(a, b)` computed without cancellation when `Q₁` is close to one.
pub fn marcum_p1(a: f64, b: f64) -> Result<f64> {
    check_marcum_args(a, b)?;
    Ok(marcum_pair(a, b).p)
}

fn check_marcum_args(a: f64, b: f64) -> Result<()> {
    check_finite("marcum_q1", a)?;
    check_finite("marcum_q1", b)?;
    if a < 0.0 || b < 0.0 {
        return Err(Error::domain(
            "marcum_q1",
            format!("arguments must be non-negative, got a={a}, b={b}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct MarcumPair {
    /// `Q₁(a, b)`
    pub q: f64,
    /// `1 − Q₁(a, b)`
    pub p: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Series `Q₁ = e^{-(a−b)²/2} Σ_{k≥0} (a/b)^k Ĩ_k(ab)` for `b > a`, and the
/// complementary `1 − Q₁ = e^{-(a−b)²/2} Σ_{k≥1} (b/a)^k Ĩ_k(ab)` for `b < a`,
/// where `Ĩ_k(x) = I_k(x)e^{-x}`. Both sums have positive terms.
pub(crate) fn marcum_pair(a: f64, b: f64) -> MarcumPair {
    let exact = |q: f64, p: f64| MarcumPair {
        q,
        p,
        terms: 1,
        converged: true,
    };
    if b == 0.0 {
        return exact(1.0, 0.0);
    }
    if a == 0.0 {
        let e = -0.5 * b * b;
        return exact(e.exp(), -e.exp_m1());
    }
    if a == b {
        let t = i0e(a * a);
        return exact(0.5 * (1.0 + t), 0.5 * (1.0 - t));
    }
    let upper = b > a;
    let d = 0.5 * (a - b) * (a - b);
    if d > 745.0 {
        return if upper { exact(0.0, 1.0) } else { exact(1.0, 0.0) };
    }
    let pre = (-d).exp();
    let x = a * b;
    let rho = if upper { a / b } else { b / a };

    let (sum, terms, converged) = scaled_bessel_weighted_sum(x, rho, if upper { 0 } else { 1 });
    let tail = pre * sum;
    if upper {
        let q = tail.min(1.0);
        MarcumPair {
            q,
            p: 1.0 - q,
            terms,
            converged,
        }
    } else {
        let p = tail.min(1.0);
        MarcumPair {
            q: 1.0 - p,
            p,
            terms,
            converged,
        }
    }
}

/// `Σ_{k≥k0} ρ^k Ĩ_k(x)` for `0 < ρ < 1`, `x > 0`.
///
/// Ratios `I_k/I_{k−1}` come from the backward recurrence
/// `r_k = x / (2k + x r_{k+1})`, started deep enough that `Ĩ_M/Ĩ_0` is
/// below double precision.
fn scaled_bessel_weighted_sum(x: f64, rho: f64, k0: usize) -> (f64, usize, bool) {
    let depth = ((160.0 * x).sqrt() + 40.0).ceil() as usize;
    let mut ratios = vec![0.0; depth + 1];
    let m = depth as f64;
    let mut r = x / (m + (m * m + x * x).sqrt());
    for k in (1..=depth).rev() {
        r = x / (2.0 * k as f64 + x * r);
        ratios[k] = r;
    }

    let mut ik = i0e(x);
    let mut weight = 1.0;
    let mut sum = if k0 == 0 { ik } else { 0.0 };
    for (k, ratio) in ratios.iter().enumerate().skip(1) {
        ik *= ratio;
        weight *= rho;
        let term = weight * ik;
        sum += term;
        if term <= 1e-17 * sum || term == 0.0 {
            return (sum, k + 1, true);
        }
    }
    (sum, depth + 1, false)
}

/// `Γ(0, x) = E₁(x) = ∫₁^∞ e^{-xt}/t dt` for `x > 0`.
pub fn gamma_upper_zero(x: f64) -> Result<f64> {
    check_finite("gamma_upper_zero", x)?;
    if x <= 0.0 {
        return Err(Error::domain(
            "gamma_upper_zero",
            format!("argument must be positive, got {x}"),
        ));
    }
    Ok(e1(x))
}

pub(crate) fn e1(x: f64) -> f64 {
    if x <= 1.0 {
        e1_plus_log(x) - x.ln()
    } else {
        e1_continued_fraction(x)
    }
}

/// `Γ(0, x) + log x`, finite as `x → 0⁺` (limit `−γₑ`).
pub(crate) fn e1_plus_log(x: f64) -> f64 {
    if x > 1.0 {
        return e1_continued_fraction(x) + x.ln();
    }
    // -γ + Σ_{k≥1} (-1)^{k+1} x^k / (k·k!)
    let mut sum = 0.0;
    let mut fact_term = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        fact_term *= -x / kf;
        let term = -fact_term / kf;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum - EULER_GAMMA
}

/// Modified Lentz evaluation of the E₁ continued fraction, valid for x ≥ 1.
fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// Laguerre polynomial `L_k(z) = ₁F₁(−k; 1; z)`.
pub fn laguerre(k: i64, z: f64) -> Result<f64> {
    check_finite("laguerre", z)?;
    if k < 0 {
        return Err(Error::domain(
            "laguerre",
            format!("degree must be non-negative, got {k}"),
        ));
    }
    Ok(laguerre_unchecked(k as u32, z))
}

pub(crate) fn laguerre_unchecked(k: u32, z: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - z;
    for n in 1..k {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - z) * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Complementary error function.
pub fn erfc(x: f64) -> Result<f64> {
    check_finite("erfc", x)?;
    Ok(libm::erfc(x))
}

/// Gaussian tail `Q(x) = ½ erfc(x/√2)`.
pub(crate) fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `sin(πp)/(πp)`, equal to 1 at `p = 0`.
pub fn sinc_pi(p: f64) -> f64 {
    let t = PI * p;
    if t.abs() < 1e-6 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// `I₁(η)/I₀(η)`, the mean resultant length of a von Mises law.
pub(crate) fn bessel_ratio_i1_i0(eta: f64) -> f64 {
    if eta == 0.0 {
        0.0
    } else {
        i1e(eta) / i0e(eta)
    }
}
