//! Ergodic capacity with optimal rate adaptation, and its asymptotes.

use std::cell::RefCell;
use std::f64::consts::{LN_2, LOG2_E, PI};

use crate::error::{Error, Result};
use crate::models::stats::check_mgf_domain;
use crate::models::{k_bar, mgf, phase_average, ChannelModel, Method, PhaseDistribution, Statistic};
use crate::quad::{integrate_finite, integrate_semi_infinite, QuadSpec};
use crate::specfun::{e1, e1_plus_log, i0e, i1e};

use super::LinkConfig;

/// Capacity slope per dB of average SNR, `0.1·ln10·log₂e`.
pub const SLOPE_NU: f64 = 0.1 * std::f64::consts::LN_10 * LOG2_E;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// Rician channel with the same `K`; `Δ` is ignored.
    RiceExact,
    GtrExact,
    /// Leading Hankel term for `𝒥`; accurate when `KΔ ≫ 1`.
    GtrLargeKDelta,
    /// `Δ = 1` with the Hankel form of `𝒥`.
    GtrDeltaOne,
}

impl AsymptoticRegime {
    pub fn name(&self) -> &'static str {
        match self {
            AsymptoticRegime::RiceExact => "rice-exact",
            AsymptoticRegime::GtrExact => "gtr-exact",
            AsymptoticRegime::GtrLargeKDelta => "gtr-large-kdelta",
            AsymptoticRegime::GtrDeltaOne => "gtr-delta-one",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "rice-exact" | "rice" => Ok(AsymptoticRegime::RiceExact),
            "gtr-exact" | "gtr" => Ok(AsymptoticRegime::GtrExact),
            "gtr-large-kdelta" | "hankel" => Ok(AsymptoticRegime::GtrLargeKDelta),
            "gtr-delta-one" | "delta-one" => Ok(AsymptoticRegime::GtrDeltaOne),
            other => Err(Error::invalid(format!("unknown asymptotic regime '{other}'"))),
        }
    }
}

/// High-SNR capacity line `C ≈ ν·γ̄(dB) + μ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCapacity {
    pub slope_nu: f64,
    pub intercept_mu: f64,
    pub regime: AsymptoticRegime,
}

impl AsymptoticCapacity {
    pub fn at_db(&self, gamma_bar_db: f64) -> f64 {
        self.slope_nu * gamma_bar_db + self.intercept_mu
    }

    pub fn at(&self, gamma_bar: f64) -> f64 {
        self.at_db(10.0 * gamma_bar.log10())
    }
}

/// Derivative of the Rician MGF at equivalent parameter `kbar`.
fn rician_mgf_derivative(s: f64, kbar: f64, model: &ChannelModel, denom: f64) -> f64 {
    let k = model.k();
    let g = model.gamma_bar();
    (1.0 + k) * g / (denom * denom)
        * (kbar * s * g / denom).exp()
        * (1.0 + kbar * (1.0 + k) / denom)
}

/// First derivative of the SNR MGF with respect to `s`.
pub fn mgf_derivative(s: f64, model: &ChannelModel) -> Result<Statistic> {
    let denom = check_mgf_domain(s, model)?;
    let k = model.k();
    let g = model.gamma_bar();
    if model.phase() == PhaseDistribution::Uniform {
        let x = k * s * g * model.delta() / denom;
        let front = (1.0 + k) * g / (denom * denom) * (k * s * g / denom + x.abs()).exp();
        let b = 1.0 + k * (1.0 + k) / denom;
        let c = k * model.delta() * (1.0 + k) / denom;
        return Ok(Statistic::closed_form(front * (i0e(x) * b + c * i1e(x))));
    }
    phase_average(model, |a| rician_mgf_derivative(s, k_bar(model, a), model, denom))
}

fn capacity_spec() -> QuadSpec {
    QuadSpec {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_evals: 400_000,
    }
}

/// MRC product rule `M′ = Σₗ M′ₗ Π_{k≠l} Mₖ`.
fn combined_mgf_derivative(s: f64, link: &LinkConfig) -> Result<f64> {
    let n = link.len();
    let mut m = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for b in link.branches() {
        m.push(mgf(s, b)?.value);
        d.push(mgf_derivative(s, b)?.value);
    }
    let mut total = 0.0;
    for l in 0..n {
        let mut term = d[l];
        for (k, mk) in m.iter().enumerate() {
            if k != l {
                term *= mk;
            }
        }
        total += term;
    }
    Ok(total)
}

/// Ergodic capacity in bps/Hz, `log₂e·∫₀^∞ E₁(s)·M′(−s) ds`.
pub fn capacity_ora(link: &LinkConfig) -> Result<Statistic> {
    let failure = RefCell::new(None);
    let deriv = |s: f64| match combined_mgf_derivative(-s, link) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    // s = t² absorbs the logarithmic singularity of E₁ at the origin
    let head = integrate_finite(
        |t: f64| {
            let s = t * t;
            2.0 * t * e1(s) * deriv(s)
        },
        0.0,
        1.0,
        capacity_spec(),
    );
    let tail = integrate_semi_infinite(|s| e1(s) * deriv(s), 1.0, capacity_spec());
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let head = head.into_result("capacity integral")?;
    let tail = tail.into_result("capacity integral")?;
    Ok(Statistic {
        value: LOG2_E * (head.value + tail.value),
        method: Method::Quadrature,
        error_estimate: LOG2_E * (head.error_estimate + tail.error_estimate),
    })
}

/// Low-SNR capacity `γ̄·log₂e` with `γ̄ = Σγ̄ᵢ`.
pub fn capacity_low_snr(link: &LinkConfig) -> f64 {
    link.gamma_bar() * LOG2_E
}

fn check_k_delta(function: &'static str, k: f64, delta: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain(function, format!("K must be finite and > 0, got {k}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::domain(function, format!("delta must lie in [0, 1], got {delta}")));
    }
    Ok(())
}

/// `𝒥(K,Δ) = ∫₁^∞ e^{−tK} I₀(tKΔ)/t dt`.
pub fn j_integral(k: f64, delta: f64) -> Result<Statistic> {
    check_k_delta("j_integral", k, delta)?;
    let a = k * (1.0 - delta);
    let b = k * delta;
    let spec = QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 400_000,
    };
    let r = integrate_semi_infinite(|t| (-t * a).exp() * i0e(t * b) / t, 1.0, spec)
        .into_result("j_integral")?;
    Ok(Statistic::from_quad(r))
}

/// `𝒥` with `I₀` replaced by its leading Hankel term:
/// `√(2/π)·[e^{−c}/√(KΔ) − √π·√(1/Δ − 1)·erfc(√c)]`, `c = K(1−Δ)`.
pub fn j_integral_hankel(k: f64, delta: f64) -> Result<f64> {
    check_k_delta("j_integral_hankel", k, delta)?;
    if delta == 0.0 {
        return Err(Error::domain("j_integral_hankel", "delta must be > 0"));
    }
    if delta == 1.0 {
        return Ok((2.0 / (PI * k)).sqrt());
    }
    let c = k * (1.0 - delta);
    let v = (-c).exp() / (k * delta).sqrt()
        - PI.sqrt() * (1.0 / delta - 1.0).sqrt() * libm::erfc(c.sqrt());
    Ok((2.0 / PI).sqrt() * v)
}

/// `∂/∂n E[γⁿ]` at `n = 0` for Rician fading: `Γ(0,K) + log K + log(γ̄/(K+1))`.
pub fn rician_moment_derivative(k: f64, gamma_bar: f64) -> Result<f64> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::domain(
            "rician_moment_derivative",
            format!("K must be finite and >= 0, got {k}"),
        ));
    }
    if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
        return Err(Error::domain(
            "rician_moment_derivative",
            format!("gamma_bar must be finite and > 0, got {gamma_bar}"),
        ));
    }
    Ok(e1_plus_log(k) + gamma_bar.ln() - k.ln_1p())
}

/// `log((1+√(1−Δ²))/2)`, the phase average of `log(1+Δcosθ)`.
pub fn log_balance(delta: f64) -> f64 {
    ((1.0 + (1.0 - delta * delta).sqrt()) / 2.0).ln()
}

/// High-SNR capacity line for a single uniform-phase branch.
pub fn capacity_high_snr(
    model: &ChannelModel,
    regime: AsymptoticRegime,
) -> Result<AsymptoticCapacity> {
    if model.phase() != PhaseDistribution::Uniform {
        return Err(Error::domain(
            "capacity_high_snr",
            "asymptotic capacity assumes uniform phase",
        ));
    }
    let k = model.k();
    let d = model.delta();
    let rice = || LOG2_E * (e1_plus_log(k) - k.ln_1p());
    let mu = match regime {
        AsymptoticRegime::RiceExact => rice(),
        AsymptoticRegime::GtrExact if k == 0.0 || d == 0.0 => rice(),
        AsymptoticRegime::GtrExact => {
            LOG2_E * (k.ln() - k.ln_1p() + log_balance(d) + j_integral(k, d)?.value)
        }
        AsymptoticRegime::GtrLargeKDelta => {
            if k == 0.0 || d == 0.0 {
                return Err(Error::domain(
                    "capacity_high_snr",
                    "large-K·Δ form requires K > 0 and delta > 0",
                ));
            }
            LOG2_E * (k.ln() - k.ln_1p() + log_balance(d) + j_integral_hankel(k, d)?)
        }
        AsymptoticRegime::GtrDeltaOne => {
            if d != 1.0 || k == 0.0 {
                return Err(Error::domain(
                    "capacity_high_snr",
                    format!("delta-one form requires delta = 1 and K > 0, got delta = {d}, K = {k}"),
                ));
            }
            LOG2_E * (k.ln() - k.ln_1p() - LN_2 + (2.0 / (PI * k)).sqrt())
        }
    };
    Ok(AsymptoticCapacity {
        slope_nu: SLOPE_NU,
        intercept_mu: mu,
        regime,
    })
}

/// Asymptotic capacity loss of two-ray fading against Rician fading with the
/// same `K`: `log₂e·{Γ(0,K) − log((1+√(1−Δ²))/2) − 𝒥(K,Δ)}`.
pub fn capacity_loss(k: f64, delta: f64) -> Result<f64> {
    check_k_delta("capacity_loss", k, delta)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    Ok(LOG2_E * (e1(k) - log_balance(delta) - j_integral(k, delta)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::ridders_derivative;
    use crate::quad::integrate_periodic;
    use crate::specfun::{gamma_upper_zero, EULER_GAMMA};
    use approx::assert_relative_eq;

    fn model(k: f64, d: f64, g: f64) -> ChannelModel {
        ChannelModel::new(k, d, g).unwrap()
    }

    #[test]
    fn derivative_at_zero_is_mean() {
        let m = model(10.0, 0.7, 3.0);
        assert_relative_eq!(mgf_derivative(0.0, &m).unwrap().value, 3.0, max_relative = 1e-14);
        let t = m
            .with_phase(PhaseDistribution::TruncatedUniform { p: 0.4, phi: 0.0 })
            .unwrap();
        assert_relative_eq!(
            mgf_derivative(0.0, &t).unwrap().value,
            crate::models::mean_snr(&t).unwrap().value,
            max_relative = 1e-10
        );
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = 5.0;
        let m = model(10.0, 1.0, g);
        let s = -2.0 / g;
        let h = 1e-6 / g;
        let fd = (mgf(s + h, &m).unwrap().value - mgf(s - h, &m).unwrap().value) / (2.0 * h);
        let d = mgf_derivative(s, &m).unwrap().value;
        assert_relative_eq!(d, fd, max_relative = 1e-7);
        for ph in [
            PhaseDistribution::Uniform,
            PhaseDistribution::VonMises {
                eta: 2.0,
                centered_at_pi: true,
            },
            PhaseDistribution::TruncatedUniform { p: 0.3, phi: 0.0 },
        ] {
            let mm = model(20.0, 0.6, g).with_phase(ph).unwrap();
            for &s in &[-5.0, -0.3, 0.5] {
                let (r, _) = ridders_derivative(|x| mgf(x, &mm).unwrap().value, s, 0.05, 1);
                assert_relative_eq!(mgf_derivative(s, &mm).unwrap().value, r, max_relative = 1e-8);
            }
        }
        assert!(mgf_derivative(1.0, &model(1.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn rician_derivative_has_no_bessel_term() {
        let m = model(3.0, 0.0, 2.0);
        let s = -0.7;
        let denom = 4.0 - s * 2.0;
        assert_relative_eq!(
            mgf_derivative(s, &m).unwrap().value,
            rician_mgf_derivative(s, 3.0, &m, denom),
            max_relative = 1e-14
        );
    }

    #[test]
    fn awgn_limit_capacity() {
        let c = capacity_ora(&LinkConfig::single(model(1e6, 0.0, 100.0))).unwrap();
        assert!((c.value - 101f64.log2()).abs() < 1e-3, "{}", c.value);
    }

    #[test]
    fn rayleigh_capacity_closed_form() {
        // E[ln(1+γ)] = e^{1/γ̄} E₁(1/γ̄) for Rayleigh fading
        for &g in &[0.1, 1.0, 10.0, 1000.0] {
            let c = capacity_ora(&LinkConfig::single(ChannelModel::rayleigh(g).unwrap())).unwrap();
            let want = LOG2_E * (1.0 / g).exp() * e1(1.0 / g);
            assert_relative_eq!(c.value, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn capacity_orderings() {
        for &g in &[1.0, 10.0, 100.0] {
            let a = capacity_ora(&LinkConfig::single(model(10.0, 0.0, g))).unwrap().value;
            let b = capacity_ora(&LinkConfig::single(model(10.0, 1.0, g))).unwrap().value;
            assert!(a >= b);
            assert!(a <= (1.0 + g).log2());
        }
    }

    #[test]
    fn low_snr_capacity() {
        let l0 = LinkConfig::single(model(10.0, 0.0, 1e-3));
        let l1 = LinkConfig::single(model(10.0, 1.0, 1e-3));
        assert_eq!(capacity_low_snr(&l0), capacity_low_snr(&l1));
        let r = capacity_ora(&l1).unwrap().value / capacity_low_snr(&l1);
        assert!((r - 1.0).abs() < 0.02);
        assert_relative_eq!(
            capacity_low_snr(&LinkConfig::single(model(1.0, 1.0, 0.01))),
            0.01 * LOG2_E
        );
    }

    #[test]
    fn mrc_capacity_matches_sum_rayleigh() {
        // two i.i.d. Rayleigh branches give a Gamma(2, γ̄) combined SNR
        let g = 2.0;
        let link = LinkConfig::iid(ChannelModel::rayleigh(g).unwrap(), 2).unwrap();
        let c = capacity_ora(&link).unwrap().value;
        let want = integrate_semi_infinite(
            |x: f64| x.ln_1p() * x * (-x / g).exp() / (g * g),
            0.0,
            QuadSpec::new(1e-12, 1e-15, 200_000).unwrap(),
        )
        .value
            * LOG2_E;
        assert_relative_eq!(c, want, max_relative = 1e-8);
    }

    #[test]
    fn moment_derivative_limits() {
        assert_relative_eq!(
            rician_moment_derivative(0.0, 3.0).unwrap(),
            3f64.ln() - EULER_GAMMA,
            max_relative = 1e-14
        );
        assert!((rician_moment_derivative(1e8, 5.0).unwrap() - 5f64.ln()).abs() < 1e-6);
        assert_relative_eq!(
            rician_moment_derivative(1.0, 1.0).unwrap(),
            gamma_upper_zero(1.0).unwrap() + 0.5f64.ln(),
            max_relative = 1e-14
        );
        assert!(rician_moment_derivative(-1.0, 1.0).is_err());
    }

    #[test]
    fn moment_derivative_matches_numerical_expectation() {
        // ∂/∂n E[γⁿ] at 0 is E[ln γ]; integrate ln γ against the Rician pdf
        let k = 1.0;
        let g = 1.0;
        let m = model(k, 0.0, g);
        let pdf = |x: f64| crate::models::snr_pdf(x, &m).unwrap().value;
        let spec = QuadSpec::new(1e-12, 1e-15, 200_000).unwrap();
        let head = integrate_finite(|t: f64| 2.0 * t * (t * t).ln() * pdf(t * t), 0.0, 1.0, spec);
        let tail = integrate_semi_infinite(|x: f64| x.ln() * pdf(x), 1.0, spec);
        assert_relative_eq!(
            rician_moment_derivative(k, g).unwrap(),
            head.value + tail.value,
            max_relative = 1e-9
        );
    }

    #[test]
    fn log_balance_identity() {
        for &d in &[0.0, 0.5, 0.99] {
            let q = integrate_periodic(
                |t: f64| (1.0 + d * t.cos()).ln(),
                QuadSpec::new(1e-13, 1e-16, 1 << 20).unwrap(),
            );
            let got = q.value / (2.0 * PI);
            if d == 0.0 {
                assert!(got.abs() < 1e-15);
            } else {
                assert_relative_eq!(got, log_balance(d), max_relative = 1e-9);
            }
        }
        assert_relative_eq!(log_balance(1.0), -LN_2);
    }

    #[test]
    fn j_integral_reductions() {
        for &k in &[0.1, 1.0, 10.0] {
            let j = j_integral(k, 1e-9).unwrap().value;
            assert!((j - gamma_upper_zero(k).unwrap()).abs() < 1e-6);
            assert_relative_eq!(
                j_integral(k, 0.0).unwrap().value,
                gamma_upper_zero(k).unwrap(),
                max_relative = 1e-11
            );
        }
        assert_eq!(j_integral_hankel(50.0, 1.0).unwrap(), (2.0 / (PI * 50.0)).sqrt());
        assert!(j_integral(0.0, 0.5).is_err());
        assert!(j_integral(1.0, 1.5).is_err());
    }

    #[test]
    fn j_integral_is_phase_average_of_gamma() {
        // 𝒥 = (1/2π)∫ Γ(0, K(1+Δcosθ)) dθ
        for &(k, d) in &[(2.0, 0.5), (10.0, 0.9), (0.5, 0.3)] {
            let m = model(k, d, 1.0);
            let avg = phase_average(&m, |a| e1(k_bar(&m, a))).unwrap().value;
            assert_relative_eq!(j_integral(k, d).unwrap().value, avg, max_relative = 1e-9);
        }
    }

    #[test]
    fn hankel_form_is_the_integral_of_the_leading_term() {
        for &(k, d) in &[(60.0, 0.9), (100.0, 0.5), (20.0, 0.99)] {
            let a = k * (1.0 - d);
            let lead = integrate_semi_infinite(
                |t: f64| (-t * a).exp() / (t * (2.0 * PI * k * d * t).sqrt()),
                1.0,
                QuadSpec::new(1e-13, 1e-300, 200_000).unwrap(),
            );
            assert_relative_eq!(j_integral_hankel(k, d).unwrap(), lead.value, max_relative = 1e-10);
        }
    }

    #[test]
    fn high_snr_regimes() {
        let rice = capacity_high_snr(&model(10.0, 0.0, 1.0), AsymptoticRegime::RiceExact).unwrap();
        let gtr0 = capacity_high_snr(&model(10.0, 0.0, 1.0), AsymptoticRegime::GtrExact).unwrap();
        assert_relative_eq!(rice.intercept_mu, gtr0.intercept_mu, max_relative = 1e-14);
        let j = j_integral(10.0, 1e-12).unwrap().value;
        assert_relative_eq!(j, gamma_upper_zero(10.0).unwrap(), max_relative = 1e-9);

        let ray = capacity_high_snr(&model(1e-12, 0.0, 1.0), AsymptoticRegime::RiceExact).unwrap();
        assert!((ray.intercept_mu + LOG2_E * EULER_GAMMA).abs() < 1e-10);
        assert_relative_eq!(SLOPE_NU * 10.0, 10f64.log2(), max_relative = 1e-15);

        let m = model(10.0, 0.5, 1.0);
        let r = capacity_high_snr(&m, AsymptoticRegime::RiceExact).unwrap().intercept_mu;
        let g = capacity_high_snr(&m, AsymptoticRegime::GtrExact).unwrap().intercept_mu;
        assert!(r > g);
        assert_relative_eq!(r - g, capacity_loss(10.0, 0.5).unwrap(), max_relative = 1e-10);

        assert!(capacity_high_snr(&m, AsymptoticRegime::GtrDeltaOne).is_err());
        let one = model(100.0, 1.0, 1.0);
        let a = capacity_high_snr(&one, AsymptoticRegime::GtrDeltaOne).unwrap();
        let b = capacity_high_snr(&one, AsymptoticRegime::GtrLargeKDelta).unwrap();
        assert_relative_eq!(a.intercept_mu, b.intercept_mu, max_relative = 1e-14);
        let vm = one
            .with_phase(PhaseDistribution::VonMises {
                eta: 1.0,
                centered_at_pi: true,
            })
            .unwrap();
        assert!(capacity_high_snr(&vm, AsymptoticRegime::GtrExact).is_err());
    }

    #[test]
    fn high_snr_line_tracks_exact_capacity() {
        for &d in &[0.0, 0.5, 1.0] {
            let m = model(10.0, d, 1e4);
            let exact = capacity_ora(&LinkConfig::single(m)).unwrap().value;
            let line = capacity_high_snr(&m, AsymptoticRegime::GtrExact).unwrap().at_db(40.0);
            assert!((exact - line).abs() < 0.02, "delta {d}: {exact} vs {line}");
        }
    }

    #[test]
    fn capacity_loss_properties() {
        assert_eq!(capacity_loss(10.0, 0.0).unwrap(), 0.0);
        for &k in &[0.5, 5.0, 50.0] {
            for &d in &[0.2, 0.7, 1.0] {
                assert!(capacity_loss(k, d).unwrap() > 0.0);
            }
        }
        let d = 0.6;
        let lim = 1.0 - (1.0 + (1.0 - d * d as f64).sqrt()).log2();
        assert!((capacity_loss(1e4, d).unwrap() - lim).abs() < 1e-6);
        // the Δ = 1 loss approaches one bit from below as √(2/(πK))·log₂e
        let l = capacity_loss(1e4, 1.0).unwrap();
        assert_relative_eq!(1.0 - l, LOG2_E * (2.0 / (PI * 1e4)).sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn derivative_of_derivative_is_second_moment() {
        let m = model(5.0, 0.5, 2.0);
        let (d2, _) = ridders_derivative(|s| mgf_derivative(s, &m).unwrap().value, 0.0, 0.05, 1);
        assert_relative_eq!(d2, crate::models::moment(2, &m).unwrap().value, max_relative = 1e-8);
    }
}
