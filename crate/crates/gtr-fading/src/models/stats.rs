//! Envelope and SNR statistics of the two-ray family.

use crate::error::{Error, Result};
use crate::specfun::{bessel_ratio_i1_i0, i0e, laguerre_unchecked, marcum_pair, sinc_pi};

use super::{average_over_kbar, ChannelModel, Method, MobilityConfig, PhaseDistribution, Statistic};

/// Rician envelope density
/// `(r/σ²)·exp(−r²/2σ² − K)·I₀((r/σ)√(2K))`, evaluated as
/// `(r/σ²)·exp(−(r/σ − √(2K))²/2)·Ĩ₀(·)`.
pub fn rician_envelope_pdf(r: f64, k: f64, sigma: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x = r / sigma;
    let a = (2.0 * k.max(0.0)).sqrt();
    let d = x - a;
    x / sigma * (-0.5 * d * d).exp() * i0e(x * a)
}

/// Rician SNR density in the variable `u = γ(1+K)/γ̄`, without the
/// `(1+K)/γ̄` Jacobian: `exp(−(√u − √K̄)²)·Ĩ₀(2√(u K̄))`.
fn rician_snr_kernel(u: f64, kbar: f64) -> f64 {
    let kbar = kbar.max(0.0);
    let d = u.sqrt() - kbar.sqrt();
    (-d * d).exp() * i0e(2.0 * (u * kbar).sqrt())
}

fn check_radius(function: &'static str, r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            format!("radius must be finite and >= 0, got {r}"),
        ))
    }
}

/// Envelope density at absolute level `r`.
pub fn envelope_pdf(r: f64, model: &ChannelModel) -> Result<Statistic> {
    check_radius("envelope_pdf", r)?;
    let sigma = model.sigma();
    if r == 0.0 {
        return Ok(Statistic::closed_form(0.0));
    }
    average_over_kbar(model, |kb| rician_envelope_pdf(r, kb, sigma))
}

/// Density of the instantaneous SNR at `gamma`.
pub fn snr_pdf(gamma: f64, model: &ChannelModel) -> Result<Statistic> {
    check_radius("snr_pdf", gamma)?;
    let scale = (1.0 + model.k()) / model.gamma_bar();
    let u = gamma * scale;
    let s = average_over_kbar(model, |kb| rician_snr_kernel(u, kb))?;
    Ok(s.map(|v| v * scale, scale))
}

/// Envelope cdf `1 − E_α[Q₁(√(2K̄(α)), r/σ)]`, accumulated as the average of
/// `1 − Q₁` so deep-fade probabilities keep their relative accuracy.
pub fn envelope_cdf(r: f64, model: &ChannelModel) -> Result<Statistic> {
    check_radius("envelope_cdf", r)?;
    if r == 0.0 {
        return Ok(Statistic::closed_form(0.0));
    }
    let b = r / model.sigma();
    let s = average_over_kbar(model, |kb| marcum_pair((2.0 * kb.max(0.0)).sqrt(), b).p)?;
    Ok(s.map(|v| v.clamp(0.0, 1.0), 1.0))
}

pub(crate) fn check_mgf_domain(s: f64, model: &ChannelModel) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::domain("mgf", format!("s must be finite, got {s}")));
    }
    let denom = 1.0 + model.k() - s * model.gamma_bar();
    if denom <= 0.0 {
        return Err(Error::domain(
            "mgf",
            format!(
                "s*gamma_bar must be below 1+K = {}, got {}",
                1.0 + model.k(),
                s * model.gamma_bar()
            ),
        ));
    }
    Ok(denom)
}

/// Moment generating function `E[e^{sγ}]` of the SNR.
///
/// Closed forms exist for the uniform and von Mises phase laws; the
/// truncated law averages the Rician MGF numerically.
pub fn mgf(s: f64, model: &ChannelModel) -> Result<Statistic> {
    let denom = check_mgf_domain(s, model)?;
    let k = model.k();
    let front = (1.0 + k) / denom;
    let t = s * model.gamma_bar() / denom;
    let x = k * model.delta() * t;
    match model.phase() {
        PhaseDistribution::Uniform => Ok(Statistic::closed_form(
            front * (k * t + x.abs()).exp() * i0e(x),
        )),
        PhaseDistribution::VonMises {
            eta,
            centered_at_pi,
        } => {
            let arg = if centered_at_pi { eta - x } else { -eta - x };
            Ok(Statistic::closed_form(
                front * (k * t + arg.abs() - eta).exp() * i0e(arg) / i0e(eta),
            ))
        }
        PhaseDistribution::TruncatedUniform { .. } => {
            average_over_kbar(model, |kb| front * (kb * t).exp())
        }
    }
}

/// Rician MGF with equivalent parameter `kbar`, `(1+K)/γ̄` held fixed.
#[cfg(test)]
fn rician_mgf_kbar(s: f64, kbar: f64, model: &ChannelModel) -> f64 {
    let denom = 1.0 + model.k() - s * model.gamma_bar();
    (1.0 + model.k()) / denom * (kbar * s * model.gamma_bar() / denom).exp()
}

/// Raw SNR moment `E[γᵏ] = k!(γ̄/(1+K))ᵏ · E_α[L_k(−K̄(α))]`.
pub fn moment(k: u32, model: &ChannelModel) -> Result<Statistic> {
    if k == 0 {
        return Err(Error::domain("moment", "order must be >= 1"));
    }
    let kk = model.k();
    let g = model.gamma_bar();
    let scale = g / (1.0 + kk);
    if model.phase() == PhaseDistribution::Uniform {
        if k == 1 {
            return Ok(Statistic::closed_form(g));
        }
        if k == 2 {
            let d = model.delta();
            return Ok(Statistic::closed_form(
                scale * scale * (2.0 + 4.0 * kk + kk * kk * (1.0 + 0.5 * d * d)),
            ));
        }
    }
    let factor = (1..=k).fold(1.0, |acc, j| acc * j as f64 * scale);
    let s = average_over_kbar(model, |kb| laguerre_unchecked(k, -kb))?;
    Ok(s.map(|v| v * factor, factor))
}

/// Mean SNR `E[γ]`. Equals `γ̄` for uniform phase; concentrating the phase
/// around `π` lowers it, around `0` raises it.
pub fn mean_snr(model: &ChannelModel) -> Result<Statistic> {
    let g = model.gamma_bar();
    let los = model.delta() * model.k() / (model.k() + 1.0);
    match model.phase() {
        PhaseDistribution::Uniform => Ok(Statistic::closed_form(g)),
        PhaseDistribution::TruncatedUniform { p, phi } if phi == 0.0 => {
            Ok(Statistic::closed_form(g * (1.0 - los * sinc_pi(p))))
        }
        PhaseDistribution::TruncatedUniform { .. } => moment(1, model),
        PhaseDistribution::VonMises {
            eta,
            centered_at_pi,
        } => {
            let sign = if centered_at_pi { -1.0 } else { 1.0 };
            Ok(Statistic::closed_form(
                g * (1.0 + sign * los * bessel_ratio_i1_i0(eta)),
            ))
        }
    }
}

/// Amount of fading `Var[γ]/E[γ]²`.
pub fn amount_of_fading(model: &ChannelModel) -> Result<Statistic> {
    let k = model.k();
    if model.phase() == PhaseDistribution::Uniform {
        let d = model.delta();
        return Ok(Statistic::closed_form(
            (2.0 + 4.0 * k + k * k * d * d) / (2.0 * (1.0 + k) * (1.0 + k)),
        ));
    }
    let m1 = moment(1, model)?;
    let m2 = moment(2, model)?;
    let mean2 = m1.value * m1.value;
    let value = (m2.value - mean2) / mean2;
    let err = m2.error_estimate / mean2 + 2.0 * m2.value * m1.error_estimate / (mean2 * m1.value);
    Ok(Statistic {
        value,
        method: Method::Quadrature,
        error_estimate: err,
    })
}

/// Expected downward crossings per second of level `r_th`, assuming
/// Doppler-free LOS rays and isotropic 2-D diffuse scattering.
pub fn level_crossing_rate(
    r_th: f64,
    model: &ChannelModel,
    mobility: &MobilityConfig,
) -> Result<Statistic> {
    if !(r_th > 0.0 && r_th.is_finite()) {
        return Err(Error::domain(
            "level_crossing_rate",
            format!("threshold must be > 0, got {r_th}"),
        ));
    }
    let factor = (std::f64::consts::PI / 2.0).sqrt()
        * (model.mean_power() / (model.k() + 1.0)).sqrt()
        * mobility.f_d();
    let pdf = envelope_pdf(r_th, model)?;
    Ok(pdf.map(|v| v * factor, factor))
}

/// Average time spent below `r_th` per fade, `F(r_th)/N(r_th)`.
pub fn average_outage_duration(
    r_th: f64,
    model: &ChannelModel,
    mobility: &MobilityConfig,
) -> Result<Statistic> {
    let lcr = level_crossing_rate(r_th, model, mobility)?;
    if !(lcr.value > 0.0) {
        return Err(Error::domain(
            "average_outage_duration",
            format!("envelope pdf vanishes at threshold {r_th}; duration undefined"),
        ));
    }
    let cdf = envelope_cdf(r_th, model)?;
    let value = cdf.value / lcr.value;
    let method = if cdf.method == Method::ClosedForm && lcr.method == Method::ClosedForm {
        Method::ClosedForm
    } else {
        Method::Quadrature
    };
    let err = cdf.error_estimate / lcr.value + value * lcr.error_estimate / lcr.value;
    Ok(Statistic {
        value,
        method,
        error_estimate: err,
    })
}
