//! Generalized two-ray channel models and the phase-averaging operator.
//!
//! Conditioned on the phase difference `α` between the two line-of-sight
//! rays, the envelope is Rician with an equivalent LOS power ratio
//! `K̄(α) = K(1 + Δ cos α)`. Every statistic of the two-ray family is the
//! corresponding Rician statistic averaged over the law of `α`, holding the
//! diffuse power (equivalently `(1 + K)/γ̄`) fixed.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate_finite, integrate_periodic, QuadResult, QuadSpec};
use crate::specfun::i0e;

pub(crate) mod stats;

pub use stats::{
    amount_of_fading, average_outage_duration, envelope_cdf, envelope_pdf, level_crossing_rate,
    mean_snr, mgf, moment, rician_envelope_pdf, snr_pdf,
};

/// Law of the phase difference between the two LOS rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseDistribution {
    /// `α ~ U(0, 2π)`: the classical two-wave-with-diffuse-power model.
    Uniform,
    /// `α ~ U(π(1−p) + φ, π(1+p) + φ)`.
    TruncatedUniform { p: f64, phi: f64 },
    /// Von Mises with concentration `eta`, centred at `π` (more
    /// cancellation) or at `0`.
    VonMises { eta: f64, centered_at_pi: bool },
}

impl PhaseDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PhaseDistribution::Uniform => Ok(()),
            PhaseDistribution::TruncatedUniform { p, phi } => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::invalid(format!(
                        "truncated phase: p in (0, 1], got {p}"
                    )));
                }
                if !(phi > -PI && phi < PI) {
                    return Err(Error::invalid(format!(
                        "truncated phase: phi in (-pi, pi), got {phi}"
                    )));
                }
                Ok(())
            }
            PhaseDistribution::VonMises { eta, .. } => {
                if !(eta >= 0.0 && eta.is_finite()) {
                    return Err(Error::invalid(format!(
                        "von Mises phase: eta >= 0 and finite, got {eta}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Density of `α` on its support (zero outside it for the truncated law,
    /// evaluated modulo 2π).
    pub fn pdf(&self, alpha: f64) -> f64 {
        match *self {
            PhaseDistribution::Uniform => 1.0 / (2.0 * PI),
            PhaseDistribution::TruncatedUniform { p, phi } => {
                let lo = PI * (1.0 - p) + phi;
                let width = 2.0 * PI * p;
                let offset = (alpha - lo).rem_euclid(2.0 * PI);
                if offset <= width {
                    1.0 / width
                } else {
                    0.0
                }
            }
            PhaseDistribution::VonMises {
                eta,
                centered_at_pi,
            } => {
                let c = if centered_at_pi { -1.0 } else { 1.0 };
                (eta * (c * alpha.cos() - 1.0)).exp() / (2.0 * PI * i0e(eta))
            }
        }
    }

    /// Support `[lo, hi]` of the truncated law.
    pub fn truncated_support(p: f64, phi: f64) -> (f64, f64) {
        (PI * (1.0 - p) + phi, PI * (1.0 + p) + phi)
    }
}

/// Parameters of a generalized two-ray channel.
///
/// The model is stored as `(K, Δ, γ̄, N₀)`; the diffuse variance `σ²`, the
/// mean received power `P̄ᵣ` and the LOS amplitudes `V₁ ≥ V₂` are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    k: f64,
    delta: f64,
    gamma_bar: f64,
    phase: PhaseDistribution,
    n0: f64,
}

impl ChannelModel {
    /// Uniform-phase model with `N₀ = 1`.
    pub fn new(k: f64, delta: f64, gamma_bar: f64) -> Result<Self> {
        let m = Self {
            k,
            delta,
            gamma_bar,
            phase: PhaseDistribution::Uniform,
            n0: 1.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn rayleigh(gamma_bar: f64) -> Result<Self> {
        Self::new(0.0, 0.0, gamma_bar)
    }

    pub fn with_phase(mut self, phase: PhaseDistribution) -> Result<Self> {
        phase.validate()?;
        self.phase = phase;
        Ok(self)
    }

    pub fn with_n0(mut self, n0: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::invalid(format!("n0 > 0 and finite, got {n0}")));
        }
        self.n0 = n0;
        Ok(self)
    }

    pub fn with_gamma_bar(mut self, gamma_bar: f64) -> Result<Self> {
        self.gamma_bar = gamma_bar;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::invalid(format!("K >= 0 and finite, got {}", self.k)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::invalid(format!(
                "delta in [0, 1], got {}",
                self.delta
            )));
        }
        if !(self.gamma_bar > 0.0 && self.gamma_bar.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma_bar > 0 and finite, got {}",
                self.gamma_bar
            )));
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(Error::invalid(format!("n0 > 0, got {}", self.n0)));
        }
        self.phase.validate()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn phase(&self) -> PhaseDistribution {
        self.phase
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Diffuse variance per quadrature component, `γ̄N₀ / (2(1+K))`.
    pub fn sigma2(&self) -> f64 {
        self.gamma_bar * self.n0 / (2.0 * (1.0 + self.k))
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2().sqrt()
    }

    /// Mean received power `P̄ᵣ = V₁² + V₂² + 2σ² = γ̄N₀`.
    pub fn mean_power(&self) -> f64 {
        self.gamma_bar * self.n0
    }

    /// LOS amplitudes `(V₁, V₂)` with `V₁ ≥ V₂ ≥ 0`.
    pub fn los_amplitudes(&self) -> (f64, f64) {
        let s = self.sigma() * self.k.sqrt() / std::f64::consts::SQRT_2;
        let plus = (1.0 + self.delta).sqrt();
        let minus = (1.0 - self.delta).sqrt();
        (s * (plus + minus), s * (plus - minus))
    }

    /// Absolute envelope level for a radius normalized to `√P̄ᵣ`.
    pub fn radius_from_normalized(&self, r_norm: f64) -> f64 {
        r_norm * self.mean_power().sqrt()
    }

    /// True when `K̄(α)` does not depend on `α`, so the model is Rician.
    pub(crate) fn is_rician(&self) -> bool {
        self.delta == 0.0 || self.k == 0.0
    }
}

/// Maximum Doppler frequency for level-crossing statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityConfig {
    f_d: f64,
}

impl MobilityConfig {
    pub fn new(f_d: f64) -> Result<Self> {
        if !(f_d > 0.0 && f_d.is_finite()) {
            return Err(Error::invalid(format!(
                "doppler frequency f_d > 0 and finite, got {f_d}"
            )));
        }
        Ok(Self { f_d })
    }

    pub fn f_d(&self) -> f64 {
        self.f_d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
        }
    }
}

/// A computed statistic and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Statistic {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

impl Statistic {
    pub fn closed_form(value: f64) -> Self {
        Self {
            value,
            method: Method::ClosedForm,
            error_estimate: 0.0,
        }
    }

    pub(crate) fn from_quad(r: QuadResult) -> Self {
        Self {
            value: r.value,
            method: Method::Quadrature,
            error_estimate: r.error_estimate,
        }
    }

    pub(crate) fn map(self, f: impl Fn(f64) -> f64, scale: f64) -> Self {
        Self {
            value: f(self.value),
            method: self.method,
            error_estimate: self.error_estimate * scale.abs(),
        }
    }
}

/// `K̄(α) = K(1 + Δ cos α)`.
pub fn k_bar(model: &ChannelModel, alpha: f64) -> f64 {
    model.k * (1.0 + model.delta * alpha.cos())
}

/// Tolerances used for every phase average inside the library.
pub(crate) fn average_spec() -> QuadSpec {
    QuadSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_evals: 1 << 20,
    }
}

/// `∫ h(α) f_α(α) dα` over the support of the model's phase law.
pub fn phase_average<H: Fn(f64) -> f64>(model: &ChannelModel, h: H) -> Result<Statistic> {
    phase_average_with(model, h, average_spec())
}

pub fn phase_average_with<H: Fn(f64) -> f64>(
    model: &ChannelModel,
    h: H,
    spec: QuadSpec,
) -> Result<Statistic> {
    let r = match model.phase {
        PhaseDistribution::Uniform => {
            let r = integrate_periodic(&h, spec);
            QuadResult {
                value: r.value / (2.0 * PI),
                error_estimate: r.error_estimate / (2.0 * PI),
                ..r
            }
        }
        PhaseDistribution::TruncatedUniform { p, phi } => {
            let (lo, hi) = PhaseDistribution::truncated_support(p, phi);
            let width = 2.0 * PI * p;
            let spec = QuadSpec {
                abs_tol: spec.abs_tol * width,
                ..spec
            };
            let r = integrate_finite(&h, lo, hi, spec);
            QuadResult {
                value: r.value / width,
                error_estimate: r.error_estimate / width,
                ..r
            }
        }
        PhaseDistribution::VonMises {
            eta,
            centered_at_pi,
        } => {
            let c = if centered_at_pi { -1.0 } else { 1.0 };
            let norm = 2.0 * PI * i0e(eta);
            let spec = QuadSpec {
                abs_tol: spec.abs_tol * norm,
                ..spec
            };
            let r = integrate_periodic(|a: f64| h(a) * (eta * (c * a.cos() - 1.0)).exp(), spec);
            QuadResult {
                value: r.value / norm,
                error_estimate: r.error_estimate / norm,
                ..r
            }
        }
    };
    let r = r.into_result("phase average")?;
    Ok(Statistic::from_quad(r))
}

/// Averages a function of the equivalent Rician parameter `K̄`; collapses
/// to a single evaluation when the model is Rician.
pub(crate) fn average_over_kbar<G: Fn(f64) -> f64>(model: &ChannelModel, g: G) -> Result<Statistic> {
    if model.is_rician() {
        return Ok(Statistic::closed_form(g(model.k)));
    }
    phase_average(model, |a| g(k_bar(model, a)))
}
