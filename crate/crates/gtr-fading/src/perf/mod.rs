//! Error probability and capacity of links over two-ray fading.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::models::{mgf, ChannelModel, Method, PhaseDistribution, Statistic};
use crate::quad::{integrate_finite, QuadResult, QuadSpec};
use crate::specfun::{gaussian_q, i0e};

mod capacity;

pub use capacity::{
    capacity_high_snr, capacity_loss, capacity_low_snr, capacity_ora, j_integral,
    j_integral_hankel, log_balance, mgf_derivative, rician_moment_derivative, AsymptoticCapacity,
    AsymptoticRegime, SLOPE_NU,
};

/// Largest FSK order accepted; the alternating sum loses accuracy beyond it.
pub const MAX_FSK_ORDER: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Mpsk { m: u32 },
    Mqam { m: u32 },
    Mdpsk { m: u32 },
    Mfsk { m: u32 },
}

impl Modulation {
    pub fn order(&self) -> u32 {
        match *self {
            Modulation::Mpsk { m }
            | Modulation::Mqam { m }
            | Modulation::Mdpsk { m }
            | Modulation::Mfsk { m } => m,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Modulation::Mpsk { .. } => "mpsk",
            Modulation::Mqam { .. } => "mqam",
            Modulation::Mdpsk { .. } => "mdpsk",
            Modulation::Mfsk { .. } => "mfsk",
        }
    }

    /// Parses `mpsk`, `mqam`, `mdpsk` or `mfsk` with an order.
    pub fn from_name(name: &str, m: u32) -> Result<Self> {
        let md = match name.to_ascii_lowercase().as_str() {
            "mpsk" | "psk" => Modulation::Mpsk { m },
            "mqam" | "qam" => Modulation::Mqam { m },
            "mdpsk" | "dpsk" => Modulation::Mdpsk { m },
            "mfsk" | "fsk" => Modulation::Mfsk { m },
            other => return Err(Error::invalid(format!("unknown modulation '{other}'"))),
        };
        md.validate()?;
        Ok(md)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.order();
        match self {
            Modulation::Mqam { .. } => {
                let r = (m as f64).sqrt().round() as u32;
                if m < 4 || r * r != m {
                    return Err(Error::domain(
                        "modulation",
                        format!("QAM order must be a perfect square >= 4, got {m}"),
                    ));
                }
            }
            _ => {
                if m < 2 || !m.is_power_of_two() {
                    return Err(Error::domain(
                        "modulation",
                        format!("{} order must be a power of two >= 2, got {m}", self.name()),
                    ));
                }
            }
        }
        if let Modulation::Mfsk { .. } = self {
            if m > MAX_FSK_ORDER {
                return Err(Error::domain(
                    "modulation",
                    format!("FSK order must be <= {MAX_FSK_ORDER}, got {m}"),
                ));
            }
        }
        Ok(())
    }

    /// Error probability with no signal, `(M−1)/M`.
    pub fn zero_snr_sep(&self) -> f64 {
        let m = self.order() as f64;
        (m - 1.0) / m
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.order(), &self.name()[1..].to_ascii_uppercase())
    }
}

/// Independent diversity branches combined with MRC.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    branches: Vec<ChannelModel>,
}

impl LinkConfig {
    pub fn new(branches: Vec<ChannelModel>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::invalid("link needs at least one branch"));
        }
        for b in &branches {
            b.validate()?;
        }
        Ok(Self { branches })
    }

    pub fn single(model: ChannelModel) -> Self {
        Self {
            branches: vec![model],
        }
    }

    /// `l` identical branches.
    pub fn iid(model: ChannelModel, l: usize) -> Result<Self> {
        Self::new(vec![model; l])
    }

    pub fn branches(&self) -> &[ChannelModel] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Combined average SNR `Σ γ̄ᵢ`.
    pub fn gamma_bar(&self) -> f64 {
        self.branches.iter().map(|b| b.gamma_bar()).sum()
    }

    fn mgf_product(&self, s: f64) -> Result<f64> {
        let mut p = 1.0;
        for b in &self.branches {
            p *= mgf(s, b)?.value;
        }
        Ok(p)
    }

    fn all_closed_form(&self) -> bool {
        self.branches
            .iter()
            .all(|b| !matches!(b.phase(), PhaseDistribution::TruncatedUniform { .. }))
    }
}

fn sep_spec() -> QuadSpec {
    QuadSpec {
        rel_tol: 1e-11,
        abs_tol: 1e-300,
        max_evals: 200_000,
    }
}

/// `(1/π)∫₀^β f(θ) dθ`.
fn i_beta<F: Fn(f64) -> f64>(f: F, beta: f64) -> QuadResult {
    integrate_finite(f, 0.0, beta, sep_spec()).scaled(1.0 / PI)
}

/// Symbol error probability of an AWGN channel at SNR `gamma`.
pub fn awgn_sep(modulation: Modulation, gamma: f64) -> Result<f64> {
    modulation.validate()?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::domain(
            "awgn_sep",
            format!("SNR must be finite and >= 0, got {gamma}"),
        ));
    }
    let m = modulation.order();
    let mf = m as f64;
    let p = match modulation {
        Modulation::Mpsk { .. } if m == 2 => gaussian_q((2.0 * gamma).sqrt()),
        Modulation::Mpsk { .. } => {
            let g = (PI / mf).sin().powi(2);
            let r = i_beta(
                |th: f64| {
                    let s = th.sin();
                    if s == 0.0 {
                        0.0
                    } else {
                        (-gamma * g / (s * s)).exp()
                    }
                },
                (mf - 1.0) * PI / mf,
            );
            r.into_result("awgn_sep")?.value
        }
        Modulation::Mqam { .. } => {
            let c = 1.0 - 1.0 / mf.sqrt();
            let q = gaussian_q((3.0 * gamma / (mf - 1.0)).sqrt());
            4.0 * c * q - 4.0 * c * c * q * q
        }
        Modulation::Mdpsk { .. } if m == 2 => 0.5 * (-gamma).exp(),
        Modulation::Mdpsk { .. } => {
            let g = (PI / mf).sin().powi(2);
            let cm = (PI / mf).cos();
            let r = i_beta(
                |th: f64| (-gamma * g / (1.0 + cm * th.cos())).exp(),
                (mf - 1.0) * PI / mf,
            );
            r.into_result("awgn_sep")?.value
        }
        Modulation::Mfsk { .. } => fsk_sum(m, |c| (-c * gamma).exp()),
    };
    Ok(p.clamp(0.0, modulation.zero_snr_sep()))
}

/// `Σ_{m=1}^{M−1} (−1)^{m+1} C(M−1,m)/(m+1) · h(m/(m+1))`.
fn fsk_sum<H: FnMut(f64) -> f64>(order: u32, mut h: H) -> f64 {
    let n = order - 1;
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 1..=n {
        binom *= (n - k + 1) as f64 / k as f64;
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign * binom / (kf + 1.0) * h(kf / (kf + 1.0));
    }
    sum
}

/// Average symbol error probability over a diversity link.
pub fn sep(modulation: Modulation, link: &LinkConfig) -> Result<Statistic> {
    modulation.validate()?;
    let m = modulation.order() as f64;
    let method = if link.all_closed_form() {
        Method::ClosedForm
    } else {
        Method::Quadrature
    };
    // the integrands swallow errors; the first one is kept and re-raised
    let failure = std::cell::RefCell::new(None);
    let product = |s: f64| match link.mgf_product(s) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let coherent = |g: f64| {
        move |th: f64| {
            let s = th.sin();
            if s == 0.0 {
                0.0
            } else {
                product(-g / (s * s))
            }
        }
    };
    let r = match modulation {
        Modulation::Mpsk { .. } => {
            let g = (PI / m).sin().powi(2);
            i_beta(coherent(g), (m - 1.0) * PI / m)
        }
        Modulation::Mqam { .. } => {
            let g = 1.5 / (m - 1.0);
            let c = 1.0 - 1.0 / m.sqrt();
            let a = i_beta(coherent(g), PI / 2.0);
            let b = i_beta(coherent(g), PI / 4.0);
            QuadResult {
                value: 4.0 * c * a.value - 4.0 * c * c * b.value,
                error_estimate: 4.0 * c * a.error_estimate + 4.0 * c * c * b.error_estimate,
                evals: a.evals + b.evals,
                converged: a.converged && b.converged,
            }
        }
        Modulation::Mdpsk { .. } => {
            let g = (PI / m).sin().powi(2);
            let cm = (PI / m).cos();
            i_beta(
                |th: f64| product(-g / (1.0 + cm * th.cos())),
                (m - 1.0) * PI / m,
            )
        }
        Modulation::Mfsk { m: order } => {
            if link.len() != 1 {
                return Err(Error::domain(
                    "sep",
                    "FSK error probability is only defined for a single branch",
                ));
            }
            let mut first_err = None;
            let v = fsk_sum(order, |c| match link.mgf_product(-c) {
                Ok(v) => v,
                Err(e) => {
                    first_err.get_or_insert(e);
                    f64::NAN
                }
            });
            if let Some(e) = first_err {
                return Err(e);
            }
            return Ok(Statistic {
                value: v.clamp(0.0, modulation.zero_snr_sep()),
                method,
                error_estimate: if method == Method::ClosedForm {
                    0.0
                } else {
                    1e-10 * v.abs()
                },
            });
        }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let r = r.into_result("sep")?;
    Ok(Statistic {
        value: r.value.clamp(0.0, modulation.zero_snr_sep()),
        method: Method::Quadrature,
        error_estimate: r.error_estimate,
    })
}

fn require_uniform(function: &'static str, model: &ChannelModel) -> Result<()> {
    if model.phase() == PhaseDistribution::Uniform {
        Ok(())
    } else {
        Err(Error::domain(
            function,
            "closed form assumes uniform phase; use sep() for other phase laws",
        ))
    }
}

/// Binary DPSK error probability `½·M(−1)` in closed form.
pub fn ber_dbpsk_closed_form(model: &ChannelModel) -> Result<f64> {
    require_uniform("ber_dbpsk_closed_form", model)?;
    let k = model.k();
    let g = model.gamma_bar();
    let d = 1.0 + k + g;
    let x = k * g * model.delta() / d;
    Ok(0.5 * (1.0 + k) / d * (-k * g / d + x).exp() * i0e(x))
}

/// Large-`K` form `½e^{−γ̄}I₀(Δγ̄)`.
pub fn ber_dbpsk_hyper_rayleigh(model: &ChannelModel) -> f64 {
    let g = model.gamma_bar();
    let x = model.delta() * g;
    0.5 * (x - g).exp() * i0e(x)
}

/// Large-`γ̄` form `½·e^{−K}I₀(ΔK)/(1 + γ̄/(K+1))`.
pub fn ber_dbpsk_high_snr(model: &ChannelModel) -> f64 {
    let k = model.k();
    let x = model.delta() * k;
    0.5 / (1.0 + model.gamma_bar() / (k + 1.0)) * (x - k).exp() * i0e(x)
}
