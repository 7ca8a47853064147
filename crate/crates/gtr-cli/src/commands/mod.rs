pub mod capacity;
pub mod figure;
pub mod mc;
pub mod sep;
pub mod stats;

use gtr_fading::models::{ChannelModel, PhaseDistribution, Statistic};
use gtr_fading::perf::LinkConfig;
use serde_json::{json, Value};

use crate::args::{ModelArgs, SweepSpec, SweepVar};
use crate::error::{CliError, CliResult};
use crate::output::Cell;

/// `uniform`, `trunc:p=P[,phi=F]` or `vm:eta=E[,center=pi|zero]`.
pub fn parse_phase(s: &str) -> CliResult<PhaseDistribution> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut p = None;
    let mut phi = 0.0;
    let mut eta = None;
    let mut center_pi = true;
    for item in rest.split(',').filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::invalid(format!("phase: expected key=value, got '{item}'")))?;
        let num = || {
            v.parse::<f64>()
                .map_err(|e| CliError::invalid(format!("phase: bad number for {k}: {e}")))
        };
        match (kind, k) {
            ("trunc", "p") => p = Some(num()?),
            ("trunc", "phi") => phi = num()?,
            ("vm", "eta") => eta = Some(num()?),
            ("vm", "center") => {
                center_pi = match v {
                    "pi" => true,
                    "zero" | "0" => false,
                    _ => return Err(CliError::invalid(format!("phase: center must be pi or zero, got '{v}'"))),
                }
            }
            _ => return Err(CliError::invalid(format!("phase: unknown key '{k}' for '{kind}'"))),
        }
    }
    let phase = match kind {
        "uniform" if rest.is_empty() => PhaseDistribution::Uniform,
        "trunc" => PhaseDistribution::TruncatedUniform {
            p: p.ok_or_else(|| CliError::invalid("phase: trunc needs p"))?,
            phi,
        },
        "vm" => PhaseDistribution::VonMises {
            eta: eta.ok_or_else(|| CliError::invalid("phase: vm needs eta"))?,
            centered_at_pi: center_pi,
        },
        _ => return Err(CliError::invalid(format!("phase: unknown law '{s}'"))),
    };
    phase.validate()?;
    Ok(phase)
}

pub fn phase_label(phase: &PhaseDistribution) -> String {
    match *phase {
        PhaseDistribution::Uniform => "uniform".into(),
        PhaseDistribution::TruncatedUniform { p, phi } => format!("trunc:p={p},phi={phi}"),
        PhaseDistribution::VonMises { eta, centered_at_pi } => {
            format!("vm:eta={eta},center={}", if centered_at_pi { "pi" } else { "zero" })
        }
    }
}

/// Model parameters after defaults, units and one sweep value are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub k: f64,
    pub delta: f64,
    pub gamma_bar: f64,
    pub n0: f64,
    pub phase: PhaseDistribution,
    pub branches: usize,
    pub r_norm: f64,
    pub gamma_norm: f64,
}

impl Point {
    pub fn from_args(a: &ModelArgs) -> CliResult<Self> {
        Ok(Self {
            k: a.k_linear(),
            delta: a.delta,
            gamma_bar: a.gamma_bar_linear(),
            n0: a.n0,
            phase: parse_phase(&a.phase)?,
            branches: a.branches,
            r_norm: 1.0,
            gamma_norm: 1.0,
        })
    }

    pub fn with(mut self, var: SweepVar, x: f64) -> CliResult<Self> {
        match var {
            SweepVar::SnrDb => self.gamma_bar = 10f64.powf(x / 10.0),
            SweepVar::KDb => self.k = 10f64.powf(x / 10.0),
            SweepVar::Delta => self.delta = x,
            SweepVar::P => {
                let phi = match self.phase {
                    PhaseDistribution::TruncatedUniform { phi, .. } => phi,
                    PhaseDistribution::Uniform => 0.0,
                    _ => return Err(CliError::invalid("sweep over p needs a uniform or trunc phase")),
                };
                self.phase = PhaseDistribution::TruncatedUniform { p: x, phi };
            }
            SweepVar::Eta => {
                let centered_at_pi = match self.phase {
                    PhaseDistribution::VonMises { centered_at_pi, .. } => centered_at_pi,
                    PhaseDistribution::Uniform => true,
                    _ => return Err(CliError::invalid("sweep over eta needs a uniform or vm phase")),
                };
                self.phase = PhaseDistribution::VonMises { eta: x, centered_at_pi };
            }
            SweepVar::RNorm => self.r_norm = x,
            SweepVar::GammaNorm => self.gamma_norm = x,
        }
        Ok(self)
    }

    pub fn model(&self) -> CliResult<ChannelModel> {
        Ok(ChannelModel::new(self.k, self.delta, self.gamma_bar)?
            .with_phase(self.phase)?
            .with_n0(self.n0)?)
    }

    pub fn link(&self) -> CliResult<LinkConfig> {
        Ok(LinkConfig::iid(self.model()?, self.branches)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "K": self.k,
            "delta": self.delta,
            "gamma_bar": self.gamma_bar,
            "snr_db": 10.0 * self.gamma_bar.log10(),
            "n0": self.n0,
            "phase": phase_label(&self.phase),
            "branches": self.branches,
        })
    }
}

/// The sweep points, or the single base point when there is no sweep.
pub fn points(base: Point, sweep: Option<&SweepSpec>) -> CliResult<Vec<(Option<f64>, Point)>> {
    match sweep {
        None => Ok(vec![(None, base)]),
        Some(s) => s
            .values()
            .into_iter()
            .map(|x| Ok((Some(x), base.with(s.variable, x)?)))
            .collect(),
    }
}

pub fn reject_sweep_vars(sweep: Option<&SweepSpec>, allowed: &[SweepVar], command: &str) -> CliResult<()> {
    if let Some(s) = sweep {
        if !allowed.contains(&s.variable) {
            return Err(CliError::invalid(format!(
                "sweep variable {} does not apply to {command}",
                s.variable.name()
            )));
        }
    }
    Ok(())
}

/// Leading `x` column when sweeping.
pub fn columns(sweep: Option<&SweepSpec>, rest: &[&str]) -> Vec<String> {
    sweep
        .map(|_| "x")
        .into_iter()
        .chain(rest.iter().copied())
        .map(String::from)
        .collect()
}

pub fn stat_cells(x: Option<f64>, s: Statistic) -> Vec<Cell> {
    x.map(Cell::Num)
        .into_iter()
        .chain([
            Cell::Num(s.value),
            Cell::Text(s.method.as_str().into()),
            Cell::Num(s.error_estimate),
        ])
        .collect()
}

pub fn sweep_json(sweep: Option<&SweepSpec>) -> Value {
    serde_json::to_value(sweep).expect("serializable sweep")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_strings() {
        assert_eq!(parse_phase("uniform").unwrap(), PhaseDistribution::Uniform);
        assert_eq!(
            parse_phase("trunc:p=0.2").unwrap(),
            PhaseDistribution::TruncatedUniform { p: 0.2, phi: 0.0 }
        );
        assert_eq!(
            parse_phase("vm:eta=3,center=zero").unwrap(),
            PhaseDistribution::VonMises { eta: 3.0, centered_at_pi: false }
        );
        for bad in ["trunc", "trunc:p=2", "vm:eta=-1", "vm:eta=1,center=x", "gauss", "uniform:p=1"] {
            assert_eq!(parse_phase(bad).unwrap_err().code, 2, "{bad}");
        }
    }

    #[test]
    fn sweep_application() {
        let base = Point {
            k: 1.0,
            delta: 0.5,
            gamma_bar: 1.0,
            n0: 1.0,
            phase: PhaseDistribution::Uniform,
            branches: 1,
            r_norm: 1.0,
            gamma_norm: 1.0,
        };
        assert_eq!(base.with(SweepVar::KDb, 20.0).unwrap().k, 100.0);
        assert_eq!(
            base.with(SweepVar::Eta, 2.0).unwrap().phase,
            PhaseDistribution::VonMises { eta: 2.0, centered_at_pi: true }
        );
        let t = base.with(SweepVar::P, 0.5).unwrap();
        assert!(t.with(SweepVar::Eta, 1.0).is_err());
    }
}
