use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "gtr",
    version,
    about = "Generalized two-ray fading: statistics, error rates, capacity and Monte Carlo runs"
)]
pub struct Cli {
    /// Flat key = value file mirroring the long flags; flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Envelope and SNR statistics
    #[command(args_override_self = true)]
    Stats(StatsArgs),
    /// Symbol error probability
    #[command(args_override_self = true)]
    Sep(SepArgs),
    /// Ergodic capacity, asymptotes and capacity loss
    #[command(args_override_self = true)]
    Capacity(CapacityArgs),
    /// Monte Carlo validation runs
    #[command(subcommand)]
    Mc(McCommand),
    /// Data and plot script for a named figure
    #[command(args_override_self = true)]
    Figure(FigureArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// LOS to diffuse power ratio (linear)
    #[arg(long = "K", overrides_with = "k_db")]
    pub k: Option<f64>,
    /// LOS to diffuse power ratio in dB
    #[arg(long = "K-db", overrides_with = "k", allow_hyphen_values = true)]
    pub k_db: Option<f64>,
    /// LOS balance 2V₁V₂/(V₁²+V₂²)
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Average SNR per branch in dB
    #[arg(long = "snr-db", overrides_with = "gamma_bar", allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Average SNR per branch (linear)
    #[arg(long = "gamma-bar", overrides_with = "snr_db")]
    pub gamma_bar: Option<f64>,
    /// Phase law: uniform | trunc:p=P[,phi=F] | vm:eta=E[,center=pi|zero]
    #[arg(long, default_value = "uniform")]
    pub phase: String,
    /// Noise power spectral density
    #[arg(long, default_value_t = 1.0)]
    pub n0: f64,
    /// Number of i.i.d. MRC branches
    #[arg(long, default_value_t = 1)]
    pub branches: usize,
}

pub const DEFAULT_K: f64 = 10.0;
pub const DEFAULT_SNR_DB: f64 = 10.0;

impl ModelArgs {
    pub fn k_linear(&self) -> f64 {
        match (self.k, self.k_db) {
            (Some(k), _) => k,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => DEFAULT_K,
        }
    }

    pub fn gamma_bar_linear(&self) -> f64 {
        match (self.gamma_bar, self.snr_db) {
            (Some(g), _) => g,
            (None, Some(db)) => 10f64.powf(db / 10.0),
            (None, None) => 10f64.powf(DEFAULT_SNR_DB / 10.0),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    #[value(name = "snr_db")]
    SnrDb,
    #[value(name = "K_db")]
    #[serde(rename = "K_db")]
    KDb,
    #[value(name = "delta")]
    Delta,
    #[value(name = "p")]
    P,
    #[value(name = "eta")]
    Eta,
    #[value(name = "r_norm")]
    RNorm,
    #[value(name = "gamma_norm")]
    GammaNorm,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::SnrDb => "snr_db",
            SweepVar::KDb => "K_db",
            SweepVar::Delta => "delta",
            SweepVar::P => "p",
            SweepVar::Eta => "eta",
            SweepVar::RNorm => "r_norm",
            SweepVar::GammaNorm => "gamma_norm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, start: f64, stop: f64, points: usize, scale: Scale) -> CliResult<Self> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(CliError::invalid(format!(
                "sweep: start < stop required, got {start}..{stop}"
            )));
        }
        if points < 2 {
            return Err(CliError::invalid(format!("sweep: points >= 2 required, got {points}")));
        }
        if scale == Scale::Log && start <= 0.0 {
            return Err(CliError::invalid("sweep: log scale needs start > 0"));
        }
        Ok(Self {
            variable,
            start,
            stop,
            points,
            scale,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

/// `var:start:stop:points[:lin|log]`
pub fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(4..=5).contains(&parts.len()) {
        return Err("expected var:start:stop:points[:lin|log]".into());
    }
    let variable = SweepVar::from_str(parts[0], false)
        .map_err(|_| format!("unknown sweep variable '{}'", parts[0]))?;
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    let start = num(parts[1])?;
    let stop = num(parts[2])?;
    let points = parts[3]
        .parse::<usize>()
        .map_err(|e| format!("bad point count '{}': {e}", parts[3]))?;
    let scale = match parts.get(4).copied() {
        None | Some("lin") | Some("linear") => Scale::Linear,
        Some("log") => Scale::Log,
        Some(o) => return Err(format!("unknown scale '{o}'")),
    };
    SweepSpec::new(variable, start, stop, points, scale).map_err(|e| e.message)
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Pdf,
    Cdf,
    SnrPdf,
    Mgf,
    Moment,
    Aof,
    Lcr,
    Aod,
    MeanSnr,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Envelope level normalized to √P̄ᵣ (pdf, cdf, lcr, aod)
    #[arg(long = "r-norm", default_value_t = 1.0)]
    pub r_norm: f64,
    /// SNR normalized to γ̄ (snr-pdf)
    #[arg(long = "gamma-norm", default_value_t = 1.0)]
    pub gamma_norm: f64,
    /// MGF argument
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub s: f64,
    /// Moment order
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    /// Maximum Doppler shift in Hz (lcr, aod)
    #[arg(long, default_value_t = 1.0)]
    pub fd: f64,
    /// var:start:stop:points[:lin|log]
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<SweepSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SepArgs {
    /// mpsk | mqam | mdpsk | mfsk
    #[arg(long, default_value = "mqam")]
    pub modulation: String,
    /// Constellation size M
    #[arg(long, default_value_t = 16)]
    pub order: u32,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<SweepSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Asymptote {
    Low,
    Rice,
    Gtr,
    GtrApprox,
    GtrDelta1,
}

impl Asymptote {
    pub fn column(&self) -> &'static str {
        match self {
            Asymptote::Low => "asym_low",
            Asymptote::Rice => "asym_rice",
            Asymptote::Gtr => "asym_gtr",
            Asymptote::GtrApprox => "asym_gtr_approx",
            Asymptote::GtrDelta1 => "asym_gtr_delta1",
        }
    }
}

#[derive(Args, Debug)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Asymptote columns to add
    #[arg(long, value_enum, value_delimiter = ',')]
    pub asymptote: Vec<Asymptote>,
    /// Report the high-SNR capacity loss against Rician fading instead
    #[arg(long)]
    pub loss: bool,
    #[arg(long, value_parser = parse_sweep)]
    pub sweep: Option<SweepSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Defaults to $GTR_SEED, then 1
    #[arg(long, env = "GTR_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = gtr_fading::mcsim::DEFAULT_WORKERS)]
    pub workers: usize,
    /// Output file; stdout when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;

#[derive(Subcommand, Debug)]
pub enum McCommand {
    /// Envelope samples against the analytic cdf
    #[command(args_override_self = true)]
    Envelope {
        #[command(flatten)]
        common: McArgs,
        /// Grid size of the Kolmogorov–Smirnov bound
        #[arg(long = "ks-grid", default_value_t = 2000)]
        ks_grid: usize,
    },
    /// Symbol error probability against the MGF result
    #[command(args_override_self = true)]
    Sep {
        #[command(flatten)]
        common: McArgs,
        #[arg(long, default_value = "mqam")]
        modulation: String,
        #[arg(long, default_value_t = 16)]
        order: u32,
    },
    /// Ergodic capacity against the MGF result
    #[command(args_override_self = true)]
    Capacity {
        #[command(flatten)]
        common: McArgs,
    },
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    /// 1a, 1, 3, 4, 5, 6, 7 or 8
    pub id: String,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// K standing in for K → ∞
    #[arg(long = "k-inf", default_value_t = 1e4)]
    pub k_inf: f64,
    /// Points per curve
    #[arg(long, default_value_t = 121)]
    pub points: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s = parse_sweep("r_norm:0.01:1:3:log").unwrap();
        assert_eq!(s.variable, SweepVar::RNorm);
        let v = s.values();
        assert!((v[1] - 0.1).abs() < 1e-15);
        assert_eq!(parse_sweep("K_db:0:40:5").unwrap().values(), vec![0.0, 10.0, 20.0, 30.0, 40.0]);
        assert!(parse_sweep("snr_db:1:0:5").is_err());
        assert!(parse_sweep("snr_db:0:1:1").is_err());
        assert!(parse_sweep("foo:0:1:3").is_err());
        assert!(parse_sweep("delta:0:1:3:log").is_err());
    }
}
