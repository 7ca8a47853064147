//! Monte Carlo sampling of the two-ray channel.
//!
//! Work is split across a fixed number of workers. Worker `w` draws from a
//! ChaCha8 stream seeded with `seed` and stream id `w`, and handles
//! `n/W` samples (one more when `w < n mod W`). Partial results are merged in
//! worker order, so output depends only on `(seed, workers, n_samples)`.
//!
//! Uniforms come from `rand`'s 53-bit conversion. Normals use the Box–Muller
//! transform, and every transcendental call goes through `libm`, so the
//! sample stream is the same on every platform.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{ChannelModel, PhaseDistribution};
use crate::perf::{awgn_sep, LinkConfig, Modulation};

pub const DEFAULT_WORKERS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(n_samples: u64, seed: u64, workers: usize) -> Result<Self> {
        let c = Self {
            n_samples,
            seed,
            workers,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_default_workers(n_samples: u64, seed: u64) -> Result<Self> {
        Self::new(n_samples, seed, DEFAULT_WORKERS)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be >= 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        Ok(())
    }

    fn share(&self, w: usize) -> u64 {
        let wl = self.workers as u64;
        self.n_samples / wl + u64::from((w as u64) < self.n_samples % wl)
    }
}

fn worker_rng(seed: u64, w: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(w as u64);
    rng
}

fn run_workers<T, F>(cfg: &SimConfig, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..cfg.workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = worker_rng(cfg.seed, w);
            work(&mut rng, cfg.share(w))
        })
        .collect()
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Running mean/variance (Welford) plus compensated raw power sums.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    powers: [CompensatedSum; 3],
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
        let x2 = x * x;
        self.powers[0].add(x2);
        self.powers[1].add(x2 * x);
        self.powers[2].add(x2 * x2);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
        for (a, b) in self.powers.iter_mut().zip(o.powers.iter()) {
            a.add(b.value());
        }
    }

    fn merged(parts: &[Moments]) -> Moments {
        let mut m = Moments::default();
        for p in parts {
            m.merge(p);
        }
        m
    }

    fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    fn estimate(&self) -> McEstimate {
        McEstimate {
            estimate: self.mean,
            std_error: (self.variance() / self.n as f64).sqrt(),
            n: self.n,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: u64,
}

impl McEstimate {
    /// `(estimate − reference)/std_error`.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - reference) / self.std_error
        }
    }
}

/// Moments and sorted samples of a simulated quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    /// Raw moments `E[x²]`, `E[x³]`, `E[x⁴]`.
    pub raw_moments: [f64; 3],
    sorted: Vec<f64>,
}

impl EmpiricalSummary {
    fn from_parts(parts: Vec<(Moments, Vec<f64>)>) -> Self {
        let mut sorted = Vec::with_capacity(parts.iter().map(|p| p.1.len()).sum());
        let mut moments = Vec::with_capacity(parts.len());
        for (m, v) in parts {
            moments.push(m);
            sorted.extend(v);
        }
        sorted.par_sort_unstable_by(f64::total_cmp);
        let m = Moments::merged(&moments);
        let nf = m.n as f64;
        Self {
            n: m.n,
            mean: m.mean,
            variance: m.variance(),
            raw_moments: [
                m.powers[0].value() / nf,
                m.powers[1].value() / nf,
                m.powers[2].value() / nf,
            ],
            sorted,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `≤ x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    fn ecdf_below(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let i = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[i]
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen::<f64>()
}

/// Pair of independent standard normals by Box–Muller.
fn normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let (s, c) = libm::sincos(TAU * u2);
    (r * c, r * s)
}

/// Von Mises variate on `[0, 2π)` by the Best–Fisher rejection method.
pub fn sample_von_mises<R: Rng + ?Sized>(eta: f64, center: f64, rng: &mut R) -> f64 {
    let theta = if eta < 1e-12 {
        TAU * rng.gen::<f64>()
    } else {
        let tau = 1.0 + libm::sqrt(1.0 + 4.0 * eta * eta);
        let rho = (tau - libm::sqrt(2.0 * tau)) / (2.0 * eta);
        let r = (1.0 + rho * rho) / (2.0 * rho);
        let f = loop {
            let u1: f64 = rng.gen();
            let u2: f64 = rng.gen();
            let z = libm::cos(PI * u1);
            let f = (1.0 + r * z) / (r + z);
            let c = eta * (r - f);
            if c * (2.0 - c) - u2 > 0.0 || libm::log(c / u2) + 1.0 - c >= 0.0 {
                break f;
            }
        };
        let u3: f64 = rng.gen();
        let a = libm::acos(f.clamp(-1.0, 1.0));
        center + if u3 < 0.5 { -a } else { a }
    };
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn sample_phase(phase: PhaseDistribution, rng: &mut ChaCha8Rng) -> f64 {
    match phase {
        PhaseDistribution::Uniform => TAU * uniform(rng),
        PhaseDistribution::TruncatedUniform { p, phi } => {
            let (lo, hi) = PhaseDistribution::truncated_support(p, phi);
            lo + (hi - lo) * uniform(rng)
        }
        PhaseDistribution::VonMises {
            eta,
            centered_at_pi,
        } => sample_von_mises(eta, if centered_at_pi { PI } else { 0.0 }, rng),
    }
}

/// One draw of `|V₁e^{jφ₁} + V₂e^{j(φ₁+α)} + X + jY|²`.
fn sample_power(model: &ChannelModel, v: (f64, f64), rng: &mut ChaCha8Rng) -> f64 {
    let phi1 = TAU * uniform(rng);
    let alpha = sample_phase(model.phase(), rng);
    let (x, y) = normal_pair(rng);
    let sigma = model.sigma();
    let (s1, c1) = libm::sincos(phi1);
    let (s2, c2) = libm::sincos(phi1 + alpha);
    let re = v.0 * c1 + v.1 * c2 + sigma * x;
    let im = v.0 * s1 + v.1 * s2 + sigma * y;
    re * re + im * im
}

/// Envelope samples `r = |V_r|` for one channel.
pub fn sample_envelope(model: &ChannelModel, cfg: &SimConfig) -> Result<EmpiricalSummary> {
    model.validate()?;
    cfg.validate()?;
    let v = model.los_amplitudes();
    let parts = run_workers(cfg, |rng, n| {
        let mut m = Moments::default();
        let mut out = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let r = libm::sqrt(sample_power(model, v, rng));
            m.push(r);
            out.push(r);
        }
        (m, out)
    });
    Ok(EmpiricalSummary::from_parts(parts))
}

/// Applies `h` to MRC output SNRs `γ = Σ rᵢ²/N₀ᵢ` and averages.
fn average_over_snr<H>(link: &LinkConfig, cfg: &SimConfig, h: H) -> Result<McEstimate>
where
    H: Fn(f64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let branches: Vec<(ChannelModel, (f64, f64))> = link
        .branches()
        .iter()
        .map(|b| (*b, b.los_amplitudes()))
        .collect();
    let parts = run_workers(cfg, |rng, n| -> Result<Moments> {
        let mut m = Moments::default();
        for _ in 0..n {
            let mut g = 0.0;
            for (b, v) in &branches {
                g += sample_power(b, *v, rng) / b.n0();
            }
            m.push(h(g)?);
        }
        Ok(m)
    });
    let parts: Result<Vec<Moments>> = parts.into_iter().collect();
    Ok(Moments::merged(&parts?).estimate())
}

/// Empirical mean of the combined SNR.
pub fn mc_mean_snr(link: &LinkConfig, cfg: &SimConfig) -> Result<McEstimate> {
    average_over_snr(link, cfg, Ok)
}

/// Symbol error probability as the sample mean of the AWGN error
/// probability at the simulated SNR.
pub fn mc_sep(modulation: Modulation, link: &LinkConfig, cfg: &SimConfig) -> Result<McEstimate> {
    modulation.validate()?;
    average_over_snr(link, cfg, |g| awgn_sep(modulation, g))
}

/// Sample mean of `log₂(1+γ)`.
pub fn mc_capacity(link: &LinkConfig, cfg: &SimConfig) -> Result<McEstimate> {
    average_over_snr(link, cfg, |g| Ok(libm::log1p(g) * std::f64::consts::LOG2_E))
}

/// Upper bound on the Kolmogorov–Smirnov distance between the samples and
/// `cdf`, from `grid` sample quantiles. Between consecutive grid points both
/// cdfs are monotone, so the bound is rigorous; its slack shrinks like
/// `1/grid`.
pub fn ks_distance<F>(summary: &EmpiricalSummary, cdf: F, grid: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let n = summary.sorted.len();
    if n == 0 {
        return Err(Error::invalid("ks_distance needs at least one sample"));
    }
    let grid = grid.clamp(2, n.max(2));
    let mut xs: Vec<f64> = (0..grid)
        .map(|j| summary.sorted[((j as f64 / (grid - 1) as f64) * (n - 1) as f64).round() as usize])
        .collect();
    xs.dedup();
    let fs: Vec<f64> = xs
        .par_iter()
        .map(|&x| cdf(x))
        .collect::<Result<Vec<_>>>()?;
    let mut d = fs[0].max(1.0 - fs[fs.len() - 1]);
    for i in 0..xs.len() {
        d = d.max((summary.ecdf(xs[i]) - fs[i]).abs());
        d = d.max((summary.ecdf_below(xs[i]) - fs[i]).abs());
        if i + 1 < xs.len() {
            d = d.max(summary.ecdf_below(xs[i + 1]) - fs[i]);
            d = d.max(fs[i + 1] - summary.ecdf(xs[i]));
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::envelope_cdf;
    use crate::specfun::bessel_ratio_i1_i0;
    use approx::assert_relative_eq;

    fn model(k: f64, d: f64, g: f64) -> ChannelModel {
        ChannelModel::new(k, d, g).unwrap()
    }

    #[test]
    fn worker_shares_cover_all_samples() {
        let c = SimConfig::new(1003, 1, 7).unwrap();
        let total: u64 = (0..7).map(|w| c.share(w)).sum();
        assert_eq!(total, 1003);
        assert!(SimConfig::new(0, 1, 1).is_err());
        assert!(SimConfig::new(1, 1, 0).is_err());
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 + 1e6).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..333].iter().for_each(|&x| a.push(x));
        xs[333..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_relative_eq!(a.mean, all.mean, max_relative = 1e-15);
        assert_relative_eq!(a.variance(), all.variance(), max_relative = 1e-9);
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
        assert_relative_eq!(all.variance(), var, max_relative = 1e-9);
    }

    #[test]
    fn reproducible_and_worker_dependent() {
        let m = model(10.0, 1.0, 1.0);
        let c = SimConfig::new(10_000, 42, 4).unwrap();
        let a = sample_envelope(&m, &c).unwrap();
        let b = sample_envelope(&m, &c).unwrap();
        assert_eq!(a, b);
        let other = sample_envelope(&m, &SimConfig::new(10_000, 43, 4).unwrap()).unwrap();
        assert_ne!(a.mean, other.mean);
    }

    #[test]
    fn rayleigh_envelope_ks() {
        let m = model(0.0, 0.0, 2.0);
        let n = 1_000_000;
        let s = sample_envelope(&m, &SimConfig::with_default_workers(n, 7).unwrap()).unwrap();
        let p = m.mean_power();
        let d = ks_distance(&s, |r| Ok(-(-r * r / p).exp_m1()), 5000).unwrap();
        assert!(d <= 1.63 / (n as f64).sqrt(), "{d}");
    }

    #[test]
    fn envelope_power_matches_mean_power() {
        let m = model(10.0, 1.0, 3.0);
        let n = 1_000_000u64;
        let s = sample_envelope(&m, &SimConfig::with_default_workers(n, 11).unwrap()).unwrap();
        let ratio = s.raw_moments[0] / m.mean_power();
        assert!((ratio - 1.0).abs() < 4.0 / (n as f64).sqrt(), "{ratio}");
    }

    #[test]
    fn gtr_envelope_ks() {
        let m = model(10.0, 1.0, 1.0);
        let s = sample_envelope(&m, &SimConfig::with_default_workers(1_000_000, 3).unwrap()).unwrap();
        let d = ks_distance(&s, |r| Ok(envelope_cdf(r, &m)?.value), 3000).unwrap();
        assert!(d <= 0.002, "{d}");
    }

    #[test]
    fn von_mises_moments() {
        let n = 1_000_000;
        let mut rng = worker_rng(5, 0);
        let eta = 2.0;
        let c = 1.0;
        let mut s = 0.0;
        for _ in 0..n {
            let a = sample_von_mises(eta, c, &mut rng);
            assert!((0.0..TAU).contains(&a));
            s += (a - c).cos();
        }
        let mean = s / n as f64;
        assert!((mean - bessel_ratio_i1_i0(eta)).abs() < 4.0 / (n as f64).sqrt());

        let eta = 4.0;
        let (mut cs, mut sn) = (0.0, 0.0);
        for _ in 0..n {
            let a = sample_von_mises(eta, c, &mut rng);
            cs += a.cos();
            sn += a.sin();
        }
        let dir = sn.atan2(cs);
        assert!((dir - c).abs() < 5.0 / ((n as f64).sqrt() * eta.sqrt()));
    }

    #[test]
    fn von_mises_zero_concentration_is_uniform() {
        let n = 1_000_000;
        let mut rng = worker_rng(9, 0);
        let mut v: Vec<f64> = (0..n).map(|_| sample_von_mises(0.0, 2.0, &mut rng)).collect();
        v.sort_by(f64::total_cmp);
        let d = v
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = x / TAU;
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt());
    }

    #[test]
    fn deterministic_channel_limits() {
        let g = 4.0;
        let link = LinkConfig::single(model(1e6, 0.0, g));
        let c = SimConfig::with_default_workers(20_000, 1).unwrap();
        let p = mc_sep(Modulation::Mpsk { m: 2 }, &link, &c).unwrap();
        assert!((p.estimate - awgn_sep(Modulation::Mpsk { m: 2 }, g).unwrap()).abs() < 1e-4);
        let cap = mc_capacity(&link, &c).unwrap();
        assert!((cap.estimate - (1.0 + g).log2()).abs() < 1e-3);
    }

    #[test]
    fn low_snr_capacity() {
        let link = LinkConfig::single(model(10.0, 1.0, 0.01));
        let c = SimConfig::with_default_workers(200_000, 2).unwrap();
        let cap = mc_capacity(&link, &c).unwrap();
        let r = cap.estimate / (0.01 * std::f64::consts::LOG2_E);
        assert!((r - 1.0).abs() < 0.02, "{r}");
    }

    #[test]
    fn von_mises_mean_snr_shift() {
        let m = model(10.0, 1.0, 1.0)
            .with_phase(PhaseDistribution::VonMises {
                eta: 3.0,
                centered_at_pi: true,
            })
            .unwrap();
        let e = mc_mean_snr(&LinkConfig::single(m), &SimConfig::with_default_workers(1_000_000, 4).unwrap())
            .unwrap();
        let want = crate::models::mean_snr(&m).unwrap().value;
        assert!(e.z_score(want).abs() < 4.0, "{} vs {want}", e.estimate);
    }

    #[test]
    fn ks_bound_is_an_upper_bound() {
        let m = model(0.0, 0.0, 1.0);
        let s = sample_envelope(&m, &SimConfig::new(2000, 1, 2).unwrap()).unwrap();
        let cdf = |r: f64| -(-r * r).exp_m1();
        let exact = s
            .samples()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / 2000.0).abs().max(((i + 1) as f64 / 2000.0 - f).abs())
            })
            .fold(0.0, f64::max);
        let bound = ks_distance(&s, |r| Ok(cdf(r)), 2000).unwrap();
        assert!(bound >= exact - 1e-15);
        let coarse = ks_distance(&s, |r| Ok(cdf(r)), 50).unwrap();
        assert!(coarse >= exact - 1e-15);
        assert_eq!(s.quantile(0.0), s.samples()[0]);
        assert_eq!(s.ecdf(f64::INFINITY), 1.0);
    }
}
