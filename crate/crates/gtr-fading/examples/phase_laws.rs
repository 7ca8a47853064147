//! Truncated and von Mises phase laws push fading past the two-ray model.

use gtr_fading::models::{self, ChannelModel, PhaseDistribution};

fn main() -> gtr_fading::Result<()> {
    let two_ray = ChannelModel::new(1e4, 1.0, 1.0)?;
    let r = two_ray.radius_from_normalized(0.1);

    println!("cdf at r/sqrt(P) = 0.1, K = 1e4, delta = 1");
    for p in [1.0, 0.5, 0.2] {
        let m = two_ray.with_phase(PhaseDistribution::TruncatedUniform { p, phi: 0.0 })?;
        println!(
            "  trunc p = {p:<4} cdf = {:.5e}  mean snr = {:.5}",
            models::envelope_cdf(r, &m)?.value,
            models::mean_snr(&m)?.value
        );
    }
    for eta in [0.0, 2.0, 5.0] {
        let m = two_ray.with_phase(PhaseDistribution::VonMises { eta, centered_at_pi: true })?;
        println!(
            "  vm eta = {eta:<4}   cdf = {:.5e}  mean snr = {:.5}",
            models::envelope_cdf(r, &m)?.value,
            models::mean_snr(&m)?.value
        );
    }
    Ok(())
}
