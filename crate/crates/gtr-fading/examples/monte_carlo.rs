//! Seeded, worker-parallel simulation against the analytic results.

use gtr_fading::mcsim::{self, SimConfig};
use gtr_fading::models::{self, ChannelModel, PhaseDistribution};
use gtr_fading::perf::{self, LinkConfig, Modulation};

fn main() -> gtr_fading::Result<()> {
    let cfg = SimConfig::with_default_workers(400_000, 42)?;
    let model = ChannelModel::new(10.0, 1.0, 10.0)?
        .with_phase(PhaseDistribution::VonMises { eta: 3.0, centered_at_pi: true })?;

    let summary = mcsim::sample_envelope(&model, &cfg)?;
    let ks = mcsim::ks_distance(&summary, |r| Ok(models::envelope_cdf(r, &model)?.value), 1000)?;
    let power = models::mean_snr(&model)?.value * model.n0();
    println!("envelope: n = {}, E[r^2] = {:.5} (analytic {power:.5}), KS <= {ks:.5}", summary.n, summary.raw_moments[0]);

    let link = LinkConfig::iid(model, 2)?;
    let qam = Modulation::Mqam { m: 16 };
    let exact = perf::sep(qam, &link)?.value;
    let est = mcsim::mc_sep(qam, &link, &cfg)?;
    println!("16-QAM SEP: {:.5e} +- {:.1e}, analytic {exact:.5e}, z = {:.2}", est.estimate, est.std_error, est.z_score(exact));

    let exact = perf::capacity_ora(&link)?.value;
    let est = mcsim::mc_capacity(&link, &cfg)?;
    println!("capacity: {:.5} +- {:.1e}, analytic {exact:.5}, z = {:.2}", est.estimate, est.std_error, est.z_score(exact));
    Ok(())
}
