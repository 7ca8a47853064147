use gtr_fading::models::ChannelModel;
use gtr_fading::perf::{self, AsymptoticRegime, LinkConfig};

fn main() -> gtr_fading::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10}", "snr", "exact", "low", "high");
    for snr_db in [-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0] {
        let model = ChannelModel::new(10.0, 0.5, 10f64.powf(snr_db / 10.0))?;
        let link = LinkConfig::single(model);
        let exact = perf::capacity_ora(&link)?.value;
        let low = perf::capacity_low_snr(&link);
        let high = perf::capacity_high_snr(&model, AsymptoticRegime::GtrExact)?.at_db(snr_db);
        println!("{snr_db:>6} {exact:>10.5} {low:>10.5} {high:>10.5}");
    }

    let model = ChannelModel::new(10.0, 1.0, 100.0)?;
    for l in [1, 2, 4] {
        let c = perf::capacity_ora(&LinkConfig::iid(model, l)?)?;
        println!("L = {l}: {:.5} bit/s/Hz", c.value);
    }
    Ok(())
}
