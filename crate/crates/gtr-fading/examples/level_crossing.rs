use gtr_fading::models::{self, ChannelModel, MobilityConfig};

fn main() -> gtr_fading::Result<()> {
    let mobility = MobilityConfig::new(100.0)?;
    for delta in [0.0, 0.5, 1.0] {
        let model = ChannelModel::new(10.0, delta, 1.0)?;
        println!("delta = {delta}");
        for r_norm in [0.1, 0.3, 1.0] {
            let r = model.radius_from_normalized(r_norm);
            let lcr = models::level_crossing_rate(r, &model, &mobility)?;
            let aod = models::average_outage_duration(r, &model, &mobility)?;
            println!("  r_norm {r_norm:<4} lcr {:>10.4} /s   aod {:>10.4e} s", lcr.value, aod.value);
        }
    }
    Ok(())
}
