//! Envelope and SNR statistics of a two-ray channel.

use gtr_fading::models::{self, ChannelModel};

fn main() -> gtr_fading::Result<()> {
    let model = ChannelModel::new(10.0, 0.9, 10.0)?;

    println!("K = {}, delta = {}, gamma_bar = {}", model.k(), model.delta(), model.gamma_bar());
    println!("{:>8} {:>14} {:>14}", "r_norm", "pdf", "cdf");
    for r_norm in [0.05, 0.1, 0.25, 0.5, 1.0, 1.5] {
        let r = model.radius_from_normalized(r_norm);
        let pdf = models::envelope_pdf(r, &model)?;
        let cdf = models::envelope_cdf(r, &model)?;
        println!("{r_norm:>8} {:>14.6e} {:>14.6e}", pdf.value, cdf.value);
    }

    for k in 1..=3 {
        let m = models::moment(k, &model)?;
        println!("E[gamma^{k}] = {:.6} ({})", m.value, m.method.as_str());
    }
    println!("AoF = {:.6}", models::amount_of_fading(&model)?.value);
    println!("M(-1) = {:.6}", models::mgf(-1.0, &model)?.value);
    println!("f(gamma_bar) = {:.6e}", models::snr_pdf(model.gamma_bar(), &model)?.value);
    Ok(())
}
