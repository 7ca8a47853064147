//! Symbol error probability for the four modulation families, with MRC.

use gtr_fading::models::ChannelModel;
use gtr_fading::perf::{self, LinkConfig, Modulation};

fn main() -> gtr_fading::Result<()> {
    let schemes = [
        Modulation::Mpsk { m: 8 },
        Modulation::Mqam { m: 16 },
        Modulation::Mdpsk { m: 4 },
        Modulation::Mfsk { m: 4 },
    ];
    for snr_db in [10.0, 20.0, 30.0] {
        let model = ChannelModel::new(10.0, 1.0, 10f64.powf(snr_db / 10.0))?;
        print!("{snr_db:>4} dB");
        for m in schemes {
            let s = perf::sep(m, &LinkConfig::single(model))?;
            print!("  {m}: {:.3e}", s.value);
        }
        println!();
    }

    let model = ChannelModel::new(10.0, 1.0, 100.0)?;
    for l in [1, 2, 4] {
        let link = LinkConfig::iid(model, l)?;
        println!("16-QAM, L = {l}: {:.3e}", perf::sep(Modulation::Mqam { m: 16 }, &link)?.value);
    }

    println!(
        "DBPSK closed form {:.6e}, high-SNR {:.6e}",
        perf::ber_dbpsk_closed_form(&model)?,
        perf::ber_dbpsk_high_snr(&model)
    );
    Ok(())
}
