//! High-SNR capacity loss against Rician fading and the Hankel form of J.

use gtr_fading::perf;

fn main() -> gtr_fading::Result<()> {
    println!("{:>6} {:>6} {:>12} {:>12} {:>10}", "K_dB", "delta", "J", "J_hankel", "loss");
    for k_db in [10.0, 20.0, 30.0, 40.0] {
        let k = 10f64.powf(k_db / 10.0);
        for delta in [0.5, 0.9, 1.0] {
            let j = perf::j_integral(k, delta)?.value;
            let jh = perf::j_integral_hankel(k, delta)?;
            let loss = perf::capacity_loss(k, delta)?;
            println!("{k_db:>6} {delta:>6} {j:>12.5e} {jh:>12.5e} {loss:>10.5}");
        }
    }
    println!("d/dn E[gamma^n] at n = 0, K = 5: {:.6}", perf::rician_moment_derivative(5.0, 10.0)?);
    Ok(())
}
