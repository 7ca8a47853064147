use gtr_fading::quad::{self, QuadSpec};

fn main() -> gtr_fading::Result<()> {
    let spec = QuadSpec::default().with_rel_tol(1e-12);

    let r = quad::integrate_finite(|x| 4.0 / (1.0 + x * x), 0.0, 1.0, spec).into_result("arctan")?;
    println!("int_0^1 4/(1+x^2) dx = {:.15} (err {:.1e}, {} evals)", r.value, r.error_estimate, r.evals);

    let r = quad::integrate_periodic(|a| (2.0 * a.cos()).exp(), spec).into_result("periodic")?;
    println!("int e^(2 cos a) da / 2pi = {:.15}", r.value / (2.0 * std::f64::consts::PI));

    let r = quad::integrate_semi_infinite(|t| 1.0 / (t * t.sqrt()), 1.0, spec).into_result("tail")?;
    println!("int_1^inf t^-3/2 dt = {:.15}", r.value);
    Ok(())
}
