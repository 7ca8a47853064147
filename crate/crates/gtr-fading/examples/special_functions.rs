use gtr_fading::specfun;

fn main() -> gtr_fading::Result<()> {
    for (a, b) in [(0.5, 1.0), (3.0, 2.0), (20.0, 25.0), (100.0, 80.0)] {
        let q = specfun::marcum_q1(a, b)?;
        let p = specfun::marcum_p1(a, b)?;
        println!("Q1({a}, {b}) = {q:.12e}   1 - Q1 = {p:.12e}");
    }
    for x in [0.1, 1.0, 10.0, 700.0] {
        println!(
            "x = {x:<5}  e^-x I0 = {:.12e}  e^-x I1 = {:.12e}  E1 = {:.12e}",
            specfun::bessel_i0_scaled(x)?,
            specfun::bessel_i1_scaled(x)?,
            specfun::gamma_upper_zero(x)?
        );
    }
    println!("L_3(-2) = {:.12}", specfun::laguerre(3, -2.0)?);
    Ok(())
}
