//! Reference computations used only by tests. Nothing here calls into the
//! library's special functions or quadrature.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Tanh–sinh quadrature on `[a, b]`; tolerates integrable endpoint
/// singularities. Halves the step until two levels agree to `rel_tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    tanh_sinh_tol(f, a, b, rel_tol, 0.0)
}

/// As [`tanh_sinh`], also accepting an absolute change below `abs_tol`.
pub fn tanh_sinh_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    let d = 0.5 * (b - a);
    let t_max = 4.0;
    let term = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        // distance to the nearer endpoint, without cancellation
        let gap = d * (-u.abs()).exp() / cu;
        if gap == 0.0 || w == 0.0 {
            return 0.0;
        }
        let x = if t >= 0.0 { b - gap } else { a + gap };
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            d * w * fx
        }
    };
    let mut h = 1.0;
    let mut sum = term(0.0);
    let mut k = 1.0;
    while k * h <= t_max {
        sum += term(k * h) + term(-k * h);
        k += 1.0;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut t = h;
        while t <= t_max {
            sum += term(t) + term(-t);
            t += 2.0 * h;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= (rel_tol * cur.abs()).max(abs_tol) {
            return cur;
        }
        prev = cur;
    }
    panic!("tanh_sinh on [{a}, {b}] did not reach {rel_tol} (abs {abs_tol})");
}

/// `(1/2π)∫₀^{2π} f` by the N-point trapezoid rule (spectral for smooth
/// periodic `f`).
pub fn periodic_mean<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() / n as f64
}

/// `e^{−x} I_ν(x)` for ν ∈ {0, 1} from the integral representation.
pub fn bessel_scaled(nu: u32, x: f64) -> f64 {
    let n = 64 + (20.0 * x.abs().sqrt()) as usize;
    periodic_mean(|t| (x * (t.cos() - 1.0)).exp() * (nu as f64 * t).cos(), n)
}

/// `E₁(x)`: power series below 1, Lentz continued fraction above.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Rician MGF at effective LOS ratio `kbar`, with the diffuse power of a
/// model of ratio `k` and mean SNR `gamma_bar`.
pub fn rician_mgf(s: f64, kbar: f64, k: f64, gamma_bar: f64) -> f64 {
    let den = 1.0 + k - s * gamma_bar;
    (1.0 + k) / den * (kbar * s * gamma_bar / den).exp()
}

/// Diffuse variance per dimension for mean power `gamma_bar·n0`.
pub fn sigma2(k: f64, gamma_bar: f64, n0: f64) -> f64 {
    gamma_bar * n0 / (2.0 * (1.0 + k))
}

/// Rician envelope density with LOS amplitude `v` and variance `s2`.
pub fn rician_pdf(r: f64, v: f64, s2: f64) -> f64 {
    let z = r * v / s2;
    r / s2 * (-(r - v) * (r - v) / (2.0 * s2)).exp() * bessel_scaled(0, z)
}

/// Richardson-extrapolated finite differences (orders 1 to 3). Returns the
/// estimate and its error.
pub fn ridders<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64, order: u32) -> (f64, f64) {
    const CON: f64 = 1.4;
    const NTAB: usize = 12;
    let stencil = |h: f64| -> f64 {
        match order {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
            _ => panic!("order {order} unsupported"),
        }
    };
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = stencil(h);
    let mut best = a[0][0];
    let mut err = f64::MAX;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = stencil(h);
        let mut fac = CON * CON;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON * CON;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    (best, err)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}
