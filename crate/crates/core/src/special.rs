//! Bessel functions of the first kind for integer order.

use std::f64::consts::PI;

/// `J_n(x)` for integer `n >= 0` and `x >= 0`.
///
/// For moderate `x` the periodic integral `J_n(x) = (1/2π)∫cos(nθ - x sinθ)dθ`
/// is summed with the trapezoid rule, which converges geometrically once the
/// node count exceeds `x + n`. Large arguments use the Hankel expansion.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let x_abs = x.abs();
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let v = if x_abs <= 60.0 {
        let m = (x_abs + n as f64) as usize + 48;
        let m = m + m % 2;
        let mut s = 0.0;
        for k in 0..m {
            let th = 2.0 * PI * k as f64 / m as f64;
            s += (n as f64 * th - x_abs * th.sin()).cos();
        }
        s / m as f64
    } else {
        hankel_asymptotic(n, x_abs)
    };
    sign * v
}

fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    // P ~ Σ (-1)^k a_{2k} / x^{2k}, Q ~ Σ (-1)^k a_{2k+1} / x^{2k+1}
    for k in 1..=16 {
        let kk = (2 * k - 1) as f64;
        term *= (mu - kk * kk) / (k as f64 * 8.0 * x);
        if term.abs() < 1e-17 {
            break;
        }
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let chi = x - (n as f64 / 2.0 + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
