//! Independent numerical oracles used by the verification checks.
//!
//! These deliberately take a different route from the production code:
//! Green's function tails are recovered from their spatial Fourier
//! representation rather than from the closed forms.

use std::f64::consts::PI;

use crate::quadrature::GaussLegendre;
use crate::special::bessel_j;

/// `∫_0^K e^{-εk} f(k) dk` on panels of width `panel`, `K = 40/ε`.
fn damped_integral(f: &impl Fn(f64) -> f64, eps: f64, panel: f64, gl: &GaussLegendre) -> f64 {
    let k_max = 40.0 / eps;
    let n = (k_max / panel).ceil() as usize;
    let mut total = 0.0;
    for i in 0..n {
        let a = i as f64 * panel;
        total += gl.integrate(a, a + panel, |k| (-eps * k).exp() * f(k));
    }
    total
}

/// Neville extrapolation to `ε = 0` of values at `ε_j`.
fn extrapolate_to_zero(eps: &[f64], vals: &[f64]) -> f64 {
    let mut p = vals.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (eps[i + m] * p[i] - eps[i] * p[i + 1]) / (eps[i + m] - eps[i]);
        }
    }
    p[0]
}

fn abel_limit(f: impl Fn(f64) -> f64, oscillation: f64) -> f64 {
    let gl = GaussLegendre::new(12);
    let panel = (PI / oscillation).min(0.5);
    let eps: Vec<f64> = (0..5).map(|j| 0.08 / 2f64.powi(j)).collect();
    let vals: Vec<f64> = eps.iter().map(|&e| damped_integral(&f, e, panel, &gl)).collect();
    extrapolate_to_zero(&eps, &vals)
}

/// Retarded kernel of the three-dimensional wave operator from
/// `G(t, r) = (1/2π) ∫_0^∞ J₀(kr) sin(kt) dk`, Abel-summed.
pub fn fourier_kernel_3d(t: f64, r: f64) -> f64 {
    abel_limit(|k| bessel_j(0, k * r) * (k * t).sin(), t + r) / (2.0 * PI)
}

/// Tail of the four-dimensional Klein–Gordon kernel from
/// `G(t, r) = (1/2π² r) ∫_0^∞ k sin(kr) sin(ωt)/ω dk` with the massless
/// shell `sin(kt)/k` subtracted under the integral.
pub fn fourier_massive_tail_4d(mass: f64, t: f64, r: f64) -> f64 {
    let f = |k: f64| {
        let w = (k * k + mass * mass).sqrt();
        let massive = (w * t).sin() / w;
        // sin(ωt)/ω - sin(kt)/k, evaluated stably for small k·t differences
        let massless = if k == 0.0 { t } else { (k * t).sin() / k };
        k * (k * r).sin() * (massive - massless)
    };
    abel_limit(f, t + r) / (2.0 * PI * PI * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dimensional_oracle_matches_closed_form() {
        for (t, r) in [(2.0, 1.0), (1.5, 0.2), (4.0, 3.0), (0.5, 1.0)] {
            let closed = if t > r { 1.0 / (2.0 * PI * (t * t - r * r as f64).sqrt()) } else { 0.0 };
            let o = fourier_kernel_3d(t, r);
            assert!((o - closed).abs() < 1e-6, "({t}, {r}) {o} vs {closed}");
        }
    }
}

/// Classical fourth-order Runge–Kutta for `ż = u`, `u̇ = M u` with a fixed
/// step; returns `(z, u)` at `tau_end` starting from the origin.
pub fn rk4_linear_motion(generator: &nalgebra::DMatrix<f64>, u0: &[f64], tau_end: f64, steps: usize) -> (Vec<f64>, Vec<f64>) {
    let d = u0.len();
    let rhs = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; 2 * d];
        for i in 0..d {
            out[i] = y[d + i];
            out[d + i] = (0..d).map(|j| generator[(i, j)] * y[d + j]).sum();
        }
        out
    };
    let shifted = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    let h = tau_end / steps as f64;
    let mut y = vec![0.0; 2 * d];
    y[d..].copy_from_slice(u0);
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&shifted(&y, &k1, h / 2.0));
        let k3 = rhs(&shifted(&y, &k2, h / 2.0));
        let k4 = rhs(&shifted(&y, &k3, h));
        for i in 0..2 * d {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let u = y.split_off(d);
    (y, u)
}
