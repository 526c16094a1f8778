use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radreact_core::greens::*;
use radreact_core::oracle::{fourier_kernel_3d, fourier_massive_tail_4d};
use radreact_core::quadrature::adaptive;
use radreact_core::worldline::AnalyticMotion;
use radreact_core::{fields, FourVector, MinkowskiDim};

#[test]
fn zero_outside_the_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let r: f64 = rng.gen_range(0.0..50.0);
        let t: f64 = rng.gen_range(-50.0..r);
        for (d, m) in [(3, 0.0), (4, 0.0), (5, 0.0), (6, 0.0), (4, 0.7)] {
            let v = greens_retarded(d, m, t, r).unwrap();
            assert_eq!(v.tail, 0.0);
            assert!(v.sharp.is_none());
        }
    }
}

#[test]
fn sharp_and_tail_dichotomy() {
    for d in 3..=8 {
        let k = GreensKernel::new(d, 0.0).unwrap();
        assert_eq!(k.has_sharp_part(), d % 2 == 0);
        assert_eq!(k.has_tail(), d % 2 == 1);
        let v = greens_retarded(d, 0.0, 2.0, 1.0).unwrap();
        assert_eq!(v.tail != 0.0, d % 2 == 1, "d = {d}");
    }
    let v = greens_retarded(4, 0.5, 2.0, 1.0).unwrap();
    assert!(v.tail != 0.0 && v.sharp.is_some());
}

#[test]
fn three_dimensional_tail_matches_fourier_oracle() {
    for (t, r) in [(2.0, 1.0), (1.0, 0.0), (3.0, 0.5), (5.0, 4.5), (0.8, 0.1)] {
        let g = greens_retarded(3, 0.0, t, r).unwrap().tail;
        let o = fourier_kernel_3d(t, r);
        assert!((g - o).abs() < 1e-6, "({t}, {r}): {g} vs {o}");
    }
    assert!((greens_retarded(3, 0.0, 2.0, 1.0).unwrap().tail - 1.0 / (2.0 * PI * 3f64.sqrt())).abs() < 1e-15);
}

#[test]
fn massive_tail_matches_fourier_oracle() {
    for (m, t, r) in [(1.0, 2.0, 1.0), (0.5, 3.0, 1.0), (2.0, 1.5, 0.5)] {
        let g = greens_retarded(4, m, t, r).unwrap().tail;
        let o = fourier_massive_tail_4d(m, t, r);
        assert!((g - o).abs() < 1e-6, "m={m} ({t}, {r}): {g} vs {o}");
    }
}

#[test]
fn massive_tail_vanishes_as_mass_goes_to_zero() {
    let mut prev = f64::INFINITY;
    for m in [1e-1, 1e-2, 1e-3] {
        let g = greens_retarded(4, m, 3.0, 1.0).unwrap().tail.abs();
        assert!(g < prev);
        prev = g;
    }
    assert!(prev < 1e-6);
}

/// Fourth-order central first and second derivatives.
fn radial_derivatives(v: impl Fn(f64) -> f64, r: f64, h: f64) -> (f64, f64) {
    let (p1, m1, p2, m2, c) = (v(r + h), v(r - h), v(r + 2.0 * h), v(r - 2.0 * h), v(r));
    let d1 = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    let d2 = (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
    (d1, d2)
}

#[test]
fn static_potentials_solve_laplace() {
    for d in [4usize, 5, 6, 7] {
        let n = (d - 1) as f64;
        for r in [0.5, 1.0, 3.0] {
            let v = |r: f64| static_potential(d, 0.0, r).unwrap();
            let (d1, d2) = radial_derivatives(v, r, 1e-3 * r);
            let lap = d2 + (n - 1.0) / r * d1;
            let scale = v(r).abs() / (r * r);
            assert!(lap.abs() < 1e-6 * scale, "d={d} r={r}: {lap}");
        }
    }
    // two-dimensional Laplacian of -ln r, and Helmholtz for the Yukawa form
    for r in [0.5, 2.0] {
        let (d1, d2) = radial_derivatives(|r| static_potential(3, 0.0, r).unwrap(), r, 1e-3 * r);
        assert!((d2 + d1 / r).abs() < 1e-6 / (r * r));
        let m = 0.8;
        let y = |r: f64| static_potential(4, m, r).unwrap();
        let (d1, d2) = radial_derivatives(y, r, 1e-3 * r);
        assert!((d2 + 2.0 * d1 / r - m * m * y(r)).abs() < 1e-6 * y(r) / (r * r));
    }
}

#[test]
fn static_potential_is_time_integrated_kernel() {
    // d = 3: 2π ∫_r^T G dt = arccosh(T/r); the difference between radii converges to -ln 2
    let integrated = |r: f64, cutoff: f64| {
        // t = r cosh s
        let s_max = (cutoff / r).acosh();
        adaptive(|s| 2.0 * PI * greens_retarded(3, 0.0, r * s.cosh(), r).unwrap().tail * r * s.sinh(), 0.0, s_max, 1e-14, 1e-13, 500)
            .unwrap()
            .0
    };
    for r in [0.3, 1.0, 4.0] {
        let diffs: Vec<f64> = [1e3, 1e4, 1e5].iter().map(|&c| integrated(2.0 * r, c) - integrated(r, c)).collect();
        // the cutoff error falls as 1/T²; Richardson in 1/T² between the last two
        let extrapolated = (100.0 * diffs[2] - diffs[1]) / 99.0;
        assert!((extrapolated + 2f64.ln()).abs() < 1e-10, "r={r}: {extrapolated}");
        let v_diff = static_potential(3, 0.0, 2.0 * r).unwrap() - static_potential(3, 0.0, r).unwrap();
        assert!((v_diff + 2f64.ln()).abs() < 1e-14);
    }
}

#[test]
fn coulomb_matches_lienard_wiechert() {
    let w = AnalyticMotion::rest(MinkowskiDim::D4, &[0.0; 3]);
    for r in [0.1, 1.0, 7.5] {
        let x = FourVector::from_slice(&[10.0, 0.0, r, 0.0]).unwrap();
        let a = fields::lw_potential_4d(&w, 1.0, &x).unwrap().a[0];
        assert!((a - static_potential(4, 0.0, r).unwrap()).abs() < 1e-12);
    }
    let w6 = AnalyticMotion::rest(MinkowskiDim::D6, &[0.0; 5]);
    let x = FourVector::from_slice(&[10.0, 0.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
    let a = fields::lw_potential_6d(&w6, 1.0, &x).unwrap().a[0];
    assert!((a - static_potential(6, 0.0, 2.0).unwrap()).abs() < 1e-15);
}

#[test]
fn six_dimensional_static_slope() {
    let pts: Vec<(f64, f64)> = (0..50)
        .map(|i| {
            let r = 10f64.powf(i as f64 / 24.5);
            (r.ln(), static_potential(6, 0.0, r).unwrap().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 * p.0, a.1 + p.0 * p.1));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!((slope + 3.0).abs() < 0.01);
}

#[test]
fn huygens_holds_in_four_dimensions_only() {
    let pulse = SourcePulse::sin4(0.0, 1.0, 1.0, vec![0.0; 3]).unwrap();
    let k4 = GreensKernel::new(4, 0.0).unwrap();
    let r = 5.0;
    for t in [6.01, 7.0, 50.0] {
        assert_eq!(convolve_pulse(&k4, &pulse, t, &[r, 0.0, 0.0]).unwrap(), 0.0);
    }
    assert!(convolve_pulse(&k4, &pulse, 5.5, &[r, 0.0, 0.0]).unwrap() > 0.0);

    let pulse3 = SourcePulse::sin4(0.0, 1.0, 1.0, vec![0.0; 2]).unwrap();
    let k3 = GreensKernel::new(3, 0.0).unwrap();
    let late: Vec<f64> = [6.5, 8.0, 12.0, 20.0, 40.0]
        .iter()
        .map(|&t| convolve_pulse(&k3, &pulse3, t, &[r, 0.0]).unwrap())
        .collect();
    assert!(late.iter().all(|v| *v > 0.0));
    assert!(late.windows(2).all(|w| w[1] < w[0]));
    // late-time field approaches Q/t
    let q = pulse3.total().unwrap();
    for t in [100.0, 300.0, 1000.0] {
        let v = convolve_pulse(&k3, &pulse3, t, &[r, 0.0]).unwrap();
        assert!((v * t / q - 1.0).abs() < 0.05);
    }
}

#[test]
fn three_dimensional_convolution_agrees_with_direct_quadrature() {
    let pulse = SourcePulse::sin4(0.0, 2.0, 1.5, vec![0.0; 2]).unwrap();
    let k3 = GreensKernel::new(3, 0.0).unwrap();
    let (t, r) = (4.0, 1.0);
    let got = convolve_pulse(&k3, &pulse, t, &[r, 0.0]).unwrap();
    // t' ∈ [0, t - r]; substitute t' = t - r - s² to tame the 1/√ endpoint
    let s_max = (t - r).sqrt();
    let direct = adaptive(
        |s| {
            let tp = t - r - s * s;
            let lag = t - tp;
            2.0 * PI * pulse.value(tp) * 2.0 * s / (2.0 * PI * ((lag - r) * (lag + r)).sqrt())
        },
        0.0,
        s_max,
        1e-14,
        1e-12,
        2000,
    )
    .unwrap()
    .0;
    assert!((got - direct).abs() < 1e-9 * direct.abs());
}

#[test]
fn six_dimensional_pulse_reduces_to_static_potential() {
    // slowly varying source: field → p(t - r) V₆(r) + p'(t - r)/(3r²)
    let pulse = SourcePulse::sin4(0.0, 100.0, 1.0, vec![0.0; 5]).unwrap();
    let k6 = GreensKernel::new(6, 0.0).unwrap();
    let r = 2.0;
    let t = 52.0;
    let v = convolve_pulse(&k6, &pulse, t, &[0.0, r, 0.0, 0.0, 0.0]).unwrap();
    let expected = pulse.value(t - r) * static_potential(6, 0.0, r).unwrap() + pulse.derivative(t - r) / (3.0 * r * r);
    assert!((v - expected).abs() < 1e-14);
}

#[test]
fn massive_convolution_tends_to_massless() {
    let pulse = SourcePulse::sin4(0.0, 1.0, 1.0, vec![0.0; 3]).unwrap();
    let k0 = GreensKernel::new(4, 0.0).unwrap();
    let km = GreensKernel::new(4, 1e-3).unwrap();
    let x = [3.0, 0.0, 0.0];
    for t in [3.5, 4.5, 10.0] {
        let a = convolve_pulse(&k0, &pulse, t, &x).unwrap();
        let b = convolve_pulse(&km, &pulse, t, &x).unwrap();
        assert!((a - b).abs() < 1e-5, "t={t}: {a} vs {b}");
    }
}
