//! Quadrature rules: Gauss-Legendre, adaptive Gauss-Kronrod and product
//! grids on spheres of any dimension.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-like initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, w * half))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss-Kronrod (7-15) with a global error target.
///
/// Returns `(value, error_estimate)` or an accuracy error when the interval
/// budget is exhausted before `abs_tol` / `rel_tol` is met.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.abs()) {
        if intervals.len() >= max_intervals {
            return Err(Error::Accuracy {
                requested: abs_tol.max(rel_tol * total.abs()),
                achieved: err,
                context: format!("adaptive quadrature on [{a}, {b}]"),
            });
        }
        // Split the interval with the largest error.
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // Re-sum for a clean total.
    let total: f64 = intervals.iter().map(|iv| iv.2).sum();
    let err: f64 = intervals.iter().map(|iv| iv.3).sum();
    Ok((total, err))
}

fn gk15_vec<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut rg: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let x = h * XGK[j];
        let (lo, hi) = (f(c - x), f(c + x));
        for i in 0..rk.len() {
            let s = lo[i] + hi[i];
            rk[i] += WGK[j] * s;
            if j % 2 == 1 {
                rg[i] += WG[j / 2] * s;
            }
        }
    }
    let err = rk.iter().zip(&rg).map(|(k, g)| ((k - g) * h).abs()).fold(0.0, f64::max);
    (rk.into_iter().map(|v| v * h).collect(), err)
}

/// Vector-valued [`adaptive`]: errors and tolerances use the largest component.
pub fn adaptive_vec<F: FnMut(f64) -> Vec<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(Vec<f64>, f64)> {
    let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (v, e) = gk15_vec(&mut f, a, b);
    let mut total = v.clone();
    let mut err = e;
    let mut intervals = vec![(a, b, v, e)];
    while err > abs_tol.max(rel_tol * norm(&total)) {
        if intervals.len() >= max_intervals {
            return Err(Error::Accuracy {
                requested: abs_tol.max(rel_tol * norm(&total)),
                achieved: err,
                context: format!("adaptive quadrature on [{a}, {b}]"),
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, iv)| if iv.3 > best.1 { (i, iv.3) } else { best });
        let (lo, hi, v0, e0) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15_vec(&mut f, lo, mid);
        let (v2, e2) = gk15_vec(&mut f, mid, hi);
        for i in 0..total.len() {
            total[i] += v1[i] + v2[i] - v0[i];
        }
        err += e1 + e2 - e0;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    let mut total = vec![0.0; total.len()];
    for iv in &intervals {
        for (t, v) in total.iter_mut().zip(&iv.2) {
            *t += v;
        }
    }
    let err = intervals.iter().map(|iv| iv.3).sum();
    Ok((total, err))
}

/// A node on the unit sphere `S^{n-1}` in `n` spatial dimensions.
#[derive(Debug, Clone)]
pub struct SphereNode {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Product quadrature on `S^{n-1}`: Gauss-Legendre in each polar angle
/// (with the `sin^k` Jacobian folded into the weight) and the trapezoid rule
/// in the azimuth. `order` sets the number of polar nodes; the azimuth uses
/// `2 * order` nodes.
pub fn sphere_grid(n: usize, order: usize) -> Vec<SphereNode> {
    assert!(n >= 2, "sphere grids need at least two spatial dimensions");
    let n_phi = 2 * order;
    let gl = GaussLegendre::new(order);
    let polar: Vec<(f64, f64)> = gl.mapped(0.0, PI).collect();
    let polar_count = n - 2;
    // Rescale each polar rule so that ∫ sin^k θ dθ is reproduced exactly;
    // the weights then sum to the sphere area to rounding.
    let polar_scale: Vec<f64> = (0..=n)
        .map(|k| {
            let approx: f64 = polar.iter().map(|(t, w)| w * t.sin().powi(k as i32)).sum();
            sine_power_integral(k) / approx
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; polar_count];
    loop {
        // Hyperspherical coordinates: θ_1..θ_{n-2} polar, φ azimuth.
        let mut w_polar = 1.0;
        let mut sin_prod = 1.0;
        let mut prefix = Vec::with_capacity(n);
        for (k, &i) in idx.iter().enumerate() {
            let (theta, w) = polar[i];
            let power = (n - 2 - k) as i32;
            w_polar *= w * theta.sin().powi(power) * polar_scale[power as usize];
            prefix.push(sin_prod * theta.cos());
            sin_prod *= theta.sin();
        }
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            let mut dir = prefix.clone();
            dir.push(sin_prod * phi.cos());
            dir.push(sin_prod * phi.sin());
            out.push(SphereNode {
                direction: dir,
                weight: w_polar * 2.0 * PI / n_phi as f64,
            });
        }
        // Odometer increment over the polar indices.
        let mut k = 0;
        loop {
            if k == polar_count {
                return out;
            }
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `∫_0^π sin^k θ dθ = √π Γ((k+1)/2) / Γ(k/2 + 1)`.
fn sine_power_integral(k: usize) -> f64 {
    use crate::units::gamma_half_integer;
    PI.sqrt() * gamma_half_integer(k + 1) / gamma_half_integer(k + 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::unit_sphere_area;

    #[test]
    fn gauss_legendre_exactness() {
        let gl = GaussLegendre::new(6);
        // exact for degree <= 11
        let v = gl.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let (v, _) = adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 1e-12, 2000).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn vector_adaptive_matches_components() {
        let (v, _) = adaptive_vec(|x| vec![x.sin(), x.exp()], 0.0, 2.0, 1e-14, 1e-12, 100).unwrap();
        assert!((v[0] - (1.0 - 2f64.cos())).abs() < 1e-12);
        assert!((v[1] - (2f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = adaptive(|x| (1.0 / x).sin() / x, 1e-9, 1.0, 1e-14, 0.0, 5);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn sphere_weights_sum_to_area() {
        for n in [2usize, 3, 5] {
            let grid = sphere_grid(n, 24);
            let area: f64 = grid.iter().map(|p| p.weight).sum();
            let exact = unit_sphere_area(n - 1);
            assert!((area - exact).abs() < 1e-12 * exact, "n = {n}: {area} vs {exact}");
            for p in &grid {
                let r: f64 = p.direction.iter().map(|x| x * x).sum();
                assert!((r - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sphere_second_moment() {
        // <n_i n_j> = δ_ij / n on S^{n-1}
        let grid = sphere_grid(5, 24);
        let area: f64 = grid.iter().map(|p| p.weight).sum();
        let m: f64 = grid.iter().map(|p| p.weight * p.direction[1].powi(2)).sum::<f64>() / area;
        assert!((m - 0.2).abs() < 1e-12, "{m}");
    }
}
