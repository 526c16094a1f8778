//! Self-force on a point source of a scalar field.

use super::check_velocity;
use crate::error::{invalid, Error, Result};
use crate::quadrature::adaptive;
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::special::bessel_j;
use crate::units::SCALAR_LD_COEFFICIENT;
use crate::worldline::Worldline;

/// `(g²/3)(ȧ + (a·a) u)`.
pub fn scalar_local_force(u: &FourVector, a: &FourVector, jerk: &FourVector, g: f64) -> Result<FourVector> {
    MinkowskiDim::D4.check(u.dim())?;
    check_velocity(u)?;
    let k = SCALAR_LD_COEFFICIENT * g * g;
    let mut f = jerk.scaled(k);
    f.axpy(k * a.norm2(), u);
    Ok(f)
}

/// Controls for the massive-field history integral.
#[derive(Debug, Clone, Copy)]
pub struct TailOptions {
    /// Look-back in proper time; `None` picks `60 / m`.
    pub horizon: Option<f64>,
    pub rel_tol: f64,
    /// Largest acceptable estimate of the neglected history, relative to the force.
    pub horizon_tolerance: f64,
}

impl Default for TailOptions {
    fn default() -> Self {
        TailOptions { horizon: None, rel_tol: 1e-9, horizon_tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarForce {
    pub local: FourVector,
    pub tail: FourVector,
    pub total: FourVector,
    /// `(g²/3)(-a·a)`, the rate radiated according to the local term.
    pub local_rate: f64,
}

/// `J₂(x)/x²` with its series near zero.
fn j2_over_x2(x: f64) -> f64 {
    if x < 1e-3 {
        1.0 / 8.0 - x * x / 96.0
    } else {
        bessel_j(2, x) / (x * x)
    }
}

/// Scalar self-force at proper time `tau` on worldline `w`.
///
/// Massless field: the local term only. Massive field of mass `m_f`: plus
/// `g² m_f² ∫_0^H J₂(m_f s)/s² [X - (X·u) u] dΔ` with `X = z(τ) - z(τ - Δ)`
/// and `s = √(X·X)`, the field being `φ = -Ω g ∫ G` and the force
/// `-g (∂φ)_⊥`.
pub fn scalar_self_force<W: Worldline + ?Sized>(
    w: &W,
    tau: f64,
    g: f64,
    field_mass: f64,
    opts: &TailOptions,
) -> Result<ScalarForce> {
    let s = w.evaluate(tau)?;
    let local = scalar_local_force(&s.u, &s.a, &s.jerk, g)?;
    let local_rate = -SCALAR_LD_COEFFICIENT * g * g * s.a.norm2();
    if !(field_mass >= 0.0) {
        return invalid(format!("field mass must be non-negative, got {field_mass}"));
    }
    if field_mass == 0.0 || g == 0.0 {
        let tail = FourVector::zero(s.u.dim());
        return Ok(ScalarForce { total: local.clone(), local, tail, local_rate });
    }
    let m = field_mass;
    let horizon = opts.horizon.unwrap_or(60.0 / m);
    let (dmin, _) = w.domain();
    if tau - horizon < dmin {
        return Err(Error::Horizon { horizon, estimate: f64::INFINITY, tolerance: opts.horizon_tolerance });
    }
    let pref = g * g * m * m;
    let integrand = |delta: f64, comp: usize| -> f64 {
        if delta == 0.0 {
            return 0.0;
        }
        let past = w.position_unchecked(tau - delta);
        let x = &s.z - &past;
        let s2 = x.norm2().max(0.0);
        let xu = x.dot(&s.u);
        pref * m * m * j2_over_x2(m * s2.sqrt()) * (x[comp] - xu * s.u[comp])
    };
    // Panels short enough to resolve both the orbital and the Bessel oscillation.
    let panel = (std::f64::consts::PI / m).min(0.5);
    let n_panels = (horizon / panel).ceil() as usize;
    let d = s.u.len();
    let mut tail = vec![0.0; d];
    for (comp, t) in tail.iter_mut().enumerate() {
        let mut sum = 0.0;
        for i in 0..n_panels {
            let a = i as f64 * panel;
            let b = ((i + 1) as f64 * panel).min(horizon);
            let (v, _) = adaptive(|x| integrand(x, comp), a, b, 1e-15, opts.rel_tol, 200)?;
            sum += v;
        }
        *t = sum;
    }
    let tail = FourVector::new(tail)?;
    let total = &local + &tail;
    // Neglected history: oscillating with envelope ~ √(2/π x) / x² at x = m s.
    let past = w.position_unchecked(tau - horizon);
    let x = &s.z - &past;
    let s_h = x.norm2().max(0.0).sqrt();
    let xperp = x.project_orthogonal(&s.u);
    let envelope = pref * (2.0 / (std::f64::consts::PI * m * s_h)).sqrt() / (s_h * s_h);
    let estimate = envelope * (-xperp.norm2()).max(0.0).sqrt() / m;
    let scale = total.max_abs().max(f64::MIN_POSITIVE);
    if estimate > opts.horizon_tolerance * scale && estimate > 1e-14 {
        return Err(Error::Horizon { horizon, estimate, tolerance: opts.horizon_tolerance * scale });
    }
    Ok(ScalarForce { local, tail, total, local_rate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::AnalyticMotion;

    #[test]
    fn vanishes_without_coupling() {
        let w = AnalyticMotion::circular(MinkowskiDim::D4, 1.0, 0.5).unwrap();
        let f = scalar_self_force(&w, 0.0, 0.0, 0.0, &TailOptions::default()).unwrap();
        assert_eq!(f.total.max_abs(), 0.0);
    }

    #[test]
    fn static_source_feels_nothing() {
        let w = AnalyticMotion::rest(MinkowskiDim::D4, &[1.0, 0.0, 0.0]);
        let f = scalar_self_force(&w, 3.0, 1.0, 0.5, &TailOptions::default()).unwrap();
        assert!(f.total.max_abs() < 1e-14);
    }

    #[test]
    fn orthogonal_to_velocity() {
        let w = AnalyticMotion::circular(MinkowskiDim::D4, 1.0, 0.5).unwrap();
        let opts = TailOptions { horizon: Some(80.0), horizon_tolerance: 1.0, ..Default::default() };
        let f = scalar_self_force(&w, 0.3, 1.0, 1.0, &opts).unwrap();
        let u = w.state_unchecked(0.3).u;
        assert!(f.total.dot(&u).abs() < 1e-10 * f.total.max_abs());
        assert!(f.tail.max_abs() > 0.0);
    }
}
