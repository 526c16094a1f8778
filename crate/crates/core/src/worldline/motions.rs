use std::f64::consts::PI;

use super::{Worldline, WorldlineState};
use crate::error::{invalid, Result};
use crate::quadrature::GaussLegendre;
use crate::spacetime::{FourVector, MinkowskiDim};

/// Closed-form reference trajectories.
#[derive(Debug, Clone)]
pub enum AnalyticMotion {
    /// At rest at spatial point `x0`.
    Rest { dim: MinkowskiDim, x0: FourVector },
    /// `z = z0 + u τ`.
    Uniform {
        dim: MinkowskiDim,
        z0: FourVector,
        u: FourVector,
    },
    /// Constant proper acceleration `g` along the first spatial axis, at rest
    /// at the origin at `τ = 0`.
    Hyperbolic { dim: MinkowskiDim, g: f64 },
    /// Orbit of radius `radius` in the (x¹, x²) plane with lab angular
    /// velocity `omega`, starting on the positive x¹ axis at `t = 0`.
    Circular {
        dim: MinkowskiDim,
        radius: f64,
        omega: f64,
    },
    /// `x¹(t) = amplitude · sin(ω t)` parametrized internally by lab time.
    Oscillating {
        dim: MinkowskiDim,
        amplitude: f64,
        omega: f64,
        /// Proper time elapsed per lab period.
        tau_period: f64,
    },
}

impl AnalyticMotion {
    pub fn rest(dim: MinkowskiDim, x0: &[f64]) -> Self {
        AnalyticMotion::Rest {
            dim,
            x0: FourVector::from_time_space(dim, 0.0, x0),
        }
    }

    pub fn uniform(z0: FourVector, u: FourVector) -> Result<Self> {
        if z0.dim() != u.dim() {
            return invalid("uniform motion: dimension mismatch");
        }
        if (u.norm2() - 1.0).abs() > 1e-12 || u[0] <= 0.0 {
            return invalid("uniform motion needs a future-directed unit velocity");
        }
        Ok(AnalyticMotion::Uniform { dim: u.dim(), z0, u })
    }

    pub fn hyperbolic(dim: MinkowskiDim, g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return invalid("hyperbolic motion needs g > 0");
        }
        Ok(AnalyticMotion::Hyperbolic { dim, g })
    }

    pub fn circular(dim: MinkowskiDim, radius: f64, omega: f64) -> Result<Self> {
        if radius <= 0.0 || (omega * radius).abs() >= 1.0 {
            return invalid(format!("circular motion needs radius > 0 and |ωR| < 1 (ωR = {})", omega * radius));
        }
        Ok(AnalyticMotion::Circular { dim, radius, omega })
    }

    pub fn oscillating(dim: MinkowskiDim, amplitude: f64, omega: f64) -> Result<Self> {
        if amplitude <= 0.0 || omega <= 0.0 || amplitude * omega >= 1.0 {
            return invalid("oscillation needs amplitude > 0, ω > 0 and peak speed < 1");
        }
        let period = 2.0 * PI / omega;
        let tau_period = lab_to_proper_partial(amplitude, omega, period);
        Ok(AnalyticMotion::Oscillating {
            dim,
            amplitude,
            omega,
            tau_period,
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AnalyticMotion::Rest { .. } => "rest",
            AnalyticMotion::Uniform { .. } => "uniform",
            AnalyticMotion::Hyperbolic { .. } => "hyperbolic",
            AnalyticMotion::Circular { .. } => "circular",
            AnalyticMotion::Oscillating { .. } => "oscillating",
        }
    }

    /// Lorentz factor of the circular orbit, `1/√(1 - ω²R²)`.
    pub fn circular_gamma(radius: f64, omega: f64) -> f64 {
        1.0 / (1.0 - (omega * radius).powi(2)).sqrt()
    }

    fn derivs(&self, tau: f64, order: usize) -> Vec<FourVector> {
        match self {
            AnalyticMotion::Rest { dim, x0 } => {
                let mut out = vec![FourVector::zero(*dim); order + 1];
                let mut z = x0.clone();
                z[0] = tau;
                out[0] = z;
                if order >= 1 {
                    out[1] = FourVector::time_unit(*dim);
                }
                out
            }
            AnalyticMotion::Uniform { dim, z0, u } => {
                let mut out = vec![FourVector::zero(*dim); order + 1];
                let mut z = z0.clone();
                z.axpy(tau, u);
                out[0] = z;
                if order >= 1 {
                    out[1] = u.clone();
                }
                out
            }
            AnalyticMotion::Hyperbolic { dim, g } => {
                let (sh, ch) = ((g * tau).sinh(), (g * tau).cosh());
                (0..=order)
                    .map(|k| {
                        let mut v = FourVector::zero(*dim);
                        let gk = g.powi(k as i32 - 1);
                        if k == 0 {
                            v[0] = sh / g;
                            v[1] = (ch - 1.0) / g;
                        } else if k % 2 == 1 {
                            v[0] = gk * ch;
                            v[1] = gk * sh;
                        } else {
                            v[0] = gk * sh;
                            v[1] = gk * ch;
                        }
                        v
                    })
                    .collect()
            }
            AnalyticMotion::Circular { dim, radius, omega } => {
                let gamma = Self::circular_gamma(*radius, *omega);
                let big = gamma * omega;
                let phase = big * tau;
                (0..=order)
                    .map(|k| {
                        let mut v = FourVector::zero(*dim);
                        v[0] = match k {
                            0 => gamma * tau,
                            1 => gamma,
                            _ => 0.0,
                        };
                        let shift = k as f64 * PI / 2.0;
                        let amp = radius * big.powi(k as i32);
                        v[1] = amp * (phase + shift).cos();
                        v[2] = amp * (phase + shift).sin();
                        v
                    })
                    .collect()
            }
            AnalyticMotion::Oscillating {
                dim,
                amplitude,
                omega,
                tau_period,
            } => {
                let t = proper_to_lab(*amplitude, *omega, *tau_period, tau);
                oscillating_derivatives(*dim, *amplitude, *omega, t, order)
            }
        }
    }
}

impl Worldline for AnalyticMotion {
    fn dim(&self) -> MinkowskiDim {
        match self {
            AnalyticMotion::Rest { dim, .. }
            | AnalyticMotion::Uniform { dim, .. }
            | AnalyticMotion::Hyperbolic { dim, .. }
            | AnalyticMotion::Circular { dim, .. }
            | AnalyticMotion::Oscillating { dim, .. } => *dim,
        }
    }

    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        let mut d = self.derivs(tau, 3).into_iter();
        WorldlineState {
            tau,
            z: d.next().unwrap(),
            u: d.next().unwrap(),
            a: d.next().unwrap(),
            jerk: d.next().unwrap(),
        }
    }

    fn position_unchecked(&self, tau: f64) -> FourVector {
        self.derivs(tau, 0).pop().unwrap()
    }

    fn proper_time_hint(&self, t: f64) -> f64 {
        match self {
            AnalyticMotion::Rest { .. } => t,
            AnalyticMotion::Uniform { z0, u, .. } => (t - z0[0]) / u[0],
            AnalyticMotion::Hyperbolic { g, .. } => (g * t).asinh() / g,
            AnalyticMotion::Circular { radius, omega, .. } => t / Self::circular_gamma(*radius, *omega),
            AnalyticMotion::Oscillating {
                amplitude,
                omega,
                tau_period,
                ..
            } => lab_to_proper(*amplitude, *omega, *tau_period, t),
        }
    }

    fn derivatives(&self, tau: f64, order: usize) -> Result<Vec<FourVector>> {
        if let AnalyticMotion::Oscillating { .. } = self {
            if order > 3 {
                return Err(crate::Error::Unsupported(
                    "oscillating motion provides derivatives up to order 3".into(),
                ));
            }
        }
        Ok(self.derivs(tau, order))
    }
}

fn gamma_of(v: f64) -> f64 {
    1.0 / (1.0 - v * v).sqrt()
}

/// `∫_0^t √(1 - v(s)²) ds` for `0 <= t <= one period`.
fn lab_to_proper_partial(amp: f64, omega: f64, t: f64) -> f64 {
    thread_local! {
        static GL: GaussLegendre = GaussLegendre::new(24);
    }
    // Integrate in quarter-period panels; the integrand is analytic.
    let quarter = PI / (2.0 * omega);
    let mut acc = 0.0;
    let mut a = 0.0;
    GL.with(|gl| {
        while a < t {
            let b = (a + quarter).min(t);
            acc += gl.integrate(a, b, |s| {
                let v = amp * omega * (omega * s).cos();
                (1.0 - v * v).sqrt()
            });
            a = b;
        }
    });
    acc
}

fn lab_to_proper(amp: f64, omega: f64, tau_period: f64, t: f64) -> f64 {
    let period = 2.0 * PI / omega;
    let n = (t / period).floor();
    n * tau_period + lab_to_proper_partial(amp, omega, t - n * period)
}

fn proper_to_lab(amp: f64, omega: f64, tau_period: f64, tau: f64) -> f64 {
    let period = 2.0 * PI / omega;
    let n = (tau / tau_period).floor();
    let target = tau - n * tau_period;
    // Newton on t ∈ [0, period]; dτ/dt = √(1 - v²) >= √(1 - A²ω²) > 0.
    let mut t = target * period / tau_period;
    for _ in 0..50 {
        let v = amp * omega * (omega * t).cos();
        let f = lab_to_proper_partial(amp, omega, t.max(0.0)) - target;
        let step = f / (1.0 - v * v).sqrt();
        t -= step;
        if step.abs() < 1e-15 * period {
            break;
        }
    }
    n * period + t
}

fn oscillating_derivatives(dim: MinkowskiDim, amp: f64, omega: f64, t: f64, order: usize) -> Vec<FourVector> {
    let (s, c) = (omega * t).sin_cos();
    let v = amp * omega * c;
    let v1 = -amp * omega * omega * s;
    let v2 = -amp * omega.powi(3) * c;
    let g = gamma_of(v);
    let g1 = g.powi(3) * v * v1;
    let g2 = 3.0 * g * g * g1 * v * v1 + g.powi(3) * (v1 * v1 + v * v2);
    // f(t) = (γ, γv) is the four-velocity as a function of lab time.
    let f = [g, g * v];
    let f1 = [g1, g1 * v + g * v1];
    let f2 = [g2, g2 * v + 2.0 * g1 * v1 + g * v2];
    let mk = |c0: f64, c1: f64| {
        let mut x = FourVector::zero(dim);
        x[0] = c0;
        x[1] = c1;
        x
    };
    let mut out = vec![mk(t, amp * s)];
    if order >= 1 {
        out.push(mk(f[0], f[1]));
    }
    if order >= 2 {
        out.push(mk(g * f1[0], g * f1[1]));
    }
    if order >= 3 {
        out.push(mk(g * (g1 * f1[0] + g * f2[0]), g * (g1 * f1[1] + g * f2[1])));
    }
    out
}
