//! Particle worldlines and the light-cone (retarded/advanced time) condition.

mod motions;
mod spline;

pub use motions::AnalyticMotion;
pub use spline::SplineWorldline;

use crate::error::{Error, Result};
use crate::spacetime::{FourVector, MinkowskiDim};

/// Position and its first three proper-time derivatives at one proper time.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldlineState {
    pub tau: f64,
    pub z: FourVector,
    pub u: FourVector,
    pub a: FourVector,
    pub jerk: FourVector,
}

/// A timelike trajectory `z(τ)` parametrized by proper time.
pub trait Worldline: Send + Sync {
    fn dim(&self) -> MinkowskiDim;

    /// Closed proper-time interval on which the worldline is defined.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// State at `tau`; callers guarantee `tau` lies in the domain.
    fn state_unchecked(&self, tau: f64) -> WorldlineState;

    /// Position only. Overridden where it is cheaper than a full state.
    fn position_unchecked(&self, tau: f64) -> FourVector {
        self.state_unchecked(tau).z
    }

    /// A rough proper time at which the particle reaches lab time `t`;
    /// used to seed light-cone searches.
    fn proper_time_hint(&self, t: f64) -> f64 {
        t
    }

    /// `d^k z / dτ^k` for `k = 0..=order`. The default covers `order <= 3`.
    fn derivatives(&self, tau: f64, order: usize) -> Result<Vec<FourVector>> {
        if order > 3 {
            return Err(Error::Unsupported(format!(
                "worldline provides derivatives up to order 3, requested {order}"
            )));
        }
        let s = self.evaluate(tau)?;
        let mut v = vec![s.z, s.u, s.a, s.jerk];
        v.truncate(order + 1);
        Ok(v)
    }

    /// State at `tau`, checking the domain.
    fn evaluate(&self, tau: f64) -> Result<WorldlineState> {
        let (min, max) = self.domain();
        if !(tau >= min && tau <= max) {
            return Err(Error::OutOfDomain { tau, min, max });
        }
        Ok(self.state_unchecked(tau))
    }
}

impl<W: Worldline + ?Sized> Worldline for &W {
    fn dim(&self) -> MinkowskiDim {
        (**self).dim()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        (**self).state_unchecked(tau)
    }
    fn position_unchecked(&self, tau: f64) -> FourVector {
        (**self).position_unchecked(tau)
    }
    fn proper_time_hint(&self, t: f64) -> f64 {
        (**self).proper_time_hint(t)
    }
    fn derivatives(&self, tau: f64, order: usize) -> Result<Vec<FourVector>> {
        (**self).derivatives(tau, order)
    }
}

impl<W: Worldline + ?Sized> Worldline for Box<W> {
    fn dim(&self) -> MinkowskiDim {
        (**self).dim()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        (**self).state_unchecked(tau)
    }
    fn position_unchecked(&self, tau: f64) -> FourVector {
        (**self).position_unchecked(tau)
    }
    fn proper_time_hint(&self, t: f64) -> f64 {
        (**self).proper_time_hint(t)
    }
    fn derivatives(&self, tau: f64, order: usize) -> Result<Vec<FourVector>> {
        (**self).derivatives(tau, order)
    }
}

/// The time-reflected worldline `τ -> T z(-τ)` with `T = diag(-1, 1, ..., 1)`.
#[derive(Debug, Clone)]
pub struct Reflected<W>(pub W);

impl<W: Worldline> Worldline for Reflected<W> {
    fn dim(&self) -> MinkowskiDim {
        self.0.dim()
    }
    fn domain(&self) -> (f64, f64) {
        let (a, b) = self.0.domain();
        (-b, -a)
    }
    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        let s = self.0.state_unchecked(-tau);
        // d/dτ [T z(-τ)] = -T u(-τ), and so on with alternating signs.
        WorldlineState {
            tau,
            z: s.z.time_reflected(),
            u: -s.u.time_reflected(),
            a: s.a.time_reflected(),
            jerk: -s.jerk.time_reflected(),
        }
    }
    fn proper_time_hint(&self, t: f64) -> f64 {
        -self.0.proper_time_hint(-t)
    }
}

/// Emission (or absorption) point on a worldline for a given field point.
#[derive(Debug, Clone)]
pub struct RetardedPoint {
    pub tau: f64,
    pub z: FourVector,
    pub u: FourVector,
    pub a: FourVector,
    pub jerk: FourVector,
    /// `|(x - z)·u|`, the invariant distance in the emitter's rest frame.
    pub rho: f64,
    /// `(x - z) / rho`: null, with `k·u = ±1` (+ for retarded).
    pub k: FourVector,
    /// `x - z`.
    pub separation: FourVector,
}

impl RetardedPoint {
    pub fn from_state(state: WorldlineState, x: &FourVector) -> Self {
        let sep = x - &state.z;
        let rho = sep.dot(&state.u).abs();
        let k = sep.scaled(1.0 / rho);
        RetardedPoint {
            tau: state.tau,
            z: state.z,
            u: state.u,
            a: state.a,
            jerk: state.jerk,
            rho,
            k,
            separation: sep,
        }
    }

    pub fn state(&self) -> WorldlineState {
        WorldlineState {
            tau: self.tau,
            z: self.z.clone(),
            u: self.u.clone(),
            a: self.a.clone(),
            jerk: self.jerk.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    Past,
    Future,
}

/// Solve `(x - z(τ))² = 0` on the past light cone of `x`.
pub fn retarded_time<W: Worldline + ?Sized>(w: &W, x: &FourVector) -> Result<RetardedPoint> {
    light_cone_intersection(w, x, Cone::Past)
}

/// Solve `(x - z(τ))² = 0` on the future light cone of `x`.
pub fn advanced_time<W: Worldline + ?Sized>(w: &W, x: &FourVector) -> Result<RetardedPoint> {
    light_cone_intersection(w, x, Cone::Future)
}

/// Signed light-cone function, strictly decreasing in τ along a timelike
/// worldline: `(x⁰ - z⁰) ∓ |x - z|` for the past (−) or future (+) cone.
fn cone_function(x: &FourVector, z: &FourVector, cone: Cone) -> f64 {
    let r = spatial_distance(x, z);
    match cone {
        Cone::Past => (x[0] - z[0]) - r,
        Cone::Future => (x[0] - z[0]) + r,
    }
}

fn spatial_distance(x: &FourVector, z: &FourVector) -> f64 {
    x.spatial()
        .iter()
        .zip(z.spatial())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

const MAX_EXPANSIONS: usize = 200;

/// Bracket, bisect and Newton-polish the light-cone condition.
pub fn light_cone_intersection<W: Worldline + ?Sized>(
    w: &W,
    x: &FourVector,
    cone: Cone,
) -> Result<RetardedPoint> {
    w.dim().check(x.dim())?;
    let (dmin, dmax) = w.domain();
    let f = |tau: f64| cone_function(x, &w.position_unchecked(tau), cone);

    let clamp = |t: f64| t.max(dmin).min(dmax);
    let mut hi = clamp(w.proper_time_hint(x[0]));
    if !hi.is_finite() {
        hi = clamp(0.0);
    }
    let mut step = 1.0;
    let mut f_hi = f(hi);
    let mut n = 0;
    // Move forward until the cone function is non-positive.
    while f_hi > 0.0 {
        if hi >= dmax || n >= MAX_EXPANSIONS {
            return Err(Error::NotFound(format!("no {cone:?}-cone crossing ahead of tau = {hi}")));
        }
        hi = clamp(hi + step);
        step *= 2.0;
        f_hi = f(hi);
        n += 1;
        if !f_hi.is_finite() {
            return Err(Error::NotFound(format!("light-cone search diverged near tau = {hi}")));
        }
    }
    let mut lo = hi;
    let mut f_lo = f_hi;
    step = 1.0;
    while f_lo <= 0.0 {
        if f_lo == 0.0 {
            break;
        }
        if lo <= dmin || n >= MAX_EXPANSIONS {
            return Err(Error::NotFound(format!("no {cone:?}-cone crossing behind tau = {lo}")));
        }
        hi = lo;
        f_hi = f_lo;
        lo = clamp(lo - step);
        step *= 2.0;
        f_lo = f(lo);
        n += 1;
        if !f_lo.is_finite() {
            return Err(Error::NotFound(format!("light-cone search diverged near tau = {lo}")));
        }
    }
    if f_lo == 0.0 {
        return finish(w, x, lo, cone);
    }
    debug_assert!(f_lo > 0.0 && f_hi <= 0.0, "bracket must certify a sign change");

    // Bisection to a coarse tolerance.
    let coarse = 1e-6 * (1.0 + lo.abs().max(hi.abs()));
    while hi - lo > coarse {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Safeguarded Newton on the cone function.
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..100 {
        let s = w.state_unchecked(tau);
        let fv = cone_function(x, &s.z, cone);
        if fv > 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        let r = spatial_distance(x, &s.z);
        let radial: f64 = if r > 0.0 {
            x.spatial()
                .iter()
                .zip(s.z.spatial())
                .zip(s.u.spatial())
                .map(|((xi, zi), ui)| (xi - zi) * ui)
                .sum::<f64>()
                / r
        } else {
            0.0
        };
        let df = match cone {
            Cone::Past => -s.u[0] + radial,
            Cone::Future => -s.u[0] - radial,
        };
        let mut next = tau - fv / df;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let delta = (next - tau).abs();
        tau = next;
        if delta <= 4.0 * f64::EPSILON * (1.0 + tau.abs()) || hi - lo <= 4.0 * f64::EPSILON * (1.0 + tau.abs()) {
            break;
        }
    }
    finish(w, x, tau, cone)
}

fn finish<W: Worldline + ?Sized>(w: &W, x: &FourVector, tau: f64, cone: Cone) -> Result<RetardedPoint> {
    let state = w.state_unchecked(tau);
    let sep = x - &state.z;
    let scale = x.euclidean_norm().max(1.0);
    if sep.euclidean_norm() <= 1e-13 * scale {
        return Err(Error::Singular(format!("field point lies on the worldline at tau = {tau}")));
    }
    // Reject roots manufactured by cancellation far along the worldline.
    let null_residual = sep.norm2().abs();
    let sep_scale = sep.euclidean_norm();
    if !sep_scale.is_finite() || null_residual > 1e-8 * sep_scale * sep_scale.max(1.0) {
        return Err(Error::NotFound(format!(
            "no {} light-cone intersection (residual {null_residual:e} at tau = {tau})",
            match cone {
                Cone::Past => "retarded",
                Cone::Future => "advanced",
            }
        )));
    }
    let p = RetardedPoint::from_state(state, x);
    if !(p.rho > 0.0) || !p.k.is_finite() {
        return Err(Error::NotFound(format!("degenerate light-cone intersection at tau = {tau}")));
    }
    debug_assert!(match cone {
        Cone::Past => p.separation[0] >= 0.0,
        Cone::Future => p.separation[0] <= 0.0,
    });
    Ok(p)
}
