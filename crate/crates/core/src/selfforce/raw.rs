//! Direct integration of the third-order Lorentz–Dirac equation.

use serde::Serialize;

use super::external::ExternalField;
use super::history::{HistoryBuffer, PreHistory};
use super::reduced::{normalize_velocity, split};
use super::trajectory::{Diagnostics, Trajectory, TrajectorySample};
use super::{check_velocity, SelfForceKind, SelfForceModel};
use crate::error::{invalid, Error, Result};
use crate::ode::{integrate, Control, OdeOptions};
use crate::spacetime::{FourVector, MinkowskiDim};

#[derive(Debug, Clone, Copy)]
pub struct RawOptions {
    pub ode: OdeOptions,
    /// Integration stops once `|a| τ₀` exceeds this value.
    pub max_scaled_acceleration: f64,
}

impl Default for RawOptions {
    fn default() -> Self {
        RawOptions { ode: OdeOptions::default(), max_scaled_acceleration: 10.0 }
    }
}

/// Least-squares fit of `ln|a|` against `τ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunawayFit {
    /// `d ln|a| / dτ`.
    pub growth_rate: f64,
    /// `1 / growth_rate`.
    pub e_folding_time: f64,
    pub points: usize,
    pub rms_residual: f64,
}

/// `√(−a·a)` for `a ⊥ u`, evaluated as `|a_⊥|² + a_∥²/γ²` with the split
/// along the spatial velocity; `a⁰² − |a|²` cancels badly once `γ` is large.
pub(crate) fn proper_magnitude(a: &FourVector, u: &FourVector) -> f64 {
    let (asp, usp) = (a.spatial(), u.spatial());
    let un: f64 = usp.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a2: f64 = asp.iter().map(|x| x * x).sum();
    if un == 0.0 {
        return a2.sqrt();
    }
    let par: f64 = asp.iter().zip(usp).map(|(x, y)| x * y).sum::<f64>() / un;
    ((a2 - par * par).max(0.0) + par * par / (u[0] * u[0])).sqrt()
}

fn fit_growth(samples: &[TrajectorySample]) -> Option<RunawayFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|s| {
            let mag = proper_magnitude(&s.a, &s.u);
            (mag > 0.0).then(|| (s.tau, mag.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    Some(RunawayFit { growth_rate: slope, e_folding_time: 1.0 / slope, points: pts.len(), rms_residual: rms })
}

/// Integrates `m a = e F·u + (2e²/3)(ȧ + (a·a) u)` as a first-order system in
/// `(z, u, a)`. Generic initial accelerations run away; the fitted growth of
/// `|a|` is returned in `diagnostics.runaway`. Integration stops (and is
/// marked truncated) once `|a| τ₀` passes `max_scaled_acceleration`.
pub fn integrate_lorentz_dirac_raw(
    model: &SelfForceModel,
    field: &dyn ExternalField,
    z0: &FourVector,
    u0: &FourVector,
    a0: &FourVector,
    tau_span: (f64, f64),
    opts: &RawOptions,
) -> Result<Trajectory> {
    if !matches!(model.kind, SelfForceKind::LorentzDirac4d) {
        return Err(Error::Unsupported(format!("raw Lorentz–Dirac integration of {:?}", model.kind)));
    }
    let q = model.charge;
    if q.e == 0.0 {
        return invalid("the third-order equation degenerates for zero charge");
    }
    let dim = MinkowskiDim::D4;
    for v in [z0, u0, a0] {
        dim.check(v.dim())?;
    }
    dim.check(field.dim())?;
    check_velocity(u0)?;
    let tau0 = model.tau0();
    let d = 4;
    let mut y0 = vec![0.0; 5 * d];
    y0[..d].copy_from_slice(z0.as_slice());
    y0[d..2 * d].copy_from_slice(u0.as_slice());
    y0[2 * d..3 * d].copy_from_slice(a0.project_orthogonal(u0).as_slice());

    let forces = |y: &[f64]| {
        let (z, u, a) = (split(y, d, 0), split(y, d, 1), split(y, d, 2));
        let f_ext = field.field(&z).contract(&u).scaled(q.e);
        let f_self = &a.scaled(q.m) - &f_ext;
        (z, u, a, f_ext, f_self)
    };
    let sample = |tau: f64, y: &[f64]| {
        let (z, u, a, f_ext, f_self) = forces(y);
        TrajectorySample { tau, z, u, a, f_self, f_ext, impulse_ext: split(y, d, 3), impulse_self: split(y, d, 4) }
    };
    let mut samples = vec![sample(tau_span.0, &y0)];
    let mut history = HistoryBuffer::new(dim, PreHistory::Uniform, f64::INFINITY);
    let forward = tau_span.1 >= tau_span.0;
    if forward {
        let s = &samples[0];
        history.push(s.tau, s.z.clone(), s.u.clone(), s.a.clone())?;
    }
    let mut diagnostics = Diagnostics::default();
    let limit = opts.max_scaled_acceleration / tau0;

    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (_, u, a, f_ext, f_self) = forces(y);
        let aa = a.norm2();
        for i in 0..d {
            dy[i] = u[i];
            dy[d + i] = a[i];
            dy[2 * d + i] = (q.m * a[i] - f_ext[i]) / (q.m * tau0) - aa * u[i];
            dy[3 * d + i] = f_ext[i];
            dy[4 * d + i] = f_self[i];
        }
        Ok(())
    };
    let result = integrate(rhs, tau_span.0, &y0, tau_span.1, &opts.ode, |step, y| {
        let drift = normalize_velocity(y, d);
        diagnostics.max_normalization_drift = diagnostics.max_normalization_drift.max(drift);
        let u = split(y, d, 1);
        let a = split(y, d, 2).project_orthogonal(&u);
        y[2 * d..3 * d].copy_from_slice(a.as_slice());
        let s = sample(step.t1(), y);
        let mag = proper_magnitude(&s.a, &s.u);
        if forward {
            history.push(s.tau, s.z.clone(), s.u.clone(), s.a.clone())?;
        }
        samples.push(s);
        if mag > limit {
            diagnostics.truncated = Some(format!("|a| τ₀ exceeded {:e} at tau = {}", opts.max_scaled_acceleration, step.t1()));
            return Ok(Control::Stop);
        }
        Ok(Control::Continue)
    });
    match result {
        Ok((_, stats)) => {
            diagnostics.accepted_steps = stats.accepted;
            diagnostics.rejected_steps = stats.rejected;
            diagnostics.rhs_evaluations = stats.evaluations;
        }
        Err(Error::Integration { tau, reason }) => {
            diagnostics.truncated = Some(format!("stopped at tau = {tau}: {reason}"));
        }
        Err(e) => return Err(e),
    }
    diagnostics.runaway = fit_growth(&samples);
    Ok(Trajectory { model: *model, samples, worldline: history, diagnostics })
}
