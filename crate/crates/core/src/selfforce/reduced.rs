//! Reduction-of-order (Landau–Lifshitz) integration of the Lorentz–Dirac equation.

use nalgebra::DMatrix;

use super::external::ExternalField;
use super::history::{HistoryBuffer, PreHistory};
use super::trajectory::{Diagnostics, Trajectory, TrajectorySample};
use super::{check_velocity, SelfForceKind, SelfForceModel};
use crate::error::{Error, Result};
use crate::fields::Charge;
use crate::ode::{integrate, Control, OdeOptions};
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::units::LD_COEFFICIENT;

/// `M^{μν} v_ν`.
pub(crate) fn contract(m: &DMatrix<f64>, v: &FourVector) -> FourVector {
    let dim = v.dim();
    let d = dim.d();
    let out = (0..d).map(|i| (0..d).map(|j| m[(i, j)] * dim.metric(j) * v[j]).sum()).collect();
    FourVector::new(out).expect("dimension preserved")
}

/// External Lorentz force and the reduced-order self-force at `(z, u)`:
/// `a₀ = (e/m) F·u`, `ȧ₀ = (e/m)[(u·∂F)·u + F·a₀]`,
/// `f_self = (2e²/3)(ȧ₀ + (a₀·a₀) u)`.
pub fn reduced_order_force(
    field: &dyn ExternalField,
    z: &FourVector,
    u: &FourVector,
    charge: &Charge,
) -> (FourVector, FourVector) {
    let f = field.field(z);
    let f_ext = f.contract(u).scaled(charge.e);
    if charge.e == 0.0 {
        return (f_ext, FourVector::zero(u.dim()));
    }
    let a0 = f_ext.scaled(1.0 / charge.m);
    let grad = field.directional_derivative(z, u);
    let mut a0_dot = contract(&grad, u);
    a0_dot += &f.contract(&a0);
    a0_dot.scale_mut(charge.ratio());
    let mut f_self = a0_dot;
    f_self.axpy(a0.norm2(), u);
    f_self.scale_mut(LD_COEFFICIENT * charge.e * charge.e);
    (f_ext, f_self)
}

pub(crate) fn split(y: &[f64], d: usize, block: usize) -> FourVector {
    FourVector::from_slice(&y[block * d..(block + 1) * d]).expect("dimension")
}

pub(crate) fn normalize_velocity(y: &mut [f64], d: usize) -> f64 {
    let u = split(y, d, 1);
    let n = u.norm2();
    let drift = (n - 1.0).abs();
    let s = 1.0 / n.sqrt();
    for v in &mut y[d..2 * d] {
        *v *= s;
    }
    drift
}

/// Integrates `m du/dτ = e F·u + f_self` with the reduced-order self-force
/// from `tau_span.0` to `tau_span.1`. The four-velocity is renormalized after
/// every step; the largest drift is reported. A step-control failure ends the
/// integration early and is reported in `diagnostics.truncated`.
pub fn integrate_reduced_order(
    model: &SelfForceModel,
    field: &dyn ExternalField,
    z0: &FourVector,
    u0: &FourVector,
    tau_span: (f64, f64),
    opts: &OdeOptions,
) -> Result<Trajectory> {
    if !matches!(model.kind, SelfForceKind::ReducedOrder4d | SelfForceKind::LorentzDirac4d) {
        return Err(Error::Unsupported(format!("reduced-order integration of {:?}", model.kind)));
    }
    let dim = MinkowskiDim::D4;
    dim.check(field.dim())?;
    dim.check(z0.dim())?;
    dim.check(u0.dim())?;
    check_velocity(u0)?;
    let d = 4;
    let q = model.charge;
    let mut y0 = vec![0.0; 4 * d];
    y0[..d].copy_from_slice(z0.as_slice());
    y0[d..2 * d].copy_from_slice(u0.as_slice());

    let sample = |tau: f64, y: &[f64]| -> TrajectorySample {
        let (z, u) = (split(y, d, 0), split(y, d, 1));
        let (f_ext, f_self) = reduced_order_force(field, &z, &u, &q);
        let a = (&f_ext + &f_self).scaled(1.0 / q.m);
        TrajectorySample { tau, z, u, a, f_self, f_ext, impulse_ext: split(y, d, 2), impulse_self: split(y, d, 3) }
    };
    let mut samples = vec![sample(tau_span.0, &y0)];
    let mut history = HistoryBuffer::new(dim, PreHistory::Uniform, f64::INFINITY);
    let mut diagnostics = Diagnostics::default();
    let forward = tau_span.1 >= tau_span.0;
    if forward {
        let s = &samples[0];
        history.push(s.tau, s.z.clone(), s.u.clone(), s.a.clone())?;
    }

    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (z, u) = (split(y, d, 0), split(y, d, 1));
        let (f_ext, f_self) = reduced_order_force(field, &z, &u, &q);
        for i in 0..d {
            dy[i] = u[i];
            dy[d + i] = (f_ext[i] + f_self[i]) / q.m;
            dy[2 * d + i] = f_ext[i];
            dy[3 * d + i] = f_self[i];
        }
        Ok(())
    };
    let result = integrate(rhs, tau_span.0, &y0, tau_span.1, opts, |step, y| {
        let drift = normalize_velocity(y, d);
        diagnostics.max_normalization_drift = diagnostics.max_normalization_drift.max(drift);
        let s = sample(step.t1(), y);
        if forward {
            history.push(s.tau, s.z.clone(), s.u.clone(), s.a.clone())?;
        }
        samples.push(s);
        Ok(Control::Continue)
    });
    match result {
        Ok((_, stats)) => {
            diagnostics.accepted_steps = stats.accepted;
            diagnostics.rejected_steps = stats.rejected;
            diagnostics.rhs_evaluations = stats.evaluations;
        }
        Err(Error::Integration { tau, reason }) => {
            log::warn!("reduced-order integration stopped at τ = {tau}: {reason}");
            diagnostics.truncated = Some(format!("stopped at tau = {tau}: {reason}"));
        }
        Err(e) => return Err(e),
    }
    if diagnostics.max_normalization_drift > 1e-8 {
        log::debug!("largest u·u drift before projection: {:e}", diagnostics.max_normalization_drift);
    }
    Ok(Trajectory { model: *model, samples, worldline: history, diagnostics })
}
