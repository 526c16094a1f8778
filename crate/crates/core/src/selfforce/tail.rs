//! Self-interaction in 2+1 dimensions, where the retarded field of a charge
//! is supported inside the light cone and the self-force is an integral over
//! the whole past worldline.
//!
//! The field along the worldline is
//! `F_{μν}(z(τ)) = e ∫ (X_μ D_ν − X_ν D_μ)/√(X²) dτ'`, `X = z(τ) − z(τ')`,
//! `D = a'/(X·u') + u'(1 − X·a')/(X·u')²`, so the self-force is
//! `e² ∫₀^∞ I(Δ) dΔ` with `I = [X (D·u) − D (X·u)]/√(X²)` and `Δ = τ − τ'`.
//! Near coincidence `I = −a/(2Δ) + (2/3)(ȧ + (a·a)u) + O(Δ)`; the logarithm
//! is absorbed in the mass, renormalized at [`TAIL_RENORMALIZATION_SCALE`]:
//!
//! `(m − (e²/2) ln(ℓ/δ)) a = f_ext + e² [∫₀^δ (I + a/(2Δ)) dΔ + ∫_δ^H I dΔ]`
//!
//! for any splitting point `δ` (the near window).

use super::external::ExternalField;
use super::history::HistoryBuffer;
use super::reduced::{contract, normalize_velocity, split};
use super::trajectory::{Diagnostics, Trajectory, TrajectorySample};
use super::{check_velocity, SelfForceKind, SelfForceModel};
use crate::error::{invalid, Error, Result};
use crate::ode::{integrate, Control, OdeOptions};
use crate::quadrature::{adaptive_vec, GaussLegendre};
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::units::TAIL_RENORMALIZATION_SCALE;
use crate::worldline::Worldline;

type V3 = [f64; 3];

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2]
}

fn v3(v: &FourVector) -> V3 {
    [v[0], v[1], v[2]]
}

fn norm_e(v: &V3) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Settings for the tail integral and the integro-differential solver.
#[derive(Debug, Clone, Copy)]
pub struct TailIntegrationOptions {
    /// Step control; `h_max` is clipped to `near_window`.
    pub ode: OdeOptions,
    /// Look-back proper time `H`.
    pub horizon: f64,
    /// Splitting point `δ` between the Taylor-expanded and stored past.
    pub near_window: f64,
    /// Allowed ratio of the truncated remainder to the force scale.
    pub horizon_tolerance: f64,
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
}

impl Default for TailIntegrationOptions {
    fn default() -> Self {
        TailIntegrationOptions {
            ode: OdeOptions { rtol: 1e-8, atol: 1e-10, h_init: 1e-3, h_max: 0.02, ..OdeOptions::default() },
            horizon: 200.0,
            near_window: 0.02,
            horizon_tolerance: 1e-3,
            quad_rel_tol: 1e-7,
            quad_abs_tol: 1e-9,
        }
    }
}

impl TailIntegrationOptions {
    fn validate(&self) -> Result<()> {
        let positive = [self.horizon, self.near_window, self.horizon_tolerance, self.quad_rel_tol, self.quad_abs_tol];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return invalid("tail options must be positive and finite");
        }
        if self.horizon <= 2.0 * self.near_window {
            return invalid("tail horizon must exceed twice the near window");
        }
        Ok(())
    }
}

/// Pieces of the 2+1 self-force at one instant; all are orthogonal to `u`.
#[derive(Debug, Clone)]
pub struct TailForce {
    /// `e² ∫₀^δ (I + a/(2Δ)) dΔ`.
    pub near: FourVector,
    /// `e² ∫_δ^H I dΔ`.
    pub far: FourVector,
    /// `(e²/2) ln(ℓ/δ) a`, the finite remainder of the subtracted logarithm.
    pub log_term: FourVector,
    /// `near + far + log_term`, i.e. `m a − f_ext`.
    pub total: FourVector,
    /// Estimated magnitude of the neglected `∫_H^∞`.
    pub truncation_estimate: f64,
}

/// Integrand `I` for a past point `(z', u', a')` seen from `(z, u)`.
fn integrand(z: &V3, u: &V3, zp: &V3, up: &V3, ap: &V3) -> V3 {
    let x = [z[0] - zp[0], z[1] - zp[1], z[2] - zp[2]];
    let xu_p = dot(&x, up);
    let f = (1.0 - dot(&x, ap)) / (xu_p * xu_p);
    let dvec = [ap[0] / xu_p + up[0] * f, ap[1] / xu_p + up[1] * f, ap[2] / xu_p + up[2] * f];
    let (du, xu) = (dot(&dvec, u), dot(&x, u));
    let s = 1.0 / dot(&x, &x).sqrt();
    [(x[0] * du - dvec[0] * xu) * s, (x[1] * du - dvec[1] * xu) * s, (x[2] * du - dvec[2] * xu) * s]
}

/// Limit of `I + a/(2Δ)` at coincidence.
fn coincidence_limit(u: &V3, a: &V3, jerk: &V3) -> V3 {
    let aa = dot(a, a);
    let c = 2.0 / 3.0;
    [c * (jerk[0] + aa * u[0]), c * (jerk[1] + aa * u[1]), c * (jerk[2] + aa * u[2])]
}

/// `∫₀^δ (I + a/(2Δ)) dΔ` given the past point as a function of `Δ`.
/// The integrand loses digits as `Δ → 0`, so the first sliver is a
/// trapezoid against the analytic limit.
fn near_integral<P: FnMut(f64) -> (V3, V3, V3)>(
    z: &V3,
    u: &V3,
    a: &V3,
    jerk: &V3,
    delta: f64,
    mut past: P,
) -> V3 {
    let mut g = |s: f64| {
        let (zp, up, ap) = past(s);
        let i = integrand(z, u, &zp, &up, &ap);
        [i[0] + a[0] / (2.0 * s), i[1] + a[1] / (2.0 * s), i[2] + a[2] / (2.0 * s)]
    };
    let sliver = (delta / 10.0).min(1e-4);
    let g0 = coincidence_limit(u, a, jerk);
    let gs = g(sliver);
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = 0.5 * sliver * (g0[k] + gs[k]);
    }
    let gl = GaussLegendre::new(12);
    // geometric panels keep the O(Δ) structure resolved near the sliver
    let mut lo = sliver;
    while lo < delta {
        let hi = (lo * 8.0).min(delta);
        for (x, w) in gl.mapped(lo, hi) {
            let v = g(x);
            for k in 0..3 {
                out[k] += w * v[k];
            }
        }
        lo = hi;
    }
    out
}

/// `∫_δ^H I dΔ` over a stored or analytic past, with the truncation estimate
/// `|I(H)| H / 2` (the integrand falls at least as `Δ⁻³` after inertial motion).
fn far_integral<W: Worldline + ?Sized>(
    w: &W,
    tau: f64,
    z: &V3,
    u: &V3,
    opts: &TailIntegrationOptions,
    kink: Option<f64>,
) -> Result<(V3, f64)> {
    let g = |delta: f64| -> Vec<f64> {
        let s = w.state_unchecked(tau - delta);
        integrand(z, u, &v3(&s.z), &v3(&s.u), &v3(&s.a)).to_vec()
    };
    let mut breaks = vec![opts.near_window];
    let mut b = opts.near_window;
    while b < opts.horizon {
        b = (b * 2.0).min(opts.horizon);
        breaks.push(b);
    }
    if let Some(k) = kink {
        if k > opts.near_window && k < opts.horizon {
            breaks.push(k);
            breaks.sort_by(f64::total_cmp);
        }
    }
    let mut out = [0.0; 3];
    for pair in breaks.windows(2) {
        if pair[1] - pair[0] <= 1e-14 * pair[1] {
            continue;
        }
        let (v, _) = adaptive_vec(&g, pair[0], pair[1], opts.quad_abs_tol, opts.quad_rel_tol, 2000)?;
        for k in 0..3 {
            out[k] += v[k];
        }
    }
    let end = g(opts.horizon);
    let estimate = end.iter().fold(0.0f64, |m, x| m.max(x.abs())) * opts.horizon / 2.0;
    Ok((out, estimate))
}

fn horizon_check(estimate: f64, scale: f64, opts: &TailIntegrationOptions) -> Result<()> {
    if estimate > opts.horizon_tolerance * scale + 1e-15 {
        return Err(Error::Horizon { horizon: opts.horizon, estimate, tolerance: opts.horizon_tolerance * scale });
    }
    Ok(())
}

fn to_fv(v: V3) -> FourVector {
    FourVector::from_slice(&v).expect("dimension 3")
}

/// Self-force on a charge `e` following the complete worldline `w` at
/// proper time `tau` (the worldline must extend at least a horizon into the past).
pub fn tail_self_force_2plus1<W: Worldline + ?Sized>(
    w: &W,
    tau: f64,
    e: f64,
    opts: &TailIntegrationOptions,
) -> Result<TailForce> {
    opts.validate()?;
    MinkowskiDim::D3.check(w.dim())?;
    let (lo, hi) = w.domain();
    if tau > hi || tau - opts.horizon < lo {
        return invalid(format!("worldline domain [{lo}, {hi}] does not cover τ = {tau} and its horizon"));
    }
    let s = w.state_unchecked(tau);
    check_velocity(&s.u)?;
    let (z, u, a, j) = (v3(&s.z), v3(&s.u), v3(&s.a), v3(&s.jerk));
    let near = near_integral(&z, &u, &a, &j, opts.near_window, |d| {
        let p = w.state_unchecked(tau - d);
        (v3(&p.z), v3(&p.u), v3(&p.a))
    });
    let (far, estimate) = far_integral(w, tau, &z, &u, opts, None)?;
    let e2 = e * e;
    let log_coeff = 0.5 * e2 * (TAIL_RENORMALIZATION_SCALE / opts.near_window).ln();
    let near = to_fv(near).scaled(e2);
    let far = to_fv(far).scaled(e2);
    let log_term = s.a.scaled(log_coeff);
    let total = &(&near + &far) + &log_term;
    let estimate = e2 * estimate;
    horizon_check(estimate, total.max_abs().max(e2 * norm_e(&a)), opts)?;
    Ok(TailForce { near, far, log_term, total, truncation_estimate: estimate })
}

struct Solved {
    a: V3,
    f_ext: FourVector,
    f_self: FourVector,
}

struct TailSolver<'a> {
    field: &'a dyn ExternalField,
    e: f64,
    m: f64,
    opts: TailIntegrationOptions,
    first_tau: f64,
}

impl TailSolver<'_> {
    fn effective_mass(&self) -> f64 {
        self.m - 0.5 * self.e * self.e * (TAIL_RENORMALIZATION_SCALE / self.opts.near_window).ln()
    }

    /// Solves for the acceleration at `(tau, z, u)` with the past beyond the
    /// near window read from `history` and the window itself Taylor-expanded
    /// about the current point. The jerk in that expansion is the one the
    /// external field alone would produce, `(e/m)[(u·∂F)·u + F·a]`; feeding
    /// back a differentiated acceleration instead excites the runaway mode of
    /// the renormalized equation.
    fn solve(&self, history: &HistoryBuffer, tau: f64, z: &V3, u: &V3, guess: &V3) -> Result<Solved> {
        let zf = to_fv(*z);
        let uf = to_fv(*u);
        let fmat = self.field.field(&zf);
        let f_ext = fmat.contract(&uf).scaled(self.e);
        let grad_u = v3(&contract(&self.field.directional_derivative(&zf, &uf), &uf));
        let e2 = self.e * self.e;
        let kink = Some(tau - self.first_tau);
        let (far, estimate) = if e2 == 0.0 {
            ([0.0; 3], 0.0)
        } else {
            far_integral(history, tau, z, u, &self.opts, kink)?
        };
        let m_eff = self.effective_mass();
        let fe = v3(&f_ext);
        // the subtraction a/(2Δ) must not carry a component along u, or the
        // iteration amplifies it
        let mut a = *guess;
        let au = dot(&a, u) / dot(u, u);
        for k in 0..3 {
            a[k] -= au * u[k];
        }
        let mut near = [0.0; 3];
        for _ in 0..3 {
            if e2 == 0.0 {
                break;
            }
            let fa = v3(&fmat.contract(&to_fv(a)));
            let r = self.e / self.m;
            let jerk = [r * (grad_u[0] + fa[0]), r * (grad_u[1] + fa[1]), r * (grad_u[2] + fa[2])];
            near = near_integral(z, u, &a, &jerk, self.opts.near_window, |d| {
                let (d2, d3) = (d * d / 2.0, d * d * d / 6.0);
                let mut out = ([0.0; 3], [0.0; 3], [0.0; 3]);
                for k in 0..3 {
                    out.0[k] = z[k] - d * u[k] + d2 * a[k] - d3 * jerk[k];
                    out.1[k] = u[k] - d * a[k] + d2 * jerk[k];
                    out.2[k] = a[k] - d * jerk[k];
                }
                out
            });
            for k in 0..3 {
                a[k] = (fe[k] + e2 * (near[k] + far[k])) / m_eff;
            }
        }
        if e2 == 0.0 {
            a = [fe[0] / self.m, fe[1] / self.m, fe[2] / self.m];
        } else {
            for k in 0..3 {
                a[k] = (fe[k] + e2 * (near[k] + far[k])) / m_eff;
            }
            // the near-window integrand cancels to ~1e-8 relative at small Δ;
            // remove the resulting component along u
            let au = dot(&a, u) / dot(u, u);
            for k in 0..3 {
                a[k] -= au * u[k];
            }
        }
        let f_self: FourVector = to_fv([self.m * a[0] - fe[0], self.m * a[1] - fe[1], self.m * a[2] - fe[2]]);
        let scale = norm_e(&fe).max(self.m * norm_e(&a)).max(f_self.max_abs());
        horizon_check(e2 * estimate, scale, &self.opts)?;
        Ok(Solved { a, f_ext, f_self })
    }
}

/// Integrates the 2+1 integro-differential equation of motion from
/// `tau_span.0` to `tau_span.1 > tau_span.0`. The initial state is appended
/// to `history` (which fixes the motion before it; an empty buffer uses its
/// pre-history rule), and every accepted step is appended after it.
pub fn integrate_tail_2plus1(
    model: &SelfForceModel,
    field: &dyn ExternalField,
    mut history: HistoryBuffer,
    z0: &FourVector,
    u0: &FourVector,
    tau_span: (f64, f64),
    opts: &TailIntegrationOptions,
) -> Result<Trajectory> {
    if model.kind != SelfForceKind::Tail2Plus1 {
        return Err(Error::Unsupported(format!("tail integration of {:?}", model.kind)));
    }
    opts.validate()?;
    let dim = MinkowskiDim::D3;
    for d in [field.dim(), z0.dim(), u0.dim(), history.dim()] {
        dim.check(d)?;
    }
    check_velocity(u0)?;
    if !(tau_span.1 > tau_span.0) {
        return invalid("tail integration runs forward in proper time only");
    }
    let mut opts = *opts;
    opts.ode.h_max = opts.ode.h_max.min(opts.near_window);
    opts.ode.h_init = opts.ode.h_init.min(opts.near_window);
    history.horizon = opts.horizon;
    let q = model.charge;
    let mut solver = TailSolver { field, e: q.e, m: q.m, opts, first_tau: tau_span.0 };
    if solver.effective_mass() <= 0.0 {
        return invalid(format!(
            "near window {} leaves a non-positive bare inertia; enlarge it or reduce the charge",
            opts.near_window
        ));
    }

    let d = 3;
    let (z, u) = (v3(z0), v3(u0));
    let guess = v3(&field.field(z0).contract(u0).scaled(q.e / q.m));
    let start = {
        // the history does not yet hold the current point; look back from a
        // provisional copy that includes it at zero acceleration
        let mut probe = history.clone();
        probe.push(tau_span.0, z0.clone(), u0.clone(), FourVector::zero(dim))?;
        solver.first_tau = probe.first_tau().unwrap_or(tau_span.0);
        solver.solve(&probe, tau_span.0, &z, &u, &guess)?
    };
    history.push(tau_span.0, z0.clone(), u0.clone(), to_fv(start.a))?;
    let zero = FourVector::zero(dim);
    let mut samples = vec![TrajectorySample {
        tau: tau_span.0,
        z: z0.clone(),
        u: u0.clone(),
        a: to_fv(start.a),
        f_self: start.f_self.clone(),
        f_ext: start.f_ext.clone(),
        impulse_ext: zero.clone(),
        impulse_self: zero,
    }];
    let mut y0 = vec![0.0; 4 * d];
    y0[..d].copy_from_slice(&z);
    y0[d..2 * d].copy_from_slice(&u);

    let mut diagnostics = Diagnostics::default();
    // the newest acceleration seeds each solve
    let guide = std::cell::Cell::new(start.a);
    // The buffer only changes inside `on_accept`, after all stage evaluations
    // of the step; a RefCell lets both closures see it.
    let history = std::cell::RefCell::new(history);
    let solver_ref = &solver;
    let rhs = |tau: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (z, u) = (v3(&split(y, d, 0)), v3(&split(y, d, 1)));
        let hist = history.borrow();
        let s = solver_ref.solve(&hist, tau, &z, &u, &guide.get())?;
        for k in 0..d {
            dy[k] = u[k];
            dy[d + k] = s.a[k];
            dy[2 * d + k] = s.f_ext[k];
            dy[3 * d + k] = s.f_self[k];
        }
        Ok(())
    };
    let result = integrate(rhs, tau_span.0, &y0, tau_span.1, &opts.ode, |step, y| {
        let drift = normalize_velocity(y, d);
        diagnostics.max_normalization_drift = diagnostics.max_normalization_drift.max(drift);
        let tau = step.t1();
        let (z, u) = (v3(&split(y, d, 0)), v3(&split(y, d, 1)));
        let s = {
            let hist = history.borrow();
            solver_ref.solve(&hist, tau, &z, &u, &guide.get())?
        };
        let mut hist = history.borrow_mut();
        hist.push(tau, to_fv(z), to_fv(u), to_fv(s.a))?;
        guide.set(s.a);
        samples.push(TrajectorySample {
            tau,
            z: to_fv(z),
            u: to_fv(u),
            a: to_fv(s.a),
            f_self: s.f_self,
            f_ext: s.f_ext,
            impulse_ext: split(y, d, 2),
            impulse_self: split(y, d, 3),
        });
        Ok(Control::Continue)
    });
    match result {
        Ok((_, stats)) => {
            diagnostics.accepted_steps = stats.accepted;
            diagnostics.rejected_steps = stats.rejected;
            diagnostics.rhs_evaluations = stats.evaluations;
        }
        Err(Error::Integration { tau, reason }) => {
            log::warn!("tail integration stopped at τ = {tau}: {reason}");
            diagnostics.truncated = Some(format!("stopped at tau = {tau}: {reason}"));
        }
        Err(e) => return Err(e),
    }
    Ok(Trajectory { model: *model, samples, worldline: history.into_inner(), diagnostics })
}
