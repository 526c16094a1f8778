use nalgebra::DMatrix;
use serde::Serialize;

use super::{flux, FieldPart, FluxSurface, Shape, Source};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::selfforce::{tail_self_force_2plus1, TailIntegrationOptions, Trajectory};
use crate::spacetime::FourVector;
use crate::worldline::Worldline;

/// `W − Δp − P_rad = residual`, with every term kept.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    #[serde(rename = "dP_particle")]
    pub dp_particle: Vec<f64>,
    #[serde(rename = "P_flux")]
    pub p_flux: Vec<f64>,
    #[serde(rename = "W")]
    pub work: Vec<f64>,
    pub residual: Vec<f64>,
    #[serde(rename = "M_flux")]
    pub m_flux: Vec<Vec<f64>>,
    /// Largest residual component over the largest component of any term.
    pub rel_residual: f64,
}

impl BalanceReport {
    pub fn new(dp: &FourVector, p_flux: &FourVector, work: &FourVector, m_flux: Option<&DMatrix<f64>>) -> Result<Self> {
        let residual = &(work - dp) - p_flux;
        let scale = dp.max_abs().max(p_flux.max_abs()).max(work.max_abs());
        let rel_residual = if scale > 0.0 { residual.max_abs() / scale } else { residual.max_abs() };
        let m_flux = m_flux
            .map(|m| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect())
            .unwrap_or_default();
        let report = BalanceReport {
            dp_particle: dp.as_slice().to_vec(),
            p_flux: p_flux.as_slice().to_vec(),
            work: work.as_slice().to_vec(),
            residual: residual.as_slice().to_vec(),
            m_flux,
            rel_residual,
        };
        if !report.is_finite() {
            return Err(Error::Accuracy {
                requested: 0.0,
                achieved: f64::INFINITY,
                context: "balance report has non-finite entries".into(),
            });
        }
        Ok(report)
    }

    pub fn is_finite(&self) -> bool {
        let rows = [&self.dp_particle, &self.p_flux, &self.work, &self.residual];
        rows.iter().all(|r| r.iter().all(|v| v.is_finite()))
            && self.m_flux.iter().flatten().all(|v| v.is_finite())
            && self.rel_residual.is_finite()
    }
}

/// Ledger for an integrated trajectory: external work from the stored
/// impulse, particle change `m Δu`, and the radiated momentum supplied by
/// the caller.
pub fn work_energy_ledger(traj: &Trajectory, p_rad: &FourVector, m_flux: Option<&DMatrix<f64>>) -> Result<BalanceReport> {
    let (first, last) = (traj.first(), traj.last());
    let work = &last.impulse_ext - &first.impulse_ext;
    let dp = (&last.u - &first.u).scaled(traj.model.charge.m);
    BalanceReport::new(&dp, p_rad, &work, m_flux)
}

/// Momentum and angular momentum leaving the retarded tubes `ρ = R, 2R, 4R`
/// over the whole trajectory, extrapolated to `R → ∞` assuming corrections
/// in powers of `1/R`. The error is the change of the extrapolation when
/// the innermost tube is dropped, plus the quadrature error.
pub fn radiated_from_flux(
    traj: &Trajectory,
    radius: f64,
    angular_order: usize,
    panels: usize,
) -> Result<(FourVector, DMatrix<f64>, f64)> {
    let source = Source::Electromagnetic { charge: traj.model.charge.e };
    let span = (traj.first().tau, traj.last().tau);
    let w: &dyn Worldline = &traj.worldline;
    let mut p = Vec::new();
    let mut m = Vec::new();
    let mut quad_err: f64 = 0.0;
    for r in [radius, 2.0 * radius, 4.0 * radius] {
        let surface = FluxSurface { shape: Shape::RetardedTube { radius: r, tau: span }, angular_order, panels };
        let res = flux(w, source, &surface, FieldPart::Total)?;
        quad_err = quad_err.max(res.momentum_error);
        p.push(res.momentum);
        m.push(res.angular_momentum);
    }
    let lin = |f1: &FourVector, f2: &FourVector| &f2.scaled(2.0) - f1;
    let (g1, g2) = (lin(&p[0], &p[1]), lin(&p[1], &p[2]));
    let p_inf = (&g2.scaled(4.0) - &g1).scaled(1.0 / 3.0);
    let mg1 = &m[1] * 2.0 - &m[0];
    let mg2 = &m[2] * 2.0 - &m[1];
    let m_inf = (mg2 * 4.0 - mg1) / 3.0;
    let err = (&p_inf - &g2).max_abs() + quad_err;
    Ok((p_inf, m_inf, err))
}

/// Radiated momentum of a 2+1 tail trajectory, `−∫ f_self dτ`, with the
/// self-force recomputed from the stored worldline on `panels`
/// eight-point Gauss–Legendre panels.
pub fn radiated_from_self_force_2plus1(traj: &Trajectory, opts: &TailIntegrationOptions, panels: usize) -> Result<FourVector> {
    let (t0, t1) = (traj.first().tau, traj.last().tau);
    let gl = GaussLegendre::new(8);
    let h = (t1 - t0) / panels.max(1) as f64;
    let mut total = FourVector::zero(traj.worldline.dim());
    for i in 0..panels.max(1) {
        let a = t0 + i as f64 * h;
        for (tau, wt) in gl.mapped(a, a + h) {
            let f = tail_self_force_2plus1(&traj.worldline, tau, traj.model.charge.e, opts)?;
            total.axpy(-wt, &f.total);
        }
    }
    Ok(total)
}
