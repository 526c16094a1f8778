//! Liénard–Wiechert potentials and fields.

use super::{ElectromagneticPotential, FieldTensor};
use crate::error::{Error, Result};
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::worldline::{advanced_time, light_cone_intersection, retarded_time, Cone, RetardedPoint, Worldline};

fn require_dim<W: Worldline + ?Sized>(w: &W, d: usize) -> Result<()> {
    if w.dim().d() != d {
        return Err(Error::DimensionMismatch { expected: d, got: w.dim().d() });
    }
    Ok(())
}

/// Retarded potential `A = e u / ρ` of a point charge in four dimensions.
pub fn lw_potential_4d<W: Worldline + ?Sized>(w: &W, e: f64, x: &FourVector) -> Result<ElectromagneticPotential> {
    require_dim(w, 4)?;
    let p = retarded_time(w, x)?;
    Ok(potential_from_point(&p, e))
}

/// Advanced potential, the same expression evaluated on the future cone.
pub fn lw_potential_4d_advanced<W: Worldline + ?Sized>(
    w: &W,
    e: f64,
    x: &FourVector,
) -> Result<ElectromagneticPotential> {
    require_dim(w, 4)?;
    let p = advanced_time(w, x)?;
    Ok(potential_from_point(&p, e))
}

fn potential_from_point(p: &RetardedPoint, e: f64) -> ElectromagneticPotential {
    ElectromagneticPotential { dim: p.u.dim(), a: p.u.scaled(e / p.rho) }
}

/// Velocity (Coulomb-like, `1/ρ²`) and acceleration (radiative, `1/ρ`)
/// parts of the Liénard–Wiechert field, with the emission point.
#[derive(Debug, Clone)]
pub struct LwFieldParts {
    pub velocity: FieldTensor,
    pub acceleration: FieldTensor,
    pub point: RetardedPoint,
}

impl LwFieldParts {
    pub fn total(&self) -> FieldTensor {
        self.velocity.add(&self.acceleration).expect("parts share a dimension")
    }
}

/// Split retarded field of a charge in four dimensions.
pub fn lw_field_4d_split<W: Worldline + ?Sized>(w: &W, e: f64, x: &FourVector) -> Result<LwFieldParts> {
    require_dim(w, 4)?;
    let p = light_cone_intersection(w, x, Cone::Past)?;
    Ok(field_parts(p, e, Cone::Past))
}

/// Retarded field tensor in four dimensions.
pub fn lw_field_4d<W: Worldline + ?Sized>(w: &W, e: f64, x: &FourVector) -> Result<FieldTensor> {
    Ok(lw_field_4d_split(w, e, x)?.total())
}

/// Advanced field tensor in four dimensions.
pub fn lw_field_4d_advanced<W: Worldline + ?Sized>(w: &W, e: f64, x: &FourVector) -> Result<FieldTensor> {
    require_dim(w, 4)?;
    let p = light_cone_intersection(w, x, Cone::Future)?;
    Ok(field_parts(p, e, Cone::Future).total())
}

/// `F = σ e / (X·u)² · X ∧ W` with `W = a - u (X·a - 1)/(X·u)` and
/// `σ = ±1` on the past/future cone.
pub(crate) fn field_parts(p: RetardedPoint, e: f64, cone: Cone) -> LwFieldParts {
    let sigma = match cone {
        Cone::Past => 1.0,
        Cone::Future => -1.0,
    };
    let x = &p.separation;
    let xu = x.dot(&p.u);
    let xa = x.dot(&p.a);
    let pref = sigma * e / (xu * xu);
    let w_vel = p.u.scaled(1.0 / xu);
    let mut w_acc = p.a.clone();
    w_acc.axpy(-xa / xu, &p.u);
    LwFieldParts {
        velocity: FieldTensor::wedge(x, &w_vel).scaled(pref),
        acceleration: FieldTensor::wedge(x, &w_acc).scaled(pref),
        point: p,
    }
}

/// Retarded potential in six dimensions,
/// `A = (e/3) [a/ρ² + u (1 - X·a)/ρ³]`, normalized so that a static charge
/// gives `e / (3 r³)`.
pub fn lw_potential_6d<W: Worldline + ?Sized>(w: &W, e: f64, x: &FourVector) -> Result<ElectromagneticPotential> {
    require_dim(w, 6)?;
    let p = retarded_time(w, x)?;
    Ok(potential_6d_from_point(&p, e))
}

pub(crate) fn potential_6d_from_point(p: &RetardedPoint, e: f64) -> ElectromagneticPotential {
    let rho = p.rho;
    let xa = p.separation.dot(&p.a);
    let mut a = p.a.scaled(e / (3.0 * rho * rho));
    a.axpy(e * (1.0 - xa) / (3.0 * rho * rho * rho), &p.u);
    ElectromagneticPotential { dim: MinkowskiDim::D6, a }
}

/// Six-dimensional field tensor `∂^μ A^ν - ∂^ν A^μ` by a fourth-order
/// central difference of [`lw_potential_6d`].
pub fn lw_field_6d<W: Worldline + ?Sized>(w: &W, e: f64, x: &FourVector) -> Result<FieldTensor> {
    require_dim(w, 6)?;
    let p = retarded_time(w, x)?;
    let acc = p.a.norm2().abs().sqrt();
    let mut length = p.rho;
    if acc > 0.0 {
        length = length.min(1.0 / acc);
    }
    let h = 1e-3 * length;
    let d = 6;
    // grad[α][β] = ∂_α A^β
    let mut grad = [[0.0f64; 6]; 6];
    for (alpha, row) in grad.iter_mut().enumerate() {
        let eval = |s: f64| -> Result<FourVector> {
            let mut y = x.clone();
            y[alpha] += s;
            Ok(lw_potential_6d(w, e, &y)?.a)
        };
        let (p1, m1, p2, m2) = (eval(h)?, eval(-h)?, eval(2.0 * h)?, eval(-2.0 * h)?);
        for (beta, g) in row.iter_mut().enumerate() {
            *g = (8.0 * (p1[beta] - m1[beta]) - (p2[beta] - m2[beta])) / (12.0 * h);
        }
    }
    let dim = MinkowskiDim::D6;
    let f = nalgebra::DMatrix::from_fn(d, d, |m, n| dim.metric(m) * grad[m][n] - dim.metric(n) * grad[n][m]);
    FieldTensor::from_matrix(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::AnalyticMotion;

    fn x4(c: [f64; 4]) -> FourVector {
        FourVector::from_slice(&c).unwrap()
    }

    #[test]
    fn coulomb_potential_and_field() {
        let w = AnalyticMotion::rest(MinkowskiDim::D4, &[0.0; 3]);
        let x = x4([3.0, 2.0, 0.0, 0.0]);
        let a = lw_potential_4d(&w, 1.5, &x).unwrap();
        assert!((a.a[0] - 0.75).abs() < 1e-15);
        assert!(a.a.spatial().iter().all(|c| *c == 0.0));
        let f = lw_field_4d(&w, 1.5, &x).unwrap();
        assert!((f.electric()[0] - 1.5 / 4.0).abs() < 1e-15);
        assert_eq!(f.magnetic().unwrap(), [0.0; 3]);
        let adv = lw_field_4d_advanced(&w, 1.5, &x).unwrap();
        assert!((adv.electric()[0] - 1.5 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn six_dimensional_static_potential() {
        let w = AnalyticMotion::rest(MinkowskiDim::D6, &[0.0; 5]);
        let x = FourVector::from_slice(&[4.0, 0.0, 2.0, 0.0, 0.0, 0.0]).unwrap();
        let a = lw_potential_6d(&w, 1.0, &x).unwrap();
        assert!((a.a[0] - 1.0 / 24.0).abs() < 1e-15);
        // E = -∇(e / 3r³) = e r̂ / r⁴
        let f = lw_field_6d(&w, 1.0, &x).unwrap();
        assert!((f.electric()[1] - 1.0 / 16.0).abs() < 1e-10, "{:?}", f.electric());
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let w = AnalyticMotion::rest(MinkowskiDim::D6, &[0.0; 5]);
        assert!(matches!(
            lw_potential_4d(&w, 1.0, &x4([1.0, 1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
