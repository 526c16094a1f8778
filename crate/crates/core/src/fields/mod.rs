//! Electromagnetic potentials, field tensors and stress-energy.

mod algebra;
mod constant;
mod grid;
mod lw;

pub use algebra::{field_eigensystem, invariants, stress_energy, FieldEigensystem};
pub use constant::{constant_field_motion, ConstantFieldMotion};
pub use grid::{evaluate_field_grid, write_field_grid, GridSample};
pub use lw::{
    lw_field_4d, lw_field_4d_advanced, lw_field_4d_split, lw_field_6d, lw_potential_4d,
    lw_potential_4d_advanced, lw_potential_6d, LwFieldParts,
};
pub(crate) use lw::field_parts;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spacetime::{FourVector, LorentzTransform, MinkowskiDim};

/// A point charge. Gaussian units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub e: f64,
    pub m: f64,
}

impl Charge {
    pub fn new(e: f64, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return invalid(format!("rest mass must be positive and finite, got {m}"));
        }
        if !e.is_finite() {
            return invalid(format!("charge must be finite, got {e}"));
        }
        Ok(Charge { e, m })
    }

    /// `e / m`.
    pub fn ratio(&self) -> f64 {
        self.e / self.m
    }
}

/// Vector potential `A^μ` at one field point.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectromagneticPotential {
    pub dim: MinkowskiDim,
    pub a: FourVector,
}

/// Contravariant field tensor `F^{μν}`, antisymmetric by construction.
///
/// In four dimensions `F^{i0} = E^i` and `F^{ij} = -ε_{ijk} B^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTensor {
    pub dim: MinkowskiDim,
    f: DMatrix<f64>,
}

impl FieldTensor {
    pub fn zero(dim: MinkowskiDim) -> Self {
        FieldTensor { dim, f: DMatrix::zeros(dim.d(), dim.d()) }
    }

    /// Accepts a matrix that is antisymmetric to `1e-12` relative and stores
    /// its exact antisymmetric part.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return invalid("field tensor must be square");
        }
        let dim = MinkowskiDim::new(m.nrows())?;
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let sym = (&m + m.transpose()).amax();
        if sym > 1e-12 * scale {
            return invalid(format!("field tensor is not antisymmetric (|F + Fᵀ| = {sym:e})"));
        }
        Ok(FieldTensor { dim, f: (&m - m.transpose()) * 0.5 })
    }

    /// Four-dimensional tensor from electric and magnetic 3-vectors.
    pub fn from_e_b(e: [f64; 3], b: [f64; 3]) -> Self {
        let mut f = DMatrix::zeros(4, 4);
        for i in 0..3 {
            f[(i + 1, 0)] = e[i];
            f[(0, i + 1)] = -e[i];
        }
        f[(1, 2)] = -b[2];
        f[(2, 1)] = b[2];
        f[(2, 3)] = -b[0];
        f[(3, 2)] = b[0];
        f[(3, 1)] = -b[1];
        f[(1, 3)] = b[1];
        FieldTensor { dim: MinkowskiDim::D4, f }
    }

    /// Three-dimensional tensor from the in-plane electric field and the
    /// scalar magnetic field `B = F^{21}`.
    pub fn from_e_b_2plus1(e: [f64; 2], b: f64) -> Self {
        let mut f = DMatrix::zeros(3, 3);
        for i in 0..2 {
            f[(i + 1, 0)] = e[i];
            f[(0, i + 1)] = -e[i];
        }
        f[(1, 2)] = -b;
        f[(2, 1)] = b;
        FieldTensor { dim: MinkowskiDim::D3, f }
    }

    /// `X^μ W^ν - X^ν W^μ`.
    pub fn wedge(x: &FourVector, w: &FourVector) -> Self {
        let d = x.len();
        let f = DMatrix::from_fn(d, d, |m, n| x[m] * w[n] - x[n] * w[m]);
        FieldTensor { dim: x.dim(), f }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.f[(mu, nu)]
    }

    /// Mixed components `F^μ_ν`; `du/dτ = (e/m) F^μ_ν u^ν` is the Lorentz force law.
    pub fn mixed(&self) -> DMatrix<f64> {
        let eta = self.dim.metric_matrix();
        &self.f * eta
    }

    /// Covariant components `F_{μν}`.
    pub fn lowered(&self) -> DMatrix<f64> {
        let eta = self.dim.metric_matrix();
        &eta * &self.f * eta
    }

    /// `F^{μν} u_ν`.
    pub fn contract(&self, u: &FourVector) -> FourVector {
        let d = self.dim.d();
        let mut out = vec![0.0; d];
        for (m, o) in out.iter_mut().enumerate() {
            *o = (0..d).map(|n| self.f[(m, n)] * self.dim.metric(n) * u[n]).sum();
        }
        FourVector::new(out).expect("dimension preserved")
    }

    /// Electric field `E^i = F^{i0}`.
    pub fn electric(&self) -> Vec<f64> {
        (1..self.dim.d()).map(|i| self.f[(i, 0)]).collect()
    }

    /// Magnetic field (four dimensions only).
    pub fn magnetic(&self) -> Result<[f64; 3]> {
        self.require_4d()?;
        Ok([-self.f[(2, 3)], -self.f[(3, 1)], -self.f[(1, 2)]])
    }

    /// `Λ F Λᵀ`.
    pub fn transformed(&self, l: &LorentzTransform) -> Result<Self> {
        self.dim.check(l.dim())?;
        Ok(FieldTensor { dim: self.dim, f: l.apply_tensor(&self.f) })
    }

    pub fn scaled(&self, s: f64) -> Self {
        FieldTensor { dim: self.dim, f: &self.f * s }
    }

    pub fn add(&self, other: &FieldTensor) -> Result<Self> {
        self.dim.check(other.dim)?;
        Ok(FieldTensor { dim: self.dim, f: &self.f + &other.f })
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.f.amax()
    }

    pub(crate) fn require_4d(&self) -> Result<()> {
        if self.dim.d() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: self.dim.d() });
        }
        Ok(())
    }
}

/// Energy-momentum tensor density `T^{μν}` of the field at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct StressEnergy {
    pub dim: MinkowskiDim,
    pub t: DMatrix<f64>,
}

impl StressEnergy {
    pub fn energy_density(&self) -> f64 {
        self.t[(0, 0)]
    }

    /// Momentum density / energy flux `T^{0i}`.
    pub fn poynting(&self) -> Vec<f64> {
        (1..self.dim.d()).map(|i| self.t[(0, i)]).collect()
    }

    /// `η_{μν} T^{μν}`.
    pub fn trace(&self) -> f64 {
        (0..self.dim.d()).map(|m| self.dim.metric(m) * self.t[(m, m)]).sum()
    }

    /// `T^{μν} n_ν` for a covector `n` given with upper indices.
    pub fn contract(&self, n: &FourVector) -> FourVector {
        let d = self.dim.d();
        let v = (0..d)
            .map(|m| (0..d).map(|k| self.t[(m, k)] * self.dim.metric(k) * n[k]).sum())
            .collect();
        FourVector::new(v).expect("dimension preserved")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_b_round_trip() {
        let f = FieldTensor::from_e_b([1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
        assert_eq!(f.electric(), vec![1.0, 2.0, 3.0]);
        assert_eq!(f.magnetic().unwrap(), [4.0, 5.0, 6.0]);
        assert_eq!((f.matrix() + f.matrix().transpose()).amax(), 0.0);
    }

    #[test]
    fn rejects_symmetric_input() {
        let m = DMatrix::from_element(4, 4, 1.0);
        assert!(FieldTensor::from_matrix(m).is_err());
    }

    #[test]
    fn lorentz_force_on_static_charge_is_along_e() {
        let f = FieldTensor::from_e_b([0.5, 0.0, 0.0], [0.0, 0.0, 1.0]);
        let u = FourVector::time_unit(MinkowskiDim::D4);
        let fu = f.contract(&u);
        assert_eq!(fu.as_slice(), &[0.0, 0.5, 0.0, 0.0]);
        // v = x̂ in B = ẑ: v × B = -ŷ
        let u = FourVector::from_slice(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        let fu = FieldTensor::from_e_b([0.0; 3], [0.0, 0.0, 1.0]).contract(&u);
        assert_eq!(fu.as_slice(), &[0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn charge_requires_positive_mass() {
        assert!(Charge::new(1.0, 0.0).is_err());
        assert!(Charge::new(1.0, -1.0).is_err());
        assert!(Charge::new(-1.0, 2.0).is_ok());
    }
}
