//! Exact motion of a charge in a constant, uniform field.

use nalgebra::{DMatrix, DVector};

use super::{Charge, FieldTensor};
use crate::error::{invalid, Result};
use crate::linalg::expm;
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::worldline::{Worldline, WorldlineState};

/// `u(τ) = exp(τ M) u₀` with `M = (e/m) F^μ_ν`; the position follows from the
/// exponential of the augmented generator `[[M, u₀], [0, 0]]`.
#[derive(Debug, Clone)]
pub struct ConstantFieldMotion {
    generator: DMatrix<f64>,
    augmented: DMatrix<f64>,
    z0: FourVector,
    u0: FourVector,
}

/// Worldline through the origin at `τ = 0` with four-velocity `u0`.
pub fn constant_field_motion(f: &FieldTensor, charge: &Charge, u0: &FourVector) -> Result<ConstantFieldMotion> {
    ConstantFieldMotion::new(f, charge, FourVector::zero(MinkowskiDim::D4), u0.clone())
}

impl ConstantFieldMotion {
    pub fn new(f: &FieldTensor, charge: &Charge, z0: FourVector, u0: FourVector) -> Result<Self> {
        f.require_4d()?;
        MinkowskiDim::D4.check(z0.dim())?;
        MinkowskiDim::D4.check(u0.dim())?;
        if (u0.norm2() - 1.0).abs() > 1e-10 || u0[0] <= 0.0 {
            return invalid("initial four-velocity must be future-pointing with u·u = 1");
        }
        let generator = f.mixed() * charge.ratio();
        let mut augmented = DMatrix::zeros(5, 5);
        augmented.view_mut((0, 0), (4, 4)).copy_from(&generator);
        for i in 0..4 {
            augmented[(i, 4)] = u0[i];
        }
        Ok(ConstantFieldMotion { generator, augmented, z0, u0 })
    }

    /// `(e/m) F^μ_ν`.
    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    fn velocity_and_position(&self, tau: f64) -> (FourVector, FourVector) {
        let e = expm(&(&self.augmented * tau));
        let u0 = DVector::from_column_slice(self.u0.as_slice());
        let u = e.view((0, 0), (4, 4)) * u0;
        let mut z = self.z0.clone();
        for i in 0..4 {
            z[i] += e[(i, 4)];
        }
        (FourVector::new(u.iter().copied().collect()).expect("4D"), z)
    }

    fn apply(&self, v: &FourVector) -> FourVector {
        let r = &self.generator * DVector::from_column_slice(v.as_slice());
        FourVector::new(r.iter().copied().collect()).expect("4D")
    }
}

impl Worldline for ConstantFieldMotion {
    fn dim(&self) -> MinkowskiDim {
        MinkowskiDim::D4
    }

    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        let (u, z) = self.velocity_and_position(tau);
        let a = self.apply(&u);
        let jerk = self.apply(&a);
        WorldlineState { tau, z, u, a, jerk }
    }

    fn position_unchecked(&self, tau: f64) -> FourVector {
        self.velocity_and_position(tau).1
    }

    fn proper_time_hint(&self, t: f64) -> f64 {
        (t - self.z0[0]) / self.u0[0]
    }

    fn derivatives(&self, tau: f64, order: usize) -> Result<Vec<FourVector>> {
        let (u, z) = self.velocity_and_position(tau);
        let mut out = vec![z];
        if order >= 1 {
            out.push(u);
        }
        while out.len() <= order {
            let next = self.apply(out.last().expect("non-empty"));
            out.push(next);
        }
        Ok(out)
    }
}
