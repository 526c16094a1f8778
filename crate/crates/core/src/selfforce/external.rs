//! Externally applied electromagnetic fields.

use nalgebra::DMatrix;

use crate::fields::FieldTensor;
use crate::spacetime::{FourVector, MinkowskiDim};

/// Step used for finite-difference field gradients.
pub const GRADIENT_STEP: f64 = 1e-5;

/// A prescribed field `F^{μν}(x)`.
pub trait ExternalField: Send + Sync {
    fn dim(&self) -> MinkowskiDim;

    fn field(&self, x: &FourVector) -> FieldTensor;

    /// `(v·∂) F^{μν}` at `x`, by Richardson-extrapolated central differences.
    fn directional_derivative(&self, x: &FourVector, v: &FourVector) -> DMatrix<f64> {
        let diff = |h: f64| {
            let mut xp = x.clone();
            xp.axpy(h, v);
            let mut xm = x.clone();
            xm.axpy(-h, v);
            (self.field(&xp).matrix() - self.field(&xm).matrix()) / (2.0 * h)
        };
        let coarse = diff(GRADIENT_STEP);
        let fine = diff(GRADIENT_STEP / 2.0);
        (fine * 4.0 - coarse) / 3.0
    }
}

/// The same field tensor everywhere.
#[derive(Debug, Clone)]
pub struct UniformField(pub FieldTensor);

impl ExternalField for UniformField {
    fn dim(&self) -> MinkowskiDim {
        self.0.dim
    }

    fn field(&self, _x: &FourVector) -> FieldTensor {
        self.0.clone()
    }

    fn directional_derivative(&self, _x: &FourVector, _v: &FourVector) -> DMatrix<f64> {
        DMatrix::zeros(self.0.dim.d(), self.0.dim.d())
    }
}

/// A uniform field switched on smoothly in lab time: zero before `t_on`,
/// full strength after `t_on + ramp`, quintic smoothstep in between.
#[derive(Debug, Clone)]
pub struct RampedUniformField {
    pub field: FieldTensor,
    pub t_on: f64,
    pub ramp: f64,
}

impl RampedUniformField {
    pub fn envelope(&self, t: f64) -> f64 {
        if self.ramp <= 0.0 {
            return if t >= self.t_on { 1.0 } else { 0.0 };
        }
        let s = ((t - self.t_on) / self.ramp).clamp(0.0, 1.0);
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

impl ExternalField for RampedUniformField {
    fn dim(&self) -> MinkowskiDim {
        self.field.dim
    }

    fn field(&self, x: &FourVector) -> FieldTensor {
        self.field.scaled(self.envelope(x[0]))
    }
}
