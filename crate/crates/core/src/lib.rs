//! Covariant classical field theory of point sources: Liénard–Wiechert
//! potentials and fields, retarded Green's functions in any dimension,
//! radiation-reaction equations of motion and numerical verification of the
//! energy-momentum and angular-momentum balance between particle and field.
//!
//! Conventions are fixed once in [`units`]: Gaussian units, `c = 1`, metric
//! signature `(+, -, ..., -)`.

pub mod balance;
pub mod checks;
pub mod error;
pub mod fields;
pub mod greens;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod selfforce;
pub mod spacetime;
pub mod special;
pub mod units;
pub mod worldline;

pub use error::{Error, Result};
pub use fields::{Charge, ElectromagneticPotential, FieldTensor, StressEnergy};
pub use spacetime::{boost, minkowski_dot, raise_lower, FourVector, LorentzTransform, MinkowskiDim, Variance};
pub use worldline::{advanced_time, retarded_time, AnalyticMotion, RetardedPoint, Worldline, WorldlineState};
