//! Radiation-reaction forces and equations of motion.

mod external;
mod history;
mod raw;
mod reduced;
mod scalar;
mod tail;
mod trajectory;

pub use external::{ExternalField, RampedUniformField, UniformField};
pub use history::{HistoryBuffer, PreHistory};
pub use raw::{integrate_lorentz_dirac_raw, RawOptions, RunawayFit};
pub use reduced::{integrate_reduced_order, reduced_order_force};
pub use scalar::{scalar_local_force, scalar_self_force, ScalarForce, TailOptions};
pub use tail::{integrate_tail_2plus1, tail_self_force_2plus1, TailForce, TailIntegrationOptions};
pub use trajectory::{write_trajectory, Diagnostics, Trajectory, TrajectorySample};

use crate::error::{invalid, Error, Result};
use crate::fields::Charge;
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::units::LD_COEFFICIENT;

/// Which self-interaction an integration includes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelfForceKind {
    LorentzDirac4d,
    ReducedOrder4d,
    SixD,
    Tail2Plus1,
    ScalarMassive { field_mass: f64 },
    ScalarMassless,
}

impl SelfForceKind {
    pub fn dim(&self) -> MinkowskiDim {
        match self {
            SelfForceKind::SixD => MinkowskiDim::D6,
            SelfForceKind::Tail2Plus1 => MinkowskiDim::D3,
            _ => MinkowskiDim::D4,
        }
    }
}

/// A self-force kind with its particle. For scalar kinds `charge.e` is the
/// scalar coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfForceModel {
    pub kind: SelfForceKind,
    pub charge: Charge,
}

impl SelfForceModel {
    pub fn new(kind: SelfForceKind, charge: Charge) -> Result<Self> {
        if let SelfForceKind::ScalarMassive { field_mass } = kind {
            if !(field_mass > 0.0) {
                return invalid(format!("massive scalar field needs a positive mass, got {field_mass}"));
            }
        }
        Ok(SelfForceModel { kind, charge })
    }

    pub fn dim(&self) -> MinkowskiDim {
        self.kind.dim()
    }

    /// `τ₀ = 2e²/(3m)`.
    pub fn tau0(&self) -> f64 {
        LD_COEFFICIENT * self.charge.e * self.charge.e / self.charge.m
    }
}

pub(crate) fn check_velocity(u: &FourVector) -> Result<()> {
    let n = u.norm2();
    if !((n - 1.0).abs() <= 1e-8) || u[0] <= 0.0 {
        return invalid(format!("four-velocity must satisfy u·u = 1 (got {n})"));
    }
    Ok(())
}

fn require(v: &FourVector, dim: MinkowskiDim) -> Result<()> {
    if v.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim.d(), got: v.len() });
    }
    Ok(())
}

/// Lorentz–Dirac force split into its Schott and radiative pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct LdForce {
    /// `(2e²/3) ȧ`.
    pub schott: FourVector,
    /// `(2e²/3)(a·a) u = -R u` with `R` the Larmor rate.
    pub radiative: FourVector,
    pub total: FourVector,
}

impl LdForce {
    /// `-radiative·u = -(2e²/3)(a·a) ≥ 0`, the invariant Larmor rate.
    pub fn larmor_rate(&self, u: &FourVector) -> f64 {
        -self.radiative.dot(u)
    }
}

/// `f = (2e²/3)(ȧ + (a·a) u)` in signature `(+,-,-,-)`.
pub fn lorentz_dirac_force(u: &FourVector, a: &FourVector, jerk: &FourVector, charge: &Charge) -> Result<LdForce> {
    for v in [u, a, jerk] {
        require(v, MinkowskiDim::D4)?;
    }
    check_velocity(u)?;
    let k = LD_COEFFICIENT * charge.e * charge.e;
    let schott = jerk.scaled(k);
    let radiative = u.scaled(k * a.norm2());
    let total = &schott + &radiative;
    Ok(LdForce { schott, radiative, total })
}

/// Six-dimensional reaction force with its Schott term and radiated rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SixDForce {
    pub total: FourVector,
    pub schott: FourVector,
    /// Rate of energy-momentum carried off by radiation, `R^μ`.
    pub radiated: FourVector,
}

/// Reaction force on a charge in six dimensions, from the derivatives
/// `[u, a, ȧ, ä, ⃛a]` of the worldline:
///
/// `f = e²[-(4/45) ⃛a - (2/9)(a·a) ȧ - (2/3)(a·ȧ) a
///        - ((4/15) ȧ·ȧ + (16/45) a·ä + (2/9)(a·a)²) u]`,
///
/// equal to `dS/dτ - R` with
/// `S = e²[-(4/45) ä - (64/315)(a·a) a - (16/45)(a·ȧ) u]` and
/// `R = e²{[-(4/45) ȧ·ȧ + (2/9)(a·a)²] u - (2/21)(a·ȧ) a + (2/105)(a·a) ȧ}`.
pub fn six_d_reaction_force(derivatives: &[FourVector], e: f64) -> Result<SixDForce> {
    if derivatives.len() < 5 {
        return invalid(format!(
            "six-dimensional reaction force needs u and four further derivatives, got {} vectors",
            derivatives.len()
        ));
    }
    for v in &derivatives[..5] {
        require(v, MinkowskiDim::D6)?;
    }
    let [u, a, j, s, c] = [&derivatives[0], &derivatives[1], &derivatives[2], &derivatives[3], &derivatives[4]];
    check_velocity(u)?;
    let e2 = e * e;
    let aa = a.norm2();
    let aj = a.dot(j);
    let jj = j.norm2();
    let as_ = a.dot(s);

    let mut total = c.scaled(-4.0 / 45.0 * e2);
    total.axpy(-2.0 / 9.0 * aa * e2, j);
    total.axpy(-2.0 / 3.0 * aj * e2, a);
    total.axpy(-(4.0 / 15.0 * jj + 16.0 / 45.0 * as_ + 2.0 / 9.0 * aa * aa) * e2, u);

    let mut schott = s.scaled(-4.0 / 45.0 * e2);
    schott.axpy(-64.0 / 315.0 * aa * e2, a);
    schott.axpy(-16.0 / 45.0 * aj * e2, u);

    let mut radiated = u.scaled((-4.0 / 45.0 * jj + 2.0 / 9.0 * aa * aa) * e2);
    radiated.axpy(-2.0 / 21.0 * aj * e2, a);
    radiated.axpy(2.0 / 105.0 * aa * e2, j);

    Ok(SixDForce { total, schott, radiated })
}
