//! Unit conventions shared by every module.
//!
//! Gaussian units with `c = 1` and metric signature `(+, -, ..., -)`.
//! Sources enter the wave equation as `□A = Ω_{d-2} j`, where `Ω_{d-2}` is the
//! area of the unit sphere in `d - 1` spatial dimensions. In four dimensions
//! this is the familiar `4π`, the static field of a unit charge is `r̂ / r^{d-2}`
//! and Gauss' law reads `∮ E·dS = Ω_{d-2} e`. The stress tensor carries the
//! inverse factor `1 / Ω_{d-2}`.

use std::f64::consts::PI;

/// Unit-convention line written into every exported artifact.
pub const UNIT_CONVENTION: &str = "Gaussian, c=1";

/// Coefficient of the four-dimensional radiation-reaction force, `2e²/3`.
pub const LD_COEFFICIENT: f64 = 2.0 / 3.0;

/// Coefficient of the massless scalar radiation-reaction force, `g²/3`.
pub const SCALAR_LD_COEFFICIENT: f64 = 1.0 / 3.0;

/// Length scale at which the logarithmically divergent 2+1 self-energy is
/// subtracted. The renormalized mass is defined at this scale; changing it
/// shifts the mass by `(e²/2) ln(ℓ'/ℓ)`.
pub const TAIL_RENORMALIZATION_SCALE: f64 = 1.0;

/// Reference radius of the logarithmic static potential in three dimensions.
pub const LOG_POTENTIAL_REFERENCE_RADIUS: f64 = 1.0;

/// Area of the unit sphere `S^{n}` embedded in `n + 1` dimensions.
pub fn unit_sphere_area(n: usize) -> f64 {
    // Ω_n = 2 π^{(n+1)/2} / Γ((n+1)/2)
    let half = (n + 1) as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_half_integer(n + 1)
}

/// Source coupling `Ω_{d-2}` for spacetime dimension `d`.
pub fn gauss_constant(d: usize) -> f64 {
    unit_sphere_area(d - 2)
}

/// Γ(k/2) for positive integer k.
pub fn gamma_half_integer(k: usize) -> f64 {
    assert!(k > 0);
    if k % 2 == 0 {
        (1..k / 2).map(|j| j as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}
