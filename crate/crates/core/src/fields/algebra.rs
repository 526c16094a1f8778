//! Invariants, eigen-structure and stress-energy of a field tensor.

use nalgebra::{Complex, DMatrix};

use super::{FieldTensor, StressEnergy};
use crate::error::Result;
use crate::spacetime::FourVector;
use crate::units::gauss_constant;

/// `(I₁, I₂) = (F_{μν}F^{μν}, F_{μν}F̃^{μν})` with `F̃^{μν} = ½ ε^{μνρσ} F_{ρσ}`
/// and `ε^{0123} = 1`. In terms of the 3-fields, `I₁ = 2(B² - E²)` and
/// `I₂ = -4 E·B`.
pub fn invariants(f: &FieldTensor) -> Result<(f64, f64)> {
    f.require_4d()?;
    let up = f.matrix();
    let low = f.lowered();
    let i1 = up.component_mul(&low).sum();
    let mut i2 = 0.0;
    for p in PERMUTATIONS_4.iter() {
        let [a, b, c, d] = p.0;
        i2 += p.1 * low[(a, b)] * low[(c, d)];
    }
    Ok((i1, 0.5 * i2))
}

/// All permutations of (0,1,2,3) with their signs.
static PERMUTATIONS_4: std::sync::LazyLock<Vec<([usize; 4], f64)>> = std::sync::LazyLock::new(|| {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().any(|&i| std::mem::replace(&mut seen[i], true)) {
                        continue;
                    }
                    let mut inversions = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if p[i] > p[j] {
                                inversions += 1;
                            }
                        }
                    }
                    out.push((p, if inversions % 2 == 0 { 1.0 } else { -1.0 }));
                }
            }
        }
    }
    out
});

/// Eigenvalues `±λ, ±iμ` of `F^μ_ν` and the invariant 2-planes they act on.
#[derive(Debug, Clone)]
pub struct FieldEigensystem {
    pub lambda: f64,
    pub mu: f64,
    pub eigenvalues: [Complex<f64>; 4],
    /// Plane on which `F` acts as a boost with rapidity rate `λ`.
    pub timelike_plane: Option<[FourVector; 2]>,
    /// Plane on which `F` acts as a rotation with rate `μ`.
    pub spacelike_plane: Option<[FourVector; 2]>,
    /// Set for null fields (`I₁ = I₂ = 0`, `F ≠ 0`): no plane split exists.
    pub degenerate: bool,
}

pub fn field_eigensystem(f: &FieldTensor) -> Result<FieldEigensystem> {
    let (i1, i2) = invariants(f)?;
    let e2_minus_b2 = -0.5 * i1;
    let e_dot_b = -0.25 * i2;
    let s = (e2_minus_b2 * e2_minus_b2 + 4.0 * e_dot_b * e_dot_b).sqrt();
    // Avoid cancellation in the smaller root by using λ²μ² = (E·B)².
    let (lambda2, mu2) = if e2_minus_b2 >= 0.0 {
        let l2 = 0.5 * (e2_minus_b2 + s);
        (l2, if l2 > 0.0 { e_dot_b * e_dot_b / l2 } else { 0.0 })
    } else {
        let m2 = 0.5 * (-e2_minus_b2 + s);
        (if m2 > 0.0 { e_dot_b * e_dot_b / m2 } else { 0.0 }, m2)
    };
    let (lambda, mu) = (lambda2.sqrt(), mu2.sqrt());
    let eigenvalues = [
        Complex::new(lambda, 0.0),
        Complex::new(-lambda, 0.0),
        Complex::new(0.0, mu),
        Complex::new(0.0, -mu),
    ];
    let e = f.electric();
    let b = f.magnetic()?;
    let energy_scale: f64 = e.iter().chain(b.iter()).map(|c| c * c).sum();
    let degenerate = energy_scale > 0.0 && s <= 1e-12 * energy_scale;
    let mut out = FieldEigensystem {
        lambda,
        mu,
        eigenvalues,
        timelike_plane: None,
        spacelike_plane: None,
        degenerate,
    };
    if degenerate || energy_scale == 0.0 {
        return Ok(out);
    }
    let m = f.mixed();
    let m2 = &m * &m;
    let id = DMatrix::<f64>::identity(4, 4);
    let total = lambda2 + mu2;
    let p_time = (&m2 + &id * mu2) / total;
    let p_space = (&id * lambda2 - &m2) / total;
    out.timelike_plane = Some(column_basis(&p_time));
    out.spacelike_plane = Some(column_basis(&p_space));
    Ok(out)
}

/// Two independent columns of a rank-2 projector, Euclidean Gram-Schmidt.
fn column_basis(p: &DMatrix<f64>) -> [FourVector; 2] {
    let cols: Vec<Vec<f64>> = (0..4).map(|j| p.column(j).iter().copied().collect()).collect();
    let norm = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let first = cols
        .iter()
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))
        .expect("four columns")
        .clone();
    let n1 = norm(&first);
    let e1: Vec<f64> = first.iter().map(|c| c / n1).collect();
    let second = cols
        .iter()
        .map(|c| {
            let proj: f64 = c.iter().zip(&e1).map(|(x, y)| x * y).sum();
            c.iter().zip(&e1).map(|(x, y)| x - proj * y).collect::<Vec<f64>>()
        })
        .max_by(|a, b| norm(a).total_cmp(&norm(b)))
        .expect("four columns");
    let n2 = norm(&second);
    let e2: Vec<f64> = second.iter().map(|c| c / n2).collect();
    [FourVector::new(e1).expect("4D"), FourVector::new(e2).expect("4D")]
}

/// `T^{μν} = (1/Ω)(F^{μα} F_α{}^ν + ¼ η^{μν} F_{αβ}F^{αβ})` with `Ω = 4π` in
/// four dimensions (the area of the unit `S^{d-2}` in general), so that
/// `T⁰⁰ = (E² + B²)/8π` and `T^{0i} = (E × B)^i / 4π`.
pub fn stress_energy(f: &FieldTensor) -> StressEnergy {
    let eta = f.dim.metric_matrix();
    let up = f.matrix();
    let ff = up.component_mul(&f.lowered()).sum();
    let t = (up * &eta * up + &eta * (0.25 * ff)) / gauss_constant(f.dim.d());
    // Exact symmetry.
    let t = (&t + t.transpose()) * 0.5;
    StressEnergy { dim: f.dim, t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simple_invariants() {
        let (i1, i2) = invariants(&FieldTensor::from_e_b([1.0, 0.0, 0.0], [0.0; 3])).unwrap();
        assert!((i1 + 2.0).abs() < 1e-15 && i2 == 0.0);
        let (i1, i2) = invariants(&FieldTensor::from_e_b([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])).unwrap();
        assert!(i1.abs() < 1e-15 && i2.abs() < 1e-15);
        let (_, i2) = invariants(&FieldTensor::from_e_b([1.0, 2.0, 0.0], [3.0, 0.5, 0.0])).unwrap();
        assert!((i2 + 4.0 * 4.0).abs() < 1e-13);
    }

    #[test]
    fn pure_fields_have_expected_spectra() {
        let es = field_eigensystem(&FieldTensor::from_e_b([2.0, 0.0, 0.0], [0.0; 3])).unwrap();
        assert!((es.lambda - 2.0).abs() < 1e-15 && es.mu == 0.0 && !es.degenerate);
        let es = field_eigensystem(&FieldTensor::from_e_b([0.0; 3], [0.0, 0.0, 3.0])).unwrap();
        assert!((es.mu - 3.0).abs() < 1e-15 && es.lambda == 0.0);
        let plane = es.spacelike_plane.unwrap();
        // rotation plane of B = ẑ is the x-y plane
        for v in &plane {
            assert!(v[0].abs() < 1e-15 && v[3].abs() < 1e-15);
        }
    }

    #[test]
    fn null_field_is_degenerate() {
        let es = field_eigensystem(&FieldTensor::from_e_b([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])).unwrap();
        assert!(es.degenerate);
        assert!(es.timelike_plane.is_none() && es.spacelike_plane.is_none());
    }

    #[test]
    fn stress_energy_of_simple_fields() {
        let t = stress_energy(&FieldTensor::from_e_b([1.0, 0.0, 0.0], [0.0; 3]));
        assert!((t.energy_density() - 1.0 / (8.0 * PI)).abs() < 1e-15);
        assert!(t.poynting().iter().all(|s| *s == 0.0));
        let t = stress_energy(&FieldTensor::from_e_b([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]));
        assert!((t.energy_density() - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let s = t.poynting();
        assert!((s[2] - 1.0 / (4.0 * PI)).abs() < 1e-15 && s[0] == 0.0 && s[1] == 0.0);
        assert!(t.trace().abs() < 1e-15);
    }
}
