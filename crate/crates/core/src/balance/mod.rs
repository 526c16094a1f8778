//! Energy-momentum and angular-momentum bookkeeping between a radiating
//! source and its field.
//!
//! Fluxes are integrals of `T^{μν} dΣ_ν` over one of three surfaces. The
//! natural one is the tube `ρ = R` in retarded coordinates
//! `x = z(τ) + ρ k`, `k = u + n`, whose volume element is
//! `ρ^{d−2} dτ dρ dΩ` and whose normal is
//! `∂ρ = u + (ρ k·a − 1) k`; every node has a known emission point.

mod ledger;

pub use ledger::{radiated_from_flux, radiated_from_self_force_2plus1, work_energy_ledger, BalanceReport};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fields::{field_parts, lw_field_6d, stress_energy, StressEnergy};
use crate::quadrature::{sphere_grid, GaussLegendre, SphereNode};
use crate::spacetime::{boost_to, FourVector, MinkowskiDim};
use crate::units::gauss_constant;
use crate::worldline::{retarded_time, Cone, RetardedPoint, Worldline};

/// Which field radiates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    /// Point charge `e` (four or six dimensions).
    Electromagnetic { charge: f64 },
    /// Massless scalar source of coupling `g` in four dimensions,
    /// `φ = −g/ρ` on the retarded cone.
    Scalar { coupling: f64 },
}

/// Portion of the retarded field whose stress tensor is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldPart {
    Total,
    /// The `1/ρ` (acceleration) field alone.
    Radiative,
    /// `Total − Radiative`, cross terms included.
    Bound,
}

/// Geometry of a flux surface.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `ρ = radius` for emission times in `tau`.
    RetardedTube { radius: f64, tau: (f64, f64) },
    /// Lab-frame sphere `|x − center| = radius` for coordinate times in `t`.
    Sphere { radius: f64, center: Vec<f64>, t: (f64, f64) },
    /// Spatial shell `inner ≤ |x − center| ≤ outer` on the slice `x⁰ = t`;
    /// the flux through it is the field content of the shell.
    TimeSlab { t: f64, inner: f64, outer: f64, center: Vec<f64> },
}

/// A flux surface with its quadrature resolution: `angular_order` polar
/// Gauss–Legendre nodes per polar angle (twice as many azimuthal), and
/// `panels` eight-point Gauss–Legendre panels along the remaining direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSurface {
    pub shape: Shape,
    pub angular_order: usize,
    pub panels: usize,
}

impl FluxSurface {
    pub fn retarded_tube(radius: f64, tau: (f64, f64)) -> Self {
        FluxSurface { shape: Shape::RetardedTube { radius, tau }, angular_order: 12, panels: 16 }
    }

    pub fn validate(&self, dim: MinkowskiDim) -> Result<()> {
        if self.angular_order < 2 || self.panels == 0 {
            return invalid("flux surface needs angular order ≥ 2 and at least one panel");
        }
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                invalid(format!("flux surface {what} must be positive, got {v}"))
            }
        };
        match &self.shape {
            Shape::RetardedTube { radius, tau } => {
                positive(*radius, "radius")?;
                positive(tau.1 - tau.0, "emission interval")
            }
            Shape::Sphere { radius, center, t } => {
                positive(*radius, "radius")?;
                positive(t.1 - t.0, "time interval")?;
                check_center(center, dim)
            }
            Shape::TimeSlab { inner, outer, center, .. } => {
                positive(*inner, "inner radius")?;
                positive(outer - inner, "shell thickness")?;
                check_center(center, dim)
            }
        }
    }

    fn refined(&self) -> Self {
        FluxSurface { shape: self.shape.clone(), angular_order: 2 * self.angular_order, panels: 2 * self.panels }
    }
}

fn check_center(center: &[f64], dim: MinkowskiDim) -> Result<()> {
    if center.len() != dim.spatial() {
        return Err(Error::DimensionMismatch { expected: dim.spatial(), got: center.len() });
    }
    Ok(())
}

/// Flux of energy-momentum and angular momentum through a surface, with
/// error estimates from doubling both quadrature orders.
#[derive(Debug, Clone)]
pub struct FluxResult {
    pub momentum: FourVector,
    /// `M^{μν} = ∫ (x^μ T^{νλ} − x^ν T^{μλ}) dΣ_λ`.
    pub angular_momentum: DMatrix<f64>,
    pub momentum_error: f64,
    pub angular_error: f64,
}

fn source_dim(w: &dyn Worldline, source: Source) -> Result<MinkowskiDim> {
    let dim = w.dim();
    match (source, dim.d()) {
        (Source::Electromagnetic { .. }, 4 | 6) | (Source::Scalar { .. }, 4) => Ok(dim),
        (Source::Electromagnetic { .. }, d) => {
            Err(Error::Unsupported(format!("electromagnetic flux in {d} dimensions (4 and 6 are supported)")))
        }
        (Source::Scalar { .. }, d) => Err(Error::Unsupported(format!("scalar flux in {d} dimensions"))),
    }
}

fn scalar_stress(v: &FourVector) -> StressEnergy {
    let dim = v.dim();
    let d = dim.d();
    let vv = v.norm2();
    let mut t = DMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let eta = if m == n { dim.metric(m) } else { 0.0 };
            t[(m, n)] = (v[m] * v[n] - 0.5 * eta * vv) / gauss_constant(d);
        }
    }
    StressEnergy { dim, t }
}

/// Stress tensor at `x` whose retarded emission point is `p`.
fn stress_from_point(w: &dyn Worldline, source: Source, x: &FourVector, p: RetardedPoint, part: FieldPart) -> Result<StressEnergy> {
    let dim = x.dim();
    match source {
        Source::Electromagnetic { charge } if dim.d() == 6 => {
            if part != FieldPart::Total {
                return Err(Error::Unsupported("bound/radiative split in six dimensions".into()));
            }
            Ok(stress_energy(&lw_field_6d(w, charge, x)?))
        }
        Source::Electromagnetic { charge } => {
            let parts = field_parts(p, charge, Cone::Past);
            Ok(match part {
                FieldPart::Total => stress_energy(&parts.total()),
                FieldPart::Radiative => stress_energy(&parts.acceleration),
                FieldPart::Bound => {
                    let total = stress_energy(&parts.total());
                    let rad = stress_energy(&parts.acceleration);
                    StressEnergy { dim, t: total.t - rad.t }
                }
            })
        }
        Source::Scalar { coupling } => {
            // ∂φ = (g/ρ²)[u + (ρ k·a − 1) k]: radiative (g/ρ)(k·a) k, bound (g/ρ²)(u − k)
            let rho = p.rho;
            let rad = p.k.scaled(coupling * p.k.dot(&p.a) / rho);
            let mut bound = p.u.scaled(coupling / (rho * rho));
            bound.axpy(-coupling / (rho * rho), &p.k);
            Ok(match part {
                FieldPart::Total => scalar_stress(&(&bound + &rad)),
                FieldPart::Radiative => scalar_stress(&rad),
                FieldPart::Bound => {
                    let total = scalar_stress(&(&bound + &rad));
                    StressEnergy { dim, t: total.t - scalar_stress(&rad).t }
                }
            })
        }
    }
}

/// Pointwise split of the retarded four-dimensional field stress tensor at
/// `x` into `(bound, radiative)`; the radiative tensor is built from the
/// acceleration field alone and is null (`T_rad ∝ k ⊗ k`).
pub fn split_bound_radiative(w: &dyn Worldline, charge: f64, x: &FourVector) -> Result<(StressEnergy, StressEnergy)> {
    if w.dim().d() != 4 {
        return Err(Error::Unsupported("bound/radiative split outside four dimensions".into()));
    }
    let p = retarded_time(w, x)?;
    let source = Source::Electromagnetic { charge };
    let bound = stress_from_point(w, source, x, p.clone(), FieldPart::Bound)?;
    let rad = stress_from_point(w, source, x, p, FieldPart::Radiative)?;
    Ok((bound, rad))
}

/// One quadrature node's contribution: `(weight·T^{μν}N_ν, x)`.
fn contribution(t: &StressEnergy, normal: &FourVector, weight: f64, x: FourVector) -> (FourVector, FourVector) {
    (t.contract(normal).scaled(weight), x)
}

/// Rate `dP^μ/dτ` (and `dM^{μν}/dτ`) through the tube `ρ = radius` at emission time `tau`.
pub fn tube_flux_rate(
    w: &dyn Worldline,
    source: Source,
    tau: f64,
    radius: f64,
    angular_order: usize,
    part: FieldPart,
) -> Result<(FourVector, DMatrix<f64>)> {
    let dim = source_dim(w, source)?;
    let grid = sphere_grid(dim.spatial(), angular_order);
    let nodes = tube_nodes(w, source, tau, radius, &grid, part)?;
    Ok(accumulate(dim, &nodes))
}

fn tube_nodes(
    w: &dyn Worldline,
    source: Source,
    tau: f64,
    radius: f64,
    grid: &[SphereNode],
    part: FieldPart,
) -> Result<Vec<(FourVector, FourVector)>> {
    let s = w.evaluate(tau)?;
    let dim = s.u.dim();
    let boost = boost_to(&s.u)?;
    let measure = radius.powi(dim.d() as i32 - 2);
    grid.iter()
        .map(|node| {
            let n = boost.apply(&FourVector::from_time_space(dim, 0.0, &node.direction));
            let k = &s.u + &n;
            let separation = k.scaled(radius);
            let x = &s.z + &separation;
            let p = RetardedPoint {
                tau,
                z: s.z.clone(),
                u: s.u.clone(),
                a: s.a.clone(),
                jerk: s.jerk.clone(),
                rho: radius,
                k: k.clone(),
                separation,
            };
            let t = stress_from_point(w, source, &x, p, part)?;
            let mut normal = s.u.clone();
            normal.axpy(radius * k.dot(&s.a) - 1.0, &k);
            Ok(contribution(&t, &normal, node.weight * measure, x))
        })
        .collect()
}

fn accumulate(dim: MinkowskiDim, nodes: &[(FourVector, FourVector)]) -> (FourVector, DMatrix<f64>) {
    let d = dim.d();
    let mut p = FourVector::zero(dim);
    let mut m = DMatrix::zeros(d, d);
    // fixed summation order keeps results independent of the thread count
    for (dp, x) in nodes {
        p += dp;
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += x[i] * dp[j] - x[j] * dp[i];
            }
        }
    }
    (p, m)
}

fn gl_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(8);
    let h = (b - a) / panels as f64;
    (0..panels).flat_map(|i| gl.mapped(a + i as f64 * h, a + (i + 1) as f64 * h).collect::<Vec<_>>()).collect()
}

fn flux_once(w: &dyn Worldline, source: Source, surface: &FluxSurface, part: FieldPart) -> Result<(FourVector, DMatrix<f64>)> {
    let dim = source_dim(w, source)?;
    surface.validate(dim)?;
    let grid = sphere_grid(dim.spatial(), surface.angular_order);
    let d = dim.d();
    let per_slice: Vec<Result<(FourVector, DMatrix<f64>)>> = match &surface.shape {
        Shape::RetardedTube { radius, tau } => gl_nodes(tau.0, tau.1, surface.panels)
            .into_par_iter()
            .map(|(t, wt)| {
                let nodes = tube_nodes(w, source, t, *radius, &grid, part)?;
                let (p, m) = accumulate(dim, &nodes);
                Ok((p.scaled(wt), m * wt))
            })
            .collect(),
        Shape::Sphere { radius, center, t } => gl_nodes(t.0, t.1, surface.panels)
            .into_par_iter()
            .map(|(time, wt)| {
                let measure = radius.powi(d as i32 - 2) * wt;
                let nodes = grid
                    .iter()
                    .map(|node| {
                        let pos: Vec<f64> = center.iter().zip(&node.direction).map(|(c, n)| c + radius * n).collect();
                        let x = FourVector::from_time_space(dim, time, &pos);
                        let p = retarded_time(w, &x)?;
                        let t = stress_from_point(w, source, &x, p, part)?;
                        // outward normal ∂r, raised
                        let normal = FourVector::from_time_space(
                            dim,
                            0.0,
                            &node.direction.iter().map(|v| -v).collect::<Vec<_>>(),
                        );
                        Ok(contribution(&t, &normal, node.weight * measure, x))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(accumulate(dim, &nodes))
            })
            .collect(),
        Shape::TimeSlab { t, inner, outer, center } => gl_nodes(*inner, *outer, surface.panels)
            .into_par_iter()
            .map(|(r, wt)| {
                let measure = r.powi(d as i32 - 2) * wt;
                let nodes = grid
                    .iter()
                    .map(|node| {
                        let pos: Vec<f64> = center.iter().zip(&node.direction).map(|(c, n)| c + r * n).collect();
                        let x = FourVector::from_time_space(dim, *t, &pos);
                        let p = retarded_time(w, &x)?;
                        let st = stress_from_point(w, source, &x, p, part)?;
                        Ok(contribution(&st, &FourVector::time_unit(dim), node.weight * measure, x))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(accumulate(dim, &nodes))
            })
            .collect(),
    };
    let mut p = FourVector::zero(dim);
    let mut m = DMatrix::zeros(d, d);
    for r in per_slice {
        let (dp, dm) = r?;
        p += &dp;
        m += dm;
    }
    Ok((p, m))
}

/// Flux of the chosen field part through `surface`, at the given order and
/// at doubled angular order and panel count; the finer result is returned
/// with the difference as error estimate.
pub fn flux(w: &dyn Worldline, source: Source, surface: &FluxSurface, part: FieldPart) -> Result<FluxResult> {
    let (p1, m1) = flux_once(w, source, surface, part)?;
    let (p2, m2) = flux_once(w, source, &surface.refined(), part)?;
    let momentum_error = (&p2 - &p1).max_abs();
    let angular_error = (&m2 - &m1).abs().max();
    if !p2.is_finite() || m2.iter().any(|v| !v.is_finite()) {
        return Err(Error::Accuracy {
            requested: 0.0,
            achieved: f64::INFINITY,
            context: "non-finite flux".into(),
        });
    }
    Ok(FluxResult { momentum: p2, angular_momentum: m2, momentum_error, angular_error })
}

/// Energy-momentum flux of the full retarded field.
pub fn flux_energy_momentum(w: &dyn Worldline, source: Source, surface: &FluxSurface) -> Result<FluxResult> {
    flux(w, source, surface, FieldPart::Total)
}

/// Angular-momentum flux `M^{μν}` of the full retarded field with its error estimate.
pub fn flux_angular_momentum(w: &dyn Worldline, source: Source, surface: &FluxSurface) -> Result<(DMatrix<f64>, f64)> {
    let r = flux(w, source, surface, FieldPart::Total)?;
    Ok((r.angular_momentum, r.angular_error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::AnalyticMotion;

    #[test]
    fn coulomb_shell_energy() {
        let w = AnalyticMotion::rest(MinkowskiDim::D4, &[0.0; 3]);
        let slab = FluxSurface {
            shape: Shape::TimeSlab { t: 3.0, inner: 1.0, outer: 2.0, center: vec![0.0; 3] },
            angular_order: 6,
            panels: 4,
        };
        let e = 0.8;
        let r = flux_energy_momentum(&w, Source::Electromagnetic { charge: e }, &slab).unwrap();
        let exact = e * e / 2.0 * (1.0 - 0.5);
        assert!((r.momentum[0] - exact).abs() < 1e-12, "{} vs {exact}", r.momentum[0]);
        assert!(r.momentum.spatial_norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_surfaces() {
        let w = AnalyticMotion::rest(MinkowskiDim::D4, &[0.0; 3]);
        let src = Source::Electromagnetic { charge: 1.0 };
        let bad = [
            FluxSurface::retarded_tube(-1.0, (0.0, 1.0)),
            FluxSurface::retarded_tube(1.0, (1.0, 1.0)),
            FluxSurface { angular_order: 1, ..FluxSurface::retarded_tube(1.0, (0.0, 1.0)) },
            FluxSurface {
                shape: Shape::Sphere { radius: 1.0, center: vec![0.0; 2], t: (0.0, 1.0) },
                angular_order: 4,
                panels: 1,
            },
        ];
        for s in &bad {
            assert!(flux(&w, src, s, FieldPart::Total).is_err(), "{s:?}");
        }
        let w5 = AnalyticMotion::rest(MinkowskiDim::new(5).unwrap(), &[0.0; 4]);
        assert!(matches!(
            flux(&w5, src, &FluxSurface::retarded_tube(1.0, (0.0, 1.0)), FieldPart::Total),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn thread_count_does_not_change_the_sum() {
        let w = AnalyticMotion::circular(MinkowskiDim::D4, 1.0, 0.5).unwrap();
        let s = FluxSurface { panels: 6, ..FluxSurface::retarded_tube(3.0, (0.0, 2.0)) };
        let src = Source::Electromagnetic { charge: 1.0 };
        let run = |n| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
            pool.install(|| flux(&w, src, &s, FieldPart::Total).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.momentum, b.momentum);
        assert_eq!(a.angular_momentum, b.angular_momentum);
    }
}
