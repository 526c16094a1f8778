//! Flat-spacetime tensor algebra in a runtime-chosen dimension.
//!
//! Components are contravariant unless stated otherwise; index 0 is time and
//! the metric is `η = diag(+1, -1, ..., -1)`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Spacetime dimension: one time and `d - 1` space directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinkowskiDim(usize);

impl MinkowskiDim {
    pub const D3: MinkowskiDim = MinkowskiDim(3);
    pub const D4: MinkowskiDim = MinkowskiDim(4);
    pub const D6: MinkowskiDim = MinkowskiDim(6);

    pub fn new(d: usize) -> Result<Self> {
        if d < 3 {
            return invalid(format!("spacetime dimension must be >= 3, got {d}"));
        }
        Ok(MinkowskiDim(d))
    }

    #[inline]
    pub fn d(self) -> usize {
        self.0
    }

    #[inline]
    pub fn spatial(self) -> usize {
        self.0 - 1
    }

    /// Metric component `η_{μμ}`.
    #[inline]
    pub fn metric(self, mu: usize) -> f64 {
        if mu == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn metric_matrix(self) -> DMatrix<f64> {
        DMatrix::from_fn(self.0, self.0, |i, j| if i == j { self.metric(i) } else { 0.0 })
    }

    pub(crate) fn check(self, other: MinkowskiDim) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: self.0,
                got: other.0,
            });
        }
        Ok(())
    }
}

impl fmt::Display for MinkowskiDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}D", self.0)
    }
}

/// Index position of a vector's components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Contravariant,
    Covariant,
}

/// A vector in `d`-dimensional Minkowski space.
///
/// The name is kept for every dimension; the component count is `dim.d()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    c: Vec<f64>,
}

impl FourVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        MinkowskiDim::new(components.len())?;
        Ok(FourVector { c: components })
    }

    pub fn from_slice(components: &[f64]) -> Result<Self> {
        Self::new(components.to_vec())
    }

    pub fn zero(dim: MinkowskiDim) -> Self {
        FourVector { c: vec![0.0; dim.d()] }
    }

    /// `(t, x)` with `x` padded by zeros up to the spatial dimension.
    pub fn from_time_space(dim: MinkowskiDim, t: f64, x: &[f64]) -> Self {
        assert!(x.len() <= dim.spatial(), "too many spatial components");
        let mut c = vec![0.0; dim.d()];
        c[0] = t;
        c[1..=x.len()].copy_from_slice(x);
        FourVector { c }
    }

    /// Unit timelike vector along the time axis.
    pub fn time_unit(dim: MinkowskiDim) -> Self {
        let mut v = Self::zero(dim);
        v.c[0] = 1.0;
        v
    }

    pub fn basis(dim: MinkowskiDim, mu: usize) -> Self {
        let mut v = Self::zero(dim);
        v.c[mu] = 1.0;
        v
    }

    /// Normalized velocity for a spatial three-velocity-like vector `v`, `|v| < 1`.
    pub fn velocity_from_spatial(dim: MinkowskiDim, v: &[f64]) -> Result<Self> {
        let v2: f64 = v.iter().map(|x| x * x).sum();
        if v2 >= 1.0 {
            return invalid(format!("spatial speed {} is not below 1", v2.sqrt()));
        }
        let gamma = 1.0 / (1.0 - v2).sqrt();
        let mut u = Self::from_time_space(dim, 1.0, v);
        u.scale_mut(gamma);
        Ok(u)
    }

    #[inline]
    pub fn dim(&self) -> MinkowskiDim {
        MinkowskiDim(self.c.len())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.c.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.c[0]
    }

    #[inline]
    pub fn spatial(&self) -> &[f64] {
        &self.c[1..]
    }

    pub fn spatial_norm(&self) -> f64 {
        self.spatial().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `u·v` without a dimension check. Callers guarantee equal lengths.
    #[inline]
    pub fn dot(&self, other: &FourVector) -> f64 {
        debug_assert_eq!(self.c.len(), other.c.len());
        let mut s = self.c[0] * other.c[0];
        for i in 1..self.c.len() {
            s -= self.c[i] * other.c[i];
        }
        s
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Euclidean length of the component array, used for tolerance scales.
    pub fn euclidean_norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale_mut(&mut self, s: f64) {
        self.c.iter_mut().for_each(|x| *x *= s);
    }

    pub fn scaled(&self, s: f64) -> FourVector {
        FourVector {
            c: self.c.iter().map(|x| x * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &FourVector) {
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            *a += s * b;
        }
    }

    /// Component of `self` orthogonal to the unit timelike `u`.
    pub fn project_orthogonal(&self, u: &FourVector) -> FourVector {
        let mut out = self.clone();
        out.axpy(-self.dot(u) / u.dot(u), u);
        out
    }

    /// Time reflection `(t, x) -> (-t, x)`.
    pub fn time_reflected(&self) -> FourVector {
        let mut out = self.clone();
        out.c[0] = -out.c[0];
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.c
    }
}

impl Index<usize> for FourVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.c[i]
    }
}

impl IndexMut<usize> for FourVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.c[i]
    }
}

impl Add<&FourVector> for &FourVector {
    type Output = FourVector;
    fn add(self, rhs: &FourVector) -> FourVector {
        FourVector {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&FourVector> for &FourVector {
    type Output = FourVector;
    fn sub(self, rhs: &FourVector) -> FourVector {
        FourVector {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, rhs: FourVector) -> FourVector {
        &self + &rhs
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, rhs: FourVector) -> FourVector {
        &self - &rhs
    }
}

impl AddAssign<&FourVector> for FourVector {
    fn add_assign(&mut self, rhs: &FourVector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&FourVector> for FourVector {
    fn sub_assign(&mut self, rhs: &FourVector) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        self.scaled(s)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(mut self, s: f64) -> FourVector {
        self.scale_mut(s);
        self
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self * -1.0
    }
}

/// Metric contraction `u^μ η_{μν} v^ν`.
pub fn minkowski_dot(u: &FourVector, v: &FourVector) -> Result<f64> {
    u.dim().check(v.dim())?;
    Ok(u.dot(v))
}

/// Raise or lower the index of `v`. `variance` names the *input* position;
/// with a diagonal metric both directions flip the spatial signs.
pub fn raise_lower(v: &FourVector, _variance: Variance) -> FourVector {
    let mut out = v.clone();
    for x in out.c.iter_mut().skip(1) {
        *x = -*x;
    }
    out
}

/// A matrix `Λ^μ_ν` acting on contravariant components.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzTransform {
    dim: MinkowskiDim,
    matrix: DMatrix<f64>,
}

impl LorentzTransform {
    pub fn identity(dim: MinkowskiDim) -> Self {
        LorentzTransform {
            dim,
            matrix: DMatrix::identity(dim.d(), dim.d()),
        }
    }

    /// Wraps `matrix` after checking `Λᵀ η Λ = η` to 1e-12 per entry.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = MinkowskiDim::new(matrix.nrows())?;
        if matrix.ncols() != dim.d() {
            return invalid("Lorentz matrix must be square");
        }
        let eta = dim.metric_matrix();
        let defect = (matrix.transpose() * &eta * &matrix - &eta).amax();
        if defect > 1e-12 * matrix.amax().powi(2).max(1.0) {
            return invalid(format!("matrix is not a Lorentz transformation (defect {defect:e})"));
        }
        Ok(LorentzTransform { dim, matrix })
    }

    /// Spatial rotation in the `(i, j)` plane of space (1-based spatial axes).
    pub fn rotation(dim: MinkowskiDim, i: usize, j: usize, angle: f64) -> Result<Self> {
        if i == 0 || j == 0 || i >= dim.d() || j >= dim.d() || i == j {
            return invalid("rotation axes must be distinct spatial indices");
        }
        let mut m = DMatrix::identity(dim.d(), dim.d());
        let (s, c) = angle.sin_cos();
        m[(i, i)] = c;
        m[(j, j)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        Ok(LorentzTransform { dim, matrix: m })
    }

    pub fn dim(&self) -> MinkowskiDim {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let d = self.dim.d();
        let mut out = vec![0.0; d];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..d).map(|nu| self.matrix[(mu, nu)] * v[nu]).sum();
        }
        FourVector { c: out }
    }

    /// Transform a contravariant rank-2 tensor: `Λ T Λᵀ`.
    pub fn apply_tensor(&self, t: &DMatrix<f64>) -> DMatrix<f64> {
        &self.matrix * t * self.matrix.transpose()
    }

    pub fn compose(&self, other: &LorentzTransform) -> LorentzTransform {
        LorentzTransform {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn inverse(&self) -> LorentzTransform {
        // Λ^{-1} = η Λᵀ η
        let eta = self.dim.metric_matrix();
        LorentzTransform {
            dim: self.dim,
            matrix: &eta * self.matrix.transpose() * &eta,
        }
    }
}

/// Pure boost with rapidity `rapidity` along the spatial unit vector `direction`.
pub fn boost(dim: MinkowskiDim, direction: &[f64], rapidity: f64) -> Result<LorentzTransform> {
    if direction.len() != dim.spatial() {
        return Err(Error::DimensionMismatch {
            expected: dim.spatial(),
            got: direction.len(),
        });
    }
    let n2: f64 = direction.iter().map(|x| x * x).sum();
    if (n2.sqrt() - 1.0).abs() > 1e-12 {
        return invalid(format!("boost direction has norm {}, expected 1", n2.sqrt()));
    }
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let d = dim.d();
    let mut m = DMatrix::identity(d, d);
    m[(0, 0)] = ch;
    for i in 1..d {
        let ni = direction[i - 1];
        m[(0, i)] = sh * ni;
        m[(i, 0)] = sh * ni;
        for j in 1..d {
            m[(i, j)] += (ch - 1.0) * ni * direction[j - 1];
        }
    }
    Ok(LorentzTransform { dim, matrix: m })
}

/// The pure boost that maps the rest velocity `(1, 0, ..., 0)` onto `u`.
pub fn boost_to(u: &FourVector) -> Result<LorentzTransform> {
    let dim = u.dim();
    let speed = u.spatial_norm();
    if speed == 0.0 {
        return Ok(LorentzTransform::identity(dim));
    }
    let n: Vec<f64> = u.spatial().iter().map(|x| x / speed).collect();
    boost(dim, &n, speed.asinh())
}

/// Orthonormal spatial frame `e_1..e_{d-1}` of the rest space of `u`
/// (each `e_i · e_i = -1`, `e_i · u = 0`).
pub fn rest_frame(u: &FourVector) -> Result<Vec<FourVector>> {
    let l = boost_to(u)?;
    let dim = u.dim();
    Ok((1..dim.d()).map(|i| l.apply(&FourVector::basis(dim, i))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> FourVector {
        FourVector::from_slice(c).unwrap()
    }

    #[test]
    fn dot_products() {
        assert_eq!(minkowski_dot(&v(&[1., 0., 0., 0.]), &v(&[1., 0., 0., 0.])).unwrap(), 1.0);
        assert_eq!(minkowski_dot(&v(&[1., 1., 0., 0.]), &v(&[1., 1., 0., 0.])).unwrap(), 0.0);
        assert!(matches!(
            minkowski_dot(&v(&[1., 0., 0.]), &v(&[1., 0., 0., 0.])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lowering() {
        let x = v(&[1., 2., 3., 4.]);
        let low = raise_lower(&x, Variance::Contravariant);
        assert_eq!(low.as_slice(), &[1., -2., -3., -4.]);
        assert_eq!(raise_lower(&low, Variance::Covariant), x);
    }

    #[test]
    fn boost_basics() {
        let d = MinkowskiDim::D4;
        let id = boost(d, &[1., 0., 0.], 0.0).unwrap();
        assert_eq!(id.matrix(), &DMatrix::identity(4, 4));
        let chi = 0.7;
        let b = boost(d, &[1., 0., 0.], chi).unwrap();
        let out = b.apply(&FourVector::time_unit(d));
        assert!((out[0] - chi.cosh()).abs() < 1e-15);
        assert!((out[1] - chi.sinh()).abs() < 1e-15);
        assert!(boost(d, &[1., 1., 0.], 0.1).is_err());
        assert!(LorentzTransform::from_matrix(b.matrix().clone()).is_ok());
    }

    #[test]
    fn boost_to_maps_rest_velocity() {
        let u = FourVector::velocity_from_spatial(MinkowskiDim::D6, &[0.3, -0.2, 0.1, 0.0, 0.4]).unwrap();
        let l = boost_to(&u).unwrap();
        let out = l.apply(&FourVector::time_unit(MinkowskiDim::D6));
        assert!((&out - &u).max_abs() < 1e-14);
        let frame = rest_frame(&u).unwrap();
        for (i, e) in frame.iter().enumerate() {
            assert!(e.dot(&u).abs() < 1e-14);
            for (j, f) in frame.iter().enumerate() {
                let expect = if i == j { -1.0 } else { 0.0 };
                assert!((e.dot(f) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let b = boost(MinkowskiDim::D4, &[0.6, 0.0, 0.8], 1.3).unwrap();
        let prod = b.compose(&b.inverse());
        assert!((prod.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-13);
    }
}
