//! Retarded Green's functions of `□` in `d`-dimensional Minkowski space,
//! static potentials and source-pulse convolution.
//!
//! Normalization: `□G = δ^d(x)`; a source `j` produces `A = Ω_{d-2} ∫ G j`,
//! so a unit static charge has unit Gauss-law flux in every dimension.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::quadrature::adaptive;
use crate::special::bessel_j;
use crate::units::{gamma_half_integer, gauss_constant, LOG_POTENTIAL_REFERENCE_RADIUS};

/// `c θ(t) δ^{(k)}(t² - r²)`: a light-cone shell term, never evaluated pointwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpShell {
    pub coefficient: f64,
    /// Order of the derivative of δ with respect to its argument.
    pub derivative_order: usize,
    /// Radius of the shell; the term is supported at `t = shell_radius`.
    pub shell_radius: f64,
}

/// Retarded Green's function of `□ + m²` in `dim` spacetime dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensKernel {
    pub dim: usize,
    pub mass: f64,
}

/// Pointwise tail value together with the shell term at the same radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub tail: f64,
    pub sharp: Option<SharpShell>,
}

impl GreensKernel {
    pub fn new(dim: usize, mass: f64) -> Result<Self> {
        if dim < 3 {
            return invalid(format!("dimension must be at least 3, got {dim}"));
        }
        if !(mass >= 0.0) || !mass.is_finite() {
            return invalid(format!("mass must be non-negative and finite, got {mass}"));
        }
        if mass > 0.0 && dim != 4 {
            return Err(Error::Unsupported(format!("massive kernel in {dim} dimensions")));
        }
        Ok(GreensKernel { dim, mass })
    }

    pub fn has_sharp_part(&self) -> bool {
        self.dim % 2 == 0
    }

    pub fn has_tail(&self) -> bool {
        self.dim % 2 == 1 || self.mass > 0.0
    }

    /// Overall constant `1 / (2 π^{(d-2)/2})` of the Riesz form.
    fn prefactor(&self) -> f64 {
        1.0 / (2.0 * PI.powf((self.dim as f64 - 2.0) / 2.0))
    }

    /// The shell term at radius `r`, if this kernel has one.
    pub fn sharp_at(&self, r: f64) -> Option<SharpShell> {
        self.has_sharp_part().then(|| SharpShell {
            coefficient: self.prefactor(),
            derivative_order: (self.dim - 4) / 2,
            shell_radius: r,
        })
    }

    /// Tail value strictly inside the future cone; zero elsewhere.
    pub fn tail(&self, t: f64, r: f64) -> f64 {
        if !(t > r) || t <= 0.0 {
            return 0.0;
        }
        let s2 = (t - r) * (t + r);
        let s = s2.sqrt();
        if self.mass > 0.0 {
            return -self.mass * j1_over_x(self.mass, s) * self.mass / (4.0 * PI);
        }
        if self.dim % 2 == 0 {
            return 0.0;
        }
        // (x²)_+^λ / Γ(λ + 1) with λ = 1 - d/2 (odd d; finite-part sense for d ≥ 5)
        let lambda = 1.0 - self.dim as f64 / 2.0;
        self.prefactor() * s2.powf(lambda) / gamma_half(4 - self.dim as i64)
    }
}

/// `J₁(m s) / (m s)` with its finite limit at `s = 0`.
fn j1_over_x(m: f64, s: f64) -> f64 {
    let x = m * s;
    if x < 1e-4 {
        0.5 - x * x / 16.0
    } else {
        bessel_j(1, x) / x
    }
}

/// `Γ(k/2)` for any integer `k` that is not a non-positive even number.
fn gamma_half(k: i64) -> f64 {
    if k > 0 {
        return gamma_half_integer(k as usize);
    }
    assert!(k % 2 != 0, "Γ has poles at non-positive integers");
    // Γ(x) = Γ(x + 1) / x
    let x = k as f64 / 2.0;
    gamma_half(k + 2) / x
}

/// Green's function at `(t, r)`: tail value and shell descriptor.
/// Both vanish exactly outside the future light cone.
pub fn greens_retarded(dim: usize, mass: f64, t: f64, r: f64) -> Result<KernelValue> {
    if !(r >= 0.0) {
        return invalid(format!("radius must be non-negative, got {r}"));
    }
    let k = GreensKernel::new(dim, mass)?;
    if t < r || t < 0.0 {
        return Ok(KernelValue { tail: 0.0, sharp: None });
    }
    Ok(KernelValue { tail: k.tail(t, r), sharp: k.sharp_at(r) })
}

/// Potential of a unit static charge: `1/((d-3) r^{d-3})` for `d ≥ 4`,
/// `-ln(r/r₀)` with `r₀ = 1` for `d = 3`, `e^{-mr}/r` for the massive
/// four-dimensional field.
pub fn static_potential(dim: usize, mass: f64, r: f64) -> Result<f64> {
    GreensKernel::new(dim, mass)?;
    if r == 0.0 {
        return Err(Error::Singular("static potential at r = 0".into()));
    }
    if !(r > 0.0) {
        return invalid(format!("radius must be positive, got {r}"));
    }
    if mass > 0.0 {
        return Ok((-mass * r).exp() / r);
    }
    if dim == 3 {
        return Ok(-(r / LOG_POTENTIAL_REFERENCE_RADIUS).ln());
    }
    let p = dim as i32 - 3;
    Ok(1.0 / (p as f64 * r.powi(p)))
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A point source `p(t) δ(x - x₀)` switched on only for `t ∈ [start, end]`.
#[derive(Clone)]
pub struct SourcePulse {
    profile: Profile,
    derivative: Option<Profile>,
    pub support: (f64, f64),
    pub location: Vec<f64>,
}

impl std::fmt::Debug for SourcePulse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SourcePulse")
            .field("support", &self.support)
            .field("location", &self.location)
            .finish_non_exhaustive()
    }
}

impl SourcePulse {
    pub fn new(
        profile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
        support: (f64, f64),
        location: Vec<f64>,
    ) -> Result<Self> {
        if !(support.0 < support.1) || !support.0.is_finite() || !support.1.is_finite() {
            return invalid("pulse support must be a bounded, non-empty interval");
        }
        Ok(SourcePulse {
            profile: Arc::new(profile),
            derivative: derivative.map(Arc::from),
            support,
            location,
        })
    }

    /// `A sin⁴(π (t - start)/T)` on `[start, start + T]`.
    pub fn sin4(start: f64, duration: f64, amplitude: f64, location: Vec<f64>) -> Result<Self> {
        if !(duration > 0.0) {
            return invalid("pulse duration must be positive");
        }
        let w = PI / duration;
        let inside = move |t: f64| t >= start && t <= start + duration;
        Self::new(
            move |t| if inside(t) { amplitude * (w * (t - start)).sin().powi(4) } else { 0.0 },
            Some(Box::new(move |t| {
                if inside(t) {
                    let (s, c) = (w * (t - start)).sin_cos();
                    4.0 * amplitude * w * s.powi(3) * c
                } else {
                    0.0
                }
            })),
            (start, start + duration),
            location,
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            return 0.0;
        }
        (self.profile)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            return 0.0;
        }
        match &self.derivative {
            Some(d) => d(t),
            None => {
                let h = 1e-5 * (self.support.1 - self.support.0);
                (8.0 * (self.value(t + h) - self.value(t - h)) - (self.value(t + 2.0 * h) - self.value(t - 2.0 * h)))
                    / (12.0 * h)
            }
        }
    }

    /// `∫ p(t) dt`.
    pub fn total(&self) -> Result<f64> {
        let (a, b) = self.support;
        Ok(adaptive(|t| self.value(t), a, b, 1e-14, 1e-12, 2000)?.0)
    }
}

/// Relative accuracy requested from the convolution quadrature.
pub const CONVOLUTION_TOLERANCE: f64 = 1e-10;

/// Field `Ω_{d-2} ∫ G(t - t', |x - x₀|) p(t') dt'` of a pulsed point source
/// at the spacetime point `(t, x)`.
pub fn convolve_pulse(kernel: &GreensKernel, pulse: &SourcePulse, t: f64, x: &[f64]) -> Result<f64> {
    if x.len() != kernel.dim - 1 || pulse.location.len() != kernel.dim - 1 {
        return Err(Error::DimensionMismatch { expected: kernel.dim - 1, got: x.len() });
    }
    let r = x
        .iter()
        .zip(&pulse.location)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let omega = gauss_constant(kernel.dim);
    let mut total = 0.0;
    if let Some(shell) = kernel.sharp_at(r) {
        if r == 0.0 {
            return Err(Error::Singular("field point at the source".into()));
        }
        let te = t - r;
        let c = shell.coefficient;
        total += match shell.derivative_order {
            // ∫ c δ((t-t')² - r²) p dt' = c p(t - r) / 2r
            0 => c * pulse.value(te) / (2.0 * r),
            // ∫ c δ'((t-t')² - r²) p dt' = c (p'/4r² + p/4r³)
            1 => c * (pulse.derivative(te) / (4.0 * r * r) + pulse.value(te) / (4.0 * r * r * r)),
            k => {
                return Err(Error::Unsupported(format!("shell convolution with δ^({k}) (d = {})", kernel.dim)))
            }
        };
    }
    if kernel.has_tail() {
        total += tail_convolution(kernel, pulse, t, r)?;
    }
    Ok(omega * total)
}

/// Tail contribution, with `u = √((t - t')² - r²)` removing the cone singularity.
fn tail_convolution(kernel: &GreensKernel, pulse: &SourcePulse, t: f64, r: f64) -> Result<f64> {
    if kernel.dim % 2 == 1 && kernel.dim > 3 {
        return Err(Error::Unsupported(format!("tail convolution in {} dimensions", kernel.dim)));
    }
    // Emission lag τ' = t - t' runs over [max(r, t - end), t - start].
    let (start, end) = pulse.support;
    let lag_hi = t - start;
    let lag_lo = (t - end).max(r);
    if lag_hi <= lag_lo {
        return Ok(0.0);
    }
    let u_of = |lag: f64| ((lag - r) * (lag + r)).max(0.0).sqrt();
    let (u_lo, u_hi) = (u_of(lag_lo), u_of(lag_hi));
    let mass = kernel.mass;
    let integrand = |u: f64| {
        let lag = (u * u + r * r).sqrt();
        let p = pulse.value(t - lag);
        if mass > 0.0 {
            // G_tail dτ' = -m J₁(mu)/(4π u) · u du/τ'
            -mass * mass * j1_over_x(mass, u) * u * p / (4.0 * PI * lag)
        } else {
            // G dτ' = 1/(2π u) · u du/τ'
            p / (2.0 * PI * lag)
        }
    };
    let scale = pulse.support.1 - pulse.support.0;
    let (value, err) = adaptive(integrand, u_lo, u_hi, 1e-15 * scale, CONVOLUTION_TOLERANCE, 4000)?;
    if !value.is_finite() {
        return Err(Error::Accuracy { requested: CONVOLUTION_TOLERANCE, achieved: err, context: "tail convolution".into() });
    }
    Ok(value)
}

/// Writes a `t, r, tail_value` table for all combinations of `ts` and `rs`.
pub fn write_kernel_table<W: Write>(out: W, kernel: &GreensKernel, ts: &[f64], rs: &[f64]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["t", "r", "tail_value"])?;
    for &t in ts {
        for &r in rs {
            csv.write_record([format!("{t:.17e}"), format!("{r:.17e}"), format!("{:.17e}", kernel.tail(t, r))])?;
        }
    }
    csv.flush()?;
    Ok(())
}
