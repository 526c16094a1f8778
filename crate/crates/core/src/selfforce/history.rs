//! Past trajectory storage for history-dependent forces.

use crate::error::{invalid, Result};
use crate::spacetime::{FourVector, MinkowskiDim};
use crate::worldline::{Worldline, WorldlineState};

/// Motion assumed before the first stored sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreHistory {
    /// At rest at the first sample's position.
    Rest,
    /// Uniform motion with the first sample's velocity.
    Uniform,
}

#[derive(Debug, Clone)]
struct Sample {
    tau: f64,
    z: FourVector,
    u: FourVector,
    a: FourVector,
}

/// Samples `(τ, z, u, a)` strictly increasing in `τ`, interpolated by
/// quintic Hermite polynomials (position error `O(h⁶)`, acceleration
/// `O(h⁴)`), with an inertial pre-history before the first sample.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    dim: MinkowskiDim,
    samples: Vec<Sample>,
    pre: PreHistory,
    /// Maximum look-back used by history integrals.
    pub horizon: f64,
}

impl HistoryBuffer {
    pub fn new(dim: MinkowskiDim, pre: PreHistory, horizon: f64) -> Self {
        HistoryBuffer { dim, samples: Vec::new(), pre, horizon }
    }

    pub fn pre_history(&self) -> PreHistory {
        self.pre
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first_tau(&self) -> Option<f64> {
        self.samples.first().map(|s| s.tau)
    }

    pub fn last_tau(&self) -> Option<f64> {
        self.samples.last().map(|s| s.tau)
    }

    pub fn push(&mut self, tau: f64, z: FourVector, u: FourVector, a: FourVector) -> Result<()> {
        for v in [&z, &u, &a] {
            self.dim.check(v.dim())?;
        }
        if let Some(last) = self.samples.last() {
            if !(tau > last.tau) {
                return invalid(format!("history samples must increase in τ ({tau} after {})", last.tau));
            }
        }
        if self.samples.is_empty() && self.pre == PreHistory::Rest && u.spatial_norm() > 0.0 {
            return invalid("rest pre-history needs the first sample at rest");
        }
        self.samples.push(Sample { tau, z, u, a });
        Ok(())
    }

    /// Drops the newest sample (used when a step is redone).
    pub fn pop(&mut self) {
        self.samples.pop();
    }

    fn segment(&self, tau: f64) -> usize {
        let i = self.samples.partition_point(|s| s.tau <= tau);
        i.clamp(1, self.samples.len() - 1) - 1
    }

    fn hermite(&self, i: usize, tau: f64) -> WorldlineState {
        let (p, q) = (&self.samples[i], &self.samples[i + 1]);
        let h = q.tau - p.tau;
        let s = (tau - p.tau) / h;
        let d = self.dim.d();
        let mut out = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
        for k in 0..d {
            let c0 = p.z[k];
            let c1 = h * p.u[k];
            let c2 = 0.5 * h * h * p.a[k];
            let d0 = q.z[k] - (c0 + c1 + c2);
            let d1 = h * q.u[k] - (c1 + 2.0 * c2);
            let d2 = h * h * q.a[k] - 2.0 * c2;
            let c3 = 10.0 * d0 - 4.0 * d1 + 0.5 * d2;
            let c4 = -15.0 * d0 + 7.0 * d1 - d2;
            let c5 = 6.0 * d0 - 3.0 * d1 + 0.5 * d2;
            out[0][k] = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
            out[1][k] = (c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)))) / h;
            out[2][k] = (2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5))) / (h * h);
            out[3][k] = (6.0 * c3 + s * (24.0 * c4 + s * 60.0 * c5)) / (h * h * h);
        }
        let [z, u, a, j] = out.map(|v| FourVector::new(v).expect("dimension"));
        WorldlineState { tau, z, u, a, jerk: j }
    }

    fn inertial(&self, tau: f64) -> WorldlineState {
        let first = &self.samples[0];
        let mut z = first.z.clone();
        z.axpy(tau - first.tau, &first.u);
        let zero = FourVector::zero(self.dim);
        WorldlineState { tau, z, u: first.u.clone(), a: zero.clone(), jerk: zero }
    }
}

impl Worldline for HistoryBuffer {
    fn dim(&self) -> MinkowskiDim {
        self.dim
    }

    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, self.last_tau().unwrap_or(f64::NEG_INFINITY))
    }

    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        assert!(!self.samples.is_empty(), "empty history");
        if tau < self.samples[0].tau || self.samples.len() == 1 {
            return self.inertial(tau);
        }
        self.hermite(self.segment(tau), tau)
    }

    fn proper_time_hint(&self, t: f64) -> f64 {
        if self.samples.is_empty() {
            return t;
        }
        let first = &self.samples[0];
        if t <= first.z[0] {
            return first.tau + (t - first.z[0]) / first.u[0];
        }
        let i = self.samples.partition_point(|s| s.z[0] <= t).min(self.samples.len() - 1);
        self.samples[i].tau
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::AnalyticMotion;

    #[test]
    fn interpolation_converges_at_expected_order() {
        let w = AnalyticMotion::circular(MinkowskiDim::D4, 1.0, 0.6).unwrap();
        let err = |h: f64| {
            let mut b = HistoryBuffer::new(MinkowskiDim::D4, PreHistory::Uniform, 10.0);
            let n = (4.0 / h) as usize;
            for i in 0..=n {
                let s = w.state_unchecked(i as f64 * h);
                b.push(s.tau, s.z, s.u, s.a).unwrap();
            }
            let mut worst: f64 = 0.0;
            for i in 0..n {
                let tau = (i as f64 + 0.37) * h;
                let exact = w.state_unchecked(tau);
                let got = b.state_unchecked(tau);
                worst = worst.max((got.a - exact.a).max_abs());
            }
            worst
        };
        let (e1, e2) = (err(0.2), err(0.1));
        // acceleration error falls at least as h⁴
        assert!(e1 / e2 > 14.0, "{e1} {e2}");
    }

    #[test]
    fn rest_prehistory_and_ordering() {
        let d = MinkowskiDim::D3;
        let mut b = HistoryBuffer::new(d, PreHistory::Rest, 5.0);
        let z = FourVector::from_slice(&[0.0, 1.0, 2.0]).unwrap();
        let u = FourVector::time_unit(d);
        b.push(0.0, z.clone(), u.clone(), FourVector::zero(d)).unwrap();
        assert!(b.push(0.0, z.clone(), u.clone(), FourVector::zero(d)).is_err());
        let s = b.state_unchecked(-3.0);
        assert_eq!(s.z.as_slice(), &[-3.0, 1.0, 2.0]);
        assert_eq!(b.domain().1, 0.0);
    }
}
