use std::path::Path;

use log::debug;

use super::{Worldline, WorldlineState};
use crate::error::{invalid, Error, Result};
use crate::spacetime::{FourVector, MinkowskiDim};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives.
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let a = h0 / 6.0;
                let b = (h0 + h1) / 3.0;
                let cc = h1 / 6.0;
                let r = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                d[i] = (r - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        CubicSpline { x, y, m }
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value and first three derivatives.
    fn eval(&self, t: f64) -> [f64; 4] {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        let d3 = (m1 - m0) / h;
        [v, d1, d2, d3]
    }
}

/// Worldline interpolated from sampled positions.
///
/// Velocity is the analytic derivative of the spline, renormalized to
/// `u·u = 1`; acceleration is projected orthogonal to `u`. The jerk is the
/// piecewise-constant third derivative and is only first-order accurate.
#[derive(Debug, Clone)]
pub struct SplineWorldline {
    dim: MinkowskiDim,
    splines: Vec<CubicSpline>,
    tau_min: f64,
    tau_max: f64,
}

impl SplineWorldline {
    pub fn new(taus: Vec<f64>, positions: Vec<FourVector>) -> Result<Self> {
        if taus.len() < 4 || taus.len() != positions.len() {
            return invalid("spline worldline needs at least 4 samples and matching lengths");
        }
        if taus.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("spline samples must be strictly increasing in tau");
        }
        let dim = positions[0].dim();
        for p in &positions {
            dim.check(p.dim())?;
        }
        let splines = (0..dim.d())
            .map(|mu| CubicSpline::new(taus.clone(), positions.iter().map(|p| p[mu]).collect()))
            .collect();
        Ok(SplineWorldline {
            dim,
            tau_min: taus[0],
            tau_max: *taus.last().unwrap(),
            splines,
        })
    }

    /// Sample `w` at `n` equally spaced proper times on `[t0, t1]`.
    pub fn from_worldline<W: Worldline + ?Sized>(w: &W, t0: f64, t1: f64, n: usize) -> Result<Self> {
        let taus: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
        let pos = taus.iter().map(|&t| w.position_unchecked(t)).collect();
        Self::new(taus, pos)
    }

    /// Read a CSV with header row and columns `tau, z0, ..., z{d-1}`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let ncols = rdr.headers()?.len();
        if ncols < 4 {
            return invalid(format!("worldline CSV needs tau plus at least 3 coordinates, found {ncols} columns"));
        }
        let mut taus = Vec::new();
        let mut pos = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let vals: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let vals = vals.map_err(|e| Error::InvalidInput(format!("worldline CSV row {}: {e}", line + 2)))?;
            if vals.len() != ncols {
                return invalid(format!("worldline CSV row {} has {} columns", line + 2, vals.len()));
            }
            taus.push(vals[0]);
            pos.push(FourVector::new(vals[1..].to_vec())?);
        }
        Self::new(taus, pos)
    }
}

impl Worldline for SplineWorldline {
    fn dim(&self) -> MinkowskiDim {
        self.dim
    }

    fn domain(&self) -> (f64, f64) {
        (self.tau_min, self.tau_max)
    }

    fn state_unchecked(&self, tau: f64) -> WorldlineState {
        let d = self.dim.d();
        let mut comps = [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]];
        for (mu, s) in self.splines.iter().enumerate() {
            let e = s.eval(tau);
            for k in 0..4 {
                comps[k][mu] = e[k];
            }
        }
        let [z, u, a, j] = comps.map(|c| FourVector::new(c).expect("dimension checked at construction"));
        let norm = u.norm2().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            debug!("spline velocity renormalized by factor {norm} at tau = {tau}");
        }
        let u = u.scaled(1.0 / norm);
        let a = a.project_orthogonal(&u);
        WorldlineState { tau, z, u, a, jerk: j }
    }

    fn position_unchecked(&self, tau: f64) -> FourVector {
        FourVector::new(self.splines.iter().map(|s| s.eval(tau)[0]).collect()).unwrap()
    }

    fn proper_time_hint(&self, t: f64) -> f64 {
        // Time is monotone along the samples: invert z⁰ by bisection.
        let s = &self.splines[0];
        let (mut lo, mut hi) = (self.tau_min, self.tau_max);
        if t <= s.eval(lo)[0] {
            return lo;
        }
        if t >= s.eval(hi)[0] {
            return hi;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if s.eval(mid)[0] < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldline::AnalyticMotion;

    #[test]
    fn reproduces_circular_motion() {
        let w = AnalyticMotion::circular(MinkowskiDim::D4, 1.0, 0.5).unwrap();
        let s = SplineWorldline::from_worldline(&w, -5.0, 5.0, 2001).unwrap();
        for &tau in &[-3.3, 0.0, 1.234, 4.0] {
            let a = w.state_unchecked(tau);
            let b = s.evaluate(tau).unwrap();
            assert!((&a.z - &b.z).max_abs() < 1e-11);
            assert!((&a.u - &b.u).max_abs() < 1e-8);
            assert!((&a.a - &b.a).max_abs() < 1e-5);
            assert!((b.u.norm2() - 1.0).abs() < 1e-12);
            assert!(b.u.dot(&b.a).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut text = String::from("tau,z0,z1,z2,z3\n");
        for i in 0..10 {
            let t = i as f64 * 0.5;
            text.push_str(&format!("{t},{t},0.5,0,0\n"));
        }
        let s = SplineWorldline::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(s.dim(), MinkowskiDim::D4);
        assert_eq!(s.domain(), (0.0, 4.5));
        let st = s.evaluate(2.2).unwrap();
        assert!((st.z[0] - 2.2).abs() < 1e-14);
        assert!((st.z[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn csv_rejects_garbage() {
        let text = "tau,z0,z1,z2,z3\n0,0,0,0,0\n1,x,0,0,0\n";
        let err = SplineWorldline::from_csv_reader(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }

    #[test]
    fn rejects_unsorted() {
        let d = MinkowskiDim::D4;
        let p = vec![FourVector::zero(d); 4];
        assert!(SplineWorldline::new(vec![0.0, 1.0, 0.5, 2.0], p).is_err());
    }
}
