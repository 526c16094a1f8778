//! Dormand–Prince 5(4) integrator with a fourth-order continuous extension.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: 1e-3, h_min: 1e-12, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// An accepted step with its dense-output polynomial.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    r: [Vec<f64>; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> &[f64] {
        &self.r[0]
    }

    /// Solution at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        (0..self.r[0].len())
            .map(|i| {
                let r = &self.r;
                r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
            })
            .collect()
    }
}

/// What the driver should do after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub t_final: f64,
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// `on_accept` sees every accepted step and may modify the new state in
/// place (for projections); it returns whether to continue.
pub fn integrate<F, G>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    mut on_accept: G,
) -> Result<(Vec<f64>, OdeStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    G: FnMut(&DenseStep, &mut [f64]) -> Result<Control>,
{
    let n = y0.len();
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut stats = OdeStats { t_final: t0, ..Default::default() };
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    f(t, &y, &mut k[0])?;
    stats.evaluations += 1;
    let mut h = opts.h_init.min(opts.h_max).min((t_end - t0).abs()).max(opts.h_min);
    let mut fac_prev: f64 = 1e-4;

    while dir * (t_end - t) > 1e-14 * t_end.abs().max(1.0) {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Integration { tau: t, reason: format!("step budget of {} exhausted", opts.max_steps) });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += hs * A[s][j] * k[j][i];
                }
                tmp[i] = acc;
            }
            let (_, rest) = k.split_at_mut(s);
            f(t + C[s] * hs, &tmp, &mut rest[0])?;
            stats.evaluations += 1;
        }
        // tmp holds the fifth-order solution (stage 7 uses the b weights)
        let y_new = tmp.clone();
        let mut err = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * hs;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration { tau: t, reason: "non-finite state".into() });
        }
        if err <= 1.0 {
            let mut r: [Vec<f64>; 5] = Default::default();
            r[0] = y.clone();
            r[1] = (0..n).map(|i| y_new[i] - y[i]).collect();
            r[2] = (0..n).map(|i| hs * k[0][i] - r[1][i]).collect();
            r[3] = (0..n).map(|i| r[1][i] - hs * k[6][i] - r[2][i]).collect();
            r[4] = (0..n).map(|i| hs * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>()).collect();
            let step = DenseStep { t0: t, h: hs, r };
            t = if last { t_end } else { t + hs };
            y = y_new;
            stats.accepted += 1;
            stats.t_final = t;
            let before = y.clone();
            let control = on_accept(&step, &mut y)?;
            if y != before {
                f(t, &y, &mut k[0])?;
                stats.evaluations += 1;
            } else {
                let k6 = k[6].clone();
                k[0].copy_from_slice(&k6);
            }
            if control == Control::Stop {
                break;
            }
            // PI controller (Hairer's beta = 0.04)
            let fac = (err.max(1e-10).powf(0.2 - 0.04 * 0.75) * fac_prev.powf(0.04) / 0.9).clamp(0.2, 10.0);
            fac_prev = err.max(1e-4);
            h = (h / fac).min(opts.h_max);
        } else {
            stats.rejected += 1;
            h /= (err.powf(0.2) / 0.9).min(10.0);
            if h < opts.h_min {
                return Err(Error::Integration { tau: t, reason: format!("step size fell below {:e}", opts.h_min) });
            }
        }
    }
    Ok((y, stats))
}
