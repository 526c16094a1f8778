//! Integrated trajectories and their CSV export.

use std::io::Write;

use serde::Serialize;

use super::history::HistoryBuffer;
use super::raw::RunawayFit;
use super::SelfForceModel;
use crate::error::Result;
use crate::spacetime::FourVector;

/// One accepted integration point.
#[derive(Debug, Clone)]
pub struct TrajectorySample {
    pub tau: f64,
    pub z: FourVector,
    pub u: FourVector,
    pub a: FourVector,
    pub f_self: FourVector,
    pub f_ext: FourVector,
    /// `∫ f_ext dτ` from the start.
    pub impulse_ext: FourVector,
    /// `∫ f_self dτ` from the start.
    pub impulse_self: FourVector,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    /// Largest `|u·u - 1|` seen before projection.
    pub max_normalization_drift: f64,
    pub runaway: Option<RunawayFit>,
    /// Set when the integration stopped early, with the reason.
    pub truncated: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: SelfForceModel,
    pub samples: Vec<TrajectorySample>,
    /// The trajectory as a worldline (Hermite interpolation of the samples).
    pub worldline: HistoryBuffer,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectories hold at least the initial sample")
    }

    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }
}

/// Columns: `tau, z*, u*, a*, fself*, fext*, work_ext, work_self, energy`,
/// where `work_*` are the time components of the accumulated impulses and
/// `energy = m u⁰`. `header` lines are written first with a `# ` prefix.
pub fn write_trajectory<W: Write>(out: W, header: &[String], traj: &Trajectory) -> Result<()> {
    let mut out = out;
    for h in header {
        writeln!(out, "# {h}")?;
    }
    let d = traj.model.dim().d();
    let mut csv = csv::Writer::from_writer(out);
    let mut cols = vec!["tau".to_string()];
    for prefix in ["z", "u", "a", "fself", "fext"] {
        cols.extend((0..d).map(|i| format!("{prefix}{i}")));
    }
    cols.extend(["work_ext", "work_self", "energy"].map(String::from));
    csv.write_record(&cols)?;
    let m = traj.model.charge.m;
    for s in &traj.samples {
        let mut row = vec![s.tau];
        for v in [&s.z, &s.u, &s.a, &s.f_self, &s.f_ext] {
            row.extend_from_slice(v.as_slice());
        }
        row.extend([s.impulse_ext[0], s.impulse_self[0], m * s.u[0]]);
        csv.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    csv.flush()?;
    Ok(())
}
