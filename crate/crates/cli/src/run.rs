//! Executes a validated scenario and writes its artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::info;
use serde_json::{json, Value};

use radreact_core::balance::{
    flux, radiated_from_flux, radiated_from_self_force_2plus1, work_energy_ledger, BalanceReport, FieldPart, FluxResult,
    FluxSurface, Shape, Source,
};
use radreact_core::fields::{evaluate_field_grid, write_field_grid};
use radreact_core::ode::OdeOptions;
use radreact_core::quadrature::GaussLegendre;
use radreact_core::selfforce::{
    integrate_lorentz_dirac_raw, integrate_reduced_order, integrate_tail_2plus1, lorentz_dirac_force,
    scalar_self_force, six_d_reaction_force, write_trajectory, ExternalField, HistoryBuffer, PreHistory,
    RampedUniformField, RawOptions, SelfForceKind, SelfForceModel, TailIntegrationOptions, TailOptions, Trajectory,
    UniformField,
};
use radreact_core::worldline::SplineWorldline;
use radreact_core::{retarded_time, AnalyticMotion, Charge, FieldTensor, FourVector, MinkowskiDim, Worldline};

use crate::scenario::{LoadedScenario, ModelKind, Scenario, SurfaceSpec, WorldlineSpec};

pub const UNITS: &str = "Gaussian, c=1";

/// Files written by a run.
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

struct Writer {
    dir: PathBuf,
    header: Vec<String>,
    meta: Value,
    files: Vec<PathBuf>,
}

impl Writer {
    fn csv(&mut self, name: &str, write: impl FnOnce(&mut dyn Write, &[String]) -> radreact_core::Result<()>) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        write(&mut out, &self.header)?;
        out.flush()?;
        info!("wrote {}", path.display());
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, mut value: Value) -> anyhow::Result<()> {
        if let Value::Object(map) = &mut value {
            map.insert("meta".into(), self.meta.clone());
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        info!("wrote {}", path.display());
        self.files.push(path);
        Ok(())
    }
}

/// Output directory `root/<name>`, refusing to reuse a non-empty one unless `force`.
pub fn prepare_output(root: &Path, name: &str, force: bool) -> anyhow::Result<PathBuf> {
    let dir = root.join(name);
    if dir.exists() && std::fs::read_dir(&dir)?.next().is_some() && !force {
        bail!("output directory {} is not empty; pass --force to overwrite", dir.display());
    }
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

pub fn run(loaded: &LoadedScenario, dir: PathBuf) -> anyhow::Result<Artifacts> {
    let s = &loaded.scenario;
    let version = format!("radreact {}", env!("CARGO_PKG_VERSION"));
    let mut w = Writer {
        dir,
        header: vec![version.clone(), format!("scenario {} sha256 {}", s.name, loaded.hash), format!("units: {UNITS}")],
        meta: json!({ "tool": version, "scenario": s.name, "scenario_sha256": loaded.hash, "units": UNITS }),
        files: Vec::new(),
    };
    if s.model.is_dynamic() {
        run_dynamic(s, &mut w)?;
    } else {
        let base = loaded.path.parent().unwrap_or(Path::new("."));
        let worldline = build_worldline(s, base)?;
        run_prescribed(s, worldline.as_ref(), &mut w)?;
    }
    Ok(Artifacts { dir: w.dir, files: w.files })
}

fn dim(s: &Scenario) -> anyhow::Result<MinkowskiDim> {
    Ok(MinkowskiDim::new(s.dimension)?)
}

fn padded(v: &[f64], n: usize) -> Vec<f64> {
    if v.is_empty() {
        vec![0.0; n]
    } else {
        v.to_vec()
    }
}

fn build_worldline(s: &Scenario, base: &Path) -> anyhow::Result<Box<dyn Worldline>> {
    let d = dim(s)?;
    let spec = s.worldline.as_ref().context("worldline missing")?;
    Ok(match spec {
        WorldlineSpec::Rest { position } => Box::new(AnalyticMotion::rest(d, position)),
        WorldlineSpec::Uniform { position, velocity } => Box::new(AnalyticMotion::uniform(
            FourVector::from_time_space(d, 0.0, position),
            FourVector::velocity_from_spatial(d, velocity)?,
        )?),
        WorldlineSpec::Hyperbolic { g } => Box::new(AnalyticMotion::hyperbolic(d, *g)?),
        WorldlineSpec::Circular { radius, omega } => Box::new(AnalyticMotion::circular(d, *radius, *omega)?),
        WorldlineSpec::Oscillating { amplitude, omega } => Box::new(AnalyticMotion::oscillating(d, *amplitude, *omega)?),
        WorldlineSpec::Spline { file } => {
            let path = base.join(file);
            let spline =
                SplineWorldline::from_csv_path(&path).with_context(|| format!("reading worldline {}", path.display()))?;
            if spline.dim() != d {
                bail!("worldline file {} has dimension {}, scenario has {}", path.display(), spline.dim().d(), d.d());
            }
            Box::new(spline)
        }
    })
}

fn source(s: &Scenario) -> Source {
    match s.model {
        ModelKind::Scalar => Source::Scalar { coupling: s.charge },
        _ => Source::Electromagnetic { charge: s.charge },
    }
}

fn surface(spec: &SurfaceSpec, n: usize, tau_default: Option<(f64, f64)>) -> anyhow::Result<FluxSurface> {
    let center = |c: &Vec<f64>| padded(c, n);
    Ok(match spec {
        SurfaceSpec::Sphere { radius, center: c, t, order, panels } => FluxSurface {
            shape: Shape::Sphere { radius: *radius, center: center(c), t: (t[0], t[1]) },
            angular_order: *order,
            panels: *panels,
        },
        SurfaceSpec::Tube { radius, tau, order, panels } => {
            let tau = tau.map(|t| (t[0], t[1])).or(tau_default).context("tube surface needs `tau`")?;
            FluxSurface { shape: Shape::RetardedTube { radius: *radius, tau }, angular_order: *order, panels: *panels }
        }
        SurfaceSpec::Slab { t, inner, outer, center: c, order, panels } => FluxSurface {
            shape: Shape::TimeSlab { t: *t, inner: *inner, outer: *outer, center: center(c) },
            angular_order: *order,
            panels: *panels,
        },
    })
}

fn angular_rows(r: &FluxResult) -> Vec<Vec<f64>> {
    let m = &r.angular_momentum;
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn check_flux(s: &Scenario, r: &FluxResult, what: &str) -> anyhow::Result<()> {
    let tol = s.tolerances.flux_rel * r.momentum.max_abs() + s.tolerances.flux_abs;
    if r.momentum_error > tol {
        return Err(radreact_core::Error::Accuracy {
            requested: tol,
            achieved: r.momentum_error,
            context: format!("{what}: flux error estimate above tolerances.flux_rel"),
        }
        .into());
    }
    Ok(())
}

fn run_prescribed(s: &Scenario, worldline: &dyn Worldline, w: &mut Writer) -> anyhow::Result<()> {
    let d = dim(s)?;
    let n = d.spatial();
    if let Some(g) = &s.output.field_grid {
        let origin = padded(&g.origin, n);
        let norm = g.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        let points: Vec<FourVector> = (0..g.n)
            .map(|i| {
                let r = if g.n == 1 { g.r_min } else { g.r_min + (g.r_max - g.r_min) * i as f64 / (g.n - 1) as f64 };
                let x: Vec<f64> = origin.iter().zip(&g.direction).map(|(o, v)| o + r * v / norm).collect();
                FourVector::from_time_space(d, g.t, &x)
            })
            .collect();
        let samples = evaluate_field_grid(worldline, s.charge, &points)?;
        w.csv("field_grid.csv", |out, h| write_field_grid(out, h, &samples))?;
    }
    let src = source(s);
    let mut fluxes = Vec::new();
    let mut first: Option<(FluxSurface, FluxResult)> = None;
    for (i, spec) in s.surfaces.iter().enumerate() {
        let surf = surface(spec, n, None)?;
        let r = flux(worldline, src, &surf, FieldPart::Total)?;
        check_flux(s, &r, &format!("surfaces[{i}]"))?;
        fluxes.push(json!({
            "surface": spec,
            "momentum": r.momentum.as_slice(),
            "momentum_error": r.momentum_error,
            "angular_momentum": angular_rows(&r),
            "angular_error": r.angular_error,
        }));
        if first.is_none() {
            first = Some((surf, r));
        }
    }
    if !fluxes.is_empty() {
        w.json("flux.json", json!({ "fluxes": fluxes }))?;
    }
    if let (true, Some((surf, r))) = (s.output.balance, first) {
        if s.model == ModelKind::Fields && d.d() == 4 {
            if let Some(interval) = emission_interval(worldline, &surf)? {
                let report = prescribed_ledger(s, worldline, interval, &r)?;
                w.json("balance.json", serde_json::to_value(&report)?)?;
            }
        }
    }
    if let Some(f) = &s.output.forces {
        let rows = force_table(s, worldline, f.tau, f.n)?;
        w.csv("forces.csv", |out, h| write_rows(out, h, &rows.0, &rows.1))?;
    }
    Ok(())
}

/// Proper-time interval whose emission crosses the surface.
fn emission_interval(worldline: &dyn Worldline, surf: &FluxSurface) -> anyhow::Result<Option<(f64, f64)>> {
    Ok(match &surf.shape {
        Shape::RetardedTube { tau, .. } => Some(*tau),
        Shape::Sphere { radius, center, t } => {
            let d = worldline.dim();
            let mut pole = center.clone();
            pole[0] += radius;
            let a = retarded_time(worldline, &FourVector::from_time_space(d, t.0, &pole))?.tau;
            let b = retarded_time(worldline, &FourVector::from_time_space(d, t.1, &pole))?.tau;
            Some((a, b))
        }
        Shape::TimeSlab { .. } => None,
    })
}

/// For a prescribed worldline the external agent supplies `m a − f_LD`, so
/// `W = mΔu − ∫f_LD dτ` over the emission interval.
fn prescribed_ledger(
    s: &Scenario,
    worldline: &dyn Worldline,
    (t0, t1): (f64, f64),
    r: &FluxResult,
) -> anyhow::Result<BalanceReport> {
    let charge = Charge::new(s.charge, s.mass)?;
    let gl = GaussLegendre::new(8);
    let panels = 64;
    let h = (t1 - t0) / panels as f64;
    let mut impulse = FourVector::zero(worldline.dim());
    for i in 0..panels {
        let a = t0 + i as f64 * h;
        for (tau, wt) in gl.mapped(a, a + h) {
            let st = worldline.evaluate(tau)?;
            impulse.axpy(wt, &lorentz_dirac_force(&st.u, &st.a, &st.jerk, &charge)?.total);
        }
    }
    let dp = (&worldline.evaluate(t1)?.u - &worldline.evaluate(t0)?.u).scaled(s.mass);
    let work = &dp - &impulse;
    Ok(BalanceReport::new(&dp, &r.momentum, &work, Some(&r.angular_momentum))?)
}

fn force_table(s: &Scenario, worldline: &dyn Worldline, tau: [f64; 2], n: usize) -> anyhow::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let d = worldline.dim().d();
    let mut cols = vec!["tau".to_string()];
    cols.extend((0..d).map(|i| format!("f{i}")));
    cols.push("radiated_rate".into());
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = tau[0] + (tau[1] - tau[0]) * i as f64 / (n - 1) as f64;
        let (f, rate) = match s.model {
            ModelKind::SixD => {
                let der = worldline.derivatives(t, 5)?;
                let f = six_d_reaction_force(&der[1..], s.charge)?;
                let rate = f.radiated.dot(&der[1]);
                (f.total, rate)
            }
            _ => {
                let f = scalar_self_force(worldline, t, s.charge, s.field_mass, &TailOptions::default())?;
                (f.total, f.local_rate)
            }
        };
        let mut row = vec![t];
        row.extend_from_slice(f.as_slice());
        row.push(rate);
        rows.push(row);
    }
    Ok((cols, rows))
}

fn write_rows(out: &mut dyn Write, header: &[String], cols: &[String], rows: &[Vec<f64>]) -> radreact_core::Result<()> {
    for h in header {
        writeln!(out, "# {h}")?;
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(cols)?;
    for r in rows {
        csv.write_record(r.iter().map(|v| format!("{v:.17e}")))?;
    }
    csv.flush()?;
    Ok(())
}

fn external_field(s: &Scenario) -> anyhow::Result<Box<dyn ExternalField>> {
    let spec = s.external_field.as_ref().context("external_field missing")?;
    let tensor = if s.dimension == 3 {
        let e = padded(&spec.electric, 2);
        FieldTensor::from_e_b_2plus1([e[0], e[1]], spec.magnetic.first().copied().unwrap_or(0.0))
    } else {
        let (e, b) = (padded(&spec.electric, 3), padded(&spec.magnetic, 3));
        FieldTensor::from_e_b([e[0], e[1], e[2]], [b[0], b[1], b[2]])
    };
    Ok(match spec.ramp {
        Some(ramp) => Box::new(RampedUniformField { field: tensor, t_on: spec.t_on, ramp }),
        None => Box::new(UniformField(tensor)),
    })
}

fn run_dynamic(s: &Scenario, w: &mut Writer) -> anyhow::Result<()> {
    let d = dim(s)?;
    let n = d.spatial();
    let charge = Charge::new(s.charge, s.mass)?;
    let field = external_field(s)?;
    let init = s.initial.clone().unwrap_or_default();
    let integ = s.integration.as_ref().context("integration missing")?;
    let span = (integ.tau_start, integ.tau_end);
    let z0 = FourVector::from_time_space(d, 0.0, &padded(&init.position, n));
    let u0 = FourVector::velocity_from_spatial(d, &padded(&init.velocity, n))?;
    let mut ode = OdeOptions::default();
    if let Some(v) = integ.rtol {
        ode.rtol = v;
    }
    if let Some(v) = integ.atol {
        ode.atol = v;
    }
    if let Some(v) = integ.h_max {
        ode.h_max = v;
    }
    let mut tail_opts = None;
    let traj: Trajectory = match s.model {
        ModelKind::ReducedOrder => {
            let model = SelfForceModel::new(SelfForceKind::ReducedOrder4d, charge)?;
            integrate_reduced_order(&model, field.as_ref(), &z0, &u0, span, &ode)?
        }
        ModelKind::LorentzDirac => {
            let model = SelfForceModel::new(SelfForceKind::LorentzDirac4d, charge)?;
            let a0 = FourVector::from_time_space(d, 0.0, &padded(&init.acceleration, n)).project_orthogonal(&u0);
            let mut raw = RawOptions { ode, ..RawOptions::default() };
            if let Some(v) = integ.max_scaled_acceleration {
                raw.max_scaled_acceleration = v;
            }
            integrate_lorentz_dirac_raw(&model, field.as_ref(), &z0, &u0, &a0, span, &raw)?
        }
        ModelKind::Tail2plus1 => {
            let model = SelfForceModel::new(SelfForceKind::Tail2Plus1, charge)?;
            let mut opts = TailIntegrationOptions::default();
            if integ.rtol.is_some() || integ.atol.is_some() || integ.h_max.is_some() {
                opts.ode = OdeOptions { h_init: opts.ode.h_init, ..ode };
                if integ.h_max.is_none() {
                    opts.ode.h_max = TailIntegrationOptions::default().ode.h_max;
                }
            }
            if let Some(v) = integ.horizon {
                opts.horizon = v;
            }
            if let Some(v) = integ.near_window {
                opts.near_window = v;
            }
            let hist = HistoryBuffer::new(d, PreHistory::Rest, opts.horizon);
            tail_opts = Some(opts);
            integrate_tail_2plus1(&model, field.as_ref(), hist, &z0, &u0, span, &opts)?
        }
        _ => unreachable!("prescribed-worldline model in dynamic run"),
    };
    if s.output.trajectory {
        w.csv("trajectory.csv", |out, h| write_trajectory(out, h, &traj))?;
    }
    let diag = &traj.diagnostics;
    w.json(
        "diagnostics.json",
        json!({
            "accepted_steps": diag.accepted_steps,
            "rejected_steps": diag.rejected_steps,
            "rhs_evaluations": diag.rhs_evaluations,
            "max_normalization_drift": diag.max_normalization_drift,
            "runaway_e_folding_time": diag.runaway.as_ref().map(|r| r.e_folding_time),
            "truncated": diag.truncated,
            "tau_reached": traj.last().tau,
        }),
    )?;
    if !s.output.balance || traj.samples.len() < 2 {
        return Ok(());
    }
    let report = if let Some(opts) = tail_opts {
        let p_rad = radiated_from_self_force_2plus1(&traj, &opts, s.output.tail_panels)?;
        work_energy_ledger(&traj, &p_rad, None)?
    } else {
        let Some(SurfaceSpec::Tube { radius, order, panels, .. }) =
            s.surfaces.iter().find(|x| matches!(x, SurfaceSpec::Tube { .. }))
        else {
            info!("no tube surface given; skipping the flux ledger");
            return Ok(());
        };
        let (p_rad, m_rad, err) = radiated_from_flux(&traj, *radius, *order, *panels)?;
        let tol = s.tolerances.flux_rel * p_rad.max_abs() + s.tolerances.flux_abs;
        if err > tol {
            return Err(radreact_core::Error::Accuracy {
                requested: tol,
                achieved: err,
                context: "radiated momentum from the tube flux".into(),
            }
            .into());
        }
        work_energy_ledger(&traj, &p_rad, Some(&m_rad))?
    };
    w.json("balance.json", serde_json::to_value(&report)?)?;
    Ok(())
}
