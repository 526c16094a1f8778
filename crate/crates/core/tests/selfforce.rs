use proptest::prelude::*;
use radreact_core::fields::{constant_field_motion, Charge, FieldTensor};
use radreact_core::ode::OdeOptions;
use radreact_core::selfforce::{
    integrate_lorentz_dirac_raw, integrate_reduced_order, reduced_order_force, scalar_self_force,
    integrate_tail_2plus1, six_d_reaction_force, HistoryBuffer, PreHistory, RampedUniformField, RawOptions,
    SelfForceKind, SelfForceModel, TailIntegrationOptions, TailOptions, UniformField,
};
use radreact_core::spacetime::{FourVector, MinkowskiDim};
use radreact_core::worldline::{AnalyticMotion, Worldline};

const D4: MinkowskiDim = MinkowskiDim::D4;

fn v4(c: [f64; 4]) -> FourVector {
    FourVector::from_slice(&c).unwrap()
}

fn magnetic(b: f64) -> UniformField {
    UniformField(FieldTensor::from_e_b([0.0, 0.0, 0.0], [0.0, 0.0, b]))
}

#[test]
fn vanishing_charge_follows_constant_field_motion() {
    let q = Charge::new(1e-12, 1e-12).unwrap();
    let model = SelfForceModel::new(SelfForceKind::ReducedOrder4d, q).unwrap();
    let field = magnetic(1.0);
    let u0 = FourVector::velocity_from_spatial(D4, &[0.5, 0.0, 0.1]).unwrap();
    let period = 2.0 * std::f64::consts::PI;
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-13, ..OdeOptions::default() };
    let tr = integrate_reduced_order(&model, &field, &FourVector::zero(D4), &u0, (0.0, 10.0 * period), &opts).unwrap();
    let exact = constant_field_motion(&field.0, &q, &u0).unwrap();
    let (mut dz, mut du): (f64, f64) = (0.0, 0.0);
    for s in &tr.samples {
        let e = exact.state_unchecked(s.tau);
        // position error relative to the coordinate size (z⁰ reaches ~70)
        dz = dz.max((&s.z - &e.z).max_abs() / e.z.max_abs().max(1.0));
        du = du.max((&s.u - &e.u).max_abs());
    }
    assert!(dz < 1e-8 && du < 1e-8, "{dz:e} {du:e}");
}

#[test]
fn cyclotron_energy_loss_matches_larmor() {
    let q = Charge::new(0.1, 1.0).unwrap();
    let model = SelfForceModel::new(SelfForceKind::ReducedOrder4d, q).unwrap();
    let field = magnetic(1.0);
    let u0 = FourVector::velocity_from_spatial(D4, &[0.6, 0.0, 0.0]).unwrap();
    // proper-time period 2π m / (e B)
    let period = 2.0 * std::f64::consts::PI / 0.1;
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, h_max: period / 200.0, ..OdeOptions::default() };
    let tr = integrate_reduced_order(&model, &field, &FourVector::zero(D4), &u0, (0.0, 3.0 * period), &opts).unwrap();
    assert!(tr.diagnostics.truncated.is_none());

    let radius = |s: &radreact_core::selfforce::TrajectorySample| {
        let (ux, uy) = (s.u[1], s.u[2]);
        (ux * ux + uy * uy).sqrt() * q.m / (q.e * 1.0)
    };
    let radii: Vec<f64> = tr.samples.iter().map(radius).collect();
    assert!(radii.windows(2).all(|w| w[1] <= w[0] + 1e-12), "gyration radius must shrink");
    assert!(radii.last().unwrap() < &radii[0]);

    // energy lost per orbit against the time integral of the Larmor power
    for orbit in 0..3 {
        let (t0, t1) = (orbit as f64 * period, (orbit + 1) as f64 * period);
        let inside: Vec<_> = tr.samples.iter().filter(|s| s.tau >= t0 && s.tau <= t1).collect();
        let lost = inside.first().unwrap().impulse_self[0] - inside.last().unwrap().impulse_self[0];
        let mut larmor = 0.0;
        for w in inside.windows(2) {
            let rate = |s: &radreact_core::selfforce::TrajectorySample| -2.0 / 3.0 * q.e * q.e * s.a.norm2() * s.u[0];
            larmor += 0.5 * (w[1].tau - w[0].tau) * (rate(w[0]) + rate(w[1]));
        }
        assert!(((lost - larmor) / larmor).abs() < 0.01, "orbit {orbit}: {lost} vs {larmor}");
    }
}

#[test]
fn uniform_electric_field_has_no_reduced_self_force() {
    let q = Charge::new(0.7, 1.3).unwrap();
    let field = UniformField(FieldTensor::from_e_b([0.0, 0.4, 0.0], [0.0, 0.0, 0.0]));
    for v in [-0.9, -0.3, 0.0, 0.5, 0.99] {
        let u = FourVector::velocity_from_spatial(D4, &[0.0, v, 0.0]).unwrap();
        let (f_ext, f_self) = reduced_order_force(&field, &v4([0.0, 1.0, 2.0, 3.0]), &u, &q);
        assert!(f_ext.max_abs() > 0.1);
        assert!(f_self.max_abs() < 1e-10, "v = {v}: {:e}", f_self.max_abs());
    }
}

#[test]
fn free_particle_runs_away_with_tau0() {
    let q = Charge::new(0.3, 1.0).unwrap();
    let model = SelfForceModel::new(SelfForceKind::LorentzDirac4d, q).unwrap();
    let tau0 = model.tau0();
    let u0 = FourVector::time_unit(D4);
    let a0 = v4([0.0, 1e-8, 0.0, 0.0]);
    let opts = RawOptions::default();
    let tr = integrate_lorentz_dirac_raw(&model, &magnetic(0.0), &FourVector::zero(D4), &u0, &a0, (0.0, 40.0 * tau0), &opts)
        .unwrap();
    let fit = tr.diagnostics.runaway.unwrap();
    assert!(((fit.e_folding_time - tau0) / tau0).abs() < 0.01, "{fit:?} vs {tau0}");
    assert!(tr.diagnostics.truncated.is_some());

    // exactly zero initial acceleration stays inertial
    let zero = FourVector::zero(D4);
    let tr = integrate_lorentz_dirac_raw(&model, &magnetic(0.0), &zero, &u0, &zero, (0.0, 10.0 * tau0), &opts).unwrap();
    assert!(tr.samples.iter().all(|s| s.a.max_abs() == 0.0));
}

#[test]
fn backward_integration_damps_the_runaway() {
    let q = Charge::new(0.3, 1.0).unwrap();
    let model = SelfForceModel::new(SelfForceKind::LorentzDirac4d, q).unwrap();
    let tau0 = model.tau0();
    let u0 = FourVector::velocity_from_spatial(D4, &[0.2, 0.0, 0.0]).unwrap();
    let a0 = v4([0.0, 0.0, 0.05, 0.0]).project_orthogonal(&u0);
    let tr = integrate_lorentz_dirac_raw(
        &model,
        &magnetic(0.0),
        &FourVector::zero(D4),
        &u0,
        &a0,
        (0.0, -20.0 * tau0),
        &RawOptions::default(),
    )
    .unwrap();
    assert!(tr.diagnostics.truncated.is_none());
    let mag = |a: &FourVector| (-a.norm2()).sqrt();
    let (first, last) = (mag(&tr.first().a), mag(&tr.last().a));
    assert!(last < first * 1e-7, "{first} -> {last}");
    assert!(tr.samples.windows(2).all(|w| mag(&w[1].a) <= mag(&w[0].a) * (1.0 + 1e-9)));
}

#[test]
fn massive_scalar_tends_to_massless() {
    let w = AnalyticMotion::circular(D4, 1.0, 0.5).unwrap();
    let opts = TailOptions { horizon: Some(200.0), ..TailOptions::default() };
    let massless = scalar_self_force(&w, 0.0, 0.8, 0.0, &opts).unwrap();
    let massive = scalar_self_force(&w, 0.0, 0.8, 1e-3, &opts).unwrap();
    let rel = (&massive.total - &massless.total).max_abs() / massless.total.max_abs();
    assert!(rel < 1e-4, "{rel:e}");
    assert!(massive.tail.max_abs() > 0.0);
}

fn tail_run(e_field: f64, tau_end: f64, opts: &TailIntegrationOptions) -> radreact_core::selfforce::Trajectory {
    let d = MinkowskiDim::D3;
    let model = SelfForceModel::new(SelfForceKind::Tail2Plus1, Charge::new(0.5, 1.0).unwrap()).unwrap();
    let field = RampedUniformField { field: FieldTensor::from_e_b_2plus1([e_field, 0.0], 0.0), t_on: 0.0, ramp: 1.0 };
    let hist = HistoryBuffer::new(d, PreHistory::Rest, opts.horizon);
    integrate_tail_2plus1(&model, &field, hist, &FourVector::zero(d), &FourVector::time_unit(d), (0.0, tau_end), opts)
        .unwrap()
}

#[test]
fn tail_charge_at_rest_stays_at_rest() {
    let tr = tail_run(0.0, 1.0, &TailIntegrationOptions::default());
    assert!(tr.samples.len() > 10);
    for s in &tr.samples {
        assert!(s.f_self.max_abs() < 1e-14 && s.u.spatial_norm() == 0.0);
    }
}

#[test]
fn tail_early_motion_is_stable_under_horizon_doubling() {
    let base = TailIntegrationOptions { horizon: 50.0, ..Default::default() };
    let (a, b) = (tail_run(0.2, 2.0, &base), tail_run(0.2, 2.0, &TailIntegrationOptions { horizon: 100.0, ..base }));
    let (ua, ub) = (&a.last().u, &b.last().u);
    assert!(ua[1] > 0.05);
    assert!((ua[1] - ub[1]).abs() < 1e-3 * ua[1]);
    // the speed grows monotonically under the accelerating field
    assert!(a.samples.windows(2).all(|w| w[1].u[1] >= w[0].u[1]));
    for s in &a.samples {
        assert!(s.f_self.dot(&s.u).abs() < 1e-9 * s.f_self.max_abs().max(1e-12));
    }
}

/// `(u, a, ȧ, ä, ⃛a)` obeying the constraints that follow from `u·u = 1`.
fn kinematic_state(raw: [[f64; 6]; 5]) -> Vec<FourVector> {
    let d = MinkowskiDim::D6;
    let v: Vec<f64> = raw[0][..5].iter().map(|x| 0.6 * x).collect();
    let u = FourVector::velocity_from_spatial(d, &v).unwrap();
    let with_u_part = |w: &[f64; 6], c: f64| {
        let mut v = FourVector::from_slice(w).unwrap().project_orthogonal(&u);
        v.axpy(c, &u);
        v
    };
    let a = with_u_part(&raw[1], 0.0);
    let j = with_u_part(&raw[2], -a.norm2());
    let s = with_u_part(&raw[3], -3.0 * a.dot(&j));
    let c = with_u_part(&raw[4], -(4.0 * a.dot(&s) + 3.0 * j.norm2()));
    vec![u, a, j, s, c]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn six_d_force_orthogonal_and_radiates(raw in prop::array::uniform5(prop::array::uniform6(-0.6f64..0.6))) {
        let state = kinematic_state(raw);
        let f = six_d_reaction_force(&state, 0.9).unwrap();
        let u = &state[0];
        let scale = state.iter().map(|v| v.max_abs()).fold(1.0, f64::max).powi(4);
        prop_assert!(f.total.dot(u).abs() < 1e-10 * scale);
        prop_assert!(f.radiated.dot(u) >= -1e-12 * scale);
    }
}
