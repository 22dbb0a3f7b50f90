use super::*;
use crate::params::Schedule;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Thin, moderately lossy medium where every scheme is stable on coarse grids.
fn smooth_medium() -> MediumParams {
    MediumParams {
        kappa12: 5.0,
        gamma2: 1.0,
        gamma13: 0.0,
        delta_p1: 0.0,
        delta_p2: 5.0,
        length: 1.0,
        tau: 1.0,
        c_light: None,
    }
}

fn smooth_drive() -> CouplingDrive {
    CouplingDrive::constant(2.0, 2.0, 0.3, 0.0)
}

fn smooth_probe() -> ProbeInput {
    ProbeInput::from_fraction(0.7, 1.0, 0.5, 3.0, 1.0)
}

fn smooth_grid(nz: usize) -> SpaceTimeGrid {
    SpaceTimeGrid::new(nz, 1001, 1.0, 10.0, &smooth_medium(), &smooth_drive()).unwrap()
}

fn cfg(z_stepper: ZStepper) -> IntegratorConfig {
    IntegratorConfig { z_stepper, ..Default::default() }
}

#[test]
fn zero_probe_gives_zero_record() {
    let p = ProbeInput { amp1: 0.0, amp2: 0.0, ..smooth_probe() };
    let r = simulate(&smooth_medium(), &smooth_drive(), &p, &smooth_grid(11), &cfg(ZStepper::Trapezoidal)).unwrap();
    for a in [&r.e1, &r.e2, &r.beta1, &r.beta2, &r.g] {
        assert!(a.iter().all(|x| *x == ZERO));
    }
    assert_eq!(r.input_peak_intensity, 0.0);
}

#[test]
fn transparent_medium_leaves_fields_unchanged() {
    let m = MediumParams { kappa12: 0.0, ..smooth_medium() };
    let g = smooth_grid(11);
    for stepper in [ZStepper::Euler, ZStepper::PredictorCorrector, ZStepper::Trapezoidal] {
        let r = simulate(&m, &smooth_drive(), &smooth_probe(), &g, &cfg(stepper)).unwrap();
        assert_eq!(r.output, r.input);
    }
}

#[test]
fn boundary_and_initial_invariants() {
    let g = smooth_grid(11);
    let p = smooth_probe();
    let r = simulate(&smooth_medium(), &smooth_drive(), &p, &g, &cfg(ZStepper::Trapezoidal)).unwrap();
    for (col, &k) in r.t_index.iter().enumerate() {
        let [a, b] = p.envelope(g.t(k));
        assert_eq!(r.e1[[0, col]], a);
        assert_eq!(r.e2[[0, col]], b);
    }
    for row in 0..r.z_index.len() {
        assert_eq!(r.beta1[[row, 0]], ZERO);
        assert_eq!(r.beta2[[row, 0]], ZERO);
        assert_eq!(r.g[[row, 0]], ZERO);
    }
    assert_eq!(r.peaks.len(), g.nz);
}

#[test]
fn stride_keeps_both_edges() {
    let g = smooth_grid(11);
    let c = IntegratorConfig { record: RecordStride { z: 4, t: 300 }, ..Default::default() };
    let r = simulate(&smooth_medium(), &smooth_drive(), &smooth_probe(), &g, &c).unwrap();
    assert_eq!(r.z_index, vec![0, 4, 8, 10]);
    assert_eq!(r.t_index, vec![0, 300, 600, 900, 1000]);
    let full = simulate(&smooth_medium(), &smooth_drive(), &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    assert_eq!(r.e1[[2, 1]], full.e1[[8, 300]]);
    assert_eq!(r.output, full.output);
}

#[test]
fn field_advance_rules() {
    let e = vec![C64::new(1.0, 0.5); 4];
    let zero = vec![ZERO; 4];
    let out = advance_field([&e, &e], [&zero, &zero], None, 3.0, 0.1).unwrap();
    assert_eq!(out[0], e);
    let b = vec![C64::new(0.2, -0.1); 4];
    let out = advance_field([&e, &e], [&b, &b], None, 3.0, 0.1).unwrap();
    for x in &out[1] {
        assert!((x - (e[0] + C64::new(0.0, 0.3) * b[0])).norm() < 1e-15);
    }
    let out = advance_field([&e, &e], [&b, &b], Some([&zero, &zero]), 3.0, 0.1).unwrap();
    assert!((out[0][0] - (e[0] + C64::new(0.0, 0.15) * b[0])).norm() < 1e-15);
    assert!(advance_field([&e, &e], [&b, &b[..3]], None, 1.0, 0.1).is_err());
}

#[test]
fn zero_field_column_gives_zero_coherences() {
    let g = smooth_grid(2);
    let zero = vec![ZERO; g.nt];
    let at = march_column([&zero, &zero], &smooth_medium(), &smooth_drive(), &g, &IntegratorConfig::default()).unwrap();
    assert!(at.beta1.iter().chain(&at.beta2).chain(&at.g).all(|x| *x == ZERO));
}

#[test]
fn single_lambda_dark_state() {
    // One leg on resonance: in the adiabatic limit beta_1 -> 0 and g -> -E_1 / Omega_c1.
    let m = MediumParams { gamma2: 0.16, delta_p1: 0.0, ..smooth_medium() };
    let d = CouplingDrive::constant(18.0, 0.0, 0.0, 0.0);
    let t_max = 8.0;
    let g = SpaceTimeGrid::new(2, SpaceTimeGrid::min_time_samples(t_max, &m, &d), 1.0, t_max, &m, &d).unwrap();
    let p = ProbeInput::from_fraction(1.0, 1.0, 0.0, 4.0, 1.0);
    let [e1, e2] = probe_columns(&p, &g);
    let at = march_column([&e1, &e2], &m, &d, &g, &IntegratorConfig::default()).unwrap();
    let kc = (p.t_center / g.dt).round() as usize;
    let ratio = at.g[kc].norm() / (e1[kc].norm() / 18.0);
    assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
    assert!(at.beta2.iter().all(|x| *x == ZERO));
}

fn column_at(nt: usize, interp: Interpolation) -> AtomicColumns {
    let m = smooth_medium();
    let d = smooth_drive();
    let g = SpaceTimeGrid::new(2, nt, 1.0, 8.0, &m, &d).unwrap();
    let [e1, e2] = probe_columns(&smooth_probe(), &g);
    march_column([&e1, &e2], &m, &d, &g, &IntegratorConfig { interpolation: interp, ..Default::default() }).unwrap()
}

/// Difference of the final coherences between two resolutions.
fn end_diff(a: &AtomicColumns, b: &AtomicColumns) -> f64 {
    let (na, nb) = (a.g.len() - 1, b.g.len() - 1);
    ((a.beta1[na] - b.beta1[nb]).norm_sqr() + (a.beta2[na] - b.beta2[nb]).norm_sqr() + (a.g[na] - b.g[nb]).norm_sqr())
        .sqrt()
}

fn mid_diff(a: &AtomicColumns, b: &AtomicColumns) -> f64 {
    // Sample at t = 3 (the pulse centre) on both grids.
    let (ka, kb) = ((a.g.len() - 1) * 3 / 8, (b.g.len() - 1) * 3 / 8);
    ((a.beta1[ka] - b.beta1[kb]).norm_sqr() + (a.g[ka] - b.g[kb]).norm_sqr()).sqrt()
}

#[test]
fn column_integrator_is_fourth_order_with_cubic_interpolation() {
    let cols: Vec<AtomicColumns> = [801, 1601, 3201].iter().map(|&n| column_at(n, Interpolation::Cubic)).collect();
    let r = mid_diff(&cols[0], &cols[1]) / mid_diff(&cols[1], &cols[2]);
    assert!((r - 16.0).abs() < 0.4 * 16.0, "ratio {r}");
    let r_end = end_diff(&cols[0], &cols[1]) / end_diff(&cols[1], &cols[2]);
    assert!(r_end > 9.6, "ratio {r_end}");
}

#[test]
fn linear_interpolation_drops_to_second_order() {
    let cols: Vec<AtomicColumns> = [801, 1601, 3201].iter().map(|&n| column_at(n, Interpolation::Linear)).collect();
    let r = mid_diff(&cols[0], &cols[1]) / mid_diff(&cols[1], &cols[2]);
    assert!((r - 4.0).abs() < 1.0, "ratio {r}");
}

#[test]
fn non_finite_input_is_reported() {
    let g = smooth_grid(3);
    let [mut e1, e2] = probe_columns(&smooth_probe(), &g);
    e1[500] = C64::new(f64::NAN, 0.0);
    let err =
        simulate_boundary(&smooth_medium(), &smooth_drive(), [e1, e2], &g, &IntegratorConfig::default()).unwrap_err();
    assert!(matches!(err, SimError::Diverged { iz: 0, .. }), "{err:?}");
}

#[test]
fn short_window_is_truncation_error() {
    let m = smooth_medium();
    let d = smooth_drive();
    let g = SpaceTimeGrid::new(11, 401, 1.0, 4.0, &m, &d).unwrap();
    let err = simulate(&m, &d, &smooth_probe(), &g, &IntegratorConfig::default()).unwrap_err();
    assert!(matches!(err, SimError::Truncated { .. }), "{err:?}");
}

#[test]
fn stiffness_is_rechecked() {
    let m = MediumParams { delta_p2: 500.0, ..smooth_medium() };
    let err =
        simulate(&m, &smooth_drive(), &smooth_probe(), &smooth_grid(11), &IntegratorConfig::default()).unwrap_err();
    assert!(matches!(err, SimError::Grid(_)));
}

#[test]
fn simulation_is_deterministic() {
    let g = smooth_grid(11);
    let a = simulate(&smooth_medium(), &smooth_drive(), &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    let b = simulate(&smooth_medium(), &smooth_drive(), &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lossless_medium_conserves_energy() {
    // With no decay, exit energy plus kappa times the atomic excitation left
    // in the medium at the end of the window equals the input energy.
    let m = MediumParams { gamma2: 0.0, gamma13: 0.0, ..smooth_medium() };
    let d = smooth_drive();
    let g = SpaceTimeGrid::new(161, 1601, 1.0, 16.0, &m, &d).unwrap();
    let r = simulate(&m, &d, &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    let ein = window_energy([&r.input[0], &r.input[1]], g.dt, 0, g.nt - 1);
    let eout = window_energy([&r.output[0], &r.output[1]], g.dt, 0, g.nt - 1);
    let last = g.nt - 1;
    let a: Vec<f64> = (0..g.nz)
        .map(|i| r.beta1[[i, last]].norm_sqr() + r.beta2[[i, last]].norm_sqr() + r.g[[i, last]].norm_sqr())
        .collect();
    let stored = g.dz * (a.iter().sum::<f64>() - 0.5 * (a[0] + a[g.nz - 1]));
    let balance = (eout + m.kappa12 * stored) / ein;
    assert!((balance - 1.0).abs() < 1e-3, "{balance}");
}

#[test]
fn gated_coupling_runs() {
    let d = CouplingDrive { schedule: Schedule::TanhGate { sigma: 2.0, t1: 4.0, t2: 6.0 }, ..smooth_drive() };
    let g = SpaceTimeGrid::new(11, 1001, 1.0, 10.0, &smooth_medium(), &d).unwrap();
    assert!(simulate(&smooth_medium(), &d, &smooth_probe(), &g, &IntegratorConfig::default()).is_ok());
}

#[test]
fn finite_light_speed_shifts_lab_time_only() {
    let g = smooth_grid(11);
    let inf = simulate(&smooth_medium(), &smooth_drive(), &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    let m = MediumParams { c_light: Some(2.0), ..smooth_medium() };
    let fin = simulate(&m, &smooth_drive(), &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    assert_eq!(inf.output, fin.output);
    let last = g.nz - 1;
    assert!((fin.peaks[last].t_lab - inf.peaks[last].t_lab - 0.5).abs() < 1e-12);
    assert!((fin.t_lab(fin.z_index.len() - 1, 0) - 0.5).abs() < 1e-12);
}

#[test]
fn identical_runs_have_zero_difference() {
    let g = smooth_grid(11);
    let a = simulate(&smooth_medium(), &smooth_drive(), &smooth_probe(), &g, &IntegratorConfig::default()).unwrap();
    assert_eq!(column_difference(&a.output, &a.output, 1, g.dt), 0.0);
}

fn z_ratios(stepper: ZStepper) -> Vec<f64> {
    let rep = convergence_study(
        &smooth_medium(),
        &smooth_drive(),
        &smooth_probe(),
        &smooth_grid(11),
        &cfg(stepper),
        4,
        RefineAxis::Z,
    )
    .unwrap();
    rep.ratios()
}

#[test]
fn euler_is_first_order_in_z() {
    let r = z_ratios(ZStepper::Euler);
    let last = *r.last().unwrap();
    assert!((last - 2.0).abs() < 0.5, "{r:?}");
}

#[test]
fn predictor_corrector_is_second_order_in_z() {
    let r = z_ratios(ZStepper::PredictorCorrector);
    let last = *r.last().unwrap();
    assert!((last - 4.0).abs() < 1.0, "{r:?}");
}

#[test]
fn trapezoid_is_second_order_in_z() {
    let r = z_ratios(ZStepper::Trapezoidal);
    let last = *r.last().unwrap();
    assert!((last - 4.0).abs() < 1.0, "{r:?}");
}

#[test]
fn too_few_levels_is_an_error() {
    let e = convergence_study(
        &smooth_medium(),
        &smooth_drive(),
        &smooth_probe(),
        &smooth_grid(11),
        &IntegratorConfig::default(),
        1,
        RefineAxis::T,
    );
    assert_eq!(e, Err(SimError::TooFewLevels(1)));
}

#[test]
fn period_estimate_from_crossings() {
    let z: Vec<f64> = (0..1001).map(|k| k as f64 / 1000.0).collect();
    let y: Vec<f64> = z.iter().map(|z| (2.0 * std::f64::consts::PI * z / 0.13 + 0.4).sin()).collect();
    let p = spatial_period(&z, &y).unwrap();
    assert!((p - 0.13).abs() < 1e-3, "{p}");
    assert_eq!(spatial_period(&z, &vec![1.0; z.len()]), None);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn simulation_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, shift in 0.0f64..2.0) {
            let m = smooth_medium();
            let d = smooth_drive();
            let g = SpaceTimeGrid::new(11, 1201, 1.0, 12.0, &m, &d).unwrap();
            let p = smooth_probe();
            let q = ProbeInput { t_center: p.t_center + shift, varphi12: -1.0, ..ProbeInput::from_fraction(0.2, 1.0, 0.0, 3.0, 0.8) };
            let [p1, p2] = probe_columns(&p, &g);
            let [q1, q2] = probe_columns(&q, &g);
            let mix = |x: &[C64], y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(u, v)| u * a + v * b).collect() };
            let c = IntegratorConfig::default();
            let rp = simulate_boundary(&m, &d, [p1.clone(), p2.clone()], &g, &c).unwrap();
            let rq = simulate_boundary(&m, &d, [q1.clone(), q2.clone()], &g, &c).unwrap();
            let rs = simulate_boundary(&m, &d, [mix(&p1, &q1), mix(&p2, &q2)], &g, &c).unwrap();
            let scale = rs.output[0].iter().chain(&rs.output[1]).fold(0.0f64, |s, x| s.max(x.norm())).max(1e-300);
            for j in 0..2 {
                for k in 0..g.nt {
                    let expect = rp.output[j][k] * a + rq.output[j][k] * b;
                    prop_assert!((rs.output[j][k] - expect).norm() <= 1e-10 * scale);
                }
            }
        }
    }
}
