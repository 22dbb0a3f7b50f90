use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use twocolor_core::analytic::{intensity_profile, oscillation_rate, propagate_envelope};
use twocolor_core::dynamics::{
    march_column, probe_columns, simulate, IntegratorConfig, RecordStride, SpaceTimeGrid, ZStepper,
};
use twocolor_core::params::{CouplingDrive, MediumParams, ProbeInput};
use twocolor_core::presets::{self, Preset, PresetName};
use twocolor_core::C64;

fn analytic(c: &mut Criterion) {
    let p = Preset::get(PresetName::Fig2);
    let rate = oscillation_rate(&p.medium, &p.drive).unwrap();
    c.bench_function("intensity_profile_401_depths", |b| {
        b.iter(|| {
            (0..401).map(|i| intensity_profile(&p.probe, &p.drive, &rate, i as f64 / 400.0).unwrap().0).sum::<f64>()
        })
    });
    let e0 = [C64::new(0.6, 0.1), C64::new(0.8, 0.0)];
    c.bench_function("propagate_envelope", |b| {
        b.iter(|| propagate_envelope(black_box(e0), &p.medium, &p.drive, black_box(0.37)).unwrap())
    });
}

fn column(c: &mut Criterion) {
    let p = Preset::get(PresetName::Fig4);
    let nt = SpaceTimeGrid::min_time_samples(p.grid.t_max, &p.medium, &p.drive);
    let g = SpaceTimeGrid::new(2, nt, 1.0, p.grid.t_max, &p.medium, &p.drive).unwrap();
    let [e1, e2] = probe_columns(&p.probe, &g);
    c.bench_function(&format!("march_column_nt{nt}"), |b| {
        b.iter(|| march_column([&e1, &e2], &p.medium, &p.drive, &g, &IntegratorConfig::default()).unwrap())
    });
}

fn space_march(c: &mut Criterion) {
    let p = Preset::get(PresetName::Fig4);
    let d = CouplingDrive::constant(presets::RABI, presets::RABI, 0.0, 0.0);
    let probe = ProbeInput::from_fraction(0.7, presets::PEAK_AMP, PI / 4.0, 10.0, 3.0);
    let nt = SpaceTimeGrid::min_time_samples(29.0, &p.medium, &d);
    let g = SpaceTimeGrid::new(41, nt, 1.0, 29.0, &p.medium, &d).unwrap();
    let cfg = IntegratorConfig { record: RecordStride::ENDS, ..Default::default() };
    let mut group = c.benchmark_group("simulate");
    group.sample_size(10);
    group.bench_function(format!("thick_nz41_nt{nt}"), |b| {
        b.iter(|| simulate(&p.medium, &d, &probe, &g, &cfg).unwrap())
    });
    group.finish();
}

/// The explicit steppers are only stable in thin media, so they are compared
/// on a low optical depth.
fn steppers(c: &mut Criterion) {
    let m = MediumParams { kappa12: 5.0, gamma2: 1.0, delta_p2: 5.0, ..Preset::get(PresetName::Fig4).medium };
    let d = CouplingDrive::constant(2.0, 2.0, 0.3, 0.0);
    let probe = ProbeInput::from_fraction(0.7, 1.0, 0.5, 3.0, 1.0);
    let g = SpaceTimeGrid::new(81, 1001, 1.0, 10.0, &m, &d).unwrap();
    let mut group = c.benchmark_group("thin_nz81_nt1001");
    for stepper in [ZStepper::Euler, ZStepper::PredictorCorrector, ZStepper::Trapezoidal] {
        let cfg = IntegratorConfig { z_stepper: stepper, record: RecordStride::ENDS, ..Default::default() };
        group.bench_function(format!("{stepper:?}"), |b| b.iter(|| simulate(&m, &d, &probe, &g, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, analytic, column, space_march, steppers);
criterion_main!(benches);
