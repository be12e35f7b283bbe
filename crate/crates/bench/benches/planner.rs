use criterion::{black_box, criterion_group, criterion_main, Criterion};
use trackpilot_bench::{bend_frame, centerline_points, default_track, short_detour};
use trackpilot_core::guidance::DirectionCommand;
use trackpilot_core::perception::reference_from_observation;
use trackpilot_core::simulator::{plan_frame, run_episode};
use trackpilot_core::curve::DEFAULT_SAMPLES_PER_SEGMENT;
use trackpilot_core::{Curve2D, TrackLayout, TrackModel};

fn geometry(c: &mut Criterion) {
    let track = default_track();
    let pts = centerline_points(&track);
    c.bench_function("curve_build_quarter_lap", |b| {
        b.iter(|| Curve2D::build(black_box(&pts), DEFAULT_SAMPLES_PER_SEGMENT).unwrap())
    });
    c.bench_function("track_generate_8_lanes", |b| {
        b.iter(|| TrackModel::generate(black_box(TrackLayout::default()), 90).unwrap())
    });
}

fn planning(c: &mut Criterion) {
    let track = default_track();
    let (obs, settings) = bend_frame(&track);
    c.bench_function("reference_from_observation", |b| {
        b.iter(|| reference_from_observation(black_box(&obs)).unwrap())
    });
    c.bench_function("plan_frame_bend_obstacle", |b| {
        b.iter(|| plan_frame(black_box(&obs), &settings, DirectionCommand::Forward))
    });
}

fn episode(c: &mut Criterion) {
    let spec = short_detour();
    let mut group = c.benchmark_group("episode");
    group.sample_size(10);
    group.bench_function("detour_60m", |b| b.iter(|| run_episode(black_box(&spec)).unwrap()));
    group.finish();
}

criterion_group!(benches, geometry, planning, episode);
criterion_main!(benches);
