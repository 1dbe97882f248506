use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grasstwin::appearance::Environment;
use grasstwin::calibration::sample_module;
use grasstwin::display::{assemble_uncalibrated, Frame};
use grasstwin::exec::Backend;
use grasstwin::frontdoor::config::Scene;
use grasstwin::rig::CaptureRig;

fn backends() -> Vec<(&'static str, Backend)> {
    let mut v = vec![("sequential", Backend::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Backend::Parallel));
    v
}

fn scene(modules: usize) -> Scene {
    let mut s = Scene::default();
    s.display.modules = modules;
    s
}

fn display_frame(c: &mut Criterion) {
    let mut g = c.benchmark_group("display_frame");
    for modules in [4, 32] {
        let s = scene(modules);
        for (name, backend) in backends() {
            let mut d = assemble_uncalibrated(s.modules().unwrap())
                .unwrap()
                .with_backend(backend);
            d.home_all().unwrap();
            let (w, h) = (d.width, d.height);
            let frames = [
                Frame::from_fn(w, h, |r, col| ((r * 32 + col * 8) % 256) as u8),
                Frame::filled(w, h, 0),
            ];
            let mut i = 0;
            g.bench_function(BenchmarkId::new(name, modules * 16), |b| {
                b.iter(|| {
                    i ^= 1;
                    black_box(d.present(&frames[i], 0.1).unwrap())
                })
            });
        }
    }
    g.finish();
}

fn capture(c: &mut Criterion) {
    let mut g = c.benchmark_group("capture");
    for count in [16, 256] {
        let pixels = scene(count / 16).pixels();
        for (name, backend) in backends() {
            let mut rig = CaptureRig::new(Environment::iso(), 0.0, count, 16.min(count), 1)
                .unwrap()
                .with_backend(backend);
            g.bench_function(BenchmarkId::new(name, count), |b| {
                b.iter(|| black_box(rig.measure_all(&pixels).unwrap()))
            });
        }
    }
    g.finish();
}

fn module_sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_module");
    g.sample_size(10);
    let s = scene(4);
    for (name, backend) in backends() {
        let base = s.rig().unwrap().with_backend(backend);
        g.bench_function(BenchmarkId::new(name, 64), |b| {
            b.iter(|| {
                let mut pixels = s.pixels();
                let mut rig = base.clone();
                black_box(sample_module(&mut pixels, &mut rig, 1.0).unwrap())
            })
        });
    }
    g.finish();
}

criterion_group!(benches, display_frame, capture, module_sampling);
criterion_main!(benches);
