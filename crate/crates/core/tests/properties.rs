use grasstwin::actuation::{
    mm_to_count, pd_step, DrivetrainParams, MotorState, PdGains, Setpoint, CONTROL_TICK_S,
};
use grasstwin::analysis::{
    center_and_regress, characteristic_linearity, pooled_regression, regress, sweep_levels,
    Direction, MeasurementDataset, TrialSeries,
};
use grasstwin::appearance::{auto_expose, CameraConfig, Environment, GrassOptics, Perturbation};
use grasstwin::calibration::{
    build_table, calibrate_multi, noiseless_characteristic, sample_lengths, OgcdCharacteristic,
};
use grasstwin::color::{ciede2000, rgb_to_lab, Lab, LinearRgb};
use grasstwin::display::{assemble_uncalibrated, Animation, Display, Frame, GrassModule};
use grasstwin::analysis::{calibrate_single, run_sweep};
use grasstwin::frontdoor::config::Scene;
use proptest::prelude::*;

fn lab() -> impl Strategy<Value = Lab> {
    (0.0..100.0f64, -128.0..128.0f64, -128.0..128.0f64).prop_map(|(l, a, b)| Lab::new(l, a, b))
}

fn camera(angle: f64) -> CameraConfig {
    auto_expose(
        &Default::default(),
        &Environment::iso(),
        &CameraConfig::new(angle, Vec::new()),
    )
    .unwrap()
}

fn characteristic(optics: &GrassOptics, angle: f64) -> OgcdCharacteristic {
    let lengths = sample_lengths(1.0, 20.0).unwrap();
    noiseless_characteristic(optics, &Environment::iso(), &camera(angle), &lengths, 20.0).unwrap()
}

fn draw(seed: u64) -> GrassOptics {
    GrassOptics::default().perturbed(seed, &Perturbation::default())
}

fn display(modules: usize) -> Display {
    let ms = (0..modules)
        .map(|i| GrassModule::uniform(i, i, &GrassOptics::default()))
        .collect();
    let mut d = assemble_uncalibrated(ms).unwrap();
    d.home_all().unwrap();
    d
}

fn dataset(offsets: &[f64], ys: &[f64]) -> MeasurementDataset {
    let levels = sweep_levels();
    MeasurementDataset {
        pixel_id: 0,
        calib_viewpoint_deg: 0.0,
        meas_viewpoint_deg: 0.0,
        trials: offsets
            .iter()
            .enumerate()
            .map(|(t, off)| TrialSeries {
                trial: t,
                direction: if t % 2 == 0 { Direction::Up } else { Direction::Down },
                levels: levels.clone(),
                labs: vec![Lab::new(0.0, 0.0, 0.0); levels.len()],
                ogcd: ys.iter().map(|y| y + off).collect(),
            })
            .collect(),
        simulated_s: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn ciede2000_identity_and_symmetry(a in lab(), b in lab()) {
        prop_assert!(ciede2000(a, a).abs() <= 1e-12);
        prop_assert!((ciede2000(a, b) - ciede2000(b, a)).abs() <= 1e-12);
        prop_assert!(ciede2000(a, b) >= 0.0);
    }

    #[test]
    fn gray_lightness_increases(v in 0.0..0.999f64, dv in 1e-6..1e-3f64) {
        let lo = rgb_to_lab(LinearRgb::gray(v)).l_star;
        let hi = rgb_to_lab(LinearRgb::gray((v + dv).min(1.0))).l_star;
        prop_assert!(hi > lo);
    }

    #[test]
    fn mm_to_count_is_monotone(a in 0.0..20.0f64, b in 0.0..20.0f64) {
        let p = DrivetrainParams::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(mm_to_count(lo, &p).unwrap() <= mm_to_count(hi, &p).unwrap());
    }

    #[test]
    fn encoder_stays_within_travel(targets in proptest::collection::vec(-50..200i32, 1..8)) {
        let (p, g) = (DrivetrainParams::default(), PdGains::default());
        let mut s = MotorState::homed_at_origin();
        for t in targets {
            for _ in 0..150 {
                s = pd_step(&s, Setpoint { target_count: t }, &g, &p, CONTROL_TICK_S);
                prop_assert!((0..=p.max_count()).contains(&s.position_count));
            }
        }
    }

    #[test]
    fn mixing_fraction_monotone(seed in any::<u64>(), angle in 0.0..=90.0f64, a in 0.0..20.0f64, b in 0.0..20.0f64) {
        let o = draw(seed);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (flo, fhi) = (o.mixing_fraction(lo, angle), o.mixing_fraction(hi, angle));
        prop_assert!((0.0..=1.0).contains(&flo) && (0.0..=1.0).contains(&fhi));
        prop_assert!(flo <= fhi);
        prop_assert_eq!(o.mixing_fraction(0.0, 0.0), 0.0);
    }

    #[test]
    fn r_squared_in_unit_interval(ys in proptest::collection::vec(-1e3..1e3f64, 3..40)) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let r = regress(&xs, &ys).unwrap().r_squared;
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn regression_recovers_line(alpha in -10.0..10.0f64, beta in -100.0..100.0f64) {
        let xs: Vec<f64> = (0..33).map(|i| i as f64 * 8.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| alpha * x + beta).collect();
        let r = regress(&xs, &ys).unwrap();
        prop_assert!((r.slope - alpha).abs() <= 1e-9);
        prop_assert!((r.intercept - beta).abs() <= 1e-9);
    }

    #[test]
    fn centering_never_lowers_r2(
        offsets in proptest::collection::vec(-5.0..5.0f64, 2..10),
        curve in 0.0..0.5f64,
        wobble in proptest::collection::vec(-0.3..0.3f64, 33),
    ) {
        let ys: Vec<f64> = sweep_levels()
            .iter()
            .zip(&wobble)
            .map(|(l, w)| {
                let x = *l as f64 / 255.0;
                30.0 * (x + curve * x * (1.0 - x)) + w
            })
            .collect();
        let ds = dataset(&offsets, &ys);
        let centered = center_and_regress(&ds).unwrap().regression.r_squared;
        let raw = pooled_regression(std::slice::from_ref(&ds)).unwrap().r_squared;
        prop_assert!(centered >= raw - 1e-12, "{centered} < {raw}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tables_are_monotone(seed in any::<u64>()) {
        let ch = characteristic(&draw(seed), 0.0);
        let t = build_table(&ch, ch.range() * 0.9).unwrap();
        prop_assert!(t.lengths_mm.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(t.lengths_mm[0], 0.0);
    }

    #[test]
    fn calibrate_multi_ignores_order(seed in any::<u64>(), rot in 0usize..5) {
        let entries: Vec<(usize, OgcdCharacteristic)> = (0..5)
            .map(|i| (i, characteristic(&draw(seed.wrapping_add(i as u64)), 0.0)))
            .collect();
        let mut shuffled = entries.clone();
        shuffled.rotate_left(rot);
        shuffled.swap(0, 4);
        let a = calibrate_multi(entries).unwrap();
        let b = calibrate_multi(shuffled).unwrap();
        prop_assert_eq!(a.reference_pixel, b.reference_pixel);
        prop_assert_eq!(a.reference_ogcd, b.reference_ogcd);
        prop_assert_eq!(a.pixels, b.pixels);
    }

    #[test]
    fn one_changed_pixel_moves_alone(row in 0usize..8, col in 0usize..4, level in 1u8..=255) {
        let base = Frame::from_fn(4, 8, |r, c| ((r * 31 + c * 57) % 256) as u8);
        let mut changed = base.clone();
        changed.set(row, col, base.get(row, col).wrapping_add(level));
        let (mut a, mut b) = (display(2), display(2));
        a.present(&base, 0.1).unwrap();
        b.present(&changed, 0.1).unwrap();
        for r in 0..8 {
            for c in 0..4 {
                if (r, c) != (row, col) {
                    prop_assert_eq!(a.pixel(r, c), b.pixel(r, c));
                }
            }
        }
    }
}

#[test]
fn neutral_white_is_lab_white() {
    let w = rgb_to_lab(LinearRgb::new(1.0, 1.0, 1.0));
    assert!((w.l_star - 100.0).abs() < 1e-6);
    assert!(w.a_star.abs() < 1e-6 && w.b_star.abs() < 1e-6);
}

#[test]
fn pd_loop_is_deterministic() {
    let (p, g) = (DrivetrainParams::default(), PdGains::default());
    let run = || {
        let mut s = MotorState::homed_at_origin();
        let mut trace = Vec::new();
        for tick in 0..600 {
            let sp = Setpoint { target_count: (tick * 7) % 150 };
            s = pd_step(&s, sp, &g, &p, CONTROL_TICK_S);
            trace.push((s.position_count, s.velocity_counts_per_s.to_bits(), s.pwm));
        }
        trace
    };
    assert_eq!(run(), run());
}

fn chord_deviation(ch: &OgcdCharacteristic) -> f64 {
    let top = ch.eval(20.0);
    (0..=200)
        .map(|i| {
            let l = i as f64 * 0.1;
            (ch.eval(l) - top * l / 20.0).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn zero_degrees_is_most_curved() {
    for seed in 0..10 {
        let o = draw(seed);
        let c0 = chord_deviation(&characteristic(&o, 0.0));
        for angle in [60.0, 90.0] {
            let c = chord_deviation(&characteristic(&o, angle));
            assert!(c0 > c, "seed {seed}: 0° {c0:.3} vs {angle}° {c:.3}");
        }
    }
}

#[test]
fn ninety_degrees_is_more_linear_than_baseline() {
    let o = GrassOptics::default();
    let r0 = characteristic_linearity(&characteristic(&o, 0.0)).unwrap().r_squared;
    let r90 = characteristic_linearity(&characteristic(&o, 90.0)).unwrap().r_squared;
    assert!(r90 > r0, "{r90} vs {r0}");
}

#[test]
fn calibration_never_hurts_at_its_viewpoint() {
    for seed in 0..6 {
        let scene = Scene {
            seed,
            ..Scene::default()
        };
        let rig = scene.rig().unwrap();
        let pixel = &scene.pixels()[0];
        let set = calibrate_single(pixel, &rig, 0.0, 1.0).unwrap();
        let baseline = characteristic_linearity(&set.pixels[0].characteristic)
            .unwrap()
            .r_squared;
        let mut p = pixel.clone();
        let mut r = rig.clone();
        let ds = run_sweep(&mut p, set.table(0).unwrap(), &mut r, 0.0, 4).unwrap();
        let calibrated = center_and_regress(&ds).unwrap().regression.r_squared;
        assert!(calibrated >= baseline, "seed {seed}: {calibrated} < {baseline}");
    }
}

#[test]
fn present_is_idempotent() {
    let mut d = display(1);
    let f = Frame::from_fn(2, 8, |r, c| (r * 30 + c * 100) as u8);
    d.present(&f, 0.5).unwrap();
    let before: Vec<i32> = d.pixels.iter().map(|p| p.pv()).collect();
    d.present(&f, 0.5).unwrap();
    let after: Vec<i32> = d.pixels.iter().map(|p| p.pv()).collect();
    assert_eq!(before, after);
}

#[test]
fn playback_cadence_has_no_jitter() {
    let mut d = display(1);
    let frames: Vec<Frame> = (0..12).map(|i| Frame::filled(2, 8, (i * 20) as u8)).collect();
    for fps in [1u8, 3, 7, 10] {
        let anim = Animation::new(fps, frames.clone()).unwrap();
        let r = d.play(&anim).unwrap();
        let gaps: Vec<u64> = r.frames.windows(2).map(|w| w[1].start_tick - w[0].start_tick).collect();
        assert!(gaps.iter().all(|g| *g == r.ticks_per_frame), "fps {fps}: {gaps:?}");
        assert_eq!(r.ticks_per_frame, (1000.0 / fps as f64).round() as u64);
    }
}
