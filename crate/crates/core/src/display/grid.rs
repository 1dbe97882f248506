use serde::{Deserialize, Serialize};

use super::frame::{Animation, Frame};
use crate::actuation::{DrivetrainParams, PdGains, CONTROL_TICK_S};
use crate::appearance::{Environment, GrassOptics};
use crate::calibration::{apply_table, CalibrationSet, CorrespondenceTable};
use crate::color::Lab;
use crate::exec::Backend;
use crate::pixel::PixelSim;
use crate::rig::CaptureRig;
use crate::{Error, Result};

pub const MODULE_COLS: usize = 2;
pub const MODULE_ROWS: usize = 8;
pub const PIXELS_PER_MODULE: usize = MODULE_COLS * MODULE_ROWS;

/// A pixel within this many counts of its setpoint counts as settled.
pub const SETTLED_TOLERANCE: i32 = 2;

/// Control ticks per simulated second.
pub const TICKS_PER_SECOND: u64 = 1000;

/// A 2×8 block of pixels. Local pixel `k` sits at row `k / 2`, column `k % 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrassModule {
    pub id: usize,
    pub chain_position: usize,
    pub pixels: Vec<PixelSim>,
}

impl GrassModule {
    /// Pixel ids are `chain_position * 16 + local index`, matching display
    /// order.
    pub fn new(
        id: usize,
        chain_position: usize,
        optics: impl Fn(usize) -> GrassOptics,
        params: DrivetrainParams,
        gains: PdGains,
    ) -> Self {
        let pixels = (0..PIXELS_PER_MODULE)
            .map(|k| {
                let pid = chain_position * PIXELS_PER_MODULE + k;
                PixelSim::new(pid, optics(pid), params, gains)
            })
            .collect();
        Self {
            id,
            chain_position,
            pixels,
        }
    }

    pub fn uniform(id: usize, chain_position: usize, optics: &GrassOptics) -> Self {
        Self::new(
            id,
            chain_position,
            |_| *optics,
            DrivetrainParams::default(),
            PdGains::default(),
        )
    }
}

/// Modules chained along the width. Display cell `(row, col)` is pixel
/// `row * 2 + col % 2` of the module at chain position `col / 2`, and its
/// pixel id is `(col / 2) * 16 + row * 2 + col % 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Display {
    pub width: usize,
    pub height: usize,
    pub module_ids: Vec<usize>,
    /// Indexed by pixel id.
    pub pixels: Vec<PixelSim>,
    pub tables: Vec<CorrespondenceTable>,
    pub levels: Vec<u8>,
    pub backend: Backend,
    tick: u64,
    preview: CaptureRig,
}

/// Pixel id of a display cell.
pub fn pixel_id(row: usize, col: usize) -> usize {
    (col / MODULE_COLS) * PIXELS_PER_MODULE + row * MODULE_COLS + col % MODULE_COLS
}

fn chain(mut modules: Vec<GrassModule>) -> Result<(Vec<usize>, Vec<PixelSim>)> {
    if modules.is_empty() {
        return Err(Error::Assembly("a display needs at least one module".into()));
    }
    modules.sort_by_key(|m| m.chain_position);
    let mut ids = Vec::with_capacity(modules.len());
    let mut pixels = Vec::with_capacity(modules.len() * PIXELS_PER_MODULE);
    for (pos, m) in modules.into_iter().enumerate() {
        if m.chain_position != pos {
            return Err(Error::Assembly(format!(
                "chain positions must be 0..n, found {} at slot {pos}",
                m.chain_position
            )));
        }
        if m.pixels.len() != PIXELS_PER_MODULE {
            return Err(Error::Assembly(format!(
                "module {} has {} pixels, expected {PIXELS_PER_MODULE}",
                m.id,
                m.pixels.len()
            )));
        }
        ids.push(m.id);
        for (k, mut p) in m.pixels.into_iter().enumerate() {
            p.id = pos * PIXELS_PER_MODULE + k;
            pixels.push(p);
        }
    }
    Ok((ids, pixels))
}

/// Wire modules to their correspondence tables.
pub fn assemble(modules: Vec<GrassModule>, set: &CalibrationSet) -> Result<Display> {
    let (module_ids, pixels) = chain(modules)?;
    if set.pixels.len() != pixels.len() {
        return Err(Error::Assembly(format!(
            "{} tables for {} pixels",
            set.pixels.len(),
            pixels.len()
        )));
    }
    let tables = pixels
        .iter()
        .map(|p| {
            set.table(p.id)
                .cloned()
                .ok_or_else(|| Error::Assembly(format!("no table for pixel {}", p.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    Display::build(module_ids, pixels, tables)
}

/// Display driven with length proportional to level.
pub fn assemble_uncalibrated(modules: Vec<GrassModule>) -> Result<Display> {
    let (module_ids, pixels) = chain(modules)?;
    let tables = pixels
        .iter()
        .map(|p| CorrespondenceTable::linear(p.params.max_length_mm))
        .collect();
    Display::build(module_ids, pixels, tables)
}

/// Per-frame outcome of playback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub index: usize,
    pub start_tick: u64,
    pub t_start_s: f64,
    pub settled_fraction: f64,
    pub max_abs_error: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaybackReport {
    pub fps: u8,
    pub ticks_per_frame: u64,
    pub frames: Vec<FrameReport>,
}

impl PlaybackReport {
    pub fn min_settled_fraction(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| f.settled_fraction)
            .fold(1.0, f64::min)
    }
}

impl Display {
    fn build(
        module_ids: Vec<usize>,
        pixels: Vec<PixelSim>,
        tables: Vec<CorrespondenceTable>,
    ) -> Result<Self> {
        let width = module_ids.len() * MODULE_COLS;
        let height = MODULE_ROWS;
        let preview = CaptureRig::new(Environment::iso(), 0.0, 0, width, 0)?;
        Ok(Self {
            width,
            height,
            levels: vec![0; pixels.len()],
            module_ids,
            pixels,
            tables,
            backend: Backend::default(),
            tick: 0,
            preview,
        })
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn time_s(&self) -> f64 {
        self.tick as f64 * CONTROL_TICK_S
    }

    pub fn pixel(&self, row: usize, col: usize) -> &PixelSim {
        &self.pixels[pixel_id(row, col)]
    }

    pub fn level(&self, row: usize, col: usize) -> u8 {
        self.levels[pixel_id(row, col)]
    }

    pub fn home_all(&mut self) -> Result<()> {
        self.backend
            .map_mut(&mut self.pixels, |p| p.home())
            .into_iter()
            .collect::<Result<()>>()?;
        self.levels.iter_mut().for_each(|l| *l = 0);
        Ok(())
    }

    fn check_homed(&self) -> Result<()> {
        match self.pixels.iter().find(|p| !p.motor.homed) {
            Some(p) => Err(Error::Invalid(format!("pixel {} is not homed", p.id))),
            None => Ok(()),
        }
    }

    pub fn set_level(&mut self, row: usize, col: usize, level: u8) -> Result<()> {
        if row >= self.height || col >= self.width {
            return Err(Error::Invalid(format!(
                "cell ({row}, {col}) outside {}x{} display",
                self.width, self.height
            )));
        }
        let id = pixel_id(row, col);
        let p = &mut self.pixels[id];
        p.set_target(apply_table(&self.tables[id], level, &p.params)?);
        self.levels[id] = level;
        Ok(())
    }

    pub fn set_frame(&mut self, frame: &Frame) -> Result<()> {
        if frame.width != self.width || frame.height != self.height {
            return Err(Error::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                got_w: frame.width,
                got_h: frame.height,
            });
        }
        for r in 0..self.height {
            for c in 0..self.width {
                self.set_level(r, c, frame.get(r, c))?;
            }
        }
        Ok(())
    }

    /// Advance every PD loop by `ticks` control ticks.
    pub fn step(&mut self, ticks: u64) {
        self.backend.map_mut(&mut self.pixels, |p| p.run(ticks));
        self.tick += ticks;
    }

    pub fn settled_flags(&self) -> Vec<bool> {
        self.pixels
            .iter()
            .map(|p| p.error().abs() <= SETTLED_TOLERANCE)
            .collect()
    }

    /// Show a frame and run the loops for `dt_budget_s`. Returns, per pixel
    /// id, whether the pixel is within tolerance when the budget runs out.
    pub fn present(&mut self, frame: &Frame, dt_budget_s: f64) -> Result<Vec<bool>> {
        if !(dt_budget_s >= 0.0) {
            return Err(Error::Invalid(format!("negative budget {dt_budget_s}")));
        }
        self.check_homed()?;
        self.set_frame(frame)?;
        self.step((dt_budget_s * TICKS_PER_SECOND as f64).round() as u64);
        Ok(self.settled_flags())
    }

    /// Play frames back to back at the animation's rate. Frames are never
    /// dropped; lagging pixels are reported instead.
    pub fn play(&mut self, anim: &Animation) -> Result<PlaybackReport> {
        let ticks_per_frame = (TICKS_PER_SECOND as f64 / anim.fps as f64).round() as u64;
        let budget = ticks_per_frame as f64 / TICKS_PER_SECOND as f64;
        let mut frames = Vec::with_capacity(anim.frames.len());
        for (index, f) in anim.frames.iter().enumerate() {
            let (start_tick, t_start_s) = (self.tick, self.time_s());
            let flags = self.present(f, budget)?;
            let settled = flags.iter().filter(|s| **s).count();
            frames.push(FrameReport {
                index,
                start_tick,
                t_start_s,
                settled_fraction: settled as f64 / flags.len() as f64,
                max_abs_error: self.pixels.iter().map(|p| p.error().abs()).max().unwrap_or(0),
            });
        }
        Ok(PlaybackReport {
            fps: anim.fps,
            ticks_per_frame,
            frames,
        })
    }

    /// Noise-free color of a cell as seen head-on under the ISO environment.
    pub fn preview_lab(&self, row: usize, col: usize) -> Lab {
        self.preview.noiseless(self.pixel(row, col))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn display(n: usize) -> Display {
        let modules = (0..n)
            .map(|i| GrassModule::uniform(10 + i, i, &GrassOptics::default()))
            .collect();
        assemble_uncalibrated(modules).unwrap()
    }

    #[test]
    fn chaining_widens() {
        for (n, w) in [(1, 2), (2, 4), (4, 8)] {
            let d = display(n);
            assert_eq!((d.width, d.height), (w, 8));
            assert_eq!(d.pixels.len(), n * 16);
        }
    }

    #[test]
    fn cell_mapping() {
        assert_eq!(pixel_id(0, 0), 0);
        assert_eq!(pixel_id(0, 1), 1);
        assert_eq!(pixel_id(1, 0), 2);
        assert_eq!(pixel_id(7, 1), 15);
        assert_eq!(pixel_id(0, 2), 16);
        assert_eq!(pixel_id(7, 7), 63);
        let mut ids: Vec<usize> = (0..8).flat_map(|r| (0..8).map(move |c| pixel_id(r, c))).collect();
        ids.sort();
        assert_eq!(ids, (0..64).collect::<Vec<_>>());
    }

    #[test]
    fn assembly_checks() {
        assert!(assemble_uncalibrated(vec![]).is_err());
        let gap = vec![
            GrassModule::uniform(0, 0, &GrassOptics::default()),
            GrassModule::uniform(1, 2, &GrassOptics::default()),
        ];
        assert!(assemble_uncalibrated(gap).is_err());
        let set = crate::calibration::calibrate_multi(vec![(
            0,
            crate::calibration::OgcdCharacteristic::from_ogcd(
                &(0..=20).map(|i| i as f64).collect::<Vec<_>>(),
                &(0..=20).map(|i| i as f64).collect::<Vec<_>>(),
                20.0,
            )
            .unwrap(),
        )])
        .unwrap();
        let m = vec![GrassModule::uniform(0, 0, &GrassOptics::default())];
        assert!(matches!(assemble(m, &set), Err(Error::Assembly(_))));
    }

    #[test]
    fn zero_frame_settles_instantly() {
        let mut d = display(4);
        let flags = d.present(&Frame::filled(8, 8, 0), 0.0).unwrap();
        assert!(flags.iter().all(|f| *f));
    }

    #[test]
    fn full_frame_settles_in_a_second() {
        let mut d = display(4);
        let flags = d.present(&Frame::filled(8, 8, 255), 1.0).unwrap();
        assert!(flags.iter().all(|f| *f));
        assert!(d.pixels.iter().all(|p| p.pv() == 146));
    }

    #[test]
    fn checkerboard_needs_time() {
        let mut d = display(4);
        let checker = Frame::from_fn(8, 8, |r, c| if (r + c) % 2 == 0 { 0 } else { 255 });
        let flags = d.present(&checker, 0.005).unwrap();
        assert!(flags.iter().any(|f| !*f));
        assert!(flags.iter().any(|f| *f));
        let flags = d.present(&checker, 0.05).unwrap();
        assert!(flags.iter().all(|f| *f));
    }

    #[test]
    fn present_is_idempotent() {
        let mut d = display(2);
        let f = Frame::from_fn(4, 8, |r, c| (r * 29 + c * 61) as u8);
        d.present(&f, 0.5).unwrap();
        let before: Vec<i32> = d.pixels.iter().map(|p| p.pv()).collect();
        d.present(&f, 0.5).unwrap();
        let after: Vec<i32> = d.pixels.iter().map(|p| p.pv()).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn one_changed_cell_leaves_others_alone() {
        let mut a = display(1).with_backend(Backend::Sequential);
        let mut b = display(1);
        let f = Frame::from_fn(2, 8, |r, _| (r * 30) as u8);
        let mut g = f.clone();
        g.set(3, 1, 250);
        for _ in 0..5 {
            a.present(&f, 0.01).unwrap();
            b.present(&g, 0.01).unwrap();
            for id in 0..16 {
                if id != pixel_id(3, 1) {
                    assert_eq!(a.pixels[id].motor, b.pixels[id].motor);
                }
            }
        }
        assert_ne!(a.pixels[pixel_id(3, 1)].motor, b.pixels[pixel_id(3, 1)].motor);
    }

    #[test]
    fn wrong_size_frame() {
        let mut d = display(1);
        let e = d.present(&Frame::filled(8, 8, 0), 0.1).unwrap_err();
        assert!(e.to_string().contains("dimension mismatch"), "{e}");
    }

    #[test]
    fn unhomed_display_refuses_to_play() {
        let mut d = display(1);
        d.pixels[5] = d.pixels[5].clone().powered_at(40.0);
        assert!(d.present(&Frame::filled(2, 8, 0), 0.1).is_err());
        d.home_all().unwrap();
        assert!(d.present(&Frame::filled(2, 8, 0), 0.1).is_ok());
    }

    #[test]
    fn playback_cadence_is_exact() {
        let mut d = display(1);
        let frames = (0..5).map(|k| Frame::filled(2, 8, (k * 50) as u8)).collect();
        let anim = Animation::new(3, frames).unwrap();
        let r = d.play(&anim).unwrap();
        assert_eq!(r.ticks_per_frame, 333);
        for (k, f) in r.frames.iter().enumerate() {
            assert_eq!(f.t_start_s, (k as u64 * 333) as f64 * CONTROL_TICK_S);
        }
        assert_eq!(r.min_settled_fraction(), 1.0);
    }

    #[test]
    fn preview_changes_with_length() {
        let mut d = display(1);
        let a = d.preview_lab(0, 0);
        d.present(&Frame::filled(2, 8, 255), 0.2).unwrap();
        let b = d.preview_lab(0, 0);
        assert!(b.a_star < a.a_star - 10.0);
    }
}
