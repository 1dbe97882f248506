//! The capture rig: one camera looking at a row-major grid of grass pixels.

use serde::{Deserialize, Serialize};

use crate::appearance::{
    auto_expose, measure_grass_color, noiseless_lab, render_pixel_surface, CameraConfig, CropRect,
    Environment, GrayCardBoard, Image, TILE_PX,
};
use crate::color::Lab;
use crate::exec::Backend;
use crate::pixel::{PixelSim, SettleCriterion};
use crate::{Error, Result};

/// Margin between a tile edge and its crop area.
pub const CROP_MARGIN_PX: usize = 2;

/// Crop rectangles for `count` pixels laid out `columns` wide.
pub fn grid_crops(count: usize, columns: usize) -> Vec<CropRect> {
    let columns = columns.max(1);
    (0..count)
        .map(|i| {
            CropRect::new(
                (i % columns) * TILE_PX + CROP_MARGIN_PX,
                (i / columns) * TILE_PX + CROP_MARGIN_PX,
                TILE_PX - 2 * CROP_MARGIN_PX,
                TILE_PX - 2 * CROP_MARGIN_PX,
            )
        })
        .collect()
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureRig {
    pub environment: Environment,
    pub camera: CameraConfig,
    pub board: GrayCardBoard,
    pub columns: usize,
    pub seed: u64,
    pub settle: SettleCriterion,
    pub backend: Backend,
    captures: u64,
}

impl CaptureRig {
    /// Set up a camera for `count` pixels, `columns` wide, and normalize it on
    /// the gray cards.
    pub fn new(
        environment: Environment,
        viewpoint_angle_deg: f64,
        count: usize,
        columns: usize,
        seed: u64,
    ) -> Result<Self> {
        let board = GrayCardBoard::default();
        let cam = CameraConfig::new(viewpoint_angle_deg, grid_crops(count, columns));
        let camera = auto_expose(&board, &environment, &cam)?;
        Ok(Self {
            environment,
            camera,
            board,
            columns: columns.max(1),
            seed,
            settle: SettleCriterion::default(),
            backend: Backend::default(),
            captures: 0,
        })
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn captures(&self) -> u64 {
        self.captures
    }

    /// Same rig, camera moved to another angle and normalized again.
    pub fn at_viewpoint(&self, angle_deg: f64) -> Result<Self> {
        let mut cam = self.camera.clone();
        cam.viewpoint_angle_deg = angle_deg;
        Ok(Self {
            camera: auto_expose(&self.board, &self.environment, &cam)?,
            ..self.clone()
        })
    }

    /// Same rig under another lighting environment.
    pub fn in_environment(&self, environment: Environment) -> Result<Self> {
        Ok(Self {
            camera: auto_expose(&self.board, &environment, &self.camera)?,
            environment,
            ..self.clone()
        })
    }

    fn check_layout(&self, pixels: &[PixelSim]) -> Result<()> {
        if pixels.len() != self.camera.crop_rects.len() {
            return Err(Error::Measurement(format!(
                "rig has {} crop areas but {} pixels",
                self.camera.crop_rects.len(),
                pixels.len()
            )));
        }
        Ok(())
    }

    /// Take one raw-developed image of the whole grid.
    pub fn capture(&mut self, pixels: &[PixelSim]) -> Result<Image> {
        self.check_layout(pixels)?;
        let shot = mix(self.seed ^ mix(self.captures));
        self.captures += 1;
        let (env, cam) = (&self.environment, &self.camera);
        let tiles = self.backend.map(pixels, |p| {
            render_pixel_surface(
                &p.optics,
                p.physical_length_mm(),
                env,
                cam,
                mix(shot ^ p.id as u64),
            )
        });
        let rows = pixels.len().div_ceil(self.columns);
        let mut img = Image::new(self.columns.min(pixels.len()).max(1) * TILE_PX, rows.max(1) * TILE_PX);
        for (i, t) in tiles.iter().enumerate() {
            img.blit(t, (i % self.columns) * TILE_PX, (i / self.columns) * TILE_PX);
        }
        Ok(img)
    }

    /// Capture and measure every crop area.
    pub fn measure_all(&mut self, pixels: &[PixelSim]) -> Result<Vec<Lab>> {
        let img = self.capture(pixels)?;
        self.camera
            .crop_rects
            .iter()
            .enumerate()
            .map(|(i, c)| measure_grass_color(&img, *c).map_err(|e| e.for_pixel(pixels[i].id)))
            .collect()
    }

    /// Photograph a single pixel on its own and measure its crop area.
    pub fn measure_pixel(&mut self, pixel: &PixelSim) -> Result<Lab> {
        let shot = mix(self.seed ^ mix(self.captures));
        self.captures += 1;
        let tile = render_pixel_surface(
            &pixel.optics,
            pixel.physical_length_mm(),
            &self.environment,
            &self.camera,
            mix(shot ^ pixel.id as u64),
        );
        let crop = grid_crops(1, 1)[0];
        measure_grass_color(&tile, crop).map_err(|e| e.for_pixel(pixel.id))
    }

    /// Drive every pixel to its own length and wait for all of them.
    pub fn move_all(&self, pixels: &mut [PixelSim], lengths_mm: &[f64]) -> Result<()> {
        if lengths_mm.len() != pixels.len() {
            return Err(Error::Invalid(format!(
                "{} lengths for {} pixels",
                lengths_mm.len(),
                pixels.len()
            )));
        }
        let crit = self.settle;
        let mut jobs: Vec<(&mut PixelSim, f64)> =
            pixels.iter_mut().zip(lengths_mm.iter().copied()).collect();
        self.backend
            .map_mut(&mut jobs, |(p, mm)| p.move_to_mm(*mm, &crit).map(|_| ()))
            .into_iter()
            .collect()
    }

    /// Noise-free color of a pixel at its current physical length.
    pub fn noiseless(&self, pixel: &PixelSim) -> Lab {
        noiseless_lab(
            &pixel.optics,
            pixel.physical_length_mm(),
            &self.environment,
            &self.camera,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuation::{DrivetrainParams, PdGains};
    use crate::appearance::GrassOptics;
    use crate::color::ciede2000;

    fn pixels(n: usize) -> Vec<PixelSim> {
        (0..n)
            .map(|i| {
                PixelSim::new(
                    i,
                    GrassOptics::default(),
                    DrivetrainParams::default(),
                    PdGains::default(),
                )
            })
            .collect()
    }

    #[test]
    fn crops_fit_their_tiles() {
        let crops = grid_crops(16, 2);
        assert_eq!(crops[0], CropRect::new(2, 2, 12, 12));
        assert_eq!(crops[3], CropRect::new(18, 18, 12, 12));
        assert!(crops.iter().all(|c| c.fits(2 * TILE_PX, 8 * TILE_PX)));
    }

    #[test]
    fn captures_differ_only_by_noise() {
        let mut px = pixels(4);
        let mut rig = CaptureRig::new(Environment::iso(), 0.0, 4, 2, 11).unwrap();
        rig.move_all(&mut px, &[0.0, 5.0, 10.0, 20.0]).unwrap();
        let a = rig.measure_all(&px).unwrap();
        let b = rig.measure_all(&px).unwrap();
        for i in 0..4 {
            assert_ne!(a[i], b[i]);
            assert!(ciede2000(a[i], b[i]) < 0.5);
            assert!(ciede2000(a[i], rig.noiseless(&px[i])) < 0.5);
        }
        assert!(ciede2000(a[0], a[3]) > 20.0);
    }

    #[test]
    fn seeded_rigs_repeat() {
        let px = pixels(2);
        let mut r1 = CaptureRig::new(Environment::classroom(), 30.0, 2, 2, 5).unwrap();
        let mut r2 = r1.clone().with_backend(Backend::Sequential);
        assert_eq!(r1.capture(&px).unwrap(), r2.capture(&px).unwrap());
    }

    #[test]
    fn layout_mismatch_is_an_error() {
        let px = pixels(3);
        let mut rig = CaptureRig::new(Environment::iso(), 0.0, 2, 2, 0).unwrap();
        assert!(rig.capture(&px).is_err());
        assert!(rig.move_all(&mut px.clone(), &[1.0]).is_err());
    }
}
