use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::camera::CameraConfig;
use super::environment::Environment;
use super::image::{CropRect, Image};
use super::optics::GrassOptics;
use crate::color::{rgb_to_lab, Lab, LinearRgb};
use crate::Result;

/// Side length, in image pixels, of one rendered grass pixel.
pub const TILE_PX: usize = 16;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Noise-free developed color of the grass surface.
pub fn developed_mean(
    optics: &GrassOptics,
    length_mm: f64,
    env: &Environment,
    cam: &CameraConfig,
) -> [f64; 3] {
    let refl = optics.mean_reflectance(length_mm, cam.viewpoint_angle_deg);
    let irr = env.irradiance();
    cam.develop([0, 1, 2].map(|c| irr[c] * refl[c]))
}

/// Noise-free grass color value, as the camera would measure it.
pub fn noiseless_lab(
    optics: &GrassOptics,
    length_mm: f64,
    env: &Environment,
    cam: &CameraConfig,
) -> Lab {
    rgb_to_lab(LinearRgb::from_array(developed_mean(
        optics, length_mm, env, cam,
    )))
}

/// Render one grass pixel as a `TILE_PX` square image: the developed mean
/// color modulated by zero-mean texture noise, plus the sensor's read noise,
/// all drawn from `seed`.
pub fn render_pixel_surface(
    optics: &GrassOptics,
    length_mm: f64,
    env: &Environment,
    cam: &CameraConfig,
    seed: u64,
) -> Image {
    let mean = developed_mean(optics, length_mm, env, cam);
    let mut img = Image::filled(TILE_PX, TILE_PX, mean);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // uniform draws with unit variance, scaled to the configured amplitudes
    if optics.texture_noise > 0.0 {
        let amp = optics.texture_noise * SQRT3;
        for px in &mut img.data {
            let k = 1.0 + amp * rng.gen_range(-1.0..=1.0);
            *px = px.map(|v| v * k);
        }
    }
    if cam.read_noise > 0.0 {
        let amp = cam.develop([cam.read_noise * SQRT3; 3]);
        for px in &mut img.data {
            for c in 0..3 {
                px[c] += amp[c] * rng.gen_range(-1.0..=1.0);
            }
        }
    }
    img
}

/// Average the crop in linear RGB and convert to CIELAB at D50.
pub fn measure_grass_color(image: &Image, crop: CropRect) -> Result<Lab> {
    let mean = image.mean(crop)?;
    Ok(rgb_to_lab(LinearRgb::from_array(mean)))
}
