use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::color::LinearRgb;

/// Shape of the curve that says how much of the visible surface is green
/// grass at a given length and horizontal viewing angle.
///
/// Viewed across the slits (0°) the yellow blades hide the green pin until it
/// nears the yellow height, so the curve is a late, steep S. Viewed along the
/// slits (90°) some green shows through even at zero length, the onset comes
/// earlier and the rise is gentler. Intermediate angles blend the two with weight `cos²(angle)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OcclusionShape {
    /// Onset length at 0° as a multiple of the yellow grass height.
    pub onset_scale: f64,
    pub onset_parallel_mm: f64,
    pub width_perpendicular_mm: f64,
    pub width_parallel_mm: f64,
    /// Green fraction visible at zero length when looking along the slits.
    pub visible_at_zero_parallel: f64,
    /// Green fraction at full extension.
    pub max_fraction: f64,
}

impl Default for OcclusionShape {
    fn default() -> Self {
        Self {
            onset_scale: 0.95,
            onset_parallel_mm: 8.0,
            width_perpendicular_mm: 2.0,
            width_parallel_mm: 3.0,
            visible_at_zero_parallel: 0.15,
            max_fraction: 0.87,
        }
    }
}

/// Relative jitter applied per pixel to emulate hand-assembled grass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Perturbation {
    pub onset: f64,
    pub width: f64,
    pub max_fraction: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            onset: 0.10,
            width: 0.12,
            max_fraction: 0.08,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrassOptics {
    /// Reflectance of lively green grass, linear ProPhoto RGB.
    pub green_base: LinearRgb,
    /// Reflectance of dying yellow grass, linear ProPhoto RGB.
    pub yellow_base: LinearRgb,
    pub yellow_height_mm: f64,
    pub slit_count: u32,
    pub travel_mm: f64,
    pub occlusion: OcclusionShape,
    /// Zero-mean multiplicative texture noise, as a fraction of the channel value.
    pub texture_noise: f64,
}

impl Default for GrassOptics {
    fn default() -> Self {
        Self {
            green_base: LinearRgb::new(0.025, 0.05, 0.015),
            yellow_base: LinearRgb::new(0.16, 0.13, 0.04),
            yellow_height_mm: 10.0,
            slit_count: 3,
            travel_mm: 20.0,
            occlusion: OcclusionShape::default(),
            texture_noise: 0.01,
        }
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl GrassOptics {
    /// A copy with the occlusion curve jittered by a seeded draw.
    pub fn perturbed(&self, seed: u64, amount: &Perturbation) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jitter = |a: f64| 1.0 + a * rng.gen_range(-1.0..=1.0);
        let mut out = *self;
        out.occlusion.onset_scale *= jitter(amount.onset);
        out.occlusion.width_perpendicular_mm *= jitter(amount.width);
        out.occlusion.max_fraction =
            (out.occlusion.max_fraction * jitter(amount.max_fraction)).min(1.0);
        out
    }

    /// A pixel whose color does not depend on length.
    pub fn constant_color(&self) -> Self {
        let mut out = *self;
        out.green_base = out.yellow_base;
        out
    }

    /// Fraction of green in the perceived mix, in [0, 1].
    pub fn mixing_fraction(&self, length_mm: f64, angle_deg: f64) -> f64 {
        let o = &self.occlusion;
        let w = angle_deg.to_radians().cos().powi(2);
        let onset_perp = o.onset_scale * self.yellow_height_mm;
        let onset = o.onset_parallel_mm + (onset_perp - o.onset_parallel_mm) * w;
        let width = o.width_parallel_mm + (o.width_perpendicular_mm - o.width_parallel_mm) * w;
        let floor = o.visible_at_zero_parallel * (1.0 - w);
        let span = (o.max_fraction - floor).max(0.0);

        let len = length_mm.clamp(0.0, self.travel_mm);
        let lo = logistic(-onset / width);
        let hi = logistic((self.travel_mm - onset) / width);
        let g = (logistic((len - onset) / width) - lo) / (hi - lo);
        (floor + span * g).clamp(0.0, 1.0)
    }

    /// Mean surface reflectance: the spatial average of yellow and green.
    pub fn mean_reflectance(&self, length_mm: f64, angle_deg: f64) -> [f64; 3] {
        let f = self.mixing_fraction(length_mm, angle_deg);
        let y = self.yellow_base.to_array();
        let g = self.green_base.to_array();
        [0, 1, 2].map(|c| (1.0 - f) * y[c] + f * g[c])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_endpoints() {
        let o = GrassOptics::default();
        assert_eq!(o.mixing_fraction(0.0, 0.0), 0.0);
        assert!((o.mixing_fraction(20.0, 0.0) - o.occlusion.max_fraction).abs() < 1e-12);
        assert!(o.mixing_fraction(0.0, 90.0) > 0.1);
    }

    #[test]
    fn fraction_monotone_in_length() {
        let o = GrassOptics::default();
        for angle in [0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
            let mut prev = -1.0;
            for i in 0..=400 {
                let f = o.mixing_fraction(i as f64 * 0.05, angle);
                assert!((0.0..=1.0).contains(&f));
                assert!(f >= prev, "angle {angle} length {}", i as f64 * 0.05);
                prev = f;
            }
        }
    }

    #[test]
    fn perturbation_is_seeded() {
        let o = GrassOptics::default();
        let p = Perturbation::default();
        assert_eq!(o.perturbed(3, &p), o.perturbed(3, &p));
        assert_ne!(o.perturbed(3, &p), o.perturbed(4, &p));
        let q = o.perturbed(9, &p);
        assert_eq!(q.mixing_fraction(0.0, 0.0), 0.0);
    }

    #[test]
    fn constant_color_pixel() {
        let o = GrassOptics::default().constant_color();
        assert_eq!(o.mean_reflectance(0.0, 0.0), o.mean_reflectance(20.0, 0.0));
    }
}
