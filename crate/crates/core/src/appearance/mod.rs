//! What the camera sees: a synthetic grass surface under a lighting
//! environment, a linear camera normalized by gray cards, and crop-mean color
//! measurement.

mod camera;
mod environment;
mod image;
mod optics;
mod render;

pub use camera::{auto_expose, CameraConfig, GrayCardBoard, MID_GRAY_TARGET};
pub use environment::{planckian_rgb, planckian_xy, Environment, SENSOR_GAIN_PER_LUX};
pub use image::{CropRect, Image};
pub use optics::{GrassOptics, OcclusionShape, Perturbation};
pub use render::{
    developed_mean, measure_grass_color, noiseless_lab, render_pixel_surface, TILE_PX,
};
