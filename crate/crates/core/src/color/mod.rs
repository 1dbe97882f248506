//! Color values, conversions, and the CIEDE2000 difference.
//!
//! Everything here is linear ProPhoto RGB with a D50 white. Camera images are
//! averaged in linear RGB, pushed through XYZ, and compared in CIELAB.

mod ciede2000;
pub mod constants;

pub use ciede2000::ciede2000;

use serde::{Deserialize, Serialize};

use constants::{
    mul3, D50_WHITE, LAB_EPSILON, LAB_KAPPA, PROPHOTO_TO_XYZ, XYZ_D50_TO_SRGB, XYZ_TO_PROPHOTO,
};

/// Reflectance-linear ProPhoto RGB, each channel clamped into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl LinearRgb {
    /// Build a color, clamping each channel into [0, 1]. NaN maps to 0.
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        fn clamp(v: f64) -> f64 {
            if v.is_nan() {
                0.0
            } else {
                v.clamp(0.0, 1.0)
            }
        }
        Self {
            r: clamp(r),
            g: clamp(g),
            b: clamp(b),
        }
    }

    pub fn gray(v: f64) -> Self {
        Self::new(v, v, v)
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }
}

/// CIE 1931 tristimulus values, Y = 1 for the reference white.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Xyz {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Xyz {
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// A CIELAB color. This is what the calibration calls a grass color value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lab {
    pub l_star: f64,
    pub a_star: f64,
    pub b_star: f64,
}

impl Lab {
    pub const fn new(l_star: f64, a_star: f64, b_star: f64) -> Self {
        Self {
            l_star,
            a_star,
            b_star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhitePoint {
    pub xyz: Xyz,
}

impl WhitePoint {
    /// The 5000 K white of linear ProPhoto RGB.
    pub const D50: WhitePoint = WhitePoint {
        xyz: Xyz {
            x: D50_WHITE[0],
            y: D50_WHITE[1],
            z: D50_WHITE[2],
        },
    };
}

impl Default for WhitePoint {
    fn default() -> Self {
        Self::D50
    }
}

pub fn rgb_to_xyz(c: LinearRgb) -> Xyz {
    let [x, y, z] = mul3(&PROPHOTO_TO_XYZ, c.to_array());
    Xyz { x, y, z }
}

/// Unclamped inverse of [`rgb_to_xyz`].
pub fn xyz_to_rgb_unclamped(c: Xyz) -> [f64; 3] {
    mul3(&XYZ_TO_PROPHOTO, c.to_array())
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        (LAB_KAPPA * t + 16.0) / 116.0
    }
}

fn lab_f_inv(f: f64) -> f64 {
    let t = f * f * f;
    if t > LAB_EPSILON {
        t
    } else {
        (116.0 * f - 16.0) / LAB_KAPPA
    }
}

pub fn xyz_to_lab(c: Xyz, w: WhitePoint) -> Lab {
    let fx = lab_f(c.x / w.xyz.x);
    let fy = lab_f(c.y / w.xyz.y);
    let fz = lab_f(c.z / w.xyz.z);
    Lab {
        l_star: 116.0 * fy - 16.0,
        a_star: 500.0 * (fx - fy),
        b_star: 200.0 * (fy - fz),
    }
}

pub fn lab_to_xyz(c: Lab, w: WhitePoint) -> Xyz {
    let fy = (c.l_star + 16.0) / 116.0;
    let fx = fy + c.a_star / 500.0;
    let fz = fy - c.b_star / 200.0;
    let y = if c.l_star > LAB_KAPPA * LAB_EPSILON {
        fy * fy * fy
    } else {
        c.l_star / LAB_KAPPA
    };
    Xyz {
        x: lab_f_inv(fx) * w.xyz.x,
        y: y * w.xyz.y,
        z: lab_f_inv(fz) * w.xyz.z,
    }
}

/// Linear ProPhoto RGB straight to CIELAB at the D50 white.
pub fn rgb_to_lab(c: LinearRgb) -> Lab {
    xyz_to_lab(rgb_to_xyz(c), WhitePoint::D50)
}

/// 8-bit gamma-encoded sRGB for on-screen previews.
pub fn lab_to_srgb8(c: Lab) -> [u8; 3] {
    let xyz = lab_to_xyz(c, WhitePoint::D50);
    let lin = mul3(&XYZ_D50_TO_SRGB, xyz.to_array());
    lin.map(|v| {
        let v = v.clamp(0.0, 1.0);
        let enc = if v <= 0.003_130_8 {
            12.92 * v
        } else {
            1.055 * v.powf(1.0 / 2.4) - 0.055
        };
        (enc * 255.0).round() as u8
    })
}

/// `#rrggbb` form of [`lab_to_srgb8`].
pub fn lab_to_srgb_hex(c: Lab) -> String {
    let [r, g, b] = lab_to_srgb8(c);
    format!("#{r:02x}{g:02x}{b:02x}")
}
