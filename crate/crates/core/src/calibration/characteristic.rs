use serde::{Deserialize, Serialize};
use std::time::{SystemTime, UNIX_EPOCH};

use super::poly;
use crate::appearance::{noiseless_lab, CameraConfig, Environment, GrassOptics};
use crate::color::{ciede2000, Lab};
use crate::pixel::PixelSim;
use crate::rig::CaptureRig;
use crate::{Error, Result};

/// Default spacing of characteristic samples.
pub const DEFAULT_STEP_MM: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSample {
    pub length_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lab: Option<Lab>,
    pub ogcd: f64,
}

/// Sampled OGCD against length plus its sixth-order fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OgcdCharacteristic {
    pub samples: Vec<CharacteristicSample>,
    /// Ascending raw-length monomial coefficients, degree 6.
    pub coeffs: Vec<f64>,
    pub fit_residual_rms: f64,
    pub max_length_mm: f64,
}

impl OgcdCharacteristic {
    /// Build from measured colors. The first sample must be length 0 and is
    /// the origin color.
    pub fn from_colors(lengths_mm: &[f64], labs: &[Lab], max_length_mm: f64) -> Result<Self> {
        if labs.len() != lengths_mm.len() || labs.is_empty() {
            return Err(Error::Measurement(format!(
                "{} lengths, {} colors",
                lengths_mm.len(),
                labs.len()
            )));
        }
        let origin = labs[0];
        let samples = lengths_mm
            .iter()
            .zip(labs)
            .map(|(&length_mm, &lab)| CharacteristicSample {
                length_mm,
                lab: Some(lab),
                ogcd: ciede2000(origin, lab),
            })
            .collect();
        Self::fit(samples, max_length_mm)
    }

    /// Build directly from OGCD values, for synthetic characteristics.
    pub fn from_ogcd(lengths_mm: &[f64], ogcd: &[f64], max_length_mm: f64) -> Result<Self> {
        if ogcd.len() != lengths_mm.len() {
            return Err(Error::Fit(format!(
                "{} lengths, {} OGCD values",
                lengths_mm.len(),
                ogcd.len()
            )));
        }
        let samples = lengths_mm
            .iter()
            .zip(ogcd)
            .map(|(&length_mm, &ogcd)| CharacteristicSample {
                length_mm,
                lab: None,
                ogcd,
            })
            .collect();
        Self::fit(samples, max_length_mm)
    }

    fn fit(samples: Vec<CharacteristicSample>, max_length_mm: f64) -> Result<Self> {
        if samples.first().map(|s| s.length_mm) != Some(0.0) {
            return Err(Error::Fit("first sample must be at length 0".into()));
        }
        if samples.windows(2).any(|w| w[1].length_mm <= w[0].length_mm) {
            return Err(Error::Fit("sample lengths must be strictly increasing".into()));
        }
        if samples.iter().any(|s| s.length_mm > max_length_mm + 1e-9) {
            return Err(Error::Fit(format!("sample beyond {max_length_mm} mm")));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.length_mm).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.ogcd).collect();
        let coeffs = poly::fit_through_origin(&xs, &ys, max_length_mm)?;
        let sse: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (poly::eval(&coeffs, *x) - y).powi(2))
            .sum();
        Ok(Self {
            fit_residual_rms: (sse / xs.len() as f64).sqrt(),
            samples,
            coeffs,
            max_length_mm,
        })
    }

    /// Fitted OGCD at a length.
    pub fn eval(&self, length_mm: f64) -> f64 {
        poly::eval(&self.coeffs, length_mm)
    }

    /// OGCD range: fitted OGCD at full length.
    pub fn range(&self) -> f64 {
        self.eval(self.max_length_mm)
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.length_mm).collect()
    }

    pub fn ogcd(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.ogcd).collect()
    }
}

/// Sample lengths 0, step, 2 step, ... up to and including the full travel.
pub fn sample_lengths(step_mm: f64, max_length_mm: f64) -> Result<Vec<f64>> {
    if !(step_mm > 0.0) || !step_mm.is_finite() {
        return Err(Error::Invalid(format!("sample step must be positive, got {step_mm}")));
    }
    let n = (max_length_mm / step_mm + 1e-9).floor() as usize;
    let mut out: Vec<f64> = (0..=n).map(|k| (k as f64 * step_mm).min(max_length_mm)).collect();
    if max_length_mm - out[n] > 1e-9 {
        out.push(max_length_mm);
    }
    Ok(out)
}

/// Encoder lengths that commanded lengths actually land on, with collisions
/// removed.
fn reachable_lengths(pixel: &PixelSim, step_mm: f64) -> Result<Vec<i32>> {
    let mut counts = Vec::new();
    for mm in sample_lengths(step_mm, pixel.params.max_length_mm)? {
        let c = crate::actuation::mm_to_count(mm, &pixel.params)?;
        if counts.last() != Some(&c) {
            counts.push(c);
        }
    }
    Ok(counts)
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Move one pixel upward through the sample lengths, photographing it at
/// each stop.
pub fn sample_characteristic(
    pixel: &mut PixelSim,
    rig: &mut CaptureRig,
    step_mm: f64,
) -> Result<OgcdCharacteristic> {
    let counts = reachable_lengths(pixel, step_mm).map_err(|e| e.for_pixel(pixel.id))?;
    let mut lengths = Vec::with_capacity(counts.len());
    let mut labs = Vec::with_capacity(counts.len());
    for c in counts {
        let mm = pixel.move_to_mm(pixel.params.count_to_mm(c), &rig.settle)?;
        lengths.push(mm);
        labs.push(rig.measure_pixel(pixel)?);
    }
    OgcdCharacteristic::from_colors(&lengths, &labs, pixel.params.max_length_mm)
        .map_err(|e| e.for_pixel(pixel.id))
}

/// Sample every pixel of a grid at once: all pins move together and each
/// stop is a single photograph, measured per crop area.
pub fn sample_module(
    pixels: &mut [PixelSim],
    rig: &mut CaptureRig,
    step_mm: f64,
) -> Result<Vec<OgcdCharacteristic>> {
    let Some(first) = pixels.first() else {
        return Ok(Vec::new());
    };
    let counts = reachable_lengths(first, step_mm)?;
    let n = pixels.len();
    let mut lengths = vec![Vec::with_capacity(counts.len()); n];
    let mut labs = vec![Vec::with_capacity(counts.len()); n];
    for c in counts {
        let targets: Vec<f64> = pixels.iter().map(|p| p.params.count_to_mm(c)).collect();
        rig.move_all(pixels, &targets)?;
        let shot = rig.measure_all(pixels)?;
        for (i, lab) in shot.into_iter().enumerate() {
            lengths[i].push(pixels[i].length_mm());
            labs[i].push(lab);
        }
    }
    pixels
        .iter()
        .enumerate()
        .map(|(i, p)| {
            OgcdCharacteristic::from_colors(&lengths[i], &labs[i], p.params.max_length_mm)
                .map_err(|e| e.for_pixel(p.id))
        })
        .collect()
}

/// Characteristic from the noise-free optics model, sampled at the given
/// lengths. Useful as an oracle and for exploring optics offline.
pub fn noiseless_characteristic(
    optics: &GrassOptics,
    env: &Environment,
    cam: &CameraConfig,
    lengths_mm: &[f64],
    max_length_mm: f64,
) -> Result<OgcdCharacteristic> {
    let labs: Vec<Lab> = lengths_mm
        .iter()
        .map(|&l| noiseless_lab(optics, l, env, cam))
        .collect();
    OgcdCharacteristic::from_colors(lengths_mm, &labs, max_length_mm)
}
