use std::fs;
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use super::characteristic::OgcdCharacteristic;
use super::table::{build_table_clamped, CorrespondenceTable, DEGENERATE_RANGE};
use crate::{Error, Result};

/// Version of the persisted calibration format.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelCalibration {
    pub pixel_id: usize,
    pub characteristic: OgcdCharacteristic,
    pub table: CorrespondenceTable,
    /// Set when the pixel cannot reach the reference and its table was
    /// clamped at full length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSet {
    pub format_version: u32,
    pub reference_pixel: usize,
    pub reference_ogcd: f64,
    #[serde(default)]
    pub environment: String,
    #[serde(default)]
    pub viewpoint_deg: f64,
    #[serde(default)]
    pub created_unix_s: u64,
    /// Ordered by pixel id.
    pub pixels: Vec<PixelCalibration>,
    /// Scene configuration the set was produced from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

/// Pick the pixel with the smallest OGCD range as the reference and build
/// every pixel's table against its full-length OGCD.
///
/// Output order and reference choice do not depend on input order. Ties in
/// range go to the lowest pixel id.
pub fn calibrate_multi(entries: Vec<(usize, OgcdCharacteristic)>) -> Result<CalibrationSet> {
    let mut entries = entries;
    if entries.is_empty() {
        return Err(Error::Invalid("no pixels to calibrate".into()));
    }
    entries.sort_by_key(|(id, _)| *id);
    if entries.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Invalid("duplicate pixel id".into()));
    }
    for (id, ch) in &entries {
        let range = ch.range();
        if !(range >= DEGENERATE_RANGE) {
            return Err(Error::DegenerateCharacteristic {
                range,
                min: DEGENERATE_RANGE,
            }
            .for_pixel(*id));
        }
    }
    let (reference_pixel, reference_ogcd) = entries
        .iter()
        .map(|(id, ch)| (*id, ch.range()))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .unwrap();

    let pixels = entries
        .into_iter()
        .map(|(pixel_id, characteristic)| {
            let (table, clamped) =
                build_table_clamped(&characteristic, reference_ogcd).map_err(|e| e.for_pixel(pixel_id))?;
            let warning = clamped.then(|| {
                let msg = format!(
                    "pixel {pixel_id} cannot reach reference OGCD {reference_ogcd:.3}; table clamped at full length"
                );
                warn!("{msg}");
                msg
            });
            Ok(PixelCalibration {
                pixel_id,
                characteristic,
                table,
                warning,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CalibrationSet {
        format_version: FORMAT_VERSION,
        reference_pixel,
        reference_ogcd,
        environment: String::new(),
        viewpoint_deg: 0.0,
        created_unix_s: 0,
        pixels,
        config: None,
    })
}

impl CalibrationSet {
    pub fn table(&self, pixel_id: usize) -> Option<&CorrespondenceTable> {
        self.pixels
            .iter()
            .find(|p| p.pixel_id == pixel_id)
            .map(|p| &p.table)
    }

    pub fn reference(&self) -> &PixelCalibration {
        self.pixels
            .iter()
            .find(|p| p.pixel_id == self.reference_pixel)
            .expect("reference pixel is part of the set")
    }

    /// Every pixel driven by the reference pixel's table: the single-table
    /// baseline.
    pub fn shared(&self) -> CalibrationSet {
        let table = self.reference().table.clone();
        let mut out = self.clone();
        for p in &mut out.pixels {
            p.table = table.clone();
            p.warning = None;
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported calibration format {}",
                self.format_version
            )));
        }
        if self.pixels.is_empty() {
            return Err(Error::Format("calibration has no pixels".into()));
        }
        if self.pixels.windows(2).any(|w| w[1].pixel_id <= w[0].pixel_id) {
            return Err(Error::Format("pixels must be ordered by unique id".into()));
        }
        if !self.pixels.iter().any(|p| p.pixel_id == self.reference_pixel) {
            return Err(Error::Format(format!(
                "reference pixel {} missing",
                self.reference_pixel
            )));
        }
        for p in &self.pixels {
            p.table
                .validate(p.characteristic.max_length_mm)
                .map_err(|e| e.for_pixel(p.pixel_id))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let set: Self = serde_json::from_str(s)?;
        set.validate()?;
        Ok(set)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled(max: f64) -> OgcdCharacteristic {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| max * (x / 20.0).sqrt()).collect();
        OgcdCharacteristic::from_ogcd(&xs, &ys, 20.0).unwrap()
    }

    #[test]
    fn single_pixel_references_itself() {
        let ch = scaled(30.0);
        let set = calibrate_multi(vec![(4, ch.clone())]).unwrap();
        assert_eq!(set.reference_pixel, 4);
        assert_eq!(set.reference_ogcd, ch.range());
        assert!((set.pixels[0].table.lengths_mm[255] - 20.0).abs() < 1e-6);
    }

    #[test]
    fn smallest_range_wins() {
        let a = scaled(24.5);
        let b = scaled(30.0);
        let set = calibrate_multi(vec![(1, b.clone()), (0, a.clone())]).unwrap();
        assert_eq!(set.reference_pixel, 0);
        assert!((set.reference_ogcd - a.range()).abs() < 1e-12);
        let l255 = set.table(1).unwrap().lengths_mm[255];
        assert!(l255 < 20.0);
        assert!((b.eval(l255) - set.reference_ogcd).abs() < 0.05);
    }

    #[test]
    fn ties_break_by_id() {
        let set = calibrate_multi(vec![(7, scaled(25.0)), (2, scaled(25.0))]).unwrap();
        assert_eq!(set.reference_pixel, 2);
    }

    #[test]
    fn degenerate_pixel_is_named() {
        let flat = OgcdCharacteristic::from_ogcd(
            &(0..=20).map(|i| i as f64).collect::<Vec<_>>(),
            &[0.0; 21],
            20.0,
        )
        .unwrap();
        match calibrate_multi(vec![(0, scaled(30.0)), (5, flat)]) {
            Err(Error::Pixel { pixel, source }) => {
                assert_eq!(pixel, 5);
                assert!(matches!(*source, Error::DegenerateCharacteristic { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shared_uses_reference_table() {
        let set = calibrate_multi(vec![(0, scaled(30.0)), (1, scaled(26.0))]).unwrap();
        let shared = set.shared();
        assert_eq!(shared.pixels[0].table, set.pixels[1].table);
    }

    #[test]
    fn json_round_trip() {
        let mut set = calibrate_multi(vec![(0, scaled(30.0)), (1, scaled(26.0))]).unwrap();
        set.environment = "iso".into();
        set.config = Some(serde_json::json!({"seed": 3}));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cal.json");
        set.save(&path).unwrap();
        assert_eq!(CalibrationSet::load(&path).unwrap(), set);
    }

    #[test]
    fn load_rejects_tampered_tables() {
        let set = calibrate_multi(vec![(0, scaled(30.0))]).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&set.to_json().unwrap()).unwrap();
        v["pixels"][0]["table"]["lengths_mm"][3] = serde_json::json!(25.0);
        assert!(CalibrationSet::from_json(&v.to_string()).is_err());
        v["format_version"] = serde_json::json!(9);
        assert!(CalibrationSet::from_json(&v.to_string()).is_err());
    }
}
