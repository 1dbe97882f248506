use serde::{Deserialize, Serialize};

use super::characteristic::OgcdCharacteristic;
use crate::actuation::{mm_to_count, DrivetrainParams, Setpoint};
use crate::{Error, Result};

/// Number of 8-bit levels.
pub const LEVELS: usize = 256;

/// Characteristics whose OGCD range is below this cannot be linearized.
pub const DEGENERATE_RANGE: f64 = 1.0;

/// Resolution of the envelope grid used to bracket crossings.
const ENVELOPE_STEPS: usize = 4000;

const BISECT_ITERS: usize = 80;

/// Grass length per 8-bit level for one pixel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceTable {
    pub lengths_mm: Vec<f64>,
    pub reference_ogcd: f64,
}

impl CorrespondenceTable {
    /// Uncalibrated table: length proportional to level. `reference_ogcd` is
    /// 0 because no characteristic stands behind it.
    pub fn linear(max_length_mm: f64) -> Self {
        Self {
            lengths_mm: (0..LEVELS)
                .map(|l| l as f64 / (LEVELS - 1) as f64 * max_length_mm)
                .collect(),
            reference_ogcd: 0.0,
        }
    }

    pub fn length(&self, level: u8) -> f64 {
        self.lengths_mm[level as usize]
    }

    /// Structural checks for tables read from disk.
    pub fn validate(&self, max_length_mm: f64) -> Result<()> {
        if self.lengths_mm.len() != LEVELS {
            return Err(Error::Format(format!(
                "table has {} entries, expected {LEVELS}",
                self.lengths_mm.len()
            )));
        }
        if self.lengths_mm[0] != 0.0 {
            return Err(Error::Format("table must start at length 0".into()));
        }
        if self
            .lengths_mm
            .iter()
            .any(|l| !l.is_finite() || *l < 0.0 || *l > max_length_mm)
        {
            return Err(Error::Format(format!("table entry outside [0, {max_length_mm}]")));
        }
        if self.lengths_mm.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Format("table is not monotone".into()));
        }
        Ok(())
    }
}

/// Target OGCD for a level on the linear ramp to `reference`.
pub fn level_target(level: usize, reference: f64) -> f64 {
    level as f64 / (LEVELS - 1) as f64 * reference
}

struct Envelope<'a> {
    ch: &'a OgcdCharacteristic,
    xs: Vec<f64>,
    /// running maximum of the fitted curve over `xs`
    env: Vec<f64>,
}

impl<'a> Envelope<'a> {
    fn new(ch: &'a OgcdCharacteristic) -> Self {
        let span = ch.max_length_mm;
        let xs: Vec<f64> = (0..=ENVELOPE_STEPS)
            .map(|i| span * i as f64 / ENVELOPE_STEPS as f64)
            .collect();
        let mut best = f64::NEG_INFINITY;
        let env = xs
            .iter()
            .map(|&x| {
                best = best.max(ch.eval(x));
                best
            })
            .collect();
        Self { ch, xs, env }
    }

    fn max(&self) -> f64 {
        *self.env.last().unwrap()
    }

    /// Smallest length whose fitted OGCD reaches `t`. `t` must not exceed
    /// the envelope maximum.
    fn first_crossing(&self, t: f64) -> f64 {
        let i = self.env.partition_point(|&e| e < t);
        if i == 0 {
            return 0.0;
        }
        let i = i.min(self.xs.len() - 1);
        // env rose to t at i, so p(x[i-1]) < t <= p(x[i])
        let (mut lo, mut hi) = (self.xs[i - 1], self.xs[i]);
        for _ in 0..BISECT_ITERS {
            let mid = 0.5 * (lo + hi);
            if self.ch.eval(mid) >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

fn check_degenerate(ch: &OgcdCharacteristic) -> Result<()> {
    let range = ch.range();
    if !(range >= DEGENERATE_RANGE) {
        return Err(Error::DegenerateCharacteristic {
            range,
            min: DEGENERATE_RANGE,
        });
    }
    Ok(())
}

fn invert(ch: &OgcdCharacteristic, envelope: &Envelope, reference: f64) -> Vec<f64> {
    let top = envelope.max();
    let mut prev = 0.0f64;
    (0..LEVELS)
        .map(|level| {
            let t = level_target(level, reference);
            let l = if t > top {
                ch.max_length_mm
            } else {
                envelope.first_crossing(t)
            };
            prev = prev.max(l);
            prev
        })
        .collect()
}

/// Invert a characteristic so that OGCD rises linearly from 0 at level 0 to
/// `reference_ogcd` at level 255.
pub fn build_table(ch: &OgcdCharacteristic, reference_ogcd: f64) -> Result<CorrespondenceTable> {
    check_degenerate(ch)?;
    if !(reference_ogcd > 0.0) {
        return Err(Error::Invalid(format!(
            "reference OGCD must be positive, got {reference_ogcd}"
        )));
    }
    let envelope = Envelope::new(ch);
    let top = envelope.max();
    if reference_ogcd > top + 1e-9 {
        return Err(Error::UnreachableReference {
            reference: reference_ogcd,
            max: top,
        });
    }
    Ok(CorrespondenceTable {
        lengths_mm: invert(ch, &envelope, reference_ogcd.min(top)),
        reference_ogcd,
    })
}

/// Like [`build_table`], but levels beyond the reachable maximum are clamped
/// to full length. The flag reports whether clamping happened.
pub fn build_table_clamped(
    ch: &OgcdCharacteristic,
    reference_ogcd: f64,
) -> Result<(CorrespondenceTable, bool)> {
    match build_table(ch, reference_ogcd) {
        Err(Error::UnreachableReference { .. }) => {
            let envelope = Envelope::new(ch);
            Ok((
                CorrespondenceTable {
                    lengths_mm: invert(ch, &envelope, reference_ogcd),
                    reference_ogcd,
                },
                true,
            ))
        }
        other => other.map(|t| (t, false)),
    }
}

/// Setpoint for a level. Count conversion happens here rather than at
/// calibration time.
pub fn apply_table(
    table: &CorrespondenceTable,
    level: u8,
    params: &DrivetrainParams,
) -> Result<Setpoint> {
    let count = mm_to_count(table.length(level), params)?;
    Setpoint::new(count, params)
}
