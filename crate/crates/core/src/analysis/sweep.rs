use serde::{Deserialize, Serialize};

use super::regression::{regress, RegressionResult};
use crate::calibration::{apply_table, CalibrationSet, CorrespondenceTable, OgcdCharacteristic};
use crate::color::{ciede2000, Lab};
use crate::pixel::PixelSim;
use crate::rig::CaptureRig;
use crate::{Error, Result};

/// Trials per measurement dataset, alternating up and down.
pub const DEFAULT_TRIALS: usize = 10;

/// 0, then every eighth level starting at 7: 0, 7, 15, 23, ..., 255.
pub fn sweep_levels() -> Vec<u8> {
    std::iter::once(0).chain((7..=255u8).step_by(8)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

/// One pass over the sweep levels. Values are stored in level order whatever
/// the direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSeries {
    pub trial: usize,
    pub direction: Direction,
    pub levels: Vec<u8>,
    pub labs: Vec<Lab>,
    /// OGCD against this trial's level-0 color.
    pub ogcd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDataset {
    pub pixel_id: usize,
    pub calib_viewpoint_deg: f64,
    pub meas_viewpoint_deg: f64,
    pub trials: Vec<TrialSeries>,
    /// Simulated control time spent moving and settling.
    pub simulated_s: f64,
}

fn directions(trials: usize) -> impl Iterator<Item = (usize, Direction)> {
    (0..trials).map(|t| {
        (
            t,
            if t % 2 == 0 {
                Direction::Up
            } else {
                Direction::Down
            },
        )
    })
}

fn ordered(levels: &[u8], dir: Direction) -> Vec<usize> {
    let idx: Vec<usize> = (0..levels.len()).collect();
    match dir {
        Direction::Up => idx,
        Direction::Down => idx.into_iter().rev().collect(),
    }
}

fn series(trial: usize, direction: Direction, levels: &[u8], labs: Vec<Lab>) -> TrialSeries {
    let origin = labs[0];
    TrialSeries {
        trial,
        direction,
        levels: levels.to_vec(),
        ogcd: labs.iter().map(|l| ciede2000(origin, *l)).collect(),
        labs,
    }
}

/// Drive one calibrated pixel through alternating up/down sweeps and
/// photograph it at every level.
pub fn run_sweep(
    pixel: &mut PixelSim,
    table: &CorrespondenceTable,
    rig: &mut CaptureRig,
    calib_viewpoint_deg: f64,
    trials: usize,
) -> Result<MeasurementDataset> {
    let levels = sweep_levels();
    let mut out = Vec::with_capacity(trials);
    let mut ticks = 0u64;
    for (t, dir) in directions(trials) {
        let mut labs = vec![Lab::new(0.0, 0.0, 0.0); levels.len()];
        for i in ordered(&levels, dir) {
            pixel.set_target(apply_table(table, levels[i], &pixel.params)?);
            ticks += pixel.settle(&rig.settle)?;
            labs[i] = rig.measure_pixel(pixel)?;
        }
        out.push(series(t, dir, &levels, labs));
    }
    Ok(MeasurementDataset {
        pixel_id: pixel.id,
        calib_viewpoint_deg,
        meas_viewpoint_deg: rig.camera.viewpoint_angle_deg,
        trials: out,
        simulated_s: ticks as f64 * crate::actuation::CONTROL_TICK_S,
    })
}

/// Sweep a whole grid at once: every pixel receives the same level through
/// its own table, and each level is one photograph.
pub fn run_module_sweep(
    pixels: &mut [PixelSim],
    set: &CalibrationSet,
    rig: &mut CaptureRig,
    trials: usize,
) -> Result<Vec<MeasurementDataset>> {
    let levels = sweep_levels();
    let tables: Vec<&CorrespondenceTable> = pixels
        .iter()
        .map(|p| {
            set.table(p.id)
                .ok_or_else(|| Error::Assembly(format!("no table for pixel {}", p.id)))
        })
        .collect::<Result<_>>()?;
    let n = pixels.len();
    let mut per_pixel: Vec<Vec<TrialSeries>> = vec![Vec::with_capacity(trials); n];
    for (t, dir) in directions(trials) {
        let mut labs = vec![vec![Lab::new(0.0, 0.0, 0.0); levels.len()]; n];
        for i in ordered(&levels, dir) {
            let targets: Vec<f64> = tables.iter().map(|tb| tb.length(levels[i])).collect();
            rig.move_all(pixels, &targets)?;
            for (p, lab) in rig.measure_all(pixels)?.into_iter().enumerate() {
                labs[p][i] = lab;
            }
        }
        for (p, l) in labs.into_iter().enumerate() {
            per_pixel[p].push(series(t, dir, &levels, l));
        }
    }
    Ok(pixels
        .iter()
        .zip(per_pixel)
        .map(|(p, trials)| MeasurementDataset {
            pixel_id: p.id,
            calib_viewpoint_deg: set.viewpoint_deg,
            meas_viewpoint_deg: rig.camera.viewpoint_angle_deg,
            trials,
            simulated_s: 0.0,
        })
        .collect())
}

/// Regression plus the pooled points it was fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredRegression {
    pub regression: RegressionResult,
    pub points: Vec<(f64, f64)>,
}

/// Center each trial on its own mean OGCD, pool all trials and fit one line
/// of centered OGCD against level.
pub fn center_and_regress(ds: &MeasurementDataset) -> Result<CenteredRegression> {
    if ds.trials.is_empty() {
        return Err(Error::Regression("dataset has no trials".into()));
    }
    let mut points = Vec::new();
    for t in &ds.trials {
        let mean = t.ogcd.iter().sum::<f64>() / t.ogcd.len() as f64;
        points.extend(t.levels.iter().zip(&t.ogcd).map(|(l, o)| (*l as f64, o - mean)));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    Ok(CenteredRegression {
        regression: regress(&xs, &ys)?,
        points,
    })
}

/// Linearity of a raw characteristic: OGCD against length.
pub fn characteristic_linearity(ch: &OgcdCharacteristic) -> Result<RegressionResult> {
    regress(&ch.lengths(), &ch.ogcd())
}

/// One line through the raw (level, OGCD) pairs of every pixel and trial,
/// measuring how alike the pixels respond.
pub fn pooled_regression(datasets: &[MeasurementDataset]) -> Result<RegressionResult> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = datasets
        .iter()
        .flat_map(|d| &d.trials)
        .flat_map(|t| t.levels.iter().map(|l| *l as f64).zip(t.ogcd.iter().copied()))
        .unzip();
    regress(&xs, &ys)
}

/// Cross-pixel agreement of a module sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadStats {
    pub pixels: usize,
    pub mean_at_255: f64,
    pub std_at_255: f64,
    pub max_gap: f64,
    pub max_gap_level: u8,
}

/// Per-level mean over trials, then spread across pixels. The standard
/// deviation is the sample one.
pub fn spread_stats(datasets: &[MeasurementDataset]) -> Result<SpreadStats> {
    let first = datasets
        .first()
        .ok_or_else(|| Error::Regression("no datasets".into()))?;
    let levels = &first.trials[0].levels;
    let means: Vec<Vec<f64>> = datasets
        .iter()
        .map(|d| {
            (0..levels.len())
                .map(|i| d.trials.iter().map(|t| t.ogcd[i]).sum::<f64>() / d.trials.len() as f64)
                .collect()
        })
        .collect();
    let n = datasets.len();
    let top: Vec<f64> = means.iter().map(|m| *m.last().unwrap()).collect();
    let mean_at_255 = top.iter().sum::<f64>() / n as f64;
    let std_at_255 = if n > 1 {
        (top.iter().map(|v| (v - mean_at_255).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let (mut max_gap, mut max_gap_level) = (0.0, 0);
    for (i, level) in levels.iter().enumerate() {
        let col = means.iter().map(|m| m[i]);
        let hi = col.clone().fold(f64::MIN, f64::max);
        let lo = col.fold(f64::MAX, f64::min);
        if hi - lo > max_gap {
            max_gap = hi - lo;
            max_gap_level = *level;
        }
    }
    Ok(SpreadStats {
        pixels: n,
        mean_at_255,
        std_at_255,
        max_gap,
        max_gap_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(offsets: &[f64], slope: f64) -> MeasurementDataset {
        let levels = sweep_levels();
        let trials = offsets
            .iter()
            .enumerate()
            .map(|(t, off)| TrialSeries {
                trial: t,
                direction: Direction::Up,
                levels: levels.clone(),
                labs: vec![Lab::new(0.0, 0.0, 0.0); levels.len()],
                ogcd: levels.iter().map(|l| slope * *l as f64 + off).collect(),
            })
            .collect();
        MeasurementDataset {
            pixel_id: 0,
            calib_viewpoint_deg: 0.0,
            meas_viewpoint_deg: 0.0,
            trials,
            simulated_s: 0.0,
        }
    }

    #[test]
    fn level_schedule() {
        let l = sweep_levels();
        assert_eq!(l.len(), 33);
        assert_eq!(&l[..4], &[0, 7, 15, 23]);
        assert_eq!(*l.last().unwrap(), 255);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn centering_removes_trial_offsets() {
        let ds = synthetic(&[0.0, 1.0, -2.0, 0.5, 3.0, 0.0, 1.0, -1.0, 2.0, 0.2], 0.1);
        let c = center_and_regress(&ds).unwrap();
        assert!((c.regression.r_squared - 1.0).abs() < 1e-12);
        assert!((c.regression.slope - 0.1).abs() < 1e-12);
        assert!(pooled_regression(&[ds]).unwrap().r_squared < 1.0);
    }

    #[test]
    fn flat_trials_give_zero() {
        let ds = synthetic(&[3.0; 10], 0.0);
        assert_eq!(center_and_regress(&ds).unwrap().regression.r_squared, 0.0);
    }

    #[test]
    fn spread_of_identical_pixels_is_zero() {
        let a = synthetic(&[0.0; 2], 0.1);
        let mut b = a.clone();
        b.pixel_id = 1;
        let s = spread_stats(&[a, b]).unwrap();
        assert_eq!(s.std_at_255, 0.0);
        assert_eq!(s.max_gap, 0.0);
        assert!((s.mean_at_255 - 25.5).abs() < 1e-12);
    }

    #[test]
    fn gap_reports_its_level() {
        let a = synthetic(&[0.0], 0.1);
        let mut b = a.clone();
        b.trials[0].ogcd[20] += 4.0;
        let s = spread_stats(&[a, b]).unwrap();
        assert_eq!(s.max_gap_level, sweep_levels()[20]);
        assert!((s.max_gap - 4.0).abs() < 1e-12);
    }
}
