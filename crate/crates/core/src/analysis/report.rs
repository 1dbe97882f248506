use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::sweep::SpreadStats;

pub const CSV_HEADER: &str =
    "calib_viewpoint,meas_viewpoint,environment,baseline_r2,calibrated_r2,n_trials";

/// One cell of the viewpoint matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub calib_viewpoint: f64,
    pub meas_viewpoint: f64,
    pub environment: String,
    pub baseline_r2: f64,
    pub calibrated_r2: f64,
    pub n_trials: usize,
}

impl ReportRow {
    pub fn improvement(&self) -> f64 {
        self.calibrated_r2 - self.baseline_r2
    }
}

/// Per-pixel versus shared-table comparison on one module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiPixelSummary {
    pub reference_pixel: usize,
    pub reference_ogcd: f64,
    pub shared_r2: f64,
    pub per_pixel_r2: f64,
    pub shared: SpreadStats,
    pub per_pixel: SpreadStats,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multi_pixel: Option<MultiPixelSummary>,
}

impl Report {
    /// Mean calibrated R² over measurement viewpoints, per (calibration
    /// viewpoint, environment), in first-seen order.
    pub fn averages(&self) -> Vec<(f64, String, f64)> {
        let mut keys: Vec<(f64, String)> = Vec::new();
        for r in &self.rows {
            let k = (r.calib_viewpoint, r.environment.clone());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys.into_iter()
            .map(|(c, env)| {
                let v: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.calib_viewpoint == c && r.environment == env)
                    .map(|r| r.calibrated_r2)
                    .collect();
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                (c, env, mean)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{:.6},{:.6},{}",
                r.calib_viewpoint,
                r.meas_viewpoint,
                r.environment,
                r.baseline_r2,
                r.calibrated_r2,
                r.n_trials
            );
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>7} {:>7} {:<14} {:>9} {:>9} {:>9} {:>6}",
            "calib", "meas", "environment", "baseline", "calib_r2", "delta", "trials"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>7.1} {:>7.1} {:<14} {:>9.4} {:>9.4} {:>+9.4} {:>6}",
                r.calib_viewpoint,
                r.meas_viewpoint,
                r.environment,
                r.baseline_r2,
                r.calibrated_r2,
                r.improvement(),
                r.n_trials
            );
        }
        let avg = self.averages();
        if !avg.is_empty() {
            let _ = writeln!(s, "\naverage calibrated R² per calibration viewpoint");
            for (c, env, m) in avg {
                let _ = writeln!(s, "{c:>7.1} {env:<14} {m:.4}");
            }
        }
        if let Some(m) = &self.multi_pixel {
            let _ = writeln!(
                s,
                "\nmulti-pixel: {} pixels, reference pixel {}, reference OGCD {:.2}",
                m.per_pixel.pixels, m.reference_pixel, m.reference_ogcd
            );
            for (name, r2, st) in [
                ("shared table", m.shared_r2, &m.shared),
                ("per-pixel tables", m.per_pixel_r2, &m.per_pixel),
            ] {
                let _ = writeln!(
                    s,
                    "  {name:<17} pooled R² {r2:.4}  level 255 mean {:.2} sd {:.2}  max gap {:.2} at level {}",
                    st.mean_at_255, st.std_at_255, st.max_gap, st.max_gap_level
                );
            }
        }
        s
    }
}
