use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ordinary least-squares line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    /// `1 - SSres/SStot`, clamped to [0, 1]; 0 when the response is flat.
    pub r_squared: f64,
    pub residuals: Vec<f64>,
}

pub fn regress(xs: &[f64], ys: &[f64]) -> Result<RegressionResult> {
    if xs.len() != ys.len() {
        return Err(Error::Regression(format!("{} x, {} y", xs.len(), ys.len())));
    }
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return Err(Error::Regression("need at least two points".into()));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Regression("no variance in x".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - (slope * x + intercept))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(RegressionResult {
        slope,
        intercept,
        r_squared,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_line() {
        let xs: Vec<f64> = (0..33).map(|i| i as f64 * 8.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.12 * x - 3.5).collect();
        let r = regress(&xs, &ys).unwrap();
        assert_abs_diff_eq!(r.slope, 0.12, epsilon = 1e-9);
        assert_abs_diff_eq!(r.intercept, -3.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn flat_response_is_zero() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let r = regress(&xs, &[2.0; 4]).unwrap();
        assert_eq!(r.r_squared, 0.0);
        assert_eq!(r.slope, 0.0);
    }

    #[test]
    fn known_r_squared() {
        // y = x with one point displaced; hand computed
        let r = regress(&[0.0, 1.0, 2.0], &[0.0, 2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(r.slope, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r_squared, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_x() {
        assert!(regress(&[1.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(regress(&[1.0], &[0.0]).is_err());
        assert!(regress(&[1.0, 2.0], &[0.0]).is_err());
    }
}
