use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Control loop period. The PD loop, the motor integrator and every
/// simulated clock in the crate advance in units of this tick.
pub const CONTROL_TICK_S: f64 = 0.001;

/// Lengths closer than this to a count boundary (in counts) round up, so that
/// `count_to_mm` followed by `mm_to_count` is exact despite `10/73` not being
/// representable.
const COUNT_EPSILON: f64 = 1e-9;

/// Mechanical and electrical parameters of one grass pixel's drivetrain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DrivetrainParams {
    pub lead_mm_per_rev: f64,
    pub encoder_resolution_mm_per_count: f64,
    pub gain_count_per_mm: f64,
    pub max_length_mm: f64,
    /// Steady-state motor speed at PWM 255, in encoder counts per second.
    pub no_load_speed_counts_per_s: f64,
    /// First-order velocity time constant.
    pub time_constant_s: f64,
}

impl Default for DrivetrainParams {
    fn default() -> Self {
        Self {
            lead_mm_per_rev: 6.0,
            encoder_resolution_mm_per_count: 10.0 / 73.0,
            gain_count_per_mm: 7.3,
            max_length_mm: 20.0,
            no_load_speed_counts_per_s: 22_500.0,
            time_constant_s: 0.006,
        }
    }
}

impl DrivetrainParams {
    pub fn validate(&self) -> Result<()> {
        let gain_err = (self.gain_count_per_mm * self.encoder_resolution_mm_per_count - 1.0).abs();
        if gain_err > 1e-9 {
            return Err(Error::Invalid(format!(
                "gain {} is not the reciprocal of encoder resolution {}",
                self.gain_count_per_mm, self.encoder_resolution_mm_per_count
            )));
        }
        if !(self.max_length_mm > 0.0) || !(self.lead_mm_per_rev > 0.0) {
            return Err(Error::Invalid("travel and lead must be positive".into()));
        }
        if !(self.time_constant_s > 0.0) || !(self.no_load_speed_counts_per_s >= 0.0) {
            return Err(Error::Invalid(
                "motor time constant must be positive and no-load speed non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Highest reachable encoder count, `floor(max_length * gain)`.
    pub fn max_count(&self) -> i32 {
        (self.max_length_mm * self.gain_count_per_mm + COUNT_EPSILON).floor() as i32
    }

    /// Physical end stop, in counts. The stop sits half a count past the
    /// last encoder edge so the top count is a stable resting position.
    pub fn travel_limit_counts(&self) -> f64 {
        self.max_count() as f64 + 0.5
    }

    pub fn counts_per_rev(&self) -> f64 {
        self.lead_mm_per_rev / self.encoder_resolution_mm_per_count
    }

    /// Motor speed per PWM unit, in counts per second.
    pub fn speed_per_pwm(&self) -> f64 {
        self.no_load_speed_counts_per_s / 255.0
    }

    pub fn count_to_mm(&self, count: i32) -> f64 {
        count as f64 * self.encoder_resolution_mm_per_count
    }
}

/// Grass length to encoder count, truncated toward zero like a C cast.
///
/// Two lengths less than one encoder step apart can land on the same count.
pub fn mm_to_count(length_mm: f64, params: &DrivetrainParams) -> Result<i32> {
    if !(0.0..=params.max_length_mm).contains(&length_mm) {
        return Err(Error::LengthOutOfRange {
            length_mm,
            max_mm: params.max_length_mm,
        });
    }
    Ok((length_mm * params.gain_count_per_mm + COUNT_EPSILON).trunc() as i32)
}

/// PD controller gains, in PWM units per count and per count-per-tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PdGains {
    pub p: f64,
    pub d: f64,
}

impl Default for PdGains {
    fn default() -> Self {
        Self { p: 6.0, d: 10.0 }
    }
}

impl PdGains {
    pub fn validate(&self) -> Result<()> {
        if self.p > 0.0 && self.d >= 0.0 {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "PD gains must satisfy p > 0, d >= 0 (got p = {}, d = {})",
                self.p, self.d
            )))
        }
    }
}

/// Target encoder count for the PD loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Setpoint {
    pub target_count: i32,
}

impl Setpoint {
    pub fn new(target_count: i32, params: &DrivetrainParams) -> Result<Self> {
        if (0..=params.max_count()).contains(&target_count) {
            Ok(Self { target_count })
        } else {
            Err(Error::Invalid(format!(
                "setpoint {target_count} outside [0, {}]",
                params.max_count()
            )))
        }
    }

    pub fn from_mm(length_mm: f64, params: &DrivetrainParams) -> Result<Self> {
        Ok(Self {
            target_count: mm_to_count(length_mm, params)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_count_arithmetic() {
        let p = DrivetrainParams::default();
        p.validate().unwrap();
        assert_eq!(p.max_count(), 146);
        assert_eq!(mm_to_count(20.0, &p).unwrap(), 146);
        assert_eq!(mm_to_count(0.0, &p).unwrap(), 0);
        assert_eq!(mm_to_count(10.0, &p).unwrap(), 73);
        assert!((p.counts_per_rev() - 43.8).abs() < 1e-9);
    }

    #[test]
    fn count_roundtrip_all_counts() {
        let p = DrivetrainParams::default();
        for c in 0..=146 {
            assert_eq!(mm_to_count(p.count_to_mm(c), &p).unwrap(), c);
        }
    }

    #[test]
    fn truncation_collides_close_lengths() {
        let p = DrivetrainParams::default();
        // Both sit inside the same 10/73 mm encoder step.
        assert_eq!(
            mm_to_count(5.0, &p).unwrap(),
            mm_to_count(5.05, &p).unwrap()
        );
        assert_eq!(mm_to_count(0.13, &p).unwrap(), 0);
    }

    #[test]
    fn out_of_range_lengths() {
        let p = DrivetrainParams::default();
        assert!(matches!(
            mm_to_count(-0.01, &p),
            Err(Error::LengthOutOfRange { .. })
        ));
        assert!(mm_to_count(20.01, &p).is_err());
        assert!(mm_to_count(f64::NAN, &p).is_err());
    }

    #[test]
    fn bad_params_rejected() {
        let p = DrivetrainParams {
            gain_count_per_mm: 7.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        assert!(PdGains { p: 0.0, d: 1.0 }.validate().is_err());
        assert!(Setpoint::new(147, &DrivetrainParams::default()).is_err());
    }
}
