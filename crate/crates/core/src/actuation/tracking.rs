use std::io::Write;

use serde::{Deserialize, Serialize};

use super::motor::{pd_step, MotorState};
use super::params::{DrivetrainParams, PdGains, Setpoint, CONTROL_TICK_S};
use crate::{Error, Result};

/// Default "following" band for the ramp test, in counts (about 0.68 mm).
pub const DEFAULT_TRACKING_BAND: i32 = 5;
/// Extra time recorded after the ramp ends so traces show the final approach.
pub const HOLD_AFTER_RAMP_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t_s: f64,
    pub sp_count: i32,
    pub pv_count: i32,
    pub pwm: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingResult {
    pub fps: u32,
    pub band: i32,
    pub passed: bool,
    pub max_abs_error: i32,
    pub ramp_ticks: u64,
    pub trace: Vec<TraceRow>,
}

/// Sweep the setpoint linearly over the full travel in `1/fps` seconds,
/// updating it every control tick, and check that the encoder stays within
/// `band` counts of the setpoint for the whole ramp.
pub fn ramp_tracking_test(
    start: &MotorState,
    params: &DrivetrainParams,
    gains: &PdGains,
    fps: u32,
    band: i32,
) -> Result<TrackingResult> {
    if fps == 0 {
        return Err(Error::Invalid("fps must be a positive integer".into()));
    }
    if !start.homed {
        return Err(Error::Invalid("ramp test needs a homed pixel".into()));
    }
    let full = params.max_count() as u64;
    let ticks_per_s = (1.0 / CONTROL_TICK_S).round() as u64;
    // first tick at which the ramp has reached full travel
    let ramp_ticks = ticks_per_s.div_ceil(fps as u64);
    let hold_ticks = (HOLD_AFTER_RAMP_S / CONTROL_TICK_S).round() as u64;

    let mut state = *start;
    let mut trace = Vec::with_capacity((ramp_ticks + hold_ticks + 1) as usize);
    let mut max_abs_error = 0;
    for tick in 0..=ramp_ticks + hold_ticks {
        let sp = ((full * tick * fps as u64) / ticks_per_s).min(full) as i32;
        if tick <= ramp_ticks {
            max_abs_error = max_abs_error.max((sp - state.position_count).abs());
        }
        trace.push(TraceRow {
            t_s: tick as f64 * CONTROL_TICK_S,
            sp_count: sp,
            pv_count: state.position_count,
            pwm: state.pwm,
        });
        state = pd_step(
            &state,
            Setpoint { target_count: sp },
            gains,
            params,
            CONTROL_TICK_S,
        );
    }
    Ok(TrackingResult {
        fps,
        band,
        passed: max_abs_error <= band,
        max_abs_error,
        ramp_ticks,
        trace,
    })
}

/// Write a trace as CSV with the header `t_s,sp_count,pv_count,pwm`.
pub fn write_trace_csv<W: Write>(mut out: W, rows: &[TraceRow]) -> Result<()> {
    writeln!(out, "t_s,sp_count,pv_count,pwm")?;
    for r in rows {
        writeln!(out, "{:.3},{},{},{}", r.t_s, r.sp_count, r.pv_count, r.pwm)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_fps(fps: u32) -> TrackingResult {
        ramp_tracking_test(
            &MotorState::homed_at_origin(),
            &DrivetrainParams::default(),
            &PdGains::default(),
            fps,
            DEFAULT_TRACKING_BAND,
        )
        .unwrap()
    }

    #[test]
    fn boundary_between_ten_and_eleven() {
        for fps in 1..=10 {
            let r = test_fps(fps);
            assert!(r.passed, "fps {fps}: max error {}", r.max_abs_error);
        }
        let r = test_fps(11);
        assert!(!r.passed, "fps 11: max error {}", r.max_abs_error);
    }

    #[test]
    fn slow_ramp_tracks_closely() {
        assert!(test_fps(1).max_abs_error <= 3);
    }

    #[test]
    fn trace_is_deterministic_and_shaped() {
        let a = test_fps(10);
        let b = test_fps(10);
        assert_eq!(a, b);
        assert_eq!(a.trace.first().unwrap().sp_count, 0);
        assert_eq!(a.trace[a.ramp_ticks as usize].sp_count, 146);
        assert!(a.trace.windows(2).all(|w| w[0].sp_count <= w[1].sp_count));
    }

    #[test]
    fn csv_header_and_rows() {
        let r = test_fps(10);
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &r.trace[..3]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("t_s,sp_count,pv_count,pwm"));
        assert_eq!(lines.next(), Some("0.000,0,0,0"));
        assert_eq!(s.lines().count(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        let p = DrivetrainParams::default();
        let g = PdGains::default();
        assert!(ramp_tracking_test(&MotorState::homed_at_origin(), &p, &g, 0, 5).is_err());
        assert!(ramp_tracking_test(&MotorState::power_on(3.0, &p), &p, &g, 5, 5).is_err());
    }
}
