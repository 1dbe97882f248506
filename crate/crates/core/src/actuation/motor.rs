use serde::{Deserialize, Serialize};

use super::params::{DrivetrainParams, PdGains, Setpoint, CONTROL_TICK_S};
use crate::{Error, Result};

/// PWM used while driving toward the limit switch.
pub const HOMING_PWM: i32 = -60;
/// Homing gives up after this many ticks (5 s).
pub const HOMING_TIMEOUT_TICKS: u64 = 5_000;

/// Below this speed an unpowered motor is treated as stopped.
const STICTION_SPEED: f64 = 1e-3;

/// State of one motor, lead screw and encoder.
///
/// `travel_counts` is the true pin position measured from the limit switch;
/// the controller only ever sees the quantized `position_count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorState {
    pub position_count: i32,
    pub velocity_counts_per_s: f64,
    pub pwm: i32,
    pub homed: bool,
    pub travel_counts: f64,
    encoder_offset: i32,
    prev_error: i32,
}

impl MotorState {
    /// A freshly powered motor with the pin at `travel_counts` from the origin.
    /// The relative encoder reads 0 wherever it starts.
    pub fn power_on(travel_counts: f64, params: &DrivetrainParams) -> Self {
        let travel = travel_counts.clamp(0.0, params.travel_limit_counts());
        let offset = -(travel.floor() as i32);
        Self {
            position_count: 0,
            velocity_counts_per_s: 0.0,
            pwm: 0,
            homed: false,
            travel_counts: travel,
            encoder_offset: offset,
            prev_error: 0,
        }
    }

    /// A homed motor resting at the origin.
    pub fn homed_at_origin() -> Self {
        Self {
            position_count: 0,
            velocity_counts_per_s: 0.0,
            pwm: 0,
            homed: true,
            travel_counts: 0.0,
            encoder_offset: 0,
            prev_error: 0,
        }
    }

    /// Encoder-derived grass length.
    pub fn length_mm(&self, params: &DrivetrainParams) -> f64 {
        params.count_to_mm(self.position_count)
    }

    /// True pin length, which is what a camera sees.
    pub fn physical_length_mm(&self, params: &DrivetrainParams) -> f64 {
        self.travel_counts * params.encoder_resolution_mm_per_count
    }

    pub fn limit_switch(&self) -> bool {
        self.travel_counts <= 0.0
    }

    /// Integrate the motor for `dt` seconds under a fixed PWM.
    fn drive(&mut self, pwm: i32, dt: f64, params: &DrivetrainParams) {
        let target = params.speed_per_pwm() * pwm as f64;
        let tau = params.time_constant_s;
        let decay = (-dt / tau).exp();
        let v0 = self.velocity_counts_per_s;
        let mut v1 = target + (v0 - target) * decay;
        let mut x = self.travel_counts + target * dt + (v0 - target) * tau * (1.0 - decay);
        let limit = params.travel_limit_counts();
        if x <= 0.0 {
            x = 0.0;
            v1 = v1.max(0.0);
        } else if x >= limit {
            x = limit;
            v1 = v1.min(0.0);
        }
        if pwm == 0 && v1.abs() < STICTION_SPEED {
            v1 = 0.0;
        }
        self.travel_counts = x;
        self.velocity_counts_per_s = v1;
        self.pwm = pwm;
        self.position_count = x.floor() as i32 + self.encoder_offset;
    }
}

/// PWM command for error `e` given the previous tick's error.
///
/// The derivative is taken per millisecond of controller time, which is the
/// time base the default gains are tuned in.
pub fn pd_output(error: i32, prev_error: i32, gains: &PdGains, dt: f64) -> i32 {
    let de_per_ms = (error - prev_error) as f64 / (dt / CONTROL_TICK_S);
    let u = gains.p * error as f64 + gains.d * de_per_ms;
    (u.round() as i64).clamp(-255, 255) as i32
}

/// One control tick: read the encoder, compute PWM, advance the motor by `dt`.
pub fn pd_step(
    state: &MotorState,
    sp: Setpoint,
    gains: &PdGains,
    params: &DrivetrainParams,
    dt: f64,
) -> MotorState {
    debug_assert!(dt > 0.0);
    debug_assert!(state.homed, "pd_step on an unhomed motor");
    let error = sp.target_count - state.position_count;
    let pwm = pd_output(error, state.prev_error, gains, dt);
    let mut next = *state;
    next.prev_error = error;
    next.drive(pwm, dt, params);
    next
}

/// Drive toward the limit switch and zero the encoder when it trips.
pub fn home(state: &MotorState, params: &DrivetrainParams) -> Result<MotorState> {
    let mut s = *state;
    let mut ticks = 0;
    while !s.limit_switch() {
        if ticks >= HOMING_TIMEOUT_TICKS {
            return Err(Error::HomingTimeout { ticks });
        }
        s.drive(HOMING_PWM, CONTROL_TICK_S, params);
        ticks += 1;
    }
    s.velocity_counts_per_s = 0.0;
    s.pwm = 0;
    s.encoder_offset = 0;
    s.position_count = 0;
    s.prev_error = 0;
    s.homed = true;
    Ok(s)
}
