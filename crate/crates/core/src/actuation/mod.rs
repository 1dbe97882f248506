//! Drivetrain simulation for one grass pixel: DC motor with first-order
//! velocity lag, lead screw, quantizing rotary encoder, limit switch, and the
//! discrete PD loop that closes around them.

mod motor;
mod params;
mod tracking;

pub use motor::{home, pd_output, pd_step, MotorState, HOMING_PWM, HOMING_TIMEOUT_TICKS};
pub use params::{mm_to_count, DrivetrainParams, PdGains, Setpoint, CONTROL_TICK_S};
pub use tracking::{
    ramp_tracking_test, write_trace_csv, TraceRow, TrackingResult, DEFAULT_TRACKING_BAND,
    HOLD_AFTER_RAMP_S,
};
