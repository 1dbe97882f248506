//! One simulated grass pixel: drivetrain, controller and optics.

use serde::{Deserialize, Serialize};

use crate::actuation::{
    home, pd_step, DrivetrainParams, MotorState, PdGains, Setpoint, CONTROL_TICK_S,
};
use crate::appearance::GrassOptics;
use crate::{Error, Result};

/// When a pixel counts as settled before a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SettleCriterion {
    pub band_counts: i32,
    pub hold_ticks: u32,
    pub timeout_ticks: u64,
}

impl Default for SettleCriterion {
    fn default() -> Self {
        Self {
            band_counts: 1,
            hold_ticks: 50,
            timeout_ticks: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelSim {
    pub id: usize,
    pub motor: MotorState,
    pub setpoint: Setpoint,
    pub params: DrivetrainParams,
    pub gains: PdGains,
    pub optics: GrassOptics,
}

impl PixelSim {
    /// A homed pixel at length 0.
    pub fn new(id: usize, optics: GrassOptics, params: DrivetrainParams, gains: PdGains) -> Self {
        Self {
            id,
            motor: MotorState::homed_at_origin(),
            setpoint: Setpoint { target_count: 0 },
            params,
            gains,
            optics,
        }
    }

    /// A pixel that has just been powered with its pin somewhere along the
    /// travel. It must be homed before it can be driven.
    pub fn powered_at(mut self, travel_counts: f64) -> Self {
        self.motor = MotorState::power_on(travel_counts, &self.params);
        self
    }

    pub fn home(&mut self) -> Result<()> {
        self.motor = home(&self.motor, &self.params).map_err(|e| e.for_pixel(self.id))?;
        self.setpoint = Setpoint { target_count: 0 };
        Ok(())
    }

    pub fn set_target(&mut self, sp: Setpoint) {
        self.setpoint = sp;
    }

    pub fn pv(&self) -> i32 {
        self.motor.position_count
    }

    pub fn error(&self) -> i32 {
        self.setpoint.target_count - self.motor.position_count
    }

    /// One 1 ms control tick.
    pub fn step(&mut self) {
        self.motor = pd_step(
            &self.motor,
            self.setpoint,
            &self.gains,
            &self.params,
            CONTROL_TICK_S,
        );
    }

    pub fn run(&mut self, ticks: u64) {
        for _ in 0..ticks {
            self.step();
        }
    }

    /// Step until the criterion holds. Returns the ticks spent.
    pub fn settle(&mut self, crit: &SettleCriterion) -> Result<u64> {
        if !self.motor.homed {
            return Err(Error::Invalid(format!("pixel {} is not homed", self.id)));
        }
        let mut held = 0u32;
        let mut ticks = 0u64;
        while held < crit.hold_ticks {
            if ticks >= crit.timeout_ticks {
                return Err(Error::SettleTimeout {
                    pixel: self.id,
                    target: self.setpoint.target_count,
                    ticks,
                });
            }
            self.step();
            ticks += 1;
            if self.error().abs() <= crit.band_counts {
                held += 1;
            } else {
                held = 0;
            }
        }
        Ok(ticks)
    }

    /// Command a length and wait for it. Returns the encoder-derived length.
    pub fn move_to_mm(&mut self, length_mm: f64, crit: &SettleCriterion) -> Result<f64> {
        let sp = Setpoint::from_mm(length_mm, &self.params).map_err(|e| e.for_pixel(self.id))?;
        self.set_target(sp);
        self.settle(crit)?;
        Ok(self.length_mm())
    }

    /// Length as the encoder reports it.
    pub fn length_mm(&self) -> f64 {
        self.motor.length_mm(&self.params)
    }

    /// Length the camera sees.
    pub fn physical_length_mm(&self) -> f64 {
        self.motor.physical_length_mm(&self.params)
    }
}
