//! Newline-delimited JSON messages. Every message carries `"v": 1`; commands
//! are tagged by `"cmd"`, responses by `"type"`.
//!
//! ```text
//! {"v":1,"cmd":"set_pixel","row":0,"col":0,"level":255}
//! {"v":1,"cmd":"set_frame","levels":[[0,255],[255,0], ...]}
//! {"v":1,"cmd":"get_state"}
//! {"v":1,"cmd":"start_calibration","step_mm":1.0}
//! {"v":1,"cmd":"play","animation":"wave"}
//! {"v":1,"cmd":"subscribe_state"}
//! ```
//!
//! An optional `"id"` is echoed back in the ack or error for that message.

use serde::{Deserialize, Serialize};

use crate::color::{lab_to_srgb_hex, Lab};
use crate::display::{pixel_id, Display};
use crate::{Error, Result};

pub const PROTOCOL_VERSION: u32 = 1;
pub const DEFAULT_PORT: u16 = 7342;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    SetPixel {
        row: usize,
        col: usize,
        level: u8,
    },
    /// One inner list per display row.
    SetFrame {
        levels: Vec<Vec<u8>>,
    },
    GetState,
    StartCalibration {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step_mm: Option<f64>,
    },
    Play {
        animation: String,
    },
    SubscribeState,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SetPixel { .. } => "set_pixel",
            Command::SetFrame { .. } => "set_frame",
            Command::GetState => "get_state",
            Command::StartCalibration { .. } => "start_calibration",
            Command::Play { .. } => "play",
            Command::SubscribeState => "subscribe_state",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub v: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(flatten)]
    pub command: Command,
}

impl Request {
    pub fn new(command: Command) -> Self {
        Self {
            v: PROTOCOL_VERSION,
            id: None,
            command,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("requests always serialize")
    }

    pub fn parse(line: &str) -> Result<Self> {
        let req: Request = serde_json::from_str(line)
            .map_err(|e| Error::Protocol(format!("malformed message: {e}")))?;
        if req.v != PROTOCOL_VERSION {
            return Err(Error::Protocol(format!(
                "unsupported protocol version {}",
                req.v
            )));
        }
        Ok(req)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelState {
    pub row: usize,
    pub col: usize,
    pub level: u8,
    pub sp_count: i32,
    pub pv_count: i32,
    pub length_mm: f64,
    pub lab: [f64; 3],
    /// `#rrggbb` preview so clients need no color math.
    pub srgb: String,
}

/// Display state at one scheduler tick. Pixels are row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub tick: u64,
    pub t_s: f64,
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<PixelState>,
}

impl StateSnapshot {
    pub fn of(display: &Display) -> Self {
        let mut pixels = Vec::with_capacity(display.width * display.height);
        for row in 0..display.height {
            for col in 0..display.width {
                let p = &display.pixels[pixel_id(row, col)];
                let lab: Lab = display.preview_lab(row, col);
                pixels.push(PixelState {
                    row,
                    col,
                    level: display.level(row, col),
                    sp_count: p.setpoint.target_count,
                    pv_count: p.pv(),
                    length_mm: p.length_mm(),
                    lab: [lab.l_star, lab.a_star, lab.b_star],
                    srgb: lab_to_srgb_hex(lab),
                });
            }
        }
        Self {
            tick: display.tick(),
            t_s: display.time_s(),
            width: display.width,
            height: display.height,
            pixels,
        }
    }

    pub fn at(&self, row: usize, col: usize) -> &PixelState {
        &self.pixels[row * self.width + col]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Response {
    Ack {
        v: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        cmd: String,
        /// Tick at which queued changes take effect.
        tick: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        detail: Option<String>,
    },
    State {
        v: u32,
        snapshot: StateSnapshot,
    },
    Error {
        v: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u64>,
        message: String,
    },
}

impl Response {
    pub fn error(id: Option<u64>, message: impl Into<String>) -> Self {
        Response::Error {
            v: PROTOCOL_VERSION,
            id,
            message: message.into(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("responses always serialize")
    }

    pub fn parse(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Protocol(format!("malformed response: {e}")))
    }
}
