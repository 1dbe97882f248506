//! Deterministic owner of the display clock. Commands are validated on
//! arrival, queued, and applied in arrival order at the next frame boundary,
//! so later writes to a pixel win.

use std::collections::{BTreeSet, VecDeque};

use log::info;

use super::protocol::{Command, Request, Response, StateSnapshot, PROTOCOL_VERSION};
use crate::calibration::{calibrate_pixels, CalibrationSet, DEFAULT_STEP_MM};
use crate::display::{assets, Display, Frame, TICKS_PER_SECOND};
use crate::rig::CaptureRig;
use crate::{Error, Result};

pub type ClientId = u64;

/// A line for one client.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outbound {
    pub client: ClientId,
    pub line: String,
}

enum Reply {
    Ack(Option<String>),
    Lines(Vec<Outbound>),
}

enum Change {
    Pixel { row: usize, col: usize, level: u8 },
    Frame(Frame),
}

pub struct Scheduler {
    display: Display,
    rig: CaptureRig,
    frame_ticks: u64,
    pending: VecDeque<Change>,
    playlist: VecDeque<Frame>,
    subscribers: BTreeSet<ClientId>,
    last_calibration: Option<CalibrationSet>,
}

impl Scheduler {
    /// `rig` photographs the display's pixels during `start_calibration`.
    /// `fps` sets the frame cadence.
    pub fn new(display: Display, rig: CaptureRig, fps: u8) -> Result<Self> {
        if fps == 0 {
            return Err(Error::Invalid("fps must be positive".into()));
        }
        Ok(Self {
            display,
            rig,
            frame_ticks: (TICKS_PER_SECOND as f64 / fps as f64).round() as u64,
            pending: VecDeque::new(),
            playlist: VecDeque::new(),
            subscribers: BTreeSet::new(),
            last_calibration: None,
        })
    }

    pub fn display(&self) -> &Display {
        &self.display
    }

    pub fn frame_ticks(&self) -> u64 {
        self.frame_ticks
    }

    pub fn last_calibration(&self) -> Option<&CalibrationSet> {
        self.last_calibration.as_ref()
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot::of(&self.display)
    }

    fn next_boundary(&self) -> u64 {
        self.display.tick()
    }

    fn reply(client: ClientId, r: Response) -> Outbound {
        Outbound {
            client,
            line: r.to_line(),
        }
    }

    fn ack(&self, client: ClientId, id: Option<u64>, cmd: &Command, detail: Option<String>) -> Outbound {
        Self::reply(
            client,
            Response::Ack {
                v: PROTOCOL_VERSION,
                id,
                cmd: cmd.name().into(),
                tick: self.next_boundary(),
                detail,
            },
        )
    }

    /// Parse and handle one protocol line. Malformed lines get an error
    /// response; nothing else changes.
    pub fn handle_line(&mut self, client: ClientId, line: &str) -> Vec<Outbound> {
        match Request::parse(line.trim()) {
            Ok(req) => self.handle(client, req),
            Err(e) => vec![Self::reply(client, Response::error(None, e.to_string()))],
        }
    }

    pub fn handle(&mut self, client: ClientId, req: Request) -> Vec<Outbound> {
        let id = req.id;
        match self.apply(client, &req.command) {
            Ok(Reply::Ack(detail)) => vec![self.ack(client, id, &req.command, detail)],
            Ok(Reply::Lines(lines)) => lines,
            Err(e) => vec![Self::reply(client, Response::error(id, e.to_string()))],
        }
    }

    fn apply(&mut self, client: ClientId, cmd: &Command) -> Result<Reply> {
        let (w, h) = (self.display.width, self.display.height);
        match cmd {
            Command::SetPixel { row, col, level } => {
                if *row >= h || *col >= w {
                    return Err(Error::Invalid(format!(
                        "cell ({row}, {col}) outside {w}x{h} display"
                    )));
                }
                self.pending.push_back(Change::Pixel {
                    row: *row,
                    col: *col,
                    level: *level,
                });
                Ok(Reply::Ack(None))
            }
            Command::SetFrame { levels } => {
                let got_h = levels.len();
                let got_w = levels.first().map_or(0, Vec::len);
                if got_h != h || levels.iter().any(|r| r.len() != w) {
                    return Err(Error::DimensionMismatch {
                        expected_w: w,
                        expected_h: h,
                        got_w,
                        got_h,
                    });
                }
                let frame = Frame::new(w, h, levels.concat())?;
                self.playlist.clear();
                self.pending.push_back(Change::Frame(frame));
                Ok(Reply::Ack(None))
            }
            Command::GetState => Ok(Reply::Lines(vec![Self::reply(
                client,
                Response::State {
                    v: PROTOCOL_VERSION,
                    snapshot: self.snapshot(),
                },
            )])),
            Command::SubscribeState => {
                self.subscribers.insert(client);
                Ok(Reply::Ack(None))
            }
            Command::Play { animation } => {
                let anim = assets::bundled(animation, w, h)?;
                self.pending.clear();
                self.playlist = anim.frames.into_iter().collect();
                Ok(Reply::Ack(None))
            }
            Command::StartCalibration { step_mm } => {
                let step = step_mm.unwrap_or(DEFAULT_STEP_MM);
                // photograph twins of the pixels so playback is undisturbed
                let mut twins = self.display.pixels.clone();
                for p in &mut twins {
                    p.home()?;
                }
                let mut rig = self.rig.clone();
                let set = calibrate_pixels(&mut twins, &mut rig, step)?;
                for p in &set.pixels {
                    self.display.tables[p.pixel_id] = p.table.clone();
                }
                // re-apply current levels through the new tables
                for r in 0..h {
                    for c in 0..w {
                        let level = self.display.level(r, c);
                        self.display.set_level(r, c, level)?;
                    }
                }
                let detail = format!(
                    "reference pixel {} OGCD {:.3}",
                    set.reference_pixel, set.reference_ogcd
                );
                info!("calibrated: {detail}");
                self.last_calibration = Some(set);
                Ok(Reply::Ack(Some(detail)))
            }
        }
    }

    /// Apply queued changes (or the next animation frame), run one frame of
    /// control ticks and send a snapshot to every subscriber.
    pub fn advance(&mut self) -> Result<Vec<Outbound>> {
        if let Some(f) = self.playlist.pop_front() {
            self.display.set_frame(&f)?;
        }
        while let Some(ch) = self.pending.pop_front() {
            match ch {
                Change::Pixel { row, col, level } => self.display.set_level(row, col, level)?,
                Change::Frame(f) => self.display.set_frame(&f)?,
            }
        }
        self.display.step(self.frame_ticks);
        if self.subscribers.is_empty() {
            return Ok(Vec::new());
        }
        let line = Response::State {
            v: PROTOCOL_VERSION,
            snapshot: self.snapshot(),
        }
        .to_line();
        Ok(self
            .subscribers
            .iter()
            .map(|&client| Outbound {
                client,
                line: line.clone(),
            })
            .collect())
    }

    pub fn disconnect(&mut self, client: ClientId) {
        self.subscribers.remove(&client);
    }
}
