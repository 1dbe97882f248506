use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Highest frame rate the drivetrain is validated for.
pub const MAX_FPS: u8 = 10;

/// Row-major grid of 8-bit levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub levels: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, levels: Vec<u8>) -> Result<Self> {
        if levels.len() != width * height {
            return Err(Error::Format(format!(
                "{width}x{height} frame needs {} levels, got {}",
                width * height,
                levels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            levels,
        })
    }

    pub fn filled(width: usize, height: usize, level: u8) -> Self {
        Self {
            width,
            height,
            levels: vec![level; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let levels = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self {
            width,
            height,
            levels,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.levels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, level: u8) {
        self.levels[row * self.width + col] = level;
    }
}

/// Frames played at a fixed rate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Animation {
    pub fps: u8,
    pub width: usize,
    pub height: usize,
    pub frames: Vec<Frame>,
}

impl Animation {
    pub fn new(fps: u8, frames: Vec<Frame>) -> Result<Self> {
        if !(1..=MAX_FPS).contains(&fps) {
            return Err(Error::Invalid(format!("fps must be 1..={MAX_FPS}, got {fps}")));
        }
        let first = frames
            .first()
            .ok_or_else(|| Error::Invalid("animation has no frames".into()))?;
        let (width, height) = (first.width, first.height);
        if frames.iter().any(|f| f.width != width || f.height != height) {
            return Err(Error::Invalid("frames differ in size".into()));
        }
        Ok(Self {
            fps,
            width,
            height,
            frames,
        })
    }

    /// Little-endian `u16 width, u16 height, u8 fps, u32 frame_count`, then
    /// each frame's levels row-major.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let w = u16::try_from(self.width).map_err(|_| Error::Format("width exceeds u16".into()))?;
        let h =
            u16::try_from(self.height).map_err(|_| Error::Format("height exceeds u16".into()))?;
        let n = u32::try_from(self.frames.len())
            .map_err(|_| Error::Format("too many frames".into()))?;
        out.write_all(&w.to_le_bytes())?;
        out.write_all(&h.to_le_bytes())?;
        out.write_all(&[self.fps])?;
        out.write_all(&n.to_le_bytes())?;
        for f in &self.frames {
            out.write_all(&f.levels)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut v = Vec::with_capacity(9 + self.width * self.height * self.frames.len());
        self.write_to(&mut v)?;
        Ok(v)
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut head = [0u8; 9];
        input
            .read_exact(&mut head)
            .map_err(|_| Error::Format("truncated animation header".into()))?;
        let width = u16::from_le_bytes([head[0], head[1]]) as usize;
        let height = u16::from_le_bytes([head[2], head[3]]) as usize;
        let fps = head[4];
        let count = u32::from_le_bytes([head[5], head[6], head[7], head[8]]) as usize;
        let mut frames = Vec::with_capacity(count.min(1 << 16));
        for i in 0..count {
            let mut levels = vec![0u8; width * height];
            input
                .read_exact(&mut levels)
                .map_err(|_| Error::Format(format!("truncated at frame {i} of {count}")))?;
            frames.push(Frame {
                width,
                height,
                levels,
            });
        }
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after last frame".into()));
        }
        Animation::new(fps, frames).map_err(|e| Error::Format(e.to_string()))
    }

    /// Build an animation from 8-bit binary PGM (P5) images, one per frame.
    pub fn from_pgm_sequence<R: BufRead>(fps: u8, images: Vec<R>) -> Result<Self> {
        let frames = images
            .into_iter()
            .map(read_pgm)
            .collect::<Result<Vec<_>>>()?;
        Animation::new(fps, frames)
    }
}

fn read_pgm<R: BufRead>(mut input: R) -> Result<Frame> {
    let mut fields = Vec::new();
    while fields.len() < 4 {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Err(Error::Format("truncated PGM header".into()));
        }
        let content = line.split('#').next().unwrap_or("");
        fields.extend(content.split_whitespace().map(str::to_owned));
    }
    if fields[0] != "P5" || fields.len() != 4 {
        return Err(Error::Format(format!(
            "expected P5 header on its own lines, got {:?}",
            fields
        )));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad PGM header field {s:?}")))
    };
    let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval != 255 {
        return Err(Error::Format(format!("PGM maxval {maxval} is not 255")));
    }
    let mut levels = vec![0u8; w * h];
    input
        .read_exact(&mut levels)
        .map_err(|_| Error::Format("truncated PGM data".into()))?;
    Frame::new(w, h, levels)
}
