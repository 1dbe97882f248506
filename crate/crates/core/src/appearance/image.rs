use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Pixel rectangle inside an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CropRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl CropRect {
    pub fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.x + self.w <= width && self.y + self.h <= height
    }
}

/// Developed camera image in linear RGB. Values are not clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[f64; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![[0.0; 3]; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, c: [f64; 3]) -> Self {
        Self {
            width,
            height,
            data: vec![c; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: [f64; 3]) {
        self.data[y * self.width + x] = c;
    }

    /// Copy `src` into this image with its top-left corner at (x, y).
    pub fn blit(&mut self, src: &Image, x: usize, y: usize) {
        for sy in 0..src.height {
            let dst = (y + sy) * self.width + x;
            self.data[dst..dst + src.width]
                .copy_from_slice(&src.data[sy * src.width..(sy + 1) * src.width]);
        }
    }

    /// Channel-wise mean over a crop.
    pub fn mean(&self, crop: CropRect) -> Result<[f64; 3]> {
        if crop.w == 0 || crop.h == 0 {
            return Err(Error::Measurement("empty crop".into()));
        }
        if !crop.fits(self.width, self.height) {
            return Err(Error::Measurement(format!(
                "crop {crop:?} outside {}x{} image",
                self.width, self.height
            )));
        }
        let mut acc = [0.0; 3];
        for y in crop.y..crop.y + crop.h {
            for px in &self.data[y * self.width + crop.x..y * self.width + crop.x + crop.w] {
                for c in 0..3 {
                    acc[c] += px[c];
                }
            }
        }
        let n = (crop.w * crop.h) as f64;
        Ok(acc.map(|v| v / n))
    }

    /// Write as a binary 16-bit PPM (P6, maxval 65535, big-endian samples).
    /// Values are clamped to [0, 1] and quantized.
    pub fn write_ppm16<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P6\n{} {}\n65535\n", self.width, self.height)?;
        let mut buf = Vec::with_capacity(self.data.len() * 6);
        for px in &self.data {
            for v in px {
                let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
                buf.extend_from_slice(&q.to_be_bytes());
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Read a binary PPM (P6) with maxval up to 65535.
    pub fn read_ppm<R: BufRead>(mut input: R) -> Result<Self> {
        let mut header = Vec::new();
        let mut fields = Vec::new();
        while fields.len() < 4 {
            let mut byte = [0u8; 1];
            input
                .read_exact(&mut byte)
                .map_err(|_| Error::Format("truncated PPM header".into()))?;
            match byte[0] {
                b'#' if header.is_empty() => {
                    let mut skip = String::new();
                    input.read_line(&mut skip)?;
                }
                c if c.is_ascii_whitespace() => {
                    if !header.is_empty() {
                        fields.push(String::from_utf8_lossy(&header).into_owned());
                        header.clear();
                    }
                }
                c => header.push(c),
            }
        }
        if fields[0] != "P6" {
            return Err(Error::Format(format!("expected P6, found {}", fields[0])));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Format(format!("bad PPM header field {s:?}")))
        };
        let (w, h, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if maxval == 0 || maxval > 65535 {
            return Err(Error::Format(format!("unsupported maxval {maxval}")));
        }
        let wide = maxval > 255;
        let bytes_per = if wide { 2 } else { 1 };
        let mut raw = vec![0u8; w * h * 3 * bytes_per];
        input
            .read_exact(&mut raw)
            .map_err(|_| Error::Format("truncated PPM pixel data".into()))?;
        let scale = maxval as f64;
        let sample = |i: usize| -> f64 {
            if wide {
                u16::from_be_bytes([raw[2 * i], raw[2 * i + 1]]) as f64 / scale
            } else {
                raw[i] as f64 / scale
            }
        };
        let data = (0..w * h)
            .map(|p| [sample(3 * p), sample(3 * p + 1), sample(3 * p + 2)])
            .collect();
        Ok(Self {
            width: w,
            height: h,
            data,
        })
    }
}
