//! Animations shipped with the library, generated on demand. Each fills any
//! display size; the heart and the text are drawn for 8×8 and clipped or
//! padded for other sizes.

use std::f64::consts::TAU;

use super::frame::{Animation, Frame};
use crate::{Error, Result};

pub const BUNDLED: [&str; 3] = ["wave", "heart", "green"];

pub fn bundled(name: &str, width: usize, height: usize) -> Result<Animation> {
    match name {
        "wave" => wave(width, height),
        "heart" => heart(width, height),
        "green" => green_scroll(width, height),
        other => Err(Error::Invalid(format!(
            "no bundled animation {other:?}; have {}",
            BUNDLED.join(", ")
        ))),
    }
}

const WAVE_PERIOD_FRAMES: usize = 20;

/// A sine wave travelling along the width, two periods long, at 10 fps.
pub fn wave(width: usize, height: usize) -> Result<Animation> {
    let frames = (0..2 * WAVE_PERIOD_FRAMES)
        .map(|k| {
            Frame::from_fn(width, height, |r, c| {
                let phase = c as f64 / width.max(1) as f64 + r as f64 / (4.0 * height.max(1) as f64)
                    - k as f64 / WAVE_PERIOD_FRAMES as f64;
                (127.5 * (1.0 + (TAU * phase).sin())).round() as u8
            })
        })
        .collect();
    Animation::new(10, frames)
}

/// Heart outline on 8×8, clockwise from the bottom tip.
const HEART: [(usize, usize); 18] = [
    (6, 3),
    (5, 2),
    (4, 1),
    (3, 0),
    (2, 0),
    (1, 0),
    (0, 1),
    (0, 2),
    (1, 3),
    (1, 4),
    (0, 5),
    (0, 6),
    (1, 7),
    (2, 7),
    (3, 7),
    (4, 6),
    (5, 5),
    (6, 4),
];

/// The heart outline is traced one cell per frame, held, then faded out.
pub fn heart(width: usize, height: usize) -> Result<Animation> {
    let draw = |n: usize, level: u8| {
        let mut f = Frame::filled(width, height, 0);
        for &(r, c) in HEART.iter().take(n) {
            if r < height && c < width {
                f.set(r, c, level);
            }
        }
        f
    };
    let mut frames: Vec<Frame> = (0..=HEART.len()).map(|n| draw(n, 255)).collect();
    frames.extend((0..10).map(|_| draw(HEART.len(), 255)));
    frames.extend((0..=8).rev().map(|k| draw(HEART.len(), (k * 255 / 8) as u8)));
    Animation::new(10, frames)
}

const GLYPH_W: usize = 4;

fn glyph(ch: char) -> [&'static str; 5] {
    match ch {
        'G' => [".###", "#...", "#.##", "#..#", ".###"],
        'R' => ["###.", "#..#", "###.", "#.#.", "#..#"],
        'E' => ["####", "#...", "###.", "#...", "####"],
        'N' => ["#..#", "##.#", "#.##", "#..#", "#..#"],
        _ => ["....", "....", "....", "....", "...."],
    }
}

/// "GREEN" scrolled right to left one column per frame.
pub fn green_scroll(width: usize, height: usize) -> Result<Animation> {
    let text = "GREEN";
    let banner_w = text.len() * (GLYPH_W + 1);
    let top = height.saturating_sub(5) / 2;
    let lit = |r: usize, x: isize| -> bool {
        if x < 0 || r < top || r >= top + 5 {
            return false;
        }
        let x = x as usize;
        let (i, gx) = (x / (GLYPH_W + 1), x % (GLYPH_W + 1));
        match text.chars().nth(i) {
            Some(ch) if gx < GLYPH_W => glyph(ch)[r - top].as_bytes()[gx] == b'#',
            _ => false,
        }
    };
    let frames = (0..banner_w + width)
        .map(|k| {
            Frame::from_fn(width, height, |r, c| {
                let x = c as isize + k as isize - width as isize;
                if lit(r, x) {
                    255
                } else {
                    0
                }
            })
        })
        .collect();
    Animation::new(10, frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_bundled_build_for_8x8() {
        for name in BUNDLED {
            let a = bundled(name, 8, 8).unwrap();
            assert_eq!((a.width, a.height, a.fps), (8, 8, 10));
            assert!(a.frames.len() > 10);
        }
        assert!(bundled("nope", 8, 8).is_err());
    }

    #[test]
    fn wave_spans_levels_smoothly() {
        let a = wave(8, 8).unwrap();
        let all: Vec<u8> = a.frames.iter().flat_map(|f| f.levels.clone()).collect();
        assert_eq!(*all.iter().min().unwrap(), 0);
        assert_eq!(*all.iter().max().unwrap(), 255);
        for w in a.frames.windows(2) {
            let step = w[0]
                .levels
                .iter()
                .zip(&w[1].levels)
                .map(|(a, b)| (*a as i32 - *b as i32).abs())
                .max()
                .unwrap();
            assert!(step <= 41, "{step}");
        }
    }

    #[test]
    fn heart_is_symmetric() {
        let a = heart(8, 8).unwrap();
        let full = &a.frames[HEART.len()];
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(full.get(r, c), full.get(r, 7 - c));
            }
        }
        assert_eq!(a.frames.last().unwrap().levels, vec![0; 64]);
    }

    #[test]
    fn text_scrolls_through() {
        let a = green_scroll(8, 8).unwrap();
        assert!(a.frames.first().unwrap().levels.iter().all(|l| *l == 0));
        assert!(a.frames.last().unwrap().levels.iter().all(|l| *l == 0));
        // the G enters from the right edge; its left column is lit on 3 rows
        let f = &a.frames[1];
        let lit: Vec<usize> = (0..8).filter(|&r| f.get(r, 7) == 255).collect();
        assert_eq!(lit, vec![2, 3, 4]);
    }
}
