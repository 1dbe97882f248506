#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod actuation;
pub mod analysis;
pub mod appearance;
pub mod calibration;
pub mod color;
pub mod display;
pub mod error;
pub mod exec;
pub mod frontdoor;
pub mod pixel;
pub mod rig;

pub use error::{Error, Result};
