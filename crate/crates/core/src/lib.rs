//! Range-subband chromatic coding of single-look complex SAR images.
//!
//! The range spectrum of each azimuth line is split into equal-width
//! subbands; each subband is assigned a hue from a palette whose colors sum
//! to gray. Pixels with a flat spectrum come out achromatic, while
//! interference that concentrates energy in part of the band shows up in
//! color. The [`synth`] module generates scenes with known interference so
//! the signatures can be checked end to end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chroma;
pub mod error;
pub mod multilook;
pub mod slc_io;
pub mod spectral;
pub mod synth;

pub use chroma::{chromatic_code, chromatic_code_detailed, CoderConfig, Coding, Palette};
pub use error::{Error, ErrorKind, Result};
pub use multilook::LookParams;
pub use slc_io::{read_slc, write_slc, RealImage, RgbImage, SlcImage, SlcMeta};
pub use spectral::{decompose, plan_layout, ComplexImage, SubbandLayout, SubbandStack};
