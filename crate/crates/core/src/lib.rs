//! Analysis kernels for expressive variation in repeated renditions of
//! Hindustani *bandish* lines.
//!
//! Everything here is pure computation over in-memory values and builds
//! under `#![no_std]` with `alloc`. File formats, audio IO and the
//! command-line pipeline live in the companion `bandish` crate.
//!
//! The pieces, roughly in pipeline order:
//!
//! * [`notation`] parses the canonical beat-slotted notation of a bandish.
//! * [`raga`] holds swar grids in cents and quantizes pitch to them.
//! * [`annotation`] describes and validates per-performance annotations.
//! * [`pitchtrack`] estimates an F0 contour from mono audio at a 10 ms hop.
//! * [`rhythm`] builds the beat grid and measures onset deviations.
//! * [`melody`] turns syllable contours into PAA swar strings and compares them.
//! * [`aggregate`] assembles artist × syllable expression tables.
//! * [`generate`] resamples measured variation into new renditions and
//!   synthesizes sine-tone audio.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod aggregate;
pub mod annotation;
mod error;
pub mod generate;
pub mod melody;
pub mod notation;
pub mod pitchtrack;
pub mod raga;
pub mod rhythm;
mod stats;
mod swar;

pub use error::{Error, Result};
pub use stats::{quantile_linear, sample_mean_sd};
pub use swar::{format_swars, parse_swar_string, Degree, Octave, SwarSymbol};

/// Pitch frame period used throughout the analysis, in seconds.
pub const HOP_SECONDS: f64 = 0.010;

/// Default number of PAA intervals per allotted beat.
pub const PAA_PER_BEAT: usize = 10;
