//! Syllable pitch shapes as PAA swar strings, and their pairwise comparison.

mod cluster;
mod edit;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use cluster::{cluster_variations, Merge, VariationClusters};
pub use edit::{levenshtein, mean_nlss, nlss, nlss_general, pairwise_nlss, EditCounts, NlssMatrix};

use crate::notation::front_loaded_sizes;
use crate::pitchtrack::PitchContour;
use crate::raga::{hz_to_cents, quantize_cents, RagaScale, Tonic};
use crate::{Error, Result, SwarSymbol};

/// Fixed-length swar string describing one rendition of a syllable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaaString {
    pub syllable: String,
    pub repetition: usize,
    pub symbols: Vec<SwarSymbol>,
}

/// Gap-free pitch contour in cents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentsContour {
    pub start_time: f64,
    pub hop: f64,
    pub cents: Vec<f64>,
}

/// Converts a contour to cents, filling unvoiced frames by linear
/// interpolation in cents between voiced neighbours; leading and trailing
/// unvoiced frames copy the nearest voiced value.
pub fn continuous_cents(contour: &PitchContour, tonic: Tonic) -> Result<CentsContour> {
    let voiced: Vec<(usize, f64)> = contour
        .frames
        .iter()
        .enumerate()
        .filter(|(_, f)| **f > 0.0)
        .map(|(i, &f)| hz_to_cents(f, tonic).map(|c| (i, c)))
        .collect::<Result<_>>()?;
    let (&(first_i, first_c), &(last_i, last_c)) = match (voiced.first(), voiced.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Domain("contour has no voiced frames".into())),
    };
    let mut cents = alloc::vec![0.0; contour.frames.len()];
    cents[..=first_i].fill(first_c);
    cents[last_i..].fill(last_c);
    for w in voiced.windows(2) {
        let ((i0, c0), (i1, c1)) = (w[0], w[1]);
        let span = (i1 - i0) as f64;
        for (k, slot) in cents[i0..i1].iter_mut().enumerate() {
            *slot = c0 + (c1 - c0) * k as f64 / span;
        }
    }
    Ok(CentsContour { start_time: contour.start_time, hop: contour.hop, cents })
}

/// Tolerance for frame times that land on a boundary up to rounding.
const TIME_EPS: f64 = 1e-9;

/// Frames with time in `[onset, onset + duration)`.
pub fn slice_syllable(contour: &CentsContour, onset: f64, duration: f64) -> Result<&[f64]> {
    if !(duration >= contour.hop) {
        return Err(Error::Domain(format!(
            "syllable duration {duration} s is shorter than one {} s frame",
            contour.hop
        )));
    }
    let index = |t: f64| libm::ceil((t - contour.start_time) / contour.hop - TIME_EPS);
    let first = index(onset).max(0.0) as usize;
    let end = (index(onset + duration).max(0.0) as usize).min(contour.cents.len());
    if first >= end {
        return Err(Error::Domain(format!("no pitch frames in [{onset:.3}, {:.3}) s", onset + duration)));
    }
    Ok(&contour.cents[first..end])
}

/// Quantizes each frame to the scale, splits the frames into
/// `per_beat · allotted_beats` contiguous intervals (sizes as equal as
/// possible, extra frames to the front intervals) and takes the modal swar
/// of each. Ties in the mode go to the swar seen first in the interval.
/// When there are fewer frames than intervals, empty intervals repeat the
/// previous symbol.
pub fn paa_symbols(
    segment: &[f64],
    allotted_beats: usize,
    per_beat: usize,
    scale: &RagaScale,
) -> Result<Vec<SwarSymbol>> {
    if allotted_beats == 0 || per_beat == 0 {
        return Err(Error::Config("allotted beats and intervals per beat must be positive".into()));
    }
    if segment.is_empty() {
        return Err(Error::Domain("empty pitch segment".into()));
    }
    let quantized: Vec<SwarSymbol> = segment.iter().map(|&c| quantize_cents(c, scale)).collect::<Result<_>>()?;
    let intervals = per_beat * allotted_beats;
    let mut out: Vec<SwarSymbol> = Vec::with_capacity(intervals);
    let mut start = 0;
    for size in front_loaded_sizes(quantized.len(), intervals) {
        let chunk = &quantized[start..start + size];
        start += size;
        match modal_symbol(chunk) {
            Some(s) => out.push(s),
            None => {
                let prev = *out.last().ok_or_else(|| Error::Domain("leading PAA interval is empty".into()))?;
                out.push(prev);
            }
        }
    }
    Ok(out)
}

pub fn paa_string(
    syllable: &str,
    repetition: usize,
    segment: &[f64],
    allotted_beats: usize,
    per_beat: usize,
    scale: &RagaScale,
) -> Result<PaaString> {
    Ok(PaaString {
        syllable: syllable.into(),
        repetition,
        symbols: paa_symbols(segment, allotted_beats, per_beat, scale)?,
    })
}

fn modal_symbol(chunk: &[SwarSymbol]) -> Option<SwarSymbol> {
    let mut best: Option<(SwarSymbol, usize)> = None;
    for (i, s) in chunk.iter().enumerate() {
        // count each distinct symbol once, at its first occurrence
        if chunk[..i].contains(s) {
            continue;
        }
        let count = chunk[i..].iter().filter(|t| *t == s).count();
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((*s, count));
        }
    }
    best.map(|(s, _)| s)
}
