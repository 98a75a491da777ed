//! Beat grid construction and onset timing deviations.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::annotation::{check_beat_marks, BeatKind, BeatMark, LineRendition};
use crate::notation::CanonicalSyllable;
use crate::{sample_mean_sd, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeatInstant {
    pub cycle: usize,
    /// Position in the cycle, 0 = sam.
    pub beat: usize,
    pub time: f64,
    /// Beat interval of the half-cycle this instant opens.
    pub interval: f64,
}

/// Estimated beat instants between the first and last mark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeatGrid {
    pub beats_per_cycle: usize,
    pub beats: Vec<BeatInstant>,
}

impl BeatGrid {
    pub fn start(&self) -> f64 {
        self.beats[0].time
    }

    pub fn end(&self) -> f64 {
        self.beats[self.beats.len() - 1].time
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start() && t <= self.end()
    }

    /// Beat interval at time `t`: that of the half-cycle containing it.
    pub fn interval_at(&self, t: f64) -> Option<f64> {
        if !self.contains(t) {
            return None;
        }
        let i = self.beats.partition_point(|b| b.time <= t).max(1) - 1;
        Some(self.beats[i].interval)
    }

    /// Time of beat position `pos` (in beats, may be fractional) counted from
    /// grid beat `index`, following the local intervals.
    pub fn time_at(&self, index: usize, offset: f64) -> f64 {
        let b = &self.beats[index];
        b.time + offset * b.interval
    }
}

/// Divides each pair of adjacent sam/khali marks into equal beats.
pub fn build_beat_grid(marks: &[BeatMark], beats_per_cycle: usize) -> Result<BeatGrid> {
    if beats_per_cycle < 2 || !beats_per_cycle.is_multiple_of(2) {
        return Err(Error::Config(format!("beats per cycle must be even and ≥ 2, got {beats_per_cycle}")));
    }
    check_beat_marks(marks)?;
    let half = beats_per_cycle / 2;
    let mut beats = Vec::with_capacity(marks.len() * half);
    let mut cycle = 0;
    for w in marks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let base = if a.kind == BeatKind::Sam { 0 } else { half };
        let span = b.time - a.time;
        let interval = span / half as f64;
        for j in 0..half {
            beats.push(BeatInstant { cycle, beat: base + j, time: a.time + span * j as f64 / half as f64, interval });
        }
        if b.kind == BeatKind::Sam {
            cycle += 1;
        }
    }
    let last = marks[marks.len() - 1];
    let prev_interval = beats[beats.len() - 1].interval;
    beats.push(BeatInstant {
        cycle,
        beat: if last.kind == BeatKind::Sam { 0 } else { half },
        time: last.time,
        interval: prev_interval,
    });
    Ok(BeatGrid { beats_per_cycle, beats })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingDeviation {
    pub syllable: String,
    pub repetition: usize,
    /// Signed fraction of the local beat interval; positive is a lag.
    pub deviation: f64,
    pub onset_time: f64,
    pub canonical_time: f64,
}

/// Matches each onset to the nearest occurrence of its syllable's canonical
/// position in the grid (ties go to the earlier one) and expresses the
/// offset in local beats.
pub fn assign_and_deviate(
    rendition: &LineRendition,
    canon: &[CanonicalSyllable],
    grid: &BeatGrid,
) -> Result<Vec<TimingDeviation>> {
    rendition
        .onsets
        .iter()
        .map(|onset| {
            let syl = canon.iter().find(|s| s.label == onset.label).ok_or_else(|| Error::UnknownSyllable {
                label: onset.label.clone(),
                valid: canon.iter().map(|s| s.label.clone()).collect(),
            })?;
            if !grid.contains(onset.time) {
                return Err(Error::OutsideGrid { time: onset.time, start: grid.start(), end: grid.end() });
            }
            let mut best: Option<(f64, f64, f64)> = None;
            for (i, b) in grid.beats.iter().enumerate() {
                if b.beat != syl.tala_beat {
                    continue;
                }
                let instant = grid.time_at(i, syl.sub_beat);
                let dist = (onset.time - instant).abs();
                if best.is_none_or(|(d, _, _)| dist < d) {
                    best = Some((dist, instant, b.interval));
                }
            }
            let (_, instant, interval) = best.ok_or_else(|| {
                Error::Data(format!("beat {} of syllable {} never occurs in the grid", syl.tala_beat, syl.label))
            })?;
            Ok(TimingDeviation {
                syllable: onset.label.clone(),
                repetition: rendition.repetition_index,
                deviation: (onset.time - instant) / interval,
                onset_time: onset.time,
                canonical_time: instant,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyllableDuration {
    pub syllable: String,
    pub repetition: usize,
    pub duration: f64,
}

/// Time from each onset to the next onset or the start of the next
/// silence, whichever comes first. The last syllable runs to the next
/// silence or `rendition_end`.
pub fn syllable_durations(rendition: &LineRendition, rendition_end: f64) -> Result<Vec<SyllableDuration>> {
    let onsets = &rendition.onsets;
    onsets
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let next = onsets.get(i + 1).map_or(rendition_end, |n| n.time);
            let silence =
                rendition.silences.iter().map(|s| s.start).filter(|&s| s > o.time).fold(f64::INFINITY, f64::min);
            let duration = next.min(silence) - o.time;
            if !(duration > 0.0) {
                return Err(Error::Data(format!(
                    "syllable {} at {:.3} s (repetition {}) has non-positive duration {duration}",
                    o.label, o.time, rendition.repetition_index
                )));
            }
            Ok(SyllableDuration { syllable: o.label.clone(), repetition: rendition.repetition_index, duration })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationStats {
    pub syllable: String,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
    /// Set when n == 1, where sd is reported as 0 but is undefined.
    pub single_sample: bool,
}

/// Mean and sample sd of deviations per syllable, in order of first
/// appearance.
pub fn deviation_stats(devs: &[TimingDeviation]) -> Vec<DeviationStats> {
    let mut order: Vec<&str> = Vec::new();
    for d in devs {
        if !order.contains(&d.syllable.as_str()) {
            order.push(&d.syllable);
        }
    }
    order
        .into_iter()
        .filter_map(|label| {
            let values: Vec<f64> = devs.iter().filter(|d| d.syllable == label).map(|d| d.deviation).collect();
            let (mean, sd) = sample_mean_sd(&values)?;
            Some(DeviationStats { syllable: label.into(), mean, sd, n: values.len(), single_sample: values.len() == 1 })
        })
        .collect()
}
