//! Per-performance annotations and dataset manifest checks.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::notation::CanonicalScore;
use crate::raga::Tonic;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BeatKind {
    Sam,
    Khali,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeatMark {
    pub time: f64,
    pub kind: BeatKind,
}

impl BeatMark {
    pub fn sam(time: f64) -> Self {
        BeatMark { time, kind: BeatKind::Sam }
    }

    pub fn khali(time: f64) -> Self {
        BeatMark { time, kind: BeatKind::Khali }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Onset {
    pub label: String,
    pub time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Silence {
    pub start: f64,
    pub end: f64,
}

/// One sung repetition of a notated line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineRendition {
    pub line_index: usize,
    pub repetition_index: usize,
    pub onsets: Vec<Onset>,
    pub silences: Vec<Silence>,
}

impl LineRendition {
    pub fn first_onset(&self) -> Option<f64> {
        self.onsets.first().map(|o| o.time)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceAnnotation {
    pub concert_id: String,
    pub artist_id: String,
    pub bandish_name: String,
    pub tonic: Tonic,
    /// Slowest and fastest local tempo in matra per minute.
    pub tempo_range: (f64, f64),
    pub beat_marks: Vec<BeatMark>,
    /// Ordered by onset time.
    pub renditions: Vec<LineRendition>,
}

impl PerformanceAnnotation {
    /// Checks internal consistency and resolves every onset label against
    /// the score.
    pub fn validate(&self, score: &CanonicalScore) -> Result<()> {
        check_beat_marks(&self.beat_marks)?;
        let first = self.beat_marks[0].time;
        let last = self.beat_marks[self.beat_marks.len() - 1].time;
        let mut seen = BTreeSet::new();
        for r in &self.renditions {
            if !seen.insert((r.line_index, r.repetition_index)) {
                return Err(Error::Validation(format!(
                    "{}: line {} repetition {} appears twice",
                    self.concert_id, r.line_index, r.repetition_index
                )));
            }
            let line = score.line(r.line_index).map_err(|_| {
                Error::Validation(format!("{}: line {} is not in the score", self.concert_id, r.line_index))
            })?;
            for (i, o) in r.onsets.iter().enumerate() {
                if line.syllable(&o.label).is_none() {
                    return Err(Error::UnknownSyllable {
                        label: o.label.clone(),
                        valid: line.syllables.iter().map(|s| s.label.clone()).collect(),
                    });
                }
                if !o.time.is_finite() || o.time < first || o.time > last {
                    return Err(Error::Validation(format!(
                        "{}: onset of {} at {:.3} s (line {} repetition {}) lies outside the beat marks [{first:.3}, {last:.3}]",
                        self.concert_id, o.label, o.time, r.line_index, r.repetition_index
                    )));
                }
                if i > 0 && o.time <= r.onsets[i - 1].time {
                    return Err(Error::Validation(format!(
                        "{}: onsets of line {} repetition {} are not increasing at {}",
                        self.concert_id, r.line_index, r.repetition_index, o.label
                    )));
                }
            }
            for s in &r.silences {
                if !(s.start < s.end) {
                    return Err(Error::Validation(format!(
                        "{}: silence [{:.3}, {:.3}] is empty",
                        self.concert_id, s.start, s.end
                    )));
                }
            }
            for w in r.silences.windows(2) {
                if w[1].start < w[0].end {
                    return Err(Error::Validation(format!(
                        "{}: silences overlap at {:.3} s",
                        self.concert_id, w[1].start
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Beat marks must be ≥ 2, non-negative, strictly increasing and
/// alternate between sam and khali.
pub fn check_beat_marks(marks: &[BeatMark]) -> Result<()> {
    if marks.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 beat marks, got {}", marks.len())));
    }
    for (i, m) in marks.iter().enumerate() {
        if !m.time.is_finite() || m.time < 0.0 {
            return Err(Error::Validation(format!("beat mark {} has invalid time {}", i + 1, m.time)));
        }
    }
    for (i, w) in marks.windows(2).enumerate() {
        if w[1].time <= w[0].time {
            return Err(Error::Validation(format!("beat marks not increasing at mark {}", i + 2)));
        }
        if w[1].kind == w[0].kind {
            return Err(Error::Validation(format!("beat marks {} and {} do not alternate sam/khali", i + 1, i + 2)));
        }
    }
    Ok(())
}

/// Slowest and fastest tempo, in matra per minute, implied by consecutive
/// half-cycle marks.
pub fn tempo_range(marks: &[BeatMark], beats_per_cycle: usize) -> Result<(f64, f64)> {
    check_beat_marks(marks)?;
    let half = (beats_per_cycle / 2) as f64;
    let tempi = marks.windows(2).map(|w| 60.0 * half / (w[1].time - w[0].time));
    Ok(tempi.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t))))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(default)]
    pub bandish: Vec<ManifestEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub raga: String,
    pub tala: String,
    #[serde(default)]
    pub concerts: Vec<String>,
    /// Claimed repetition count per line, line 1 first.
    #[serde(default)]
    pub repetitions: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ManifestReport {
    pub entries: Vec<BandishReport>,
    /// Performances whose concert is not listed by any manifest entry.
    pub unlisted: Vec<String>,
}

impl ManifestReport {
    pub fn is_consistent(&self) -> bool {
        self.unlisted.is_empty() && self.entries.iter().all(|e| e.mismatches.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandishReport {
    pub name: String,
    pub raga: String,
    pub tala: String,
    pub concerts: usize,
    pub artists: usize,
    pub repetitions_claimed: Vec<usize>,
    pub repetitions_observed: Vec<usize>,
    pub tempo_range: Option<(f64, f64)>,
    pub mismatches: Vec<String>,
}

/// Compares manifest claims with what the loaded performances contain.
pub fn validate_manifest(manifest: &DatasetManifest, performances: &[PerformanceAnnotation]) -> ManifestReport {
    let mut report = ManifestReport::default();
    for entry in &manifest.bandish {
        let perfs: Vec<&PerformanceAnnotation> =
            performances.iter().filter(|p| entry.concerts.contains(&p.concert_id)).collect();
        let mut mismatches = Vec::new();
        for c in &entry.concerts {
            if !perfs.iter().any(|p| p.concert_id == *c) {
                mismatches.push(format!("concert {c} listed but not loaded"));
            }
        }
        for p in &perfs {
            if p.bandish_name != entry.name {
                mismatches.push(format!("concert {} belongs to bandish {:?}", p.concert_id, p.bandish_name));
            }
        }
        let lines = perfs
            .iter()
            .flat_map(|p| p.renditions.iter().map(|r| r.line_index))
            .max()
            .unwrap_or(0)
            .max(entry.repetitions.len());
        let mut observed = alloc::vec![0usize; lines];
        for r in perfs.iter().flat_map(|p| &p.renditions) {
            observed[r.line_index - 1] += 1;
        }
        let mut claimed = entry.repetitions.clone();
        claimed.resize(lines, 0);
        for (i, (c, o)) in claimed.iter().zip(&observed).enumerate() {
            if c != o {
                mismatches.push(format!("line {}: manifest claims {c} repetitions, found {o}", i + 1));
            }
        }
        let artists: BTreeSet<&str> = perfs.iter().map(|p| p.artist_id.as_str()).collect();
        let tempo_range = perfs.iter().map(|p| p.tempo_range).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)));
        report.entries.push(BandishReport {
            name: entry.name.clone(),
            raga: entry.raga.clone(),
            tala: entry.tala.clone(),
            concerts: perfs.len(),
            artists: artists.len(),
            repetitions_claimed: entry.repetitions.clone(),
            repetitions_observed: observed,
            tempo_range,
            mismatches,
        });
    }
    for p in performances {
        if !manifest.bandish.iter().any(|e| e.concerts.contains(&p.concert_id)) {
            report.unlisted.push(p.concert_id.to_string());
        }
    }
    report
}
