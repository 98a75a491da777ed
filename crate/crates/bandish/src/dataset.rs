//! On-disk dataset layout:
//!
//! ```text
//! <root>/manifest.toml
//! <root>/notation/<bandish>.csv
//! <root>/ragas/<raga>.toml            (optional)
//! <root>/performances/<concert>/performance.meta
//!                               beats.csv onsets.csv silences.csv
//!                               pitch.csv | audio.wav
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use bandish_core::annotation::{
    tempo_range, DatasetManifest, LineRendition, ManifestEntry, Onset, PerformanceAnnotation, Silence,
};
use bandish_core::notation::{parse_notation, CanonicalScore};
use bandish_core::raga::{RagaDefinition, RagaScale, Tonic};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

pub const MANIFEST: &str = "manifest.toml";
pub const META: &str = "performance.meta";
pub const BEATS: &str = "beats.csv";
pub const ONSETS: &str = "onsets.csv";
pub const SILENCES: &str = "silences.csv";
pub const PITCH: &str = "pitch.csv";
pub const AUDIO: &str = "audio.wav";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    #[serde(default)]
    pub bandish: Vec<BandishFileEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandishFileEntry {
    #[serde(flatten)]
    pub entry: ManifestEntry,
    /// Notation file, relative to the dataset root.
    pub notation: PathBuf,
    /// Raga definition file; built-in scales are used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raga_file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMeta {
    pub concert_id: String,
    pub artist_id: String,
    pub bandish: String,
    pub tonic_hz: f64,
}

#[derive(Clone, Debug)]
pub struct Bandish {
    pub entry: ManifestEntry,
    pub score: CanonicalScore,
    pub scale: RagaScale,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PitchSource {
    Contour(PathBuf),
    Audio(PathBuf),
    Missing,
}

#[derive(Clone, Debug)]
pub struct Performance {
    pub dir: PathBuf,
    pub annotation: PerformanceAnnotation,
    /// End of each rendition: the next rendition's first onset or the last
    /// beat mark.
    pub rendition_ends: Vec<f64>,
    pub pitch: PitchSource,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
    pub bandish: Vec<Bandish>,
    pub performances: Vec<Performance>,
}

impl Dataset {
    pub fn bandish(&self, name: &str) -> Option<&Bandish> {
        self.bandish.iter().find(|b| b.entry.name.eq_ignore_ascii_case(name))
    }

    pub fn bandish_of(&self, perf: &Performance) -> &Bandish {
        self.bandish(&perf.annotation.bandish_name).expect("performances are checked against the manifest at load")
    }
}

/// Built-in scales by raga name.
pub fn builtin_raga(name: &str) -> Option<RagaScale> {
    match name.to_ascii_lowercase().as_str() {
        "bhimpalasi" => Some(RagaScale::bhimpalasi()),
        "yaman" => Some(RagaScale::yaman()),
        "chromatic" => Some(RagaScale::chromatic()),
        _ => None,
    }
}

pub fn performance_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let dir = root.join("performances");
    if !root.is_dir() {
        return Err(CliError::io(root, std::io::Error::new(std::io::ErrorKind::NotFound, "dataset root not found")));
    }
    let mut out = Vec::new();
    if dir.is_dir() {
        for entry in fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))? {
            let path = entry.map_err(|e| CliError::io(&dir, e))?.path();
            if path.join(META).is_file() {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn load_dataset(root: &Path) -> Result<Dataset> {
    let dirs = performance_dirs(root)?;
    if dirs.is_empty() {
        return Err(CliError::Validation(format!(
            "no performances found under {}",
            root.join("performances").display()
        )));
    }
    let manifest_path = root.join(MANIFEST);
    let file: ManifestFile = io::read_toml(&manifest_path)?;
    let mut bandish = Vec::new();
    for b in &file.bandish {
        let path = root.join(&b.notation);
        let score = parse_notation(&io::read_text(&path)?).map_err(CliError::at(&path))?;
        let scale = match &b.raga_file {
            Some(rel) => {
                let path = root.join(rel);
                let def: RagaDefinition = io::read_toml(&path)?;
                RagaScale::try_from(def).map_err(CliError::at(&path))?
            }
            None => builtin_raga(&b.entry.raga).ok_or_else(|| {
                CliError::Config(format!("no built-in scale for raga {:?}; add a raga_file", b.entry.raga))
            })?,
        };
        bandish.push(Bandish { entry: b.entry.clone(), score, scale });
    }
    let mut performances = Vec::new();
    for dir in dirs {
        let meta: PerformanceMeta = io::read_toml(&dir.join(META))?;
        let b = bandish.iter().find(|b| b.entry.name.eq_ignore_ascii_case(&meta.bandish)).ok_or_else(|| {
            CliError::Validation(format!("{}: bandish {:?} is not in the manifest", dir.display(), meta.bandish))
        })?;
        let mut perf = load_performance(&dir, &meta, &b.score)?;
        perf.annotation.bandish_name = b.entry.name.clone();
        performances.push(perf);
    }
    let manifest = DatasetManifest { bandish: file.bandish.into_iter().map(|b| b.entry).collect() };
    Ok(Dataset { root: root.to_path_buf(), manifest, bandish, performances })
}

/// Loads and validates one performance directory against its score.
pub fn load_performance(dir: &Path, meta: &PerformanceMeta, score: &CanonicalScore) -> Result<Performance> {
    let meta_path = dir.join(META);
    let tonic = Tonic::new(meta.tonic_hz).map_err(CliError::at(&meta_path))?;
    let beats_path = dir.join(BEATS);
    let beat_marks = io::read_beats(&beats_path)?;
    let tempo = tempo_range(&beat_marks, score.beats_per_cycle).map_err(CliError::at(&beats_path))?;
    let last_mark = beat_marks[beat_marks.len() - 1].time;

    let onsets_path = dir.join(ONSETS);
    let mut groups: BTreeMap<(usize, usize), Vec<(u64, Onset)>> = BTreeMap::new();
    for (row, r) in io::read_onsets(&onsets_path)? {
        groups
            .entry((r.line, r.repetition))
            .or_default()
            .push((row, Onset { label: r.syllable_label, time: r.onset_s }));
    }
    let mut renditions = Vec::with_capacity(groups.len());
    for ((line_index, repetition_index), rows) in groups {
        for w in rows.windows(2) {
            if w[1].1.time <= w[0].1.time {
                return Err(CliError::Validation(format!(
                    "{}: line {}: onset of {} at {} s does not follow {} at {} s",
                    onsets_path.display(),
                    w[1].0,
                    w[1].1.label,
                    w[1].1.time,
                    w[0].1.label,
                    w[0].1.time
                )));
            }
        }
        renditions.push(LineRendition {
            line_index,
            repetition_index,
            onsets: rows.into_iter().map(|(_, o)| o).collect(),
            silences: Vec::new(),
        });
    }
    renditions.retain(|r| !r.onsets.is_empty());
    renditions.sort_by(|a, b| a.onsets[0].time.total_cmp(&b.onsets[0].time));
    let starts: Vec<f64> = renditions.iter().map(|r| r.onsets[0].time).collect();
    let rendition_ends: Vec<f64> =
        (0..renditions.len()).map(|i| starts.get(i + 1).copied().unwrap_or(last_mark).min(last_mark)).collect();

    let silences_path = dir.join(SILENCES);
    let silences: Vec<Silence> = if silences_path.is_file() { io::read_silences(&silences_path)? } else { Vec::new() };
    for s in silences {
        if let Some(i) = (0..renditions.len()).find(|&i| s.start >= starts[i] && s.start < rendition_ends[i]) {
            renditions[i].silences.push(s);
        }
    }
    for r in &mut renditions {
        r.silences.sort_by(|a, b| a.start.total_cmp(&b.start));
    }

    let annotation = PerformanceAnnotation {
        concert_id: meta.concert_id.clone(),
        artist_id: meta.artist_id.clone(),
        bandish_name: score.bandish_name.clone(),
        tonic,
        tempo_range: tempo,
        beat_marks,
        renditions,
    };
    annotation.validate(score).map_err(CliError::at(dir))?;
    let pitch = if dir.join(PITCH).is_file() {
        PitchSource::Contour(dir.join(PITCH))
    } else if dir.join(AUDIO).is_file() {
        PitchSource::Audio(dir.join(AUDIO))
    } else {
        PitchSource::Missing
    };
    Ok(Performance { dir: dir.to_path_buf(), annotation, rendition_ends, pitch })
}
