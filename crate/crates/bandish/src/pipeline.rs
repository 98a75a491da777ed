//! Dataset-wide analysis passes and their row types.

use std::collections::BTreeMap;
use std::path::Path;

use bandish_core::aggregate::{pitch_table, timing_table, ExpressionTable};
use bandish_core::melody::{
    cluster_variations, continuous_cents, levenshtein, paa_symbols, pairwise_nlss, slice_syllable, NlssMatrix,
    PaaString, VariationClusters,
};
use bandish_core::notation::{canonical_positions, CanonicalLine};
use bandish_core::pitchtrack::{extract_f0, PitchContour, TrackerParams};
use bandish_core::rhythm::{
    assign_and_deviate, build_beat_grid, deviation_stats, syllable_durations, DeviationStats, TimingDeviation,
};
use bandish_core::{format_swars, parse_swar_string, SwarSymbol};
use serde::{Deserialize, Serialize};

use crate::dataset::{Bandish, Dataset, Performance, PitchSource};
use crate::error::{CliError, Result};
use crate::io::{self, fmt_f64};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Selection {
    pub bandish: Option<String>,
    pub line: Option<usize>,
    pub artist: Option<String>,
}

impl Selection {
    pub fn bandish_ok(&self, name: &str) -> bool {
        self.bandish.as_deref().is_none_or(|b| b.eq_ignore_ascii_case(name))
    }

    pub fn artist_ok(&self, artist: &str) -> bool {
        self.artist.as_deref().is_none_or(|a| a == artist)
    }

    pub fn line_ok(&self, line: usize) -> bool {
        self.line.is_none_or(|l| l == line)
    }

    /// Rejects filters that match no performance at all.
    pub fn check(&self, ds: &Dataset) -> Result<()> {
        if let Some(name) = &self.bandish {
            if ds.bandish(name).is_none() {
                return Err(CliError::Config(format!("bandish {name:?} is not in the manifest")));
            }
        }
        if let Some(artist) = &self.artist {
            if !ds.performances.iter().any(|p| &p.annotation.artist_id == artist) {
                let mut known: Vec<&str> = ds.performances.iter().map(|p| p.annotation.artist_id.as_str()).collect();
                known.sort_unstable();
                known.dedup();
                return Err(CliError::Config(format!("artist {artist:?} not found (known: {})", known.join(", "))));
            }
        }
        Ok(())
    }

    fn performance_ok(&self, p: &Performance) -> bool {
        self.bandish_ok(&p.annotation.bandish_name) && self.artist_ok(&p.annotation.artist_id)
    }

    /// The single bandish and line that table-level commands work on:
    /// the selected ones, else the first manifest entry and line 1.
    pub fn focus<'a>(&self, ds: &'a Dataset) -> Result<(&'a Bandish, &'a CanonicalLine)> {
        let b = match &self.bandish {
            Some(name) => {
                ds.bandish(name).ok_or_else(|| CliError::Config(format!("bandish {name:?} is not in the manifest")))?
            }
            None => ds.bandish.first().ok_or_else(|| CliError::Validation("manifest lists no bandish".into()))?,
        };
        let line = b.score.line(self.line.unwrap_or(1)).map_err(|e| CliError::Config(e.to_string()))?;
        Ok((b, line))
    }
}

fn order_in(line: &CanonicalLine, label: &str) -> usize {
    line.syllables.iter().position(|s| s.label == label).unwrap_or(usize::MAX)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub bandish: String,
    pub artist: String,
    pub concert: String,
    pub line: usize,
    pub repetition: usize,
    pub syllable: String,
    pub onset_s: f64,
    pub canonical_s: f64,
    pub deviation: f64,
}

impl TimingRow {
    pub fn deviation(&self) -> TimingDeviation {
        TimingDeviation {
            syllable: self.syllable.clone(),
            repetition: self.repetition,
            deviation: self.deviation,
            onset_time: self.onset_s,
            canonical_time: self.canonical_s,
        }
    }
}

pub fn timing_rows(ds: &Dataset, sel: &Selection) -> Result<Vec<TimingRow>> {
    sel.check(ds)?;
    let mut rows = Vec::new();
    for perf in ds.performances.iter().filter(|p| sel.performance_ok(p)) {
        let a = &perf.annotation;
        let b = ds.bandish_of(perf);
        let grid = build_beat_grid(&a.beat_marks, b.score.beats_per_cycle).map_err(CliError::at(&perf.dir))?;
        for r in a.renditions.iter().filter(|r| sel.line_ok(r.line_index)) {
            let canon = canonical_positions(&b.score, r.line_index).map_err(CliError::at(&perf.dir))?;
            for d in assign_and_deviate(r, canon, &grid).map_err(CliError::at(&perf.dir))? {
                rows.push(TimingRow {
                    bandish: b.entry.name.clone(),
                    artist: a.artist_id.clone(),
                    concert: a.concert_id.clone(),
                    line: r.line_index,
                    repetition: r.repetition_index,
                    syllable: d.syllable,
                    onset_s: d.onset_time,
                    canonical_s: d.canonical_time,
                    deviation: d.deviation,
                });
            }
        }
    }
    sort_rows(ds, &mut rows, |r| (&r.bandish, &r.artist, &r.concert, r.line, r.repetition, &r.syllable));
    Ok(rows)
}

/// Canonical output order: artist, concert, line, repetition, then the
/// syllable's position in the line.
fn sort_rows<T>(ds: &Dataset, rows: &mut [T], key: impl Fn(&T) -> (&String, &String, &String, usize, usize, &String)) {
    rows.sort_by_cached_key(|r| {
        let (bandish, artist, concert, line, rep, syl) = key(r);
        let order = ds.bandish(bandish).and_then(|b| b.score.line(line).ok()).map_or(usize::MAX, |l| order_in(l, syl));
        (artist.clone(), concert.clone(), bandish.clone(), line, rep, order)
    });
}

pub const TIMING_HEADER: [&str; 9] =
    ["bandish", "artist", "concert", "line", "repetition", "syllable", "onset_s", "canonical_s", "deviation"];

pub fn write_timing(path: &Path, seed: u64, rows: &[TimingRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.bandish.clone(),
                r.artist.clone(),
                r.concert.clone(),
                r.line.to_string(),
                r.repetition.to_string(),
                r.syllable.clone(),
                fmt_f64(r.onset_s),
                fmt_f64(r.canonical_s),
                fmt_f64(r.deviation),
            ]
        })
        .collect();
    io::write_rows(path, Some(seed), &TIMING_HEADER, &rows)
}

pub fn read_timing(path: &Path) -> Result<Vec<TimingRow>> {
    Ok(io::read_rows(path)?.into_iter().map(|(_, r)| r).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatRow {
    pub bandish: String,
    pub artist: String,
    pub line: usize,
    pub stats: DeviationStats,
}

/// Per artist, line and syllable, pooled over concerts and repetitions.
pub fn timing_stats(ds: &Dataset, rows: &[TimingRow]) -> Vec<StatRow> {
    let mut groups: BTreeMap<(&str, &str, usize), Vec<TimingDeviation>> = BTreeMap::new();
    for r in rows {
        groups.entry((&r.artist, &r.bandish, r.line)).or_default().push(r.deviation());
    }
    let mut out = Vec::new();
    for ((artist, bandish, line), devs) in groups {
        let mut stats = deviation_stats(&devs);
        if let Some(l) = ds.bandish(bandish).and_then(|b| b.score.line(line).ok()) {
            stats.sort_by_key(|s| order_in(l, &s.syllable));
        }
        out.extend(stats.into_iter().map(|stats| StatRow {
            bandish: bandish.into(),
            artist: artist.into(),
            line,
            stats,
        }));
    }
    out
}

pub fn write_timing_stats(path: &Path, seed: u64, rows: &[StatRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.bandish.clone(),
                r.artist.clone(),
                r.line.to_string(),
                r.stats.syllable.clone(),
                r.stats.n.to_string(),
                fmt_f64(r.stats.mean),
                fmt_f64(r.stats.sd),
                r.stats.single_sample.to_string(),
            ]
        })
        .collect();
    io::write_rows(
        path,
        Some(seed),
        &["bandish", "artist", "line", "syllable", "n", "mean", "sd", "single_sample"],
        &rows,
    )
}

pub fn load_contour(perf: &Performance, tracker: &TrackerParams) -> Result<PitchContour> {
    match &perf.pitch {
        PitchSource::Contour(path) => io::read_pitch(path),
        PitchSource::Audio(path) => {
            let (samples, sr) = io::read_wav(path)?;
            extract_f0(&samples, sr, tracker).map_err(CliError::at(path))
        }
        PitchSource::Missing => Err(CliError::Validation(format!(
            "{}: neither {} nor {} present",
            perf.dir.display(),
            crate::dataset::PITCH,
            crate::dataset::AUDIO
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PaaRow {
    pub bandish: String,
    pub artist: String,
    pub concert: String,
    pub line: usize,
    pub repetition: usize,
    pub syllable: String,
    pub allotted_beats: usize,
    pub symbols: Vec<SwarSymbol>,
}

pub fn paa_rows(ds: &Dataset, sel: &Selection, per_beat: usize, tracker: &TrackerParams) -> Result<Vec<PaaRow>> {
    sel.check(ds)?;
    let mut rows = Vec::new();
    for perf in ds.performances.iter().filter(|p| sel.performance_ok(p)) {
        let a = &perf.annotation;
        let b = ds.bandish_of(perf);
        let wanted: Vec<usize> = (0..a.renditions.len()).filter(|&i| sel.line_ok(a.renditions[i].line_index)).collect();
        if wanted.is_empty() {
            continue;
        }
        let contour = load_contour(perf, tracker)?;
        let cents = continuous_cents(&contour, a.tonic).map_err(CliError::at(&perf.dir))?;
        for i in wanted {
            let r = &a.renditions[i];
            let line = b.score.line(r.line_index).map_err(CliError::at(&perf.dir))?;
            let durations = syllable_durations(r, perf.rendition_ends[i]).map_err(CliError::at(&perf.dir))?;
            for (onset, d) in r.onsets.iter().zip(durations) {
                let syl = line.syllable(&onset.label).expect("labels are validated at load");
                let context = |e| {
                    CliError::Validation(format!(
                        "{}: line {} repetition {} syllable {}: {e}",
                        perf.dir.display(),
                        r.line_index,
                        r.repetition_index,
                        onset.label
                    ))
                };
                let segment = slice_syllable(&cents, onset.time, d.duration).map_err(context)?;
                let symbols = paa_symbols(segment, syl.allotted_beats, per_beat, &b.scale).map_err(context)?;
                rows.push(PaaRow {
                    bandish: b.entry.name.clone(),
                    artist: a.artist_id.clone(),
                    concert: a.concert_id.clone(),
                    line: r.line_index,
                    repetition: r.repetition_index,
                    syllable: onset.label.clone(),
                    allotted_beats: syl.allotted_beats,
                    symbols,
                });
            }
        }
    }
    sort_rows(ds, &mut rows, |r| (&r.bandish, &r.artist, &r.concert, r.line, r.repetition, &r.syllable));
    Ok(rows)
}

pub const PAA_HEADER: [&str; 8] =
    ["bandish", "artist", "concert", "line", "repetition", "syllable", "allotted_beats", "string"];

pub fn write_paa(path: &Path, seed: u64, rows: &[PaaRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.bandish.clone(),
                r.artist.clone(),
                r.concert.clone(),
                r.line.to_string(),
                r.repetition.to_string(),
                r.syllable.clone(),
                r.allotted_beats.to_string(),
                format_swars(&r.symbols),
            ]
        })
        .collect();
    io::write_rows(path, Some(seed), &PAA_HEADER, &rows)
}

#[derive(Deserialize)]
struct PaaRecord {
    bandish: String,
    artist: String,
    concert: String,
    line: usize,
    repetition: usize,
    syllable: String,
    allotted_beats: usize,
    string: String,
}

pub fn read_paa(path: &Path) -> Result<Vec<PaaRow>> {
    io::read_rows::<PaaRecord>(path)?
        .into_iter()
        .map(|(line, r)| {
            let symbols =
                parse_swar_string(&r.string).map_err(|e| CliError::format(path, format!("line {line}: {e}")))?;
            Ok(PaaRow {
                bandish: r.bandish,
                artist: r.artist,
                concert: r.concert,
                line: r.line,
                repetition: r.repetition,
                syllable: r.syllable,
                allotted_beats: r.allotted_beats,
                symbols,
            })
        })
        .collect()
}

/// All repetitions of one syllable in one concert.
#[derive(Clone, Debug, PartialEq)]
pub struct SyllableGroup {
    pub bandish: String,
    pub artist: String,
    pub concert: String,
    pub line: usize,
    pub syllable: String,
    pub reps: Vec<PaaString>,
}

/// Groups in row order of first appearance, which for sorted rows is
/// artist, concert, line, then canonical syllable order within the first
/// repetition.
pub fn syllable_groups(ds: &Dataset, rows: &[PaaRow]) -> Vec<SyllableGroup> {
    let mut groups: BTreeMap<(String, String, String, usize, usize, String), SyllableGroup> = BTreeMap::new();
    for r in rows {
        let order = ds
            .bandish(&r.bandish)
            .and_then(|b| b.score.line(r.line).ok())
            .map_or(usize::MAX, |l| order_in(l, &r.syllable));
        let key = (r.artist.clone(), r.concert.clone(), r.bandish.clone(), r.line, order, r.syllable.clone());
        groups
            .entry(key)
            .or_insert_with(|| SyllableGroup {
                bandish: r.bandish.clone(),
                artist: r.artist.clone(),
                concert: r.concert.clone(),
                line: r.line,
                syllable: r.syllable.clone(),
                reps: Vec::new(),
            })
            .reps
            .push(PaaString { syllable: r.syllable.clone(), repetition: r.repetition, symbols: r.symbols.clone() });
    }
    groups.into_values().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlssReport {
    pub seed: u64,
    pub bandish: String,
    pub artist: String,
    pub concert: String,
    pub line: usize,
    pub syllable: String,
    pub repetitions: Vec<usize>,
    pub nlss: Vec<Vec<f64>>,
    /// Full Levenshtein distance between each pair.
    pub edit_distance: Vec<Vec<usize>>,
    pub mean_nlss: f64,
}

pub fn nlss_report(seed: u64, g: &SyllableGroup) -> Result<Option<(NlssMatrix, NlssReport)>> {
    if g.reps.len() < 2 {
        return Ok(None);
    }
    let m = pairwise_nlss(&g.reps)?;
    let n = m.len();
    let nlss = (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
    let edit_distance =
        g.reps.iter().map(|a| g.reps.iter().map(|b| levenshtein(&a.symbols, &b.symbols).distance).collect()).collect();
    let report = NlssReport {
        seed,
        bandish: g.bandish.clone(),
        artist: g.artist.clone(),
        concert: g.concert.clone(),
        line: g.line,
        syllable: g.syllable.clone(),
        repetitions: m.labels.clone(),
        nlss,
        edit_distance,
        mean_nlss: bandish_core::melody::mean_nlss(&m)?,
    };
    Ok(Some((m, report)))
}

pub fn nlss_file_name(g: &SyllableGroup) -> String {
    let safe =
        |s: &str| s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect::<String>();
    format!("{}_L{}_{}.json", safe(&g.concert), g.line, safe(&g.syllable))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterGroup {
    pub bandish: String,
    pub artist: String,
    pub concert: String,
    pub line: usize,
    pub syllable: String,
    #[serde(flatten)]
    pub clusters: VariationClusters,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub seed: u64,
    pub threshold: f64,
    pub groups: Vec<ClusterGroup>,
}

pub fn cluster_report(ds: &Dataset, rows: &[PaaRow], threshold: f64, seed: u64) -> Result<ClusterReport> {
    let mut groups = Vec::new();
    for g in syllable_groups(ds, rows) {
        if g.reps.len() < 2 {
            continue;
        }
        let m = pairwise_nlss(&g.reps)?;
        groups.push(ClusterGroup {
            bandish: g.bandish,
            artist: g.artist,
            concert: g.concert,
            line: g.line,
            syllable: g.syllable,
            clusters: cluster_variations(&m, threshold),
        });
    }
    Ok(ClusterReport { seed, threshold, groups })
}

/// Artist × syllable tables for one bandish line, from exported rows.
pub fn expression_tables(
    line: &CanonicalLine,
    bandish: &str,
    sel: &Selection,
    timing: &[TimingRow],
    paa: &[PaaRow],
    ds: &Dataset,
) -> Result<(ExpressionTable, ExpressionTable)> {
    let columns: Vec<String> = line.syllables.iter().map(|s| s.label.clone()).collect();
    let keep = |b: &str, artist: &str, l: usize| {
        b.eq_ignore_ascii_case(bandish) && l == line.line_index && sel.artist_ok(artist)
    };
    let devs: Vec<(String, TimingDeviation)> = timing
        .iter()
        .filter(|r| keep(&r.bandish, &r.artist, r.line))
        .map(|r| (r.artist.clone(), r.deviation()))
        .collect();
    let selected: Vec<PaaRow> = paa.iter().filter(|r| keep(&r.bandish, &r.artist, r.line)).cloned().collect();
    let mut matrices = Vec::new();
    for g in syllable_groups(ds, &selected) {
        if g.reps.len() >= 2 {
            matrices.push((g.artist.clone(), g.syllable.clone(), pairwise_nlss(&g.reps)?));
        }
    }
    Ok((timing_table(&devs, &columns), pitch_table(&matrices, &columns)))
}

pub fn write_table(path: &Path, seed: u64, table: &ExpressionTable) -> Result<()> {
    let mut rows = Vec::new();
    for (r, artist) in table.rows.iter().enumerate() {
        for (c, syllable) in table.columns.iter().enumerate() {
            let (value, n, single) = match table.get(r, c) {
                Some(cell) => (fmt_f64(cell.value), cell.n.to_string(), cell.single_sample.to_string()),
                None => (String::new(), "0".into(), String::new()),
            };
            rows.push(vec![artist.clone(), syllable.clone(), value, n, single]);
        }
    }
    io::write_rows(path, Some(seed), &["artist", "syllable", table.metric.name(), "n", "single_sample"], &rows)
}
