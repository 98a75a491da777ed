//! One function per CLI subcommand. Each returns the text to print.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use bandish_core::aggregate::boxplot_summary;
use bandish_core::annotation::validate_manifest;
use bandish_core::generate::{canonical_schedule, fit_artist_model, sample_schedule, synthesize, SamplingOptions};
use bandish_core::melody::PaaString;
use bandish_core::pitchtrack::{extract_f0, TrackerParams};
use bandish_core::raga::Tonic;
use bandish_core::PAA_PER_BEAT;
use serde::Serialize;

use crate::dataset::{self, load_dataset, performance_dirs, PerformanceMeta};
use crate::error::{CliError, Result};
use crate::io;
use crate::pipeline::{self, Selection};
use crate::svg;

pub const TIMING_CSV: &str = "timing_deviations.csv";
pub const TIMING_STATS_CSV: &str = "timing_stats.csv";
pub const PAA_CSV: &str = "paa_strings.csv";
pub const NLSS_DIR: &str = "nlss";
pub const CLUSTERS_JSON: &str = "clusters.json";

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub selection: Selection,
    pub per_beat: usize,
    pub nlss_threshold: f64,
    pub tempo: Option<f64>,
    pub tonic_hz: Option<f64>,
    pub tracker: TrackerParams,
    pub sample_rate: u32,
    pub jitter_sigma: f64,
    pub cluster_weighted: bool,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: PathBuf::from("data/synthetic"),
            out: PathBuf::from("out"),
            seed: 0,
            selection: Selection::default(),
            per_beat: PAA_PER_BEAT,
            nlss_threshold: 0.3,
            tempo: None,
            tonic_hz: None,
            tracker: TrackerParams::default(),
            sample_rate: 44_100,
            jitter_sigma: 0.0,
            cluster_weighted: false,
            svg: false,
        }
    }
}

impl RunConfig {
    pub fn check(&self) -> Result<()> {
        if !(1..=100).contains(&self.per_beat) {
            return Err(CliError::Config(format!("--paa-per-beat must lie in 1..=100, got {}", self.per_beat)));
        }
        if !(0.0..=1.0).contains(&self.nlss_threshold) {
            return Err(CliError::Config(format!("--nlss-threshold must lie in [0, 1], got {}", self.nlss_threshold)));
        }
        if let Some(t) = self.tempo {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("--tempo must be positive, got {t}")));
            }
        }
        if let Some(hz) = self.tonic_hz {
            Tonic::new(hz).map_err(|e| CliError::Config(e.to_string()))?;
        }
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return Err(CliError::Config(format!("--jitter-sigma must be non-negative, got {}", self.jitter_sigma)));
        }
        if self.sample_rate < 8000 {
            return Err(CliError::Config(format!("--sample-rate must be at least 8000, got {}", self.sample_rate)));
        }
        // the Nyquist limit is checked against each file's own rate
        self.tracker.check(192_000).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn validate(cfg: &RunConfig) -> Result<String> {
    let ds = load_dataset(&cfg.dataset)?;
    let report =
        validate_manifest(&ds.manifest, &ds.performances.iter().map(|p| p.annotation.clone()).collect::<Vec<_>>());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<12} {:<10} {:>8} {:>7}  {:<28} matra/min",
        "bandish", "raga", "tala", "concerts", "artists", "repetitions (L1, L2, ...)"
    );
    for e in &report.entries {
        let reps = e.repetitions_observed.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        let tempo = e.tempo_range.map_or("-".to_string(), |(lo, hi)| format!("{lo:.0}-{hi:.0}"));
        let _ = writeln!(
            out,
            "{:<16} {:<12} {:<10} {:>8} {:>7}  {:<28} {tempo}",
            e.name, e.raga, e.tala, e.concerts, e.artists, reps
        );
    }
    let problems: Vec<String> = report
        .entries
        .iter()
        .flat_map(|e| e.mismatches.iter().map(move |m| format!("{}: {m}", e.name)))
        .chain(report.unlisted.iter().map(|c| format!("concert {c} is not listed in the manifest")))
        .collect();
    if problems.is_empty() {
        let _ = writeln!(out, "{} performances, manifest consistent", ds.performances.len());
        Ok(out)
    } else {
        for p in &problems {
            let _ = writeln!(out, "mismatch: {p}");
        }
        Err(CliError::Validation(out.trim_end().to_string()))
    }
}

pub fn extract_pitch(cfg: &RunConfig) -> Result<String> {
    let dirs = performance_dirs(&cfg.dataset)?;
    if dirs.is_empty() {
        return Err(CliError::Validation(format!(
            "no performances found under {}",
            cfg.dataset.join("performances").display()
        )));
    }
    let mut out = String::new();
    for dir in dirs {
        let meta: PerformanceMeta = io::read_toml(&dir.join(dataset::META))?;
        if !cfg.selection.artist_ok(&meta.artist_id) || !cfg.selection.bandish_ok(&meta.bandish) {
            continue;
        }
        let (pitch, audio) = (dir.join(dataset::PITCH), dir.join(dataset::AUDIO));
        if pitch.is_file() {
            let _ = writeln!(out, "{}: {} present, skipped", meta.concert_id, dataset::PITCH);
        } else if audio.is_file() {
            let (samples, sr) = io::read_wav(&audio)?;
            let contour = extract_f0(&samples, sr, &cfg.tracker).map_err(CliError::at(&audio))?;
            io::write_pitch(&pitch, &contour)?;
            let voiced = contour.frames.iter().filter(|&&f| f > 0.0).count();
            let _ = writeln!(out, "{}: {} frames ({voiced} voiced) written", meta.concert_id, contour.frames.len());
        } else {
            let _ = writeln!(out, "{}: no audio, skipped", meta.concert_id);
        }
    }
    Ok(out)
}

pub fn timing(cfg: &RunConfig) -> Result<String> {
    let ds = load_dataset(&cfg.dataset)?;
    let rows = pipeline::timing_rows(&ds, &cfg.selection)?;
    let stats = pipeline::timing_stats(&ds, &rows);
    pipeline::write_timing(&cfg.out.join(TIMING_CSV), cfg.seed, &rows)?;
    pipeline::write_timing_stats(&cfg.out.join(TIMING_STATS_CSV), cfg.seed, &stats)?;
    Ok(format!(
        "{} timing deviations, {} syllable summaries written to {}\n",
        rows.len(),
        stats.len(),
        cfg.out.display()
    ))
}

pub fn pitch(cfg: &RunConfig) -> Result<String> {
    let ds = load_dataset(&cfg.dataset)?;
    let rows = pipeline::paa_rows(&ds, &cfg.selection, cfg.per_beat, &cfg.tracker)?;
    pipeline::write_paa(&cfg.out.join(PAA_CSV), cfg.seed, &rows)?;
    let nlss_dir = cfg.out.join(NLSS_DIR);
    if nlss_dir.is_dir() {
        fs::remove_dir_all(&nlss_dir).map_err(|e| CliError::io(&nlss_dir, e))?;
    }
    let mut matrices = 0;
    for g in pipeline::syllable_groups(&ds, &rows) {
        if let Some((_, report)) = pipeline::nlss_report(cfg.seed, &g)? {
            io::write_json(&nlss_dir.join(pipeline::nlss_file_name(&g)), &report)?;
            matrices += 1;
        }
    }
    Ok(format!("{} PAA strings and {matrices} NLSS matrices written to {}\n", rows.len(), cfg.out.display()))
}

fn selected_paa(cfg: &RunConfig) -> Result<Vec<pipeline::PaaRow>> {
    let path = cfg.out.join(PAA_CSV);
    if !path.is_file() {
        return Err(CliError::io(
            &path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "run the pitch command first"),
        ));
    }
    let sel = &cfg.selection;
    Ok(pipeline::read_paa(&path)?
        .into_iter()
        .filter(|r| sel.bandish_ok(&r.bandish) && sel.artist_ok(&r.artist) && sel.line_ok(r.line))
        .collect())
}

fn selected_timing(cfg: &RunConfig) -> Result<Vec<pipeline::TimingRow>> {
    let path = cfg.out.join(TIMING_CSV);
    if !path.is_file() {
        return Err(CliError::io(
            &path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "run the timing command first"),
        ));
    }
    let sel = &cfg.selection;
    Ok(pipeline::read_timing(&path)?
        .into_iter()
        .filter(|r| sel.bandish_ok(&r.bandish) && sel.artist_ok(&r.artist) && sel.line_ok(r.line))
        .collect())
}

pub fn cluster(cfg: &RunConfig) -> Result<String> {
    let ds = load_dataset(&cfg.dataset)?;
    let rows = selected_paa(cfg)?;
    let report = pipeline::cluster_report(&ds, &rows, cfg.nlss_threshold, cfg.seed)?;
    io::write_json(&cfg.out.join(CLUSTERS_JSON), &report)?;
    let total: usize = report.groups.iter().map(|g| g.clusters.cluster_count).sum();
    Ok(format!(
        "{} syllable groups, {total} clusters at threshold {} written to {}\n",
        report.groups.len(),
        cfg.nlss_threshold,
        cfg.out.join(CLUSTERS_JSON).display()
    ))
}

#[derive(Serialize)]
struct BoxplotFile<'a> {
    seed: u64,
    bandish: &'a str,
    line: usize,
    #[serde(flatten)]
    summary: &'a bandish_core::aggregate::DistributionSummary,
}

pub fn aggregate(cfg: &RunConfig) -> Result<String> {
    let ds = load_dataset(&cfg.dataset)?;
    let (b, line) = cfg.selection.focus(&ds)?;
    let timing = selected_timing(cfg)?;
    let paa = selected_paa(cfg)?;
    let (t, p) = pipeline::expression_tables(line, &b.entry.name, &cfg.selection, &timing, &paa, &ds)?;
    let mut out = String::new();
    for (table, tag) in [(&t, "timing"), (&p, "pitch")] {
        pipeline::write_table(&cfg.out.join(format!("expression_table_{tag}.csv")), cfg.seed, table)?;
        let summary = boxplot_summary(table);
        let file = BoxplotFile { seed: cfg.seed, bandish: &b.entry.name, line: line.line_index, summary: &summary };
        io::write_json(&cfg.out.join(format!("boxplot_{tag}.json")), &file)?;
        if cfg.svg {
            io::write_text(&cfg.out.join(format!("heatmap_{tag}.svg")), &svg::heatmap(table))?;
            io::write_text(&cfg.out.join(format!("boxplot_{tag}.svg")), &svg::boxplot(&summary))?;
        }
        let _ = writeln!(out, "{tag}: {} artists x {} syllables", table.rows.len(), table.columns.len());
        for c in &summary.columns {
            let _ = writeln!(out, "  {:<6} median {:.3}  mean {:.3}  (n={})", c.syllable, c.median, c.mean, c.n);
        }
    }
    Ok(out)
}

pub fn generate(cfg: &RunConfig) -> Result<String> {
    let ds = load_dataset(&cfg.dataset)?;
    let (b, line) = cfg.selection.focus(&ds)?;
    let timing = selected_timing(cfg)?;
    let paa = selected_paa(cfg)?;
    let artist = match &cfg.selection.artist {
        Some(a) => a.clone(),
        None => timing
            .iter()
            .filter(|r| r.bandish == b.entry.name && r.line == line.line_index)
            .map(|r| r.artist.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Validation("no timing rows for the selected line".into()))?,
    };
    let perfs: Vec<_> = ds
        .performances
        .iter()
        .filter(|p| p.annotation.artist_id == artist && p.annotation.bandish_name == b.entry.name)
        .collect();
    let first =
        perfs.first().ok_or_else(|| CliError::Config(format!("no performances by {artist:?} of {}", b.entry.name)))?;
    let tempo_range = perfs
        .iter()
        .map(|p| p.annotation.tempo_range)
        .reduce(|a, c| (a.0.min(c.0), a.1.max(c.1)))
        .expect("at least one performance");

    let same = |r_artist: &str, r_bandish: &str, r_line: usize| {
        r_artist == artist && r_bandish == b.entry.name && r_line == line.line_index
    };
    let devs: Vec<_> = timing.iter().filter(|r| same(&r.artist, &r.bandish, r.line)).map(|r| r.deviation()).collect();
    let strings: Vec<PaaString> = paa
        .iter()
        .filter(|r| same(&r.artist, &r.bandish, r.line))
        .map(|r| PaaString { syllable: r.syllable.clone(), repetition: r.repetition, symbols: r.symbols.clone() })
        .collect();
    let mut model = fit_artist_model(&artist, line.line_index, Some(tempo_range), &devs, &strings);
    if cfg.cluster_weighted {
        model.weight_by_clusters(cfg.nlss_threshold)?;
    }
    let tempo = cfg.tempo.unwrap_or(0.5 * (tempo_range.0 + tempo_range.1));
    let tonic = match cfg.tonic_hz {
        Some(hz) => Tonic::new(hz)?,
        None => first.annotation.tonic,
    };
    let options =
        SamplingOptions { jitter_sigma: cfg.jitter_sigma, per_beat: cfg.per_beat, ..SamplingOptions::default() };
    let schedule = sample_schedule(&model, line, b.score.beats_per_cycle, tempo, tonic, cfg.seed, &options)?;
    let audio = synthesize(&schedule, &b.scale, cfg.sample_rate)?;
    let reference = canonical_schedule(line, b.score.beats_per_cycle, tempo, tonic, cfg.per_beat)?;
    let reference_audio = synthesize(&reference, &b.scale, cfg.sample_rate)?;

    let safe: String =
        artist.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    io::write_json(&cfg.out.join(format!("model_{safe}.json")), &model)?;
    io::write_json(&cfg.out.join("schedule.json"), &schedule)?;
    io::write_json(&cfg.out.join("canonical_schedule.json"), &reference)?;
    io::write_wav(&cfg.out.join("generated.wav"), &audio)?;
    io::write_wav(&cfg.out.join("canonical.wav"), &reference_audio)?;
    let mut out = format!(
        "{artist}: {} syllables at {tempo:.1} matra/min, tonic {:.2} Hz, seed {}\n",
        schedule.events.len(),
        tonic.hz(),
        cfg.seed
    );
    for f in schedule.flags.iter().chain(&audio.flags) {
        let _ = writeln!(out, "  note: {f}");
    }
    Ok(out)
}

/// timing, pitch, cluster and aggregate in sequence.
pub fn analyze(cfg: &RunConfig) -> Result<String> {
    let mut out = timing(cfg)?;
    out.push_str(&pitch(cfg)?);
    out.push_str(&cluster(cfg)?);
    out.push_str(&aggregate(cfg)?);
    Ok(out)
}

pub fn synth_dataset(root: &Path, seed: u64) -> Result<String> {
    crate::synth::write_dataset(root, seed)?;
    Ok(format!("synthetic dataset written to {} (seed {seed})\n", root.display()))
}
