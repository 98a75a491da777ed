//! Reading and writing the dataset's text, CSV and WAV files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use bandish_core::annotation::{BeatKind, BeatMark, Silence};
use bandish_core::generate::RenderedAudio;
use bandish_core::pitchtrack::PitchContour;
use bandish_core::HOP_SECONDS;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    toml::from_str(&read_text(path)?).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| CliError::format(path, e.to_string()))?;
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::format(path, e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Shortest text that parses back to `x` exactly, with at least three
/// fractional digits.
pub fn fmt_f64(x: f64) -> String {
    let mut s = x.to_string();
    match s.find('.') {
        None if x.is_finite() => s.push_str(".000"),
        Some(dot) => {
            for _ in s.len() - dot - 1..3 {
                s.push('0');
            }
        }
        None => {}
    }
    s
}

/// Rows of a CSV file with their 1-based line numbers. Lines starting with
/// `#` are comments.
pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<(u64, T)>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|source| CliError::Csv { path: path.into(), source })?.clone();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| CliError::Csv { path: path.into(), source })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record.deserialize(Some(&headers)).map_err(|source| CliError::Csv { path: path.into(), source })?;
        out.push((line, row));
    }
    Ok(out)
}

/// Writes a CSV file, preceded by a `# seed=` comment when a seed is given.
pub fn write_rows(path: &Path, seed: Option<u64>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    if let Some(seed) = seed {
        writeln!(out, "# seed={seed}").map_err(|e| CliError::io(path, e))?;
    }
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |source| CliError::Csv { path: path.into(), source };
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(row).map_err(csv_err)?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Deserialize)]
struct BeatRow {
    time_s: f64,
    kind: String,
}

pub fn read_beats(path: &Path) -> Result<Vec<BeatMark>> {
    read_rows::<BeatRow>(path)?
        .into_iter()
        .map(|(line, r)| {
            let kind = match r.kind.to_ascii_lowercase().as_str() {
                "sam" | "x" => BeatKind::Sam,
                "khali" | "o" => BeatKind::Khali,
                other => return Err(CliError::format(path, format!("line {line}: unknown beat kind {other:?}"))),
            };
            Ok(BeatMark { time: r.time_s, kind })
        })
        .collect()
}

pub fn write_beats(path: &Path, marks: &[BeatMark]) -> Result<()> {
    let rows: Vec<Vec<String>> = marks
        .iter()
        .map(|m| {
            let kind = match m.kind {
                BeatKind::Sam => "sam",
                BeatKind::Khali => "khali",
            };
            vec![fmt_f64(m.time), kind.to_string()]
        })
        .collect();
    write_rows(path, None, &["time_s", "kind"], &rows)
}

#[derive(Clone, Debug, Deserialize)]
pub struct OnsetRow {
    pub line: usize,
    pub repetition: usize,
    pub syllable_label: String,
    pub onset_s: f64,
}

pub fn read_onsets(path: &Path) -> Result<Vec<(u64, OnsetRow)>> {
    read_rows(path)
}

pub fn write_onsets(path: &Path, rows: &[OnsetRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.line.to_string(), r.repetition.to_string(), r.syllable_label.clone(), fmt_f64(r.onset_s)])
        .collect();
    write_rows(path, None, &["line", "repetition", "syllable_label", "onset_s"], &rows)
}

#[derive(Debug, Deserialize)]
struct SilenceRow {
    start_s: f64,
    end_s: f64,
}

pub fn read_silences(path: &Path) -> Result<Vec<Silence>> {
    Ok(read_rows::<SilenceRow>(path)?.into_iter().map(|(_, r)| Silence { start: r.start_s, end: r.end_s }).collect())
}

pub fn write_silences(path: &Path, silences: &[Silence]) -> Result<()> {
    let rows: Vec<Vec<String>> = silences.iter().map(|s| vec![fmt_f64(s.start), fmt_f64(s.end)]).collect();
    write_rows(path, None, &["start_s", "end_s"], &rows)
}

#[derive(Debug, Deserialize)]
struct PitchRow {
    time_s: f64,
    f0_hz: f64,
}

/// Frame times must step by the analysis hop to within a microsecond.
pub fn read_pitch(path: &Path) -> Result<PitchContour> {
    let rows = read_rows::<PitchRow>(path)?;
    let Some((_, first)) = rows.first() else {
        return Err(CliError::format(path, "pitch file has no frames"));
    };
    let start_time = first.time_s;
    let mut frames = Vec::with_capacity(rows.len());
    for (i, (line, r)) in rows.iter().enumerate() {
        let expected = start_time + i as f64 * HOP_SECONDS;
        if (r.time_s - expected).abs() > 1e-6 {
            return Err(CliError::format(
                path,
                format!(
                    "line {line}: frame at {} s breaks the {HOP_SECONDS} s hop (expected {expected:.3} s)",
                    r.time_s
                ),
            ));
        }
        if !r.f0_hz.is_finite() || r.f0_hz < 0.0 {
            return Err(CliError::format(path, format!("line {line}: invalid f0 {}", r.f0_hz)));
        }
        frames.push(r.f0_hz);
    }
    Ok(PitchContour { hop: HOP_SECONDS, start_time, frames })
}

pub fn write_pitch(path: &Path, contour: &PitchContour) -> Result<()> {
    let rows: Vec<Vec<String>> = contour
        .frames
        .iter()
        .enumerate()
        .map(|(i, f)| vec![format!("{:.3}", contour.time_of(i)), format!("{f:.3}")])
        .collect();
    write_rows(path, None, &["time_s", "f0_hz"], &rows)
}

/// Mono samples in [-1, 1]; multi-channel files are averaged.
pub fn read_wav(path: &Path) -> Result<(Vec<f32>, u32)> {
    let wav_err = |source| CliError::Wav { path: path.into(), source };
    let mut reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    let interleaved: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => {
            reader.samples::<f32>().collect::<std::result::Result<_, _>>().map_err(wav_err)?
        }
        hound::SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(wav_err)?
        }
    };
    let channels = usize::from(spec.channels.max(1));
    let mono = interleaved.chunks(channels).map(|c| c.iter().sum::<f32>() / channels as f32).collect();
    Ok((mono, spec.sample_rate))
}

pub fn write_wav(path: &Path, audio: &RenderedAudio) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let wav_err = |source| CliError::Wav { path: path.into(), source };
    let mut writer = hound::WavWriter::create(path, spec).map_err(wav_err)?;
    for &s in &audio.samples {
        writer.write_sample(s).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}
