//! Deterministic synthetic mini-dataset: three artists singing the Ja Ja Re
//! mukhda ten times each, with strong timing and pitch variation on the
//! opening syllables and almost none near the cycle boundary.

use std::path::Path;

use bandish_core::annotation::{BeatMark, Silence};
use bandish_core::generate::canonical_symbols;
use bandish_core::notation::{parse_notation, CanonicalSyllable};
use bandish_core::pitchtrack::PitchContour;
use bandish_core::raga::{cents_to_hz, RagaScale, Tonic};
use bandish_core::rhythm::build_beat_grid;
use bandish_core::{SwarSymbol, HOP_SECONDS, PAA_PER_BEAT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{self, BandishFileEntry, ManifestFile, PerformanceMeta};
use crate::error::{CliError, Result};
use crate::io::{self, OnsetRow};

pub const NOTATION: &str = include_str!("../../../data/notation/ja_ja_re.csv");
pub const REPETITIONS: usize = 10;

struct Style {
    artist: &'static str,
    concert: &'static str,
    tonic_hz: f64,
    tempo: f64,
    /// Timing sd in beats for the opening syllables, the middle and the
    /// two syllables that close the cycle.
    timing_sd: [f64; 3],
    /// Chance that a syllable's pitch shape departs from the notation.
    vary: [f64; 3],
}

const STYLES: [Style; 3] = [
    Style {
        artist: "artist_a",
        concert: "c01",
        tonic_hz: 207.65,
        tempo: 146.0,
        timing_sd: [0.24, 0.07, 0.015],
        vary: [0.75, 0.2, 0.0],
    },
    Style {
        artist: "artist_b",
        concert: "c02",
        tonic_hz: 220.0,
        tempo: 168.0,
        timing_sd: [0.30, 0.09, 0.02],
        vary: [0.85, 0.25, 0.0],
    },
    Style {
        artist: "artist_c",
        concert: "c03",
        tonic_hz: 233.08,
        tempo: 190.0,
        timing_sd: [0.18, 0.05, 0.01],
        vary: [0.6, 0.15, 0.0],
    },
];

/// 0: opening group, 1: middle, 2: cycle boundary.
fn group_of(label: &str) -> usize {
    match label {
        "Jaa1" | "Jaa2" | "Re" => 0,
        "Pa" | "Ne" => 2,
        _ => 1,
    }
}

fn canonical_string(s: &CanonicalSyllable) -> Vec<SwarSymbol> {
    canonical_symbols(&s.swars, s.allotted_beats, PAA_PER_BEAT).expect("notated swars fit their beats")
}

/// Replaces a prefix or suffix of the string with a neighbouring raga swar.
fn vary(base: &[SwarSymbol], scale: &RagaScale, rng: &mut ChaCha8Rng) -> Vec<SwarSymbol> {
    let grid = scale.grid();
    let mut out = base.to_vec();
    let at_start = rng.gen_bool(0.5);
    let anchor = if at_start { base[0] } else { base[base.len() - 1] };
    let idx = grid.iter().position(|&(s, _)| s == anchor).expect("notated swars are in the raga");
    let up = rng.gen_bool(0.5) && idx + 1 < grid.len() || idx == 0;
    let neighbour = grid[if up { idx + 1 } else { idx - 1 }].0;
    let k = rng.gen_range(2..=base.len() / 2);
    let range = if at_start { 0..k } else { base.len() - k..base.len() };
    out[range].fill(neighbour);
    out
}

struct Performance {
    marks: Vec<BeatMark>,
    onsets: Vec<OnsetRow>,
    silences: Vec<Silence>,
    contour: PitchContour,
}

fn perform(style: &Style, seed: u64) -> Performance {
    let score = parse_notation(NOTATION).expect("bundled notation parses");
    let scale = RagaScale::bhimpalasi();
    let tonic = Tonic::new(style.tonic_hz).expect("positive tonic");
    let line = &score.lines[0];
    let bpc = score.beats_per_cycle;
    let half = bpc / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ms = |t: f64| (t * 1000.0).round() / 1000.0;

    // one lead-in cycle, then each repetition in its own cycle followed by
    // a cycle of rest, then a closing cycle
    let cycles = 2 * REPETITIONS + 2;
    let mut marks = Vec::with_capacity(2 * cycles + 1);
    let mut t = 1.0;
    for h in 0..=2 * cycles {
        marks.push(if h % 2 == 0 { BeatMark::sam(ms(t)) } else { BeatMark::khali(ms(t)) });
        let tempo = style.tempo * (1.0 + 0.02 * (std::f64::consts::TAU * h as f64 / 12.0).sin());
        t += half as f64 * 60.0 / tempo;
    }
    let grid = build_beat_grid(&marks, bpc).expect("generated marks alternate");
    let start_beat = line.syllables[0].tala_beat - line.syllables[0].beat_index;

    let jitter: Vec<Normal<f64>> = style.timing_sd.iter().map(|&sd| Normal::new(0.0, sd).unwrap()).collect();
    let mut onsets = Vec::new();
    let mut silences = Vec::new();
    // (onset, end, string) of every sung syllable
    let mut sung: Vec<(f64, f64, Vec<SwarSymbol>)> = Vec::new();
    for rep in 0..REPETITIONS {
        let first_beat = (1 + 2 * rep) * bpc + start_beat;
        let mut times = Vec::with_capacity(line.syllables.len());
        for s in &line.syllables {
            let b = first_beat + s.beat_index;
            let g = group_of(&s.label);
            let dev = jitter[g].sample(&mut rng).clamp(-0.45, 0.45);
            times.push(ms(grid.time_at(b, s.sub_beat) + dev * grid.beats[b].interval));
        }
        let last = line.syllables.last().expect("mukhda has syllables");
        let last_beat = first_beat + last.beat_index + last.allotted_beats;
        let silence_start =
            ms(grid.time_at(last_beat, 0.0) + rng.gen_range(-0.05..0.05) * grid.beats[last_beat].interval);
        let next_line = (3 + 2 * rep) * bpc + start_beat;
        let silence_end =
            ms(grid.time_at(next_line.min(grid.beats.len() - 1), 0.0) - 0.5 * grid.beats[last_beat].interval);
        silences.push(Silence { start: silence_start, end: silence_end });
        for (i, s) in line.syllables.iter().enumerate() {
            onsets.push(OnsetRow { line: 1, repetition: rep + 1, syllable_label: s.label.clone(), onset_s: times[i] });
            let end = times.get(i + 1).copied().unwrap_or(silence_start);
            let base = canonical_string(s);
            let string =
                if rng.gen_bool(style.vary[group_of(&s.label)]) { vary(&base, &scale, &mut rng) } else { base };
            sung.push((times[i], end, string));
        }
    }

    let end_time = marks[marks.len() - 1].time;
    let frames_len = (end_time / HOP_SECONDS).floor() as usize + 1;
    let noise = Normal::new(0.0, 4.0).unwrap();
    let mut frames = vec![0.0; frames_len];
    let mut k = 0;
    for (i, f) in frames.iter_mut().enumerate() {
        let t = i as f64 * HOP_SECONDS;
        while k < sung.len() && sung[k].1 <= t {
            k += 1;
        }
        let Some((onset, end, string)) = sung.get(k) else { break };
        if t < *onset {
            continue;
        }
        let pos = ((t - onset) / (end - onset) * string.len() as f64) as usize;
        let cents = scale.cents_of(string[pos.min(string.len() - 1)]).expect("raga swar")
            + 12.0 * (std::f64::consts::TAU * 5.5 * t).sin()
            + noise.sample(&mut rng);
        // a consonant often leaves the first frame of a syllable unvoiced
        let consonant = t - onset < HOP_SECONDS && rng.gen_bool(0.5);
        *f = if consonant { 0.0 } else { (cents_to_hz(cents, tonic) * 1000.0).round() / 1000.0 };
    }
    Performance { marks, onsets, silences, contour: PitchContour { hop: HOP_SECONDS, start_time: 0.0, frames } }
}

/// Writes the dataset under `root`. Same seed, same bytes.
pub fn write_dataset(root: &Path, seed: u64) -> Result<()> {
    let score = parse_notation(NOTATION).map_err(|e| CliError::Config(e.to_string()))?;
    io::write_text(&root.join("notation/ja_ja_re.csv"), NOTATION)?;
    let mut concerts = Vec::new();
    for (i, style) in STYLES.iter().enumerate() {
        let p = perform(style, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
        let dir = root.join("performances").join(style.concert);
        let meta = PerformanceMeta {
            concert_id: style.concert.into(),
            artist_id: style.artist.into(),
            bandish: score.bandish_name.clone(),
            tonic_hz: style.tonic_hz,
        };
        io::write_toml(&dir.join(dataset::META), &meta)?;
        io::write_beats(&dir.join(dataset::BEATS), &p.marks)?;
        io::write_onsets(&dir.join(dataset::ONSETS), &p.onsets)?;
        io::write_silences(&dir.join(dataset::SILENCES), &p.silences)?;
        io::write_pitch(&dir.join(dataset::PITCH), &p.contour)?;
        concerts.push(style.concert.to_string());
    }
    let manifest = ManifestFile {
        bandish: vec![BandishFileEntry {
            entry: bandish_core::annotation::ManifestEntry {
                name: score.bandish_name.clone(),
                raga: score.raga_name.clone(),
                tala: score.tala_name.clone(),
                concerts,
                repetitions: vec![STYLES.len() * REPETITIONS, 0, 0, 0],
            },
            notation: "notation/ja_ja_re.csv".into(),
            raga_file: None,
        }],
    };
    io::write_toml(&root.join(dataset::MANIFEST), &manifest)
}
