//! Resampling measured variation into new renditions, and sine-tone
//! synthesis of a schedule.
//!
//! An [`ArtistModel`] keeps, per syllable, the multiset of observed timing
//! deviations and the pool of observed PAA strings. Sampling draws one of
//! each per syllable (bootstrap, optionally with Gaussian jitter on the
//! deviation), independently of each other.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::melody::{cluster_variations, pairwise_nlss, PaaString};
use crate::notation::{front_loaded_sizes, CanonicalLine, CanonicalScore};
use crate::raga::{cents_to_hz, RagaScale, Tonic};
use crate::rhythm::TimingDeviation;
use crate::{Error, Result, SwarSymbol, HOP_SECONDS, PAA_PER_BEAT};

/// Peak amplitude of rendered tones.
pub const AMPLITUDE: f64 = 0.8;
/// Raised-cosine fade at each syllable edge, in seconds.
pub const FADE_SECONDS: f64 = 0.005;

/// Swar strings serialize as their concatenated text form.
mod swar_text {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[SwarSymbol], s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&crate::format_swars(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> core::result::Result<Vec<SwarSymbol>, D::Error> {
        let text = String::deserialize(d)?;
        crate::parse_swar_string(&text).map_err(D::Error::custom)
    }
}

mod swar_lists {
    use super::*;
    use serde::de::Error as _;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<SwarSymbol>], s: S) -> core::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for item in v {
            seq.serialize_element(&crate::format_swars(item))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> core::result::Result<Vec<Vec<SwarSymbol>>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|t| crate::parse_swar_string(t).map_err(D::Error::custom)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SyllableModel {
    pub deviations: Vec<f64>,
    #[serde(with = "swar_lists")]
    pub strings: Vec<Vec<SwarSymbol>>,
    /// Relative draw weight of each string; uniform when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtistModel {
    pub artist: String,
    pub line_index: usize,
    /// Tempo range of the performances the model was fitted on, matra/min.
    pub tempo_range: Option<(f64, f64)>,
    pub syllables: BTreeMap<String, SyllableModel>,
}

pub fn fit_artist_model(
    artist: &str,
    line_index: usize,
    tempo_range: Option<(f64, f64)>,
    deviations: &[TimingDeviation],
    strings: &[PaaString],
) -> ArtistModel {
    let mut syllables: BTreeMap<String, SyllableModel> = BTreeMap::new();
    for d in deviations {
        syllables.entry(d.syllable.clone()).or_default().deviations.push(d.deviation);
    }
    for s in strings {
        syllables.entry(s.syllable.clone()).or_default().strings.push(s.symbols.clone());
    }
    ArtistModel { artist: artist.into(), line_index, tempo_range, syllables }
}

impl ArtistModel {
    /// Weights each pooled string by the inverse size of its variation
    /// cluster, so that every cluster is drawn equally often.
    pub fn weight_by_clusters(&mut self, threshold: f64) -> Result<()> {
        for (label, model) in &mut self.syllables {
            if model.strings.len() < 2 {
                model.weights.clear();
                continue;
            }
            let reps: Vec<PaaString> = model
                .strings
                .iter()
                .enumerate()
                .map(|(i, s)| PaaString { syllable: label.clone(), repetition: i, symbols: s.clone() })
                .collect();
            let clusters = cluster_variations(&pairwise_nlss(&reps)?, threshold);
            let mut sizes = alloc::vec![0usize; clusters.cluster_count];
            for &(_, c) in &clusters.assignments {
                sizes[c] += 1;
            }
            model.weights = clusters.assignments.iter().map(|&(_, c)| 1.0 / sizes[c] as f64).collect();
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingOptions {
    /// Standard deviation of Gaussian noise added to drawn deviations, in beats.
    pub jitter_sigma: f64,
    pub max_retries: usize,
    pub per_beat: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions { jitter_sigma: 0.0, max_retries: 8, per_beat: PAA_PER_BEAT }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub syllable: String,
    pub onset: f64,
    pub deviation: f64,
    pub allotted_beats: usize,
    #[serde(with = "swar_text")]
    pub symbols: Vec<SwarSymbol>,
    /// Canonical values were used because the model had nothing to draw from.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressiveSchedule {
    pub line_index: usize,
    pub tempo: f64,
    pub tonic: Tonic,
    pub beat_interval: f64,
    /// Time of the first cell of the line: one beat of lead-in, or 0 for a
    /// line without syllables.
    pub line_start: f64,
    /// One cycle, plus the lead-in and a one-beat tail when anything is sung.
    pub duration: f64,
    pub seed: Option<u64>,
    pub events: Vec<ScheduleEvent>,
    pub flags: Vec<String>,
}

fn schedule_frame(
    line: &CanonicalLine,
    beats_per_cycle: usize,
    tempo: f64,
    tonic: Tonic,
    seed: Option<u64>,
) -> Result<ExpressiveSchedule> {
    if !(tempo.is_finite() && tempo > 0.0) {
        return Err(Error::Config(format!("tempo must be positive, got {tempo}")));
    }
    let beat = 60.0 / tempo;
    let pad = if line.syllables.is_empty() { 0 } else { 1 };
    Ok(ExpressiveSchedule {
        line_index: line.line_index,
        tempo,
        tonic,
        beat_interval: beat,
        line_start: beat * pad as f64,
        duration: beat * (beats_per_cycle + 2 * pad) as f64,
        seed,
        events: Vec::new(),
        flags: Vec::new(),
    })
}

/// Swars of a syllable spread over its `allotted · per_beat` intervals.
pub fn canonical_symbols(swars: &[SwarSymbol], allotted_beats: usize, per_beat: usize) -> Result<Vec<SwarSymbol>> {
    if swars.is_empty() {
        return Err(Error::Domain("syllable has no swars".into()));
    }
    let k = allotted_beats * per_beat;
    if k < swars.len() {
        return Err(Error::Domain(format!("{} swars do not fit in {k} intervals", swars.len())));
    }
    Ok(swars.iter().zip(front_loaded_sizes(k, swars.len())).flat_map(|(&s, n)| core::iter::repeat_n(s, n)).collect())
}

/// Schedule with every syllable on its canonical instant and canonical swars.
pub fn canonical_schedule(
    line: &CanonicalLine,
    beats_per_cycle: usize,
    tempo: f64,
    tonic: Tonic,
    per_beat: usize,
) -> Result<ExpressiveSchedule> {
    let mut schedule = schedule_frame(line, beats_per_cycle, tempo, tonic, None)?;
    for s in &line.syllables {
        schedule.events.push(ScheduleEvent {
            syllable: s.label.clone(),
            onset: schedule.line_start + s.position() * schedule.beat_interval,
            deviation: 0.0,
            allotted_beats: s.allotted_beats,
            symbols: canonical_symbols(&s.swars, s.allotted_beats, per_beat)?,
            fallback: false,
        });
    }
    Ok(schedule)
}

struct Draws(ChaCha8Rng);

impl Draws {
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform index in `0..n` by rejection, free of modulo bias.
    fn index(&mut self, n: usize) -> usize {
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.0.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    fn weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut u = self.unit() * total;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                return i;
            }
            u -= w;
        }
        weights.len() - 1
    }

    fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit();
        let u2 = self.unit();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2)
    }
}

/// Draws a new rendition of `line` from the model. Fully determined by
/// (model, line, tempo, tonic, seed, options).
pub fn sample_schedule(
    model: &ArtistModel,
    line: &CanonicalLine,
    beats_per_cycle: usize,
    tempo: f64,
    tonic: Tonic,
    seed: u64,
    options: &SamplingOptions,
) -> Result<ExpressiveSchedule> {
    if let Some((lo, hi)) = model.tempo_range {
        if tempo < lo || tempo > hi {
            return Err(Error::Config(format!("tempo {tempo} matra/min is outside the fitted range {lo:.1}..{hi:.1}")));
        }
    }
    let mut schedule = schedule_frame(line, beats_per_cycle, tempo, tonic, Some(seed))?;
    let beat = schedule.beat_interval;
    let mut rng = Draws(ChaCha8Rng::seed_from_u64(seed));
    let empty = SyllableModel::default();
    let mut previous: Option<f64> = None;

    for s in &line.syllables {
        let m = model.syllables.get(&s.label).unwrap_or(&empty);
        let canonical = schedule.line_start + s.position() * beat;
        let mut fallback = false;

        let draw = |rng: &mut Draws| -> f64 {
            if m.deviations.is_empty() {
                return 0.0;
            }
            let d = m.deviations[rng.index(m.deviations.len())];
            if options.jitter_sigma > 0.0 {
                d + options.jitter_sigma * rng.normal()
            } else {
                d
            }
        };
        if m.deviations.is_empty() {
            fallback = true;
            schedule.flags.push(format!("{}: no timing observations, canonical onset used", s.label));
        }
        let mut deviation = draw(&mut rng);
        let mut onset = canonical + deviation * beat;
        if let Some(prev) = previous {
            let mut tries = 0;
            while onset <= prev && tries < options.max_retries {
                deviation = draw(&mut rng);
                onset = canonical + deviation * beat;
                tries += 1;
            }
            if onset <= prev {
                onset = prev + HOP_SECONDS;
                deviation = (onset - canonical) / beat;
                schedule.flags.push(format!("{}: onset clamped after {tries} resamples", s.label));
            }
        }
        if onset < 0.0 {
            onset = 0.0;
            deviation = -canonical / beat;
            schedule.flags.push(format!("{}: onset clamped to the start of the render", s.label));
        }
        previous = Some(onset);

        let expected = s.allotted_beats * options.per_beat;
        let symbols = if m.strings.is_empty() {
            fallback = true;
            schedule.flags.push(format!("{}: no pitch observations, canonical swars used", s.label));
            canonical_symbols(&s.swars, s.allotted_beats, options.per_beat)?
        } else {
            let i =
                if m.weights.len() == m.strings.len() { rng.weighted(&m.weights) } else { rng.index(m.strings.len()) };
            let chosen = &m.strings[i];
            if chosen.len() != expected {
                return Err(Error::Contract(format!(
                    "{}: pooled string has {} symbols, expected {expected}",
                    s.label,
                    chosen.len()
                )));
            }
            chosen.clone()
        };

        schedule.events.push(ScheduleEvent {
            syllable: s.label.clone(),
            onset,
            deviation,
            allotted_beats: s.allotted_beats,
            symbols,
            fallback,
        });
    }
    Ok(schedule)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderedAudio {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
    pub flags: Vec<String>,
}

/// Renders each event as a phase-continuous sine that follows its swar
/// string, one symbol per `beat / per_beat`, with raised-cosine fades at
/// the syllable edges and silence between events.
pub fn synthesize(schedule: &ExpressiveSchedule, scale: &RagaScale, sample_rate: u32) -> Result<RenderedAudio> {
    if sample_rate < 8000 {
        return Err(Error::Config(format!("sample rate {sample_rate} Hz is below 8000 Hz")));
    }
    let sr = f64::from(sample_rate);
    let total = libm::round(schedule.duration * sr) as usize;
    let mut samples = alloc::vec![0.0f32; total];
    let mut flags = Vec::new();
    let fade = (FADE_SECONDS * sr).max(1.0);

    for (k, e) in schedule.events.iter().enumerate() {
        if e.symbols.is_empty() {
            return Err(Error::Domain(format!("event {} has no symbols", e.syllable)));
        }
        let span = e.allotted_beats as f64 * schedule.beat_interval;
        let mut end = e.onset + span;
        if let Some(next) = schedule.events.get(k + 1) {
            if next.onset < end {
                end = next.onset;
                flags.push(format!("{} truncated by {}", e.syllable, next.syllable));
            }
        }
        let s0 = libm::round(e.onset * sr) as usize;
        let s1 = (libm::round(end * sr) as usize).min(total);
        if s1 <= s0 {
            continue;
        }
        let freqs: Vec<f64> = e
            .symbols
            .iter()
            .map(|&sym| {
                scale
                    .cents_of(sym)
                    .map(|c| cents_to_hz(c, schedule.tonic))
                    .ok_or_else(|| Error::Domain(format!("swar {sym} is not in raga {}", scale.name())))
            })
            .collect::<Result<_>>()?;
        let interval = span / e.symbols.len() as f64;
        let len = (s1 - s0) as f64;
        let mut phase = 0.0f64;
        for (m, slot) in samples[s0..s1].iter_mut().enumerate() {
            let t = m as f64 / sr;
            let idx = ((t / interval) as usize).min(freqs.len() - 1);
            let edge = (m as f64 + 0.5).min(len - m as f64 - 0.5);
            let gain = if edge < fade { 0.5 * (1.0 - libm::cos(PI * edge / fade)) } else { 1.0 };
            *slot = (AMPLITUDE * gain * libm::sin(phase)) as f32;
            phase += 2.0 * PI * freqs[idx] / sr;
            if phase > 2.0 * PI {
                phase -= 2.0 * PI;
            }
        }
    }
    Ok(RenderedAudio { sample_rate, samples, flags })
}

/// The canonical rendition of a line as audio.
pub fn render_canonical(
    score: &CanonicalScore,
    line_index: usize,
    tempo: f64,
    tonic: Tonic,
    scale: &RagaScale,
    sample_rate: u32,
) -> Result<(ExpressiveSchedule, RenderedAudio)> {
    let line = score.line(line_index)?;
    let schedule = canonical_schedule(line, score.beats_per_cycle, tempo, tonic, PAA_PER_BEAT)?;
    let audio = synthesize(&schedule, scale, sample_rate)?;
    Ok((schedule, audio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_notation;
    use alloc::string::ToString;
    use alloc::vec;

    fn score() -> CanonicalScore {
        let mut n = vec!["m", "s", "g", "R", ".n S"];
        let mut l = vec!["Jaa", "-", "Jaa", "Re", "Ne"];
        n.resize(16, "");
        l.resize(16, "");
        parse_notation(&format!(
            "bandish,raga,tala,beats_per_cycle\nX,Bhimpalasi,teentaal,16\n{}\n{}\n",
            n.join(","),
            l.join(",")
        ))
        .unwrap()
    }

    fn tonic() -> Tonic {
        Tonic::new(220.0).unwrap()
    }

    fn dev(s: &str, d: f64) -> TimingDeviation {
        TimingDeviation { syllable: s.into(), repetition: 1, deviation: d, onset_time: 0.0, canonical_time: 0.0 }
    }

    fn full_model() -> ArtistModel {
        let line = &score().lines[0];
        let devs: Vec<TimingDeviation> = line.syllables.iter().map(|s| dev(&s.label, 0.1)).collect();
        let strings: Vec<PaaString> = line
            .syllables
            .iter()
            .map(|s| PaaString {
                syllable: s.label.clone(),
                repetition: 1,
                symbols: canonical_symbols(&s.swars, s.allotted_beats, 10).unwrap(),
            })
            .collect();
        fit_artist_model("ABD", 1, None, &devs, &strings)
    }

    #[test]
    fn model_stores_the_multiset() {
        let m = fit_artist_model("ABD", 1, None, &[dev("Jaa1", 0.1), dev("Jaa1", 0.3)], &[]);
        assert_eq!(m.syllables["Jaa1"].deviations, [0.1, 0.3]);
        assert!(m.syllables["Jaa1"].strings.is_empty());
    }

    #[test]
    fn empty_pool_falls_back_to_canonical() {
        let m = fit_artist_model("ABD", 1, None, &[dev("Jaa1", 0.1)], &[]);
        let line = &score().lines[0];
        let s = sample_schedule(&m, line, 16, 120.0, tonic(), 1, &SamplingOptions::default()).unwrap();
        let e = &s.events[0];
        assert!(e.fallback);
        assert_eq!(e.symbols, canonical_symbols(&line.syllables[0].swars, 2, 10).unwrap());
        assert_eq!(e.deviation, 0.1);
        // Jaa2 has no model at all
        assert_eq!(s.events[1].deviation, 0.0);
        assert!(s.flags.iter().any(|f| f.starts_with("Jaa2")));
    }

    #[test]
    fn model_round_trips_through_json() {
        let mut m = full_model();
        m.tempo_range = Some((138.0, 200.0));
        m.weight_by_clusters(0.3).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ArtistModel>(&text).unwrap(), m);
    }

    #[test]
    fn degenerate_bootstrap_reproduces_observation() {
        let s = sample_schedule(&full_model(), &score().lines[0], 16, 120.0, tonic(), 9, &SamplingOptions::default())
            .unwrap();
        for (e, syl) in s.events.iter().zip(&score().lines[0].syllables) {
            assert_eq!(e.deviation, 0.1);
            assert_eq!(e.onset, s.line_start + syl.position() * 0.5 + 0.1 * 0.5);
            assert!(!e.fallback);
        }
    }

    #[test]
    fn same_seed_same_schedule() {
        let mut m = full_model();
        m.syllables.get_mut("Re").unwrap().deviations.extend([0.2, -0.3, 0.4]);
        let opts = SamplingOptions { jitter_sigma: 0.05, ..SamplingOptions::default() };
        let a = sample_schedule(&m, &score().lines[0], 16, 120.0, tonic(), 42, &opts).unwrap();
        let b = sample_schedule(&m, &score().lines[0], 16, 120.0, tonic(), 42, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_frequencies() {
        let m = fit_artist_model("A", 1, None, &[dev("Jaa1", -0.2), dev("Jaa1", 0.4)], &[]);
        let line = &score().lines[0];
        let mut low = 0;
        for seed in 0..10_000u64 {
            let s = sample_schedule(&m, line, 16, 120.0, tonic(), seed, &SamplingOptions::default()).unwrap();
            let d = s.events[0].deviation;
            assert!(d == -0.2 || d == 0.4);
            low += usize::from(d == -0.2);
        }
        assert!((low as f64 / 10_000.0 - 0.5).abs() <= 0.02, "{low}");
    }

    #[test]
    fn inverted_onsets_are_clamped() {
        // Jaa2 always lands 2.5 beats early, before Jaa1
        let m = fit_artist_model("A", 1, None, &[dev("Jaa1", 0.0), dev("Jaa2", -2.5)], &[]);
        let s = sample_schedule(&m, &score().lines[0], 16, 120.0, tonic(), 3, &SamplingOptions::default()).unwrap();
        assert!((s.events[1].onset - (s.events[0].onset + HOP_SECONDS)).abs() < 1e-12);
        assert!(s.flags.iter().any(|f| f.contains("clamped")));
        for w in s.events.windows(2) {
            assert!(w[0].onset < w[1].onset);
        }
    }

    #[test]
    fn tempo_outside_fitted_range_is_rejected() {
        let mut m = full_model();
        m.tempo_range = Some((138.0, 200.0));
        let r = sample_schedule(&m, &score().lines[0], 16, 100.0, tonic(), 1, &SamplingOptions::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn cluster_weights_balance_clusters() {
        let mut m = full_model();
        let pool = &mut m.syllables.get_mut("Re").unwrap().strings;
        let other = vec![SwarSymbol::madhya(crate::Degree::Pa); 10];
        pool.extend([pool[0].clone(), pool[0].clone(), other]);
        m.weight_by_clusters(0.5).unwrap();
        assert_eq!(m.syllables["Re"].weights, [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0]);
    }

    #[test]
    fn canonical_symbols_spread_swars() {
        let s = canonical_symbols(&crate::parse_swar_string(".nS").unwrap(), 1, 5).unwrap();
        assert_eq!(crate::format_swars(&s), ".n.n.nSS");
        assert!(canonical_symbols(&[], 1, 10).is_err());
    }

    #[test]
    fn empty_schedule_renders_silence() {
        let empty =
            parse_notation("bandish,raga,tala,beats_per_cycle\nX,Y,teentaal,16\n,,,,,,,,,,,,,,,\n,,,,,,,,,,,,,,,\n")
                .unwrap();
        let s = canonical_schedule(&empty.lines[0], 16, 120.0, tonic(), 10).unwrap();
        assert!(s.events.is_empty());
        let a = synthesize(&s, &RagaScale::bhimpalasi(), 8000).unwrap();
        // one cycle of 16 beats at 0.5 s
        assert_eq!(a.samples.len(), 8 * 8000);
        assert!(a.samples.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn canonical_render_timing_and_bounds() {
        let (s, a) = render_canonical(&score(), 1, 120.0, tonic(), &RagaScale::bhimpalasi(), 16000).unwrap();
        assert_eq!(s.beat_interval, 0.5);
        for (e, syl) in s.events.iter().zip(&score().lines[0].syllables) {
            assert_eq!(e.onset, s.line_start + syl.position() * 0.5);
        }
        assert!(a.samples.iter().all(|x| x.is_finite() && x.abs() <= 1.0));
        assert!(a.flags.is_empty());
        assert!(render_canonical(&score(), 2, 120.0, tonic(), &RagaScale::bhimpalasi(), 16000).is_err());
    }

    #[test]
    fn interval_joins_are_click_free() {
        // swar steps inside one syllable, then compare the largest sample
        // step with what a pure sine at the highest frequency can produce
        let line = &score().lines[0];
        let mut s = canonical_schedule(line, 16, 120.0, tonic(), 10).unwrap();
        s.events[0].symbols = crate::parse_swar_string("SPSPSPSPSPSPSPSPSPSP").unwrap();
        let a = synthesize(&s, &RagaScale::bhimpalasi(), 44100).unwrap();
        let fmax = cents_to_hz(700.0, tonic());
        let bound = AMPLITUDE * 2.0 * PI * fmax / 44100.0;
        let worst = a.samples.windows(2).map(|w| f64::from((w[1] - w[0]).abs())).fold(0.0, f64::max);
        assert!(worst <= bound * 1.01, "{worst} > {bound}");
    }

    /// Magnitude of the DFT of `x` at `freq` Hz.
    fn dft_magnitude(x: &[f32], sr: f64, freq: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (n, &v) in x.iter().enumerate() {
            let w = 2.0 * PI * freq * n as f64 / sr;
            re += f64::from(v) * libm::cos(w);
            im -= f64::from(v) * libm::sin(w);
        }
        libm::sqrt(re * re + im * im)
    }

    #[test]
    fn single_sa_syllable_peaks_at_tonic() {
        let sr = 8000.0;
        let mut s = canonical_schedule(&score().lines[0], 16, 120.0, tonic(), 10).unwrap();
        s.events.truncate(1);
        s.events[0].symbols = vec![SwarSymbol::madhya(crate::Degree::Sa); 20];
        let a = synthesize(&s, &RagaScale::bhimpalasi(), 8000).unwrap();
        let start = (s.events[0].onset * sr) as usize;
        let x = &a.samples[start..start + 8000];
        // bins are 1 Hz wide over this one-second window
        let peak =
            (50..1000)
                .map(|f| (f, dft_magnitude(x, sr, f as f64)))
                .fold((0, 0.0), |b, c| if c.1 > b.1 { c } else { b });
        assert!((peak.0 as f64 - 220.0).abs() <= 1.0, "peak at {} Hz", peak.0);
    }

    #[test]
    fn overlap_truncates_and_flags() {
        let mut s = canonical_schedule(&score().lines[0], 16, 120.0, tonic(), 10).unwrap();
        s.events[1].onset = s.events[0].onset + 0.3;
        let a = synthesize(&s, &RagaScale::bhimpalasi(), 8000).unwrap();
        assert_eq!(a.flags, ["Jaa1 truncated by Jaa2".to_string()]);
    }
}
