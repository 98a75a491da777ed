//! Short-time normalized autocorrelation F0 tracker.
//!
//! Each frame of `frame_length` seconds is correlated with itself over the
//! lag range `[sample_rate / fmax, sample_rate / fmin]`. The correlation at
//! lag τ is normalized by the energies of the two overlapping windows, so a
//! periodic frame scores close to 1 at its period regardless of level. The
//! period is the first local maximum reaching 90% of the best score in the
//! range, which keeps multiples of the period (octave-down errors) from
//! winning on pure tones. A frame is voiced when that peak reaches the
//! voicing threshold; the lag is then refined by parabolic interpolation.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, HOP_SECONDS};

/// Frames whose RMS falls below this are unvoiced without further analysis.
const SILENCE_RMS: f64 = 1e-5;
const PEAK_RATIO: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerParams {
    pub fmin: f64,
    pub fmax: f64,
    pub frame_length: f64,
    pub voicing_threshold: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams { fmin: 80.0, fmax: 1000.0, frame_length: 0.04, voicing_threshold: 0.45 }
    }
}

impl TrackerParams {
    pub fn check(&self, sample_rate: u32) -> Result<()> {
        let sr = f64::from(sample_rate);
        if sample_rate < 8000 {
            return Err(Error::Config(format!("sample rate {sample_rate} Hz is below 8000 Hz")));
        }
        if !(self.fmin > 0.0 && self.fmin < self.fmax) {
            return Err(Error::Config(format!("need 0 < fmin < fmax, got {} and {}", self.fmin, self.fmax)));
        }
        if self.fmax >= sr / 2.0 {
            return Err(Error::Config(format!("fmax {} Hz must be below Nyquist ({} Hz)", self.fmax, sr / 2.0)));
        }
        if !(self.frame_length >= 2.0 / self.fmin) {
            return Err(Error::Config(format!(
                "frame length {} s must cover two periods of fmin ({} s)",
                self.frame_length,
                2.0 / self.fmin
            )));
        }
        if !(self.voicing_threshold > 0.0 && self.voicing_threshold < 1.0) {
            return Err(Error::Config(format!("voicing threshold {} must lie in (0, 1)", self.voicing_threshold)));
        }
        Ok(())
    }
}

/// F0 values in Hz at a fixed hop; 0 marks an unvoiced frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PitchContour {
    pub hop: f64,
    pub start_time: f64,
    pub frames: Vec<f64>,
}

impl PitchContour {
    pub fn time_of(&self, i: usize) -> f64 {
        self.start_time + i as f64 * self.hop
    }

    pub fn end_time(&self) -> f64 {
        self.time_of(self.frames.len().saturating_sub(1))
    }
}

/// Estimates an F0 contour at a 10 ms hop. Frame `i` is centred at
/// `frame_length / 2 + i · hop` seconds.
pub fn extract_f0(samples: &[f32], sample_rate: u32, params: &TrackerParams) -> Result<PitchContour> {
    params.check(sample_rate)?;
    if samples.is_empty() {
        return Err(Error::Domain("empty audio".into()));
    }
    let sr = f64::from(sample_rate);
    let frame_len = libm::round(params.frame_length * sr) as usize;
    let hop = libm::round(HOP_SECONDS * sr) as usize;
    if samples.len() < frame_len {
        return Err(Error::Domain(format!(
            "audio of {} samples is shorter than one {frame_len}-sample frame",
            samples.len()
        )));
    }
    let min_lag = libm::floor(sr / params.fmax) as usize;
    let max_lag = (libm::ceil(sr / params.fmin) as usize).min(frame_len - 2);

    let count = (samples.len() - frame_len) / hop + 1;
    let mut scratch = Scratch::new(frame_len, max_lag);
    let frames = (0..count)
        .map(|i| {
            let frame = &samples[i * hop..i * hop + frame_len];
            scratch.estimate(frame, min_lag, max_lag, params.voicing_threshold, sr, params)
        })
        .collect();
    Ok(PitchContour { hop: HOP_SECONDS, start_time: frame_len as f64 / sr / 2.0, frames })
}

struct Scratch {
    x: Vec<f64>,
    // prefix sums of x² for window energies
    energy: Vec<f64>,
    acf: Vec<f64>,
}

impl Scratch {
    fn new(frame_len: usize, max_lag: usize) -> Self {
        Scratch {
            x: Vec::with_capacity(frame_len),
            energy: Vec::with_capacity(frame_len + 1),
            acf: alloc::vec![0.0; max_lag + 2],
        }
    }

    fn estimate(
        &mut self,
        frame: &[f32],
        min_lag: usize,
        max_lag: usize,
        threshold: f64,
        sr: f64,
        params: &TrackerParams,
    ) -> f64 {
        let n = frame.len();
        let mean = frame.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64;
        self.x.clear();
        self.x.extend(frame.iter().map(|&v| f64::from(v) - mean));
        self.energy.clear();
        self.energy.push(0.0);
        let mut acc = 0.0;
        for v in &self.x {
            acc += v * v;
            self.energy.push(acc);
        }
        if libm::sqrt(acc / n as f64) < SILENCE_RMS {
            return 0.0;
        }

        let lo = min_lag.max(1) - 1;
        let hi = max_lag + 1;
        for lag in lo..=hi {
            let m = n - lag;
            let cross: f64 = self.x[..m].iter().zip(&self.x[lag..]).map(|(a, b)| a * b).sum();
            let e1 = self.energy[m];
            let e2 = self.energy[n] - self.energy[lag];
            let denom = libm::sqrt(e1 * e2);
            self.acf[lag] = if denom > 0.0 { cross / denom } else { 0.0 };
        }

        let best = (min_lag..=max_lag).map(|l| self.acf[l]).fold(f64::NEG_INFINITY, f64::max);
        if best < threshold {
            return 0.0;
        }
        let Some(lag) = (min_lag..=max_lag).find(|&l| {
            self.acf[l] >= PEAK_RATIO * best && self.acf[l] >= self.acf[l - 1] && self.acf[l] >= self.acf[l + 1]
        }) else {
            return 0.0;
        };
        let (a, b, c) = (self.acf[lag - 1], self.acf[lag], self.acf[lag + 1]);
        let curvature = a - 2.0 * b + c;
        let shift = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
        let f0 = sr / (lag as f64 + shift);
        if f0 < params.fmin || f0 > params.fmax {
            0.0
        } else {
            f0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn tone(freq: f64, seconds: f64, sr: u32) -> Vec<f32> {
        let n = (seconds * f64::from(sr)) as usize;
        (0..n).map(|i| (0.8 * libm::sin(2.0 * PI * freq * i as f64 / f64::from(sr))) as f32).collect()
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    #[test]
    fn sine_440_is_tracked_within_one_percent() {
        let c = extract_f0(&tone(440.0, 1.0, 44100), 44100, &TrackerParams::default()).unwrap();
        let voiced: Vec<f64> = c.frames.iter().copied().filter(|&f| f > 0.0).collect();
        assert_eq!(voiced.len(), c.frames.len());
        assert!(voiced.iter().all(|f| (f - 440.0).abs() <= 4.4), "{voiced:?}");
    }

    #[test]
    fn frame_count_matches_hop_formula() {
        let sr = 44100;
        let audio = tone(300.0, 1.0, sr);
        let c = extract_f0(&audio, sr, &TrackerParams::default()).unwrap();
        // floor((duration - frame_length) / hop) + 1 in samples: (44100 - 1764) / 441 + 1
        assert_eq!(c.frames.len(), 97);
        assert_eq!(c.hop, 0.010);
        assert_eq!(c.time_of(5), c.start_time + 5.0 * 0.010);
    }

    #[test]
    fn zeros_are_unvoiced() {
        let c = extract_f0(&alloc::vec![0.0; 44100], 44100, &TrackerParams::default()).unwrap();
        assert!(c.frames.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn voiced_then_silent_split_near_half_second() {
        let sr = 44100;
        let mut audio = tone(220.0, 0.5, sr);
        audio.resize(sr as usize, 0.0);
        let c = extract_f0(&audio, sr, &TrackerParams::default()).unwrap();
        let first_unvoiced = c.frames.iter().position(|&f| f == 0.0).unwrap();
        assert!(c.frames[first_unvoiced..].iter().all(|&f| f == 0.0));
        // boundary between the last voiced and the first unvoiced frame
        let t = 0.5 * (c.time_of(first_unvoiced - 1) + c.time_of(first_unvoiced));
        assert!((t - 0.5).abs() <= 2.0 * c.hop, "split at {t}");
        assert!(c.frames[..first_unvoiced].iter().all(|&f| (f - 220.0).abs() < 2.2));
    }

    #[test]
    fn low_and_high_tones_have_no_octave_errors() {
        for f in [110.0, 147.3, 261.6, 523.25, 880.0] {
            let c = extract_f0(&tone(f, 0.3, 44100), 44100, &TrackerParams::default()).unwrap();
            let m = median(c.frames.clone());
            assert!((m - f).abs() / f < 0.01, "{f}: {m}");
        }
    }

    #[test]
    fn deterministic() {
        let audio = tone(333.0, 0.3, 16000);
        let p = TrackerParams::default();
        assert_eq!(extract_f0(&audio, 16000, &p).unwrap(), extract_f0(&audio, 16000, &p).unwrap());
    }

    #[test]
    fn configuration_errors() {
        let audio = tone(200.0, 0.2, 16000);
        let bad_nyquist = TrackerParams { fmax: 9000.0, ..TrackerParams::default() };
        assert!(matches!(extract_f0(&audio, 16000, &bad_nyquist), Err(Error::Config(_))));
        let inverted = TrackerParams { fmin: 500.0, fmax: 400.0, ..TrackerParams::default() };
        assert!(matches!(extract_f0(&audio, 16000, &inverted), Err(Error::Config(_))));
        let short = TrackerParams { frame_length: 0.01, ..TrackerParams::default() };
        assert!(matches!(extract_f0(&audio, 16000, &short), Err(Error::Config(_))));
        assert!(matches!(extract_f0(&audio, 4000, &TrackerParams::default()), Err(Error::Config(_))));
        assert!(matches!(extract_f0(&[], 16000, &TrackerParams::default()), Err(Error::Domain(_))));
        assert!(matches!(extract_f0(&audio[..100], 16000, &TrackerParams::default()), Err(Error::Domain(_))));
    }
}
