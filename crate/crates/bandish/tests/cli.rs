use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

fn synthetic() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic")
}

fn bandish(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandish")).args(args).env_remove("BANDISH_DATASET").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_bundled_dataset() {
    let o = bandish(&["validate", "--dataset", s(&synthetic())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("Ja Ja Re"), "{text}");
    assert!(text.contains("30, 0, 0, 0"), "{text}");
}

#[test]
fn validate_missing_dataset_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = bandish(&["validate", "--dataset", s(&dir.path().join("nope"))]);
    assert_eq!(o.status.code(), Some(74), "{}", stderr(&o));
}

#[test]
fn validate_empty_dataset_reports_no_performances() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(synthetic().join("manifest.toml"), dir.path().join("manifest.toml")).unwrap();
    std::fs::create_dir_all(dir.path().join("notation")).unwrap();
    std::fs::copy(synthetic().join("notation/ja_ja_re.csv"), dir.path().join("notation/ja_ja_re.csv")).unwrap();
    let o = bandish(&["validate", "--dataset", s(dir.path())]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("no performances"), "{}", stderr(&o));
}

fn copy_dataset(to: &Path) {
    let from = synthetic();
    for entry in walk(&from) {
        let rel = entry.strip_prefix(&from).unwrap();
        let dest = to.join(rel);
        std::fs::create_dir_all(dest.parent().unwrap()).unwrap();
        std::fs::copy(&entry, dest).unwrap();
    }
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn tone(path: &Path, hz: f64, seconds: f64, sr: u32) {
    let spec =
        hound::WavSpec { channels: 1, sample_rate: sr, bits_per_sample: 16, sample_format: hound::SampleFormat::Int };
    let mut w = hound::WavWriter::create(path, spec).unwrap();
    let n = (seconds * sr as f64) as usize;
    for i in 0..n {
        let v = (2.0 * std::f64::consts::PI * hz * i as f64 / sr as f64).sin() * 0.5;
        w.write_sample((v * i16::MAX as f64) as i16).unwrap();
    }
    w.finalize().unwrap();
}

#[test]
fn extract_pitch_from_wav() {
    let dir = tempfile::tempdir().unwrap();
    copy_dataset(dir.path());
    let perf = dir.path().join("performances/c01");
    std::fs::remove_file(perf.join("pitch.csv")).unwrap();
    tone(&perf.join("audio.wav"), 440.0, 1.0, 44100);
    let o = bandish(&["extract-pitch", "--dataset", s(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));

    let frames = bandish::io::read_pitch(&perf.join("pitch.csv")).unwrap();
    assert_eq!(frames.hop, 0.01);
    assert!(frames.frames.len() >= 97 && frames.frames.len() <= 101, "{}", frames.frames.len());
    let voiced: Vec<f64> = frames.frames.iter().copied().filter(|&f| f > 0.0).collect();
    assert!(voiced.len() > 80);
    assert!(voiced.iter().all(|f| (f - 440.0).abs() < 4.4), "{voiced:?}");

    let before = std::fs::read(perf.join("pitch.csv")).unwrap();
    let o = bandish(&["extract-pitch", "--dataset", s(dir.path())]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(perf.join("pitch.csv")).unwrap(), before);
}

#[test]
fn extract_pitch_rejects_corrupt_wav() {
    let dir = tempfile::tempdir().unwrap();
    copy_dataset(dir.path());
    let perf = dir.path().join("performances/c02");
    std::fs::remove_file(perf.join("pitch.csv")).unwrap();
    std::fs::write(perf.join("audio.wav"), b"RIFF\x10\x00\x00\x00WAVEjunk").unwrap();
    let o = bandish(&["extract-pitch", "--dataset", s(dir.path())]);
    assert_eq!(o.status.code(), Some(65), "{}", stderr(&o));
    assert!(stderr(&o).contains("audio.wav"), "{}", stderr(&o));
}

fn outputs(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = walk(dir)
        .into_iter()
        .map(|p| (p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn analyze_is_fast_and_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let t = Instant::now();
    for out in [a.path(), b.path()] {
        let o = bandish(&["analyze", "--dataset", s(&synthetic()), "--out", s(out), "--seed", "11", "--svg"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert!(t.elapsed().as_secs_f64() < 60.0);
    let (fa, fb) = (outputs(a.path()), outputs(b.path()));
    assert!(fa.len() > 30);
    assert_eq!(fa, fb);
    for name in ["timing_deviations.csv", "paa_strings.csv", "clusters.json"] {
        assert!(a.path().join(name).exists(), "{name}");
    }
    let timing = std::fs::read_to_string(a.path().join("timing_deviations.csv")).unwrap();
    assert!(timing.starts_with("# seed=11\n"));
}

#[test]
fn artist_filter_gives_single_row_tables() {
    let out = tempfile::tempdir().unwrap();
    let o = bandish(&["analyze", "--dataset", s(&synthetic()), "--out", s(out.path()), "--artist", "artist_b"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(out.path().join("expression_table_timing.csv"))
        .unwrap();
    let artists: std::collections::BTreeSet<String> = rdr.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(artists.into_iter().collect::<Vec<_>>(), ["artist_b"]);
}

#[test]
fn generate_is_deterministic_and_checks_tempo() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for out in [a.path(), b.path()] {
        let o = bandish(&["analyze", "--dataset", s(&synthetic()), "--out", s(out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = bandish(&[
            "generate",
            "--dataset",
            s(&synthetic()),
            "--out",
            s(out),
            "--artist",
            "artist_a",
            "--seed",
            "3",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let wav = std::fs::read(a.path().join("generated.wav")).unwrap();
    assert_eq!(wav, std::fs::read(b.path().join("generated.wav")).unwrap());
    let schedule: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("schedule.json")).unwrap()).unwrap();
    assert_eq!(schedule["seed"], 3);

    let o = bandish(&[
        "generate",
        "--dataset",
        s(&synthetic()),
        "--out",
        s(a.path()),
        "--artist",
        "artist_a",
        "--tempo",
        "60",
    ]);
    assert_eq!(o.status.code(), Some(78), "{}", stderr(&o));
}

#[test]
fn bad_options_are_config_errors() {
    let out = tempfile::tempdir().unwrap();
    let o = bandish(&["timing", "--dataset", s(&synthetic()), "--out", s(out.path()), "--nlss-threshold", "2"]);
    assert_eq!(o.status.code(), Some(78));
    let o = bandish(&["timing", "--dataset", s(&synthetic()), "--out", s(out.path()), "--artist", "nobody"]);
    assert_eq!(o.status.code(), Some(78));
    assert!(stderr(&o).contains("artist_a"), "{}", stderr(&o));
    let o = bandish(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}
