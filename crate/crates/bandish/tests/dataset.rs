use std::path::Path;

use bandish::dataset::{load_dataset, load_performance, PerformanceMeta};
use bandish::io;
use bandish::CliError;
use bandish_core::notation::parse_notation;
use bandish_core::Error;

const NOTATION: &str = "bandish,raga,tala,beats_per_cycle\n\
Mini,Bhimpalasi,teentaal,16\n\
S,R,g,m,,,,,,,,,,,,\n\
Ga,Ne,Ko,Ee,,,,,,,,,,,,\n";

fn meta() -> PerformanceMeta {
    PerformanceMeta { concert_id: "k1".into(), artist_id: "x".into(), bandish: "Mini".into(), tonic_hz: 220.0 }
}

fn write_performance(dir: &Path, beats: &str, onsets: &str) {
    io::write_toml(&dir.join("performance.meta"), &meta()).unwrap();
    io::write_text(&dir.join("beats.csv"), beats).unwrap();
    io::write_text(&dir.join("onsets.csv"), onsets).unwrap();
}

fn load(beats: &str, onsets: &str) -> Result<bandish::dataset::Performance, CliError> {
    let dir = tempfile::tempdir().unwrap();
    write_performance(dir.path(), beats, onsets);
    load_performance(dir.path(), &meta(), &parse_notation(NOTATION).unwrap())
}

const BEATS: &str = "time_s,kind\n0.000,sam\n4.000,khali\n8.000,sam\n";

#[test]
fn minimal_fixture_loads() {
    let p = load(
        "time_s,kind\n0.000,sam\n4.000,khali\n",
        "line,repetition,syllable_label,onset_s\n1,1,Ga,0.000\n1,1,Ne,0.500\n",
    )
    .unwrap();
    assert_eq!(p.annotation.renditions.len(), 1);
    assert_eq!(p.annotation.renditions[0].onsets.len(), 2);
    assert_eq!(p.annotation.tempo_range, (120.0, 120.0));
    assert_eq!(p.rendition_ends, [4.0]);
}

#[test]
fn onset_before_first_sam_is_rejected() {
    let err = load("time_s,kind\n1.000,sam\n5.000,khali\n", "line,repetition,syllable_label,onset_s\n1,1,Ga,0.500\n")
        .unwrap_err();
    assert!(matches!(err, CliError::Core { source: Error::Validation(_), .. }), "{err}");
}

#[test]
fn unknown_label_lists_valid_ones() {
    let err = load(BEATS, "line,repetition,syllable_label,onset_s\n1,1,Gaa,0.500\n").unwrap_err();
    match err {
        CliError::Core { source: Error::UnknownSyllable { label, valid }, .. } => {
            assert_eq!(label, "Gaa");
            assert_eq!(valid, ["Ga", "Ne", "Ko", "Ee"]);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn non_monotone_onsets_report_the_row() {
    let err = load(BEATS, "line,repetition,syllable_label,onset_s\n1,1,Ga,1.000\n1,1,Ne,0.900\n").unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn beat_marks_must_alternate() {
    let err = load("time_s,kind\n0.000,sam\n4.000,sam\n", "line,repetition,syllable_label,onset_s\n1,1,Ga,0.5\n")
        .unwrap_err();
    assert!(matches!(err, CliError::Core { source: Error::Validation(_), .. }), "{err}");
}

#[test]
fn silences_attach_to_the_enclosing_rendition() {
    let dir = tempfile::tempdir().unwrap();
    write_performance(
        dir.path(),
        BEATS,
        "line,repetition,syllable_label,onset_s\n1,1,Ga,0.000\n1,1,Ne,0.500\n1,2,Ga,4.000\n1,2,Ne,4.500\n",
    );
    io::write_text(&dir.path().join("silences.csv"), "start_s,end_s\n2.000,3.500\n5.000,6.000\n").unwrap();
    let p = load_performance(dir.path(), &meta(), &parse_notation(NOTATION).unwrap()).unwrap();
    let r = &p.annotation.renditions;
    assert_eq!((r[0].silences.len(), r[1].silences.len()), (1, 1));
    assert_eq!(r[1].silences[0].start, 5.0);
    assert_eq!(p.rendition_ends, [4.0, 8.0]);
}

#[test]
fn annotation_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_performance(
        dir.path(),
        BEATS,
        "line,repetition,syllable_label,onset_s\n1,1,Ga,0.125\n1,1,Ne,0.625\n1,1,Ko,1.1\n",
    );
    io::write_text(&dir.path().join("silences.csv"), "start_s,end_s\n2.000,3.500\n").unwrap();
    let score = parse_notation(NOTATION).unwrap();
    let a = load_performance(dir.path(), &meta(), &score).unwrap();

    let again = tempfile::tempdir().unwrap();
    io::write_toml(&again.path().join("performance.meta"), &meta()).unwrap();
    io::write_beats(&again.path().join("beats.csv"), &a.annotation.beat_marks).unwrap();
    let onsets: Vec<io::OnsetRow> = a
        .annotation
        .renditions
        .iter()
        .flat_map(|r| {
            r.onsets.iter().map(|o| io::OnsetRow {
                line: r.line_index,
                repetition: r.repetition_index,
                syllable_label: o.label.clone(),
                onset_s: o.time,
            })
        })
        .collect();
    io::write_onsets(&again.path().join("onsets.csv"), &onsets).unwrap();
    let silences: Vec<_> = a.annotation.renditions.iter().flat_map(|r| r.silences.clone()).collect();
    io::write_silences(&again.path().join("silences.csv"), &silences).unwrap();
    let b = load_performance(again.path(), &meta(), &score).unwrap();
    assert_eq!(a.annotation, b.annotation);
}

#[test]
fn bundled_synthetic_dataset_matches_its_manifest() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic");
    let ds = load_dataset(&root).unwrap();
    let perfs: Vec<_> = ds.performances.iter().map(|p| p.annotation.clone()).collect();
    let report = bandish_core::annotation::validate_manifest(&ds.manifest, &perfs);
    assert!(report.is_consistent(), "{report:?}");
    assert_eq!(report.entries[0].repetitions_observed, [30, 0, 0, 0]);
    assert_eq!((report.entries[0].concerts, report.entries[0].artists), (3, 3));
    let (lo, hi) = report.entries[0].tempo_range.unwrap();
    assert!(lo >= 138.0 && hi <= 200.0, "{lo}..{hi}");
}

#[test]
fn synthetic_generation_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    bandish::synth::write_dataset(a.path(), 5).unwrap();
    bandish::synth::write_dataset(b.path(), 5).unwrap();
    for rel in ["manifest.toml", "performances/c02/onsets.csv", "performances/c02/pitch.csv"] {
        assert_eq!(std::fs::read(a.path().join(rel)).unwrap(), std::fs::read(b.path().join(rel)).unwrap(), "{rel}");
    }
}
