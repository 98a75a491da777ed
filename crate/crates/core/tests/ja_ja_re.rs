use bandish_core::notation::{canonical_positions, parse_notation, CellKind};
use bandish_core::raga::RagaScale;
use bandish_core::Error;

const SOURCE: &str = include_str!("../../../data/notation/ja_ja_re.csv");

#[test]
fn parses_four_lines() {
    let score = parse_notation(SOURCE).unwrap();
    assert_eq!(score.bandish_name, "Ja Ja Re");
    assert_eq!(score.raga_name, "Bhimpalasi");
    assert_eq!(score.beats_per_cycle, 16);
    assert_eq!(score.lines.len(), 4);
}

#[test]
fn mukhda_positions() {
    let score = parse_notation(SOURCE).unwrap();
    let syl = canonical_positions(&score, 1).unwrap();
    let labels: Vec<&str> = syl.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["Jaa1", "Jaa2", "Re", "Apne", "Pa", "Ne", "Man", "Di", "Ra", "Vaa"]);
    let beats: Vec<usize> = syl.iter().map(|s| s.beat_index).collect();
    assert_eq!(beats, [0, 2, 4, 5, 8, 9, 10, 12, 13, 14]);
    let tala: Vec<usize> = syl.iter().map(|s| s.tala_beat).collect();
    assert_eq!(tala, [6, 8, 10, 11, 14, 15, 0, 2, 3, 4]);
    for label in ["Jaa1", "Jaa2", "Man"] {
        assert_eq!(score.lines[0].syllable(label).unwrap().allotted_beats, 2, "{label}");
    }
    assert_eq!(score.lines[0].syllable("Apne").unwrap().allotted_beats, 3);
    assert_eq!(score.lines[0].cells[10].ornament.as_ref().map(Vec::len), Some(1));
}

#[test]
fn every_line_accounts_for_all_beats() {
    let score = parse_notation(SOURCE).unwrap();
    for line in &score.lines {
        let sung: usize = line.cells.iter().enumerate().filter(|(_, c)| c.kind == CellKind::Syllable).count();
        assert!(sung > 0);
        let allotted: usize = line.syllables.iter().map(|s| s.allotted_beats).sum();
        let shared = line.syllables.len() - sung;
        assert_eq!(allotted - shared + line.rest_count(), 16, "line {}", line.line_index);
    }
}

#[test]
fn round_trips_cell_for_cell() {
    let score = parse_notation(SOURCE).unwrap();
    let again = parse_notation(&score.to_notation_text()).unwrap();
    assert_eq!(score, again);
    assert_eq!(again.to_notation_text(), score.to_notation_text());
}

#[test]
fn every_swar_belongs_to_the_raga() {
    let score = parse_notation(SOURCE).unwrap();
    let scale = RagaScale::bhimpalasi();
    for s in score.lines.iter().flat_map(|l| &l.syllables) {
        assert!(s.swars.iter().all(|&w| scale.contains(w)), "{}", s.label);
    }
}

#[test]
fn missing_line_is_not_found() {
    let score = parse_notation(SOURCE).unwrap();
    assert!(matches!(canonical_positions(&score, 99), Err(Error::NotFound { .. })));
}
