//! Canonical notation of a bandish.
//!
//! The text format is comma separated. A header row naming the fields
//! `bandish,raga,tala,beats_per_cycle` (optionally followed by `start_beat`)
//! is followed by one row of values. Each line of the composition is then a
//! pair of rows with exactly `beats_per_cycle` cells:
//!
//! * the notation row holds swar tokens separated by spaces, an optional
//!   ornament in parentheses before them (`(P)m`), `s` for a held note, or
//!   nothing for a rest;
//! * the lyric row holds the syllable sung on that beat, `-` for a held
//!   syllable, or nothing.
//!
//! `start_beat` is the 1-based matra on which the first cell of every line
//! falls (1, the sam, when omitted). Blank rows and rows starting with `#`
//! are ignored.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, SwarSymbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Syllable,
    Sustain,
    Rest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NotationCell {
    pub kind: CellKind,
    /// Main notes of the cell. A sustain cell may carry notes when the held
    /// syllable moves to a new swar; those notes belong to the owning syllable.
    pub swars: Vec<SwarSymbol>,
    pub ornament: Option<Vec<SwarSymbol>>,
    /// Lyric text as written; several whitespace separated syllables when
    /// more than one syllable shares the beat.
    pub lyric: Option<String>,
    held_note: bool,
    held_lyric: bool,
}

impl NotationCell {
    pub fn rest() -> Self {
        NotationCell {
            kind: CellKind::Rest,
            swars: Vec::new(),
            ornament: None,
            lyric: None,
            held_note: false,
            held_lyric: false,
        }
    }

    /// Notation-row text of this cell.
    pub fn notation_text(&self) -> String {
        if self.held_note {
            return "s".to_string();
        }
        let mut out = String::new();
        if let Some(orn) = &self.ornament {
            out.push('(');
            out.push_str(&join_swars(orn));
            out.push(')');
        }
        out.push_str(&join_swars(&self.swars));
        out
    }

    /// Lyric-row text of this cell.
    pub fn lyric_text(&self) -> String {
        if self.held_lyric {
            return "-".to_string();
        }
        self.lyric.clone().unwrap_or_default()
    }
}

fn join_swars(swars: &[SwarSymbol]) -> String {
    let mut out = String::new();
    for (i, s) in swars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&s.to_string());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSyllable {
    /// Lyric text, with an ordinal suffix when the same text occurs more
    /// than once in the line ("Jaa1", "Jaa2").
    pub label: String,
    pub lyric: String,
    /// Cell index within the line, 0-based.
    pub beat_index: usize,
    /// Offset inside the cell in beats, non-zero only when several
    /// syllables share one cell.
    pub sub_beat: f64,
    /// Position of the cell in the tala cycle, 0 = sam.
    pub tala_beat: usize,
    pub allotted_beats: usize,
    pub swars: Vec<SwarSymbol>,
}

impl CanonicalSyllable {
    /// Canonical onset in beats from the start of the line.
    pub fn position(&self) -> f64 {
        self.beat_index as f64 + self.sub_beat
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalLine {
    /// 1-based.
    pub line_index: usize,
    pub cells: Vec<NotationCell>,
    pub syllables: Vec<CanonicalSyllable>,
}

impl CanonicalLine {
    pub fn syllable(&self, label: &str) -> Option<&CanonicalSyllable> {
        self.syllables.iter().find(|s| s.label == label)
    }

    pub fn rest_count(&self) -> usize {
        self.cells.iter().filter(|c| c.kind == CellKind::Rest).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalScore {
    pub bandish_name: String,
    pub raga_name: String,
    pub tala_name: String,
    pub beats_per_cycle: usize,
    /// 1-based matra of the first cell of each line.
    pub start_beat: usize,
    pub lines: Vec<CanonicalLine>,
    explicit_start: bool,
}

impl CanonicalScore {
    pub fn line(&self, line_index: usize) -> Result<&CanonicalLine> {
        line_index
            .checked_sub(1)
            .and_then(|i| self.lines.get(i))
            .ok_or_else(|| Error::NotFound { what: "line", key: line_index.to_string() })
    }

    /// Writes the score back in the notation text format.
    pub fn to_notation_text(&self) -> String {
        let mut out = String::new();
        if self.explicit_start {
            out.push_str("bandish,raga,tala,beats_per_cycle,start_beat\n");
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.bandish_name, self.raga_name, self.tala_name, self.beats_per_cycle, self.start_beat
            ));
        } else {
            out.push_str("bandish,raga,tala,beats_per_cycle\n");
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.bandish_name, self.raga_name, self.tala_name, self.beats_per_cycle
            ));
        }
        for line in &self.lines {
            let notes: Vec<String> = line.cells.iter().map(NotationCell::notation_text).collect();
            let lyrics: Vec<String> = line.cells.iter().map(NotationCell::lyric_text).collect();
            out.push_str(&notes.join(","));
            out.push('\n');
            out.push_str(&lyrics.join(","));
            out.push('\n');
        }
        out
    }
}

/// Syllables of a line ordered by canonical position.
pub fn canonical_positions(score: &CanonicalScore, line_index: usize) -> Result<&[CanonicalSyllable]> {
    Ok(&score.line(line_index)?.syllables)
}

const HEADER: [&str; 5] = ["bandish", "raga", "tala", "beats_per_cycle", "start_beat"];

pub fn parse_notation(source: &str) -> Result<CanonicalScore> {
    let rows: Vec<(usize, Vec<&str>)> = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(n, l)| (n, l.split(',').map(str::trim).collect()))
        .collect();

    let mut rows = rows.into_iter();
    let (hrow, header) = rows.next().ok_or_else(|| parse_err(1, 0, "missing header row"))?;
    let explicit_start = match header.len() {
        4 | 5 => {
            for (i, (got, want)) in header.iter().zip(HEADER).enumerate() {
                if !got.eq_ignore_ascii_case(want) {
                    return Err(parse_err(hrow, i + 1, &format!("expected header field {want:?}, got {got:?}")));
                }
            }
            header.len() == 5
        }
        n => return Err(parse_err(hrow, 0, &format!("header must have 4 or 5 fields, got {n}"))),
    };
    let (vrow, values) = rows.next().ok_or_else(|| parse_err(hrow + 1, 0, "missing header values row"))?;
    if values.len() != header.len() {
        return Err(parse_err(vrow, 0, "header values do not match header fields"));
    }
    let beats_per_cycle: usize = values[3]
        .parse()
        .ok()
        .filter(|&b| b > 0)
        .ok_or_else(|| parse_err(vrow, 4, "beats_per_cycle must be a positive integer"))?;
    let tala_name = values[2].to_string();
    if tala_name.eq_ignore_ascii_case("teentaal") && beats_per_cycle != 16 {
        return Err(parse_err(vrow, 4, "teentaal has 16 beats per cycle"));
    }
    let start_beat = if explicit_start {
        values[4]
            .parse::<usize>()
            .ok()
            .filter(|b| (1..=beats_per_cycle).contains(b))
            .ok_or_else(|| parse_err(vrow, 5, "start_beat must lie in 1..=beats_per_cycle"))?
    } else {
        1
    };

    let mut lines = Vec::new();
    let rest: Vec<_> = rows.collect();
    for pair in rest.chunks(2) {
        let (nrow, notes) = &pair[0];
        let Some((lrow, lyrics)) = pair.get(1) else {
            return Err(parse_err(*nrow, 0, "notation row has no matching lyric row"));
        };
        for (row, cells) in [(nrow, notes), (lrow, lyrics)] {
            if cells.len() != beats_per_cycle {
                return Err(parse_err(*row, 0, &format!("expected {beats_per_cycle} cells, found {}", cells.len())));
            }
        }
        let cells = notes
            .iter()
            .zip(lyrics.iter())
            .enumerate()
            .map(|(i, (n, l))| parse_cell(n, l, *nrow, *lrow, i + 1))
            .collect::<Result<Vec<_>>>()?;
        let line_index = lines.len() + 1;
        let syllables = derive_syllables(&cells, start_beat - 1, beats_per_cycle, *nrow)?;
        lines.push(CanonicalLine { line_index, cells, syllables });
    }

    Ok(CanonicalScore {
        bandish_name: values[0].to_string(),
        raga_name: values[1].to_string(),
        tala_name,
        beats_per_cycle,
        start_beat,
        lines,
        explicit_start,
    })
}

fn parse_err(row: usize, col: usize, message: &str) -> Error {
    Error::Parse { row, col, message: message.to_string() }
}

fn parse_tokens(text: &str, row: usize, col: usize) -> Result<Vec<SwarSymbol>> {
    text.split_whitespace()
        .map(|tok| tok.parse::<SwarSymbol>().map_err(|_| parse_err(row, col, &format!("unknown swar token {tok:?}"))))
        .collect()
}

fn parse_cell(notation: &str, lyric: &str, nrow: usize, lrow: usize, col: usize) -> Result<NotationCell> {
    let held_note = notation == "s";
    let held_lyric = lyric == "-";
    let (ornament, swars) = if held_note || notation.is_empty() {
        (None, Vec::new())
    } else if let Some(inner) = notation.strip_prefix('(') {
        let close = inner.find(')').ok_or_else(|| parse_err(nrow, col, "unclosed ornament parenthesis"))?;
        let orn = parse_tokens(&inner[..close], nrow, col)?;
        let main = parse_tokens(&inner[close + 1..], nrow, col)?;
        if orn.is_empty() {
            return Err(parse_err(nrow, col, "empty ornament"));
        }
        if main.is_empty() {
            return Err(parse_err(nrow, col, "ornament without a main swar"));
        }
        (Some(orn), main)
    } else {
        (None, parse_tokens(notation, nrow, col)?)
    };

    let kind = match (held_note, held_lyric, swars.is_empty(), lyric.is_empty()) {
        (true, false, _, false) => {
            return Err(parse_err(lrow, col, &format!("lyric {lyric:?} on a sustain cell")));
        }
        (true, _, _, _) | (_, true, _, _) => CellKind::Sustain,
        (false, false, true, true) => CellKind::Rest,
        (false, false, false, false) => CellKind::Syllable,
        (false, false, false, true) => return Err(parse_err(lrow, col, "swar without a lyric syllable")),
        (false, false, true, false) => {
            return Err(parse_err(nrow, col, &format!("lyric {lyric:?} without a swar")));
        }
    };
    if kind == CellKind::Sustain && ornament.is_some() && swars.is_empty() {
        return Err(parse_err(nrow, col, "ornament on a sustain cell"));
    }
    Ok(NotationCell {
        kind,
        swars,
        ornament,
        lyric: (kind == CellKind::Syllable).then(|| lyric.to_string()),
        held_note,
        held_lyric,
    })
}

/// Splits `n` items into `k` contiguous groups as equal as possible, with
/// the remainder going one-per-group from the front. Returns group sizes.
pub(crate) fn front_loaded_sizes(n: usize, k: usize) -> impl Iterator<Item = usize> {
    let base = n / k;
    let rem = n % k;
    (0..k).map(move |i| base + usize::from(i < rem))
}

fn derive_syllables(
    cells: &[NotationCell],
    start: usize,
    beats_per_cycle: usize,
    row: usize,
) -> Result<Vec<CanonicalSyllable>> {
    let mut syllables: Vec<CanonicalSyllable> = Vec::new();
    // Index of the syllable that owns following sustain cells.
    let mut owner: Option<usize> = None;
    for (i, cell) in cells.iter().enumerate() {
        let tala_beat = (start + i) % beats_per_cycle;
        match cell.kind {
            CellKind::Rest => owner = None,
            CellKind::Sustain => {
                let o = owner.ok_or_else(|| parse_err(row, i + 1, "sustain with no preceding syllable"))?;
                syllables[o].allotted_beats += 1;
                syllables[o].swars.extend_from_slice(&cell.swars);
            }
            CellKind::Syllable => {
                let text = cell.lyric.as_deref().unwrap_or_default();
                let parts: Vec<&str> = text.split_whitespace().collect();
                let k = parts.len();
                if cell.swars.len() < k {
                    return Err(parse_err(
                        row,
                        i + 1,
                        &format!("{k} syllables share the cell but only {} swars are given", cell.swars.len()),
                    ));
                }
                let mut taken = 0;
                for (j, (part, size)) in parts.iter().zip(front_loaded_sizes(cell.swars.len(), k)).enumerate() {
                    syllables.push(CanonicalSyllable {
                        label: part.to_string(),
                        lyric: part.to_string(),
                        beat_index: i,
                        sub_beat: j as f64 / k as f64,
                        tala_beat,
                        allotted_beats: 1,
                        swars: cell.swars[taken..taken + size].to_vec(),
                    });
                    taken += size;
                }
                owner = Some(syllables.len() - 1);
            }
        }
    }

    let mut totals: BTreeMap<String, usize> = BTreeMap::new();
    for s in &syllables {
        *totals.entry(s.lyric.clone()).or_default() += 1;
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for s in &mut syllables {
        if totals[&s.lyric] > 1 {
            let ord = seen.entry(s.lyric.clone()).or_default();
            *ord += 1;
            s.label = format!("{}{}", s.lyric, ord);
        }
    }
    for (i, s) in syllables.iter().enumerate() {
        if syllables[..i].iter().any(|t| t.label == s.label) {
            return Err(parse_err(row, s.beat_index + 1, &format!("ambiguous syllable label {:?}", s.label)));
        }
    }
    Ok(syllables)
}
