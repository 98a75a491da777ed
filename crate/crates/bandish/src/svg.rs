//! Static SVG renderings of expression tables and their box plots.

use std::fmt::Write;

use bandish_core::aggregate::{DistributionSummary, ExpressionTable};

const CELL: f64 = 48.0;
const LEFT: f64 = 120.0;
const TOP: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// White (0) to dark red (`max`) shading.
fn shade(v: f64, max: f64) -> String {
    let t = if max > 0.0 { (v / max).clamp(0.0, 1.0) } else { 0.0 };
    let g = (255.0 * (1.0 - t)).round() as u8;
    format!("rgb(255,{g},{g})")
}

pub fn heatmap(table: &ExpressionTable) -> String {
    let (rows, cols) = (table.rows.len(), table.columns.len());
    let width = LEFT + CELL * cols as f64 + 20.0;
    let height = TOP + CELL * rows as f64 + 60.0;
    let max = table.cells.iter().flatten().map(|c| c.value).fold(0.0, f64::max);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(s, r##"<text x="{LEFT}" y="20" font-size="13">{}</text>"##, table.metric.name());
    for (c, label) in table.columns.iter().enumerate() {
        let x = LEFT + CELL * (c as f64 + 0.5);
        let y = TOP + CELL * rows as f64 + 16.0;
        let _ = writeln!(s, r##"<text x="{x}" y="{y}" text-anchor="middle">{}</text>"##, escape(label));
    }
    for (r, artist) in table.rows.iter().enumerate() {
        let y = TOP + CELL * r as f64;
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" text-anchor="end">{}</text>"##,
            LEFT - 6.0,
            y + CELL / 2.0 + 4.0,
            escape(artist)
        );
        for c in 0..cols {
            let x = LEFT + CELL * c as f64;
            match table.get(r, c) {
                Some(cell) => {
                    let _ = writeln!(
                        s,
                        r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#888"/>"##,
                        shade(cell.value, max)
                    );
                    let _ = writeln!(
                        s,
                        r##"<text x="{}" y="{}" text-anchor="middle">{:.2}</text>"##,
                        x + CELL / 2.0,
                        y + CELL / 2.0 + 4.0,
                        cell.value
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="#ddd" stroke="#888"/>"##
                    );
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn boxplot(summary: &DistributionSummary) -> String {
    let cols = summary.columns.len();
    let plot_h = 240.0;
    let width = LEFT + CELL * cols as f64 + 20.0;
    let height = TOP + plot_h + 60.0;
    let max = summary.columns.iter().map(|c| c.max).fold(0.0, f64::max).max(1e-12);
    let y_of = |v: f64| TOP + plot_h * (1.0 - v / max);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"##
    );
    let _ = writeln!(s, r##"<text x="{LEFT}" y="20" font-size="13">{}</text>"##, summary.metric.name());
    let _ = writeln!(
        s,
        r##"<line x1="{}" y1="{TOP}" x2="{}" y2="{}" stroke="black"/>"##,
        LEFT - 10.0,
        LEFT - 10.0,
        TOP + plot_h
    );
    let _ = writeln!(s, r##"<text x="{}" y="{}" text-anchor="end">{max:.2}</text>"##, LEFT - 14.0, TOP + 4.0);
    let _ = writeln!(s, r##"<text x="{}" y="{}" text-anchor="end">0</text>"##, LEFT - 14.0, TOP + plot_h + 4.0);
    let mut means = Vec::new();
    for (i, c) in summary.columns.iter().enumerate() {
        let cx = LEFT + CELL * (i as f64 + 0.5);
        let half = CELL * 0.3;
        let _ =
            writeln!(s, r##"<line x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="black"/>"##, y_of(c.max), y_of(c.min));
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#cde" stroke="black"/>"##,
            cx - half,
            y_of(c.q3),
            2.0 * half,
            (y_of(c.q1) - y_of(c.q3)).max(0.5)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black" stroke-width="2"/>"##,
            cx - half,
            cx + half,
            y = y_of(c.median)
        );
        let _ = writeln!(
            s,
            r##"<text x="{cx}" y="{}" text-anchor="middle">{}</text>"##,
            TOP + plot_h + 16.0,
            escape(&c.syllable)
        );
        means.push(format!("{cx},{}", y_of(c.mean)));
    }
    if !means.is_empty() {
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="red" stroke-dasharray="3,3"/>"##,
            means.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
