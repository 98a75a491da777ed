//! Artist × syllable expression tables and their per-syllable summaries.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::melody::NlssMatrix;
use crate::rhythm::TimingDeviation;
use crate::{quantile_linear, sample_mean_sd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TimingSd,
    MeanNlss,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::TimingSd => "timing_sd",
            Metric::MeanNlss => "mean_nlss",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub value: f64,
    /// Deviations (timing) or repetition pairs (pitch) behind the value.
    pub n: usize,
    /// A timing sd computed from one deviation.
    pub single_sample: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpressionTable {
    pub metric: Metric,
    /// Artist ids, sorted.
    pub rows: Vec<String>,
    /// Syllable labels in canonical order.
    pub columns: Vec<String>,
    /// Row-major; `None` where the artist never sang the syllable often enough.
    pub cells: Vec<Option<TableCell>>,
}

impl ExpressionTable {
    pub fn get(&self, row: usize, col: usize) -> Option<&TableCell> {
        self.cells[row * self.columns.len() + col].as_ref()
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Option<&TableCell>> + '_ {
        (0..self.rows.len()).map(move |r| self.get(r, col))
    }
}

fn artists<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<String> {
    ids.collect::<BTreeSet<_>>().into_iter().map(String::from).collect()
}

/// Sample sd of each artist's deviations per syllable, pooled over that
/// artist's concerts.
pub fn timing_table(deviations: &[(String, TimingDeviation)], columns: &[String]) -> ExpressionTable {
    let rows = artists(deviations.iter().map(|(a, _)| a.as_str()));
    let mut cells = Vec::with_capacity(rows.len() * columns.len());
    for artist in &rows {
        for col in columns {
            let values: Vec<f64> = deviations
                .iter()
                .filter(|(a, d)| a == artist && d.syllable == *col)
                .map(|(_, d)| d.deviation)
                .collect();
            cells.push(sample_mean_sd(&values).map(|(_, sd)| TableCell {
                value: sd,
                n: values.len(),
                single_sample: values.len() == 1,
            }));
        }
    }
    ExpressionTable { metric: Metric::TimingSd, rows, columns: columns.to_vec(), cells }
}

/// Mean NLSS over all within-concert repetition pairs of each artist and
/// syllable. Input is (artist, syllable, matrix) per concert.
pub fn pitch_table(matrices: &[(String, String, NlssMatrix)], columns: &[String]) -> ExpressionTable {
    let rows = artists(matrices.iter().map(|(a, _, _)| a.as_str()));
    let mut cells = Vec::with_capacity(rows.len() * columns.len());
    for artist in &rows {
        for col in columns {
            let pairs: Vec<f64> =
                matrices.iter().filter(|(a, s, _)| a == artist && s == col).flat_map(|(_, _, m)| m.pairs()).collect();
            cells.push((!pairs.is_empty()).then(|| TableCell {
                value: pairs.iter().sum::<f64>() / pairs.len() as f64,
                n: pairs.len(),
                single_sample: false,
            }));
        }
    }
    ExpressionTable { metric: Metric::MeanNlss, rows, columns: columns.to_vec(), cells }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub syllable: String,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Artists contributing.
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub metric: Metric,
    pub columns: Vec<ColumnSummary>,
}

/// Five-number summary and mean of each column across artists. Quartiles
/// interpolate linearly between order statistics. Absent and single-sample
/// cells are skipped; columns left empty are omitted.
pub fn boxplot_summary(table: &ExpressionTable) -> DistributionSummary {
    let columns = table
        .columns
        .iter()
        .enumerate()
        .filter_map(|(c, label)| {
            let mut v: Vec<f64> =
                table.column(c).flatten().filter(|cell| !cell.single_sample).map(|cell| cell.value).collect();
            if v.is_empty() {
                return None;
            }
            v.sort_by(f64::total_cmp);
            Some(ColumnSummary {
                syllable: label.clone(),
                min: v[0],
                q1: quantile_linear(&v, 0.25),
                median: quantile_linear(&v, 0.5),
                q3: quantile_linear(&v, 0.75),
                max: v[v.len() - 1],
                mean: v.iter().sum::<f64>() / v.len() as f64,
                n: v.len(),
            })
        })
        .collect();
    DistributionSummary { metric: table.metric, columns }
}
