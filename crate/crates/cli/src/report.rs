//! Machine-readable outputs: the study grid, per-alternative power curves,
//! sensitivity tables and the catalog dump.
//!
//! All CSV files use `,` separators, `\n` line endings and a header row.
//! Powers and levels are written with 6 significant digits; counts, sample
//! sizes and seeds are written in full. A cutoff above the largest simulated
//! null value is written as `>value`.

use std::io::Write;

use serde::Serialize;

use discretegof_core::{catalog, CatalogName, Cutoff, StatisticKind, StudyRecord, StudyResult};

pub const STUDY_HEADER: [&str; 14] = [
    "alternative",
    "statistic",
    "sample_size",
    "alpha",
    "alpha1",
    "alpha2",
    "x1",
    "x2",
    "power_at_x1",
    "power_at_x2",
    "power",
    "sensitivity",
    "replicates",
    "seed",
];

/// Rounds to 6 significant digits and prints the shortest decimal form.
pub fn format_level(x: f64) -> String {
    format_significant(x, 6)
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// form.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.*e}", digits.max(1) - 1)
        .parse()
        .expect("scientific form parses");
    // -0 would print as "-0".
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

pub fn format_cutoff(c: Cutoff) -> String {
    c.to_string()
}

/// One study grid cell as written to `study.csv` and `study.json`. Numeric
/// fields are empty when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub alternative: String,
    pub statistic: StatisticKind,
    pub sample_size: u64,
    pub alpha: f64,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub x1: Option<Cutoff>,
    pub x2: Option<Cutoff>,
    pub power_at_x1: Option<f64>,
    pub power_at_x2: Option<f64>,
    pub power: Option<f64>,
    pub sensitivity: Option<f64>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportRow {
    pub fn from_record(record: &StudyRecord, alpha: f64) -> Self {
        let est = record.outcome.as_ref().ok();
        ReportRow {
            alternative: record.alternative.clone(),
            statistic: record.statistic,
            sample_size: record.sample_size,
            alpha,
            alpha1: est.map(|e| e.bracket.alpha1),
            alpha2: est.map(|e| e.bracket.alpha2),
            x1: est.map(|e| e.bracket.x1),
            x2: est.map(|e| e.bracket.x2),
            power_at_x1: est.map(|e| e.power_at_x1),
            power_at_x2: est.map(|e| e.power_at_x2),
            power: est.map(|e| e.power),
            sensitivity: est.map(|e| e.sensitivity),
            replicates: record.replicates,
            seed: record.seed,
            error: record.outcome.as_ref().err().map(|e| e.to_string()),
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        let level = |x: Option<f64>| x.map(format_level).unwrap_or_default();
        let cutoff = |x: Option<Cutoff>| x.map(format_cutoff).unwrap_or_default();
        vec![
            self.alternative.clone(),
            self.statistic.as_str().to_string(),
            self.sample_size.to_string(),
            format_level(self.alpha),
            level(self.alpha1),
            level(self.alpha2),
            cutoff(self.x1),
            cutoff(self.x2),
            level(self.power_at_x1),
            level(self.power_at_x2),
            level(self.power),
            level(self.sensitivity),
            self.replicates.to_string(),
            self.seed.to_string(),
        ]
    }
}

pub fn report_rows(result: &StudyResult) -> Vec<ReportRow> {
    result
        .records
        .iter()
        .map(|r| ReportRow::from_record(r, result.alpha))
        .collect()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_study_csv<W: Write>(rows: &[ReportRow], out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(STUDY_HEADER)?;
    for row in rows {
        w.write_record(row.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_study_json<W: Write>(rows: &[ReportRow], out: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, rows)
}

/// Distinct values in first-seen order.
fn ordered_unique<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn power_lookup<'a>(rows: &'a [ReportRow], alternative: &str, kind: StatisticKind, n: u64) -> Option<&'a ReportRow> {
    rows.iter()
        .find(|r| r.alternative == alternative && r.statistic == kind && r.sample_size == n)
}

/// Power curve for one alternative: one row per sample size, one column per
/// statistic. Values are formatted exactly as in `study.csv`.
pub fn write_curve_csv<W: Write>(rows: &[ReportRow], alternative: &str, out: W) -> csv::Result<()> {
    let kinds = ordered_unique(rows.iter().map(|r| r.statistic));
    let sizes = ordered_unique(
        rows.iter()
            .filter(|r| r.alternative == alternative)
            .map(|r| r.sample_size),
    );
    let mut w = csv_writer(out);
    let mut header = vec!["sample_size".to_string()];
    header.extend(kinds.iter().map(|k| k.as_str().to_string()));
    w.write_record(&header)?;
    for n in sizes {
        let mut record = vec![n.to_string()];
        for &kind in &kinds {
            let cell = power_lookup(rows, alternative, kind, n)
                .and_then(|r| r.power)
                .map(format_level)
                .unwrap_or_default();
            record.push(cell);
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Sensitivity (`1 − power`) for every alternative and sample size, with
/// the statistic of lowest sensitivity in the last column.
pub fn write_sensitivity_csv<W: Write>(rows: &[ReportRow], out: W) -> csv::Result<()> {
    let kinds = ordered_unique(rows.iter().map(|r| r.statistic));
    let alternatives = ordered_unique(rows.iter().map(|r| r.alternative.as_str()));
    let mut w = csv_writer(out);
    let mut header = vec!["alternative".to_string(), "sample_size".to_string()];
    header.extend(kinds.iter().map(|k| k.as_str().to_string()));
    header.push("lowest_sensitivity".to_string());
    w.write_record(&header)?;
    for alt in alternatives {
        let sizes = ordered_unique(
            rows.iter()
                .filter(|r| r.alternative == alt)
                .map(|r| r.sample_size),
        );
        for n in sizes {
            let mut record = vec![alt.to_string(), n.to_string()];
            let mut best: Option<(f64, StatisticKind)> = None;
            for &kind in &kinds {
                let s = power_lookup(rows, alt, kind, n).and_then(|r| r.sensitivity);
                if let Some(s) = s {
                    if best.is_none_or(|(b, _)| s < b) {
                        best = Some((s, kind));
                    }
                }
                record.push(s.map(format_level).unwrap_or_default());
            }
            record.push(best.map(|(_, k)| k.as_str().to_string()).unwrap_or_default());
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// File name for an alternative's curve, with characters outside
/// `[A-Za-z0-9_-]` replaced by `_`.
pub fn curve_file_name(label: &str) -> String {
    let safe: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("curve_{safe}.csv")
}

/// Every catalog entry as two rows, `raw` then `resolved`.
pub fn write_catalog_csv<W: Write>(out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    let entries: Vec<_> = CatalogName::ALL.into_iter().map(catalog).collect();
    let k = entries[0].raw.len();
    let mut header = vec!["name".to_string(), "row".to_string()];
    header.extend((1..=k).map(|i| format!("p{i}")));
    header.push("provenance_note".to_string());
    w.write_record(&header)?;
    for entry in &entries {
        for (row, values) in [("raw", entry.raw.as_slice()), ("resolved", entry.resolved.probs())] {
            let mut record = vec![entry.name.as_str().to_string(), row.to_string()];
            record.extend(values.iter().map(|p| p.to_string()));
            record.push(entry.provenance_note.clone());
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}
