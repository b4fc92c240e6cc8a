//! Tables and plot data built from correlation reports and score files.

use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::Corpus;
use crate::correlation::{Coefficient, CorrelationReport, Level, ScoreMatrix};
use crate::error::{Error, Result};
use crate::io;

pub fn load_reports(paths: &[&Path]) -> Result<Vec<CorrelationReport>> {
    if paths.is_empty() {
        return Err(Error::EmptySelection("no report files given".into()));
    }
    let mut out = Vec::new();
    for p in paths {
        let reports: Vec<CorrelationReport> = io::read_jsonl(p)?;
        if reports.is_empty() {
            return Err(Error::NoRecords(p.to_path_buf()));
        }
        out.extend(reports);
    }
    Ok(out)
}

fn level_title(level: Level) -> &'static str {
    match level {
        Level::System => "System-level",
        Level::Summary => "Summary-level",
        Level::AllExamples => "All-examples",
    }
}

fn filter_title(filter: &str) -> String {
    match filter {
        "inc" => "Inc.".into(),
        "exc" => "Exc.".into(),
        "" => "all".into(),
        other => other.into(),
    }
}

type Column = (Coefficient, Level, String);

fn columns(reports: &[CorrelationReport]) -> Vec<Column> {
    let mut filters: Vec<String> = Vec::new();
    let mut coefs: Vec<Coefficient> = Vec::new();
    for r in reports {
        if !filters.contains(&r.system_filter) {
            filters.push(r.system_filter.clone());
        }
        if !coefs.contains(&r.coefficient) {
            coefs.push(r.coefficient);
        }
    }
    let mut cols = Vec::new();
    for &c in &coefs {
        for level in Level::ALL {
            for f in &filters {
                let col = (c, level, f.clone());
                if reports
                    .iter()
                    .any(|r| (r.coefficient, r.level, &r.system_filter) == (c, level, f))
                {
                    cols.push(col);
                }
            }
        }
    }
    cols
}

fn metrics(reports: &[CorrelationReport]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in reports {
        if !out.contains(&r.metric) {
            out.push(r.metric.clone());
        }
    }
    out
}

fn cell(reports: &[CorrelationReport], metric: &str, col: &Column) -> String {
    reports
        .iter()
        .rev()
        .find(|r| r.metric == metric && r.coefficient == col.0 && r.level == col.1 && r.system_filter == col.2)
        .map(|r| match r.value {
            Some(v) => format!("{v:.3}"),
            None => "undef".into(),
        })
        .unwrap_or_else(|| "-".into())
}

/// One row per metric (first-appearance order) and one column per
/// `(coefficient, level, system filter)` present in the reports. Later
/// reports win on duplicates.
pub fn markdown_table(reports: &[CorrelationReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::EmptySelection("no reports".into()));
    }
    let cols = columns(reports);
    let multi_coef = cols.iter().any(|c| c.0 != cols[0].0);
    let mut out = String::from("| Method |");
    for (c, level, f) in &cols {
        let _ = write!(out, " {} {}", level_title(*level), filter_title(f));
        if multi_coef {
            let _ = write!(out, " ({c})");
        }
        out.push_str(" |");
    }
    out.push_str("\n|---|");
    for _ in &cols {
        out.push_str("---:|");
    }
    out.push('\n');
    for m in metrics(reports) {
        let _ = write!(out, "| {} |", if m.is_empty() { "(unnamed)" } else { &m });
        for col in &cols {
            let _ = write!(out, " {} |", cell(reports, &m, col));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn csv_table(reports: &[CorrelationReport]) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::EmptySelection("no reports".into()));
    }
    let mut out = String::from("metric,coefficient,level,system_filter,value,n_used,n_skipped\n");
    for r in reports {
        let value = r.value.map(|v| format!("{v}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&r.metric),
            r.coefficient,
            r.level,
            csv_field(&r.system_filter),
            value,
            r.n_used,
            r.n_skipped
        );
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Per-system mean metric score against mean human score, for scatter plots.
pub fn system_scatter_csv(metric: &ScoreMatrix, human: &ScoreMatrix, corpus: &Corpus) -> Result<String> {
    if metric.system_ids() != human.system_ids() || metric.episode_ids() != human.episode_ids() {
        return Err(Error::AxisMismatch("metric and human matrices are not aligned".into()));
    }
    let (mx, hy) = (metric.row_means()?, human.row_means()?);
    let mut out = String::from("system_id,kind,metric_mean,human_mean\n");
    for (i, s) in metric.system_ids().iter().enumerate() {
        let kind = corpus
            .system_kind(s)
            .map(|k| {
                serde_json::to_value(k)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default()
            })
            .unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", csv_field(s), kind, mx[i], hy[i]);
    }
    Ok(out)
}

/// One column per named score list, each sorted ascending; row `i` of a
/// column with `n` values sits at cumulative fraction `(i + 1) / n`. Shorter
/// columns leave trailing cells empty.
pub fn cumulative_columns_csv(series: &[(String, Vec<f64>)]) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySelection("no score series".into()));
    }
    let sorted: Vec<Vec<f64>> = series
        .iter()
        .map(|(_, v)| {
            let mut v = v.clone();
            v.sort_by(f64::total_cmp);
            v
        })
        .collect();
    let rows = sorted.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = series.iter().map(|(n, _)| csv_field(n)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for i in 0..rows {
        let line: Vec<String> = sorted
            .iter()
            .map(|v| v.get(i).map(|x| format!("{x}")).unwrap_or_default())
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(metric: &str, level: Level, filter: &str, value: Option<f64>) -> CorrelationReport {
        CorrelationReport {
            metric: metric.into(),
            level,
            coefficient: Coefficient::Spearman,
            value,
            n_used: 19,
            n_skipped: 0,
            system_filter: filter.into(),
            note: None,
        }
    }

    #[test]
    fn table_has_inc_exc_columns() {
        let reports = vec![
            rep("rouge_l_ref", Level::System, "inc", Some(0.905)),
            rep("rouge_l_ref", Level::System, "exc", Some(0.864)),
            rep("rouge_l_ref", Level::Summary, "inc", Some(0.35)),
            rep("rouge_l_ref", Level::Summary, "exc", Some(0.246)),
            rep("rouge_l_doc", Level::System, "inc", None),
        ];
        let md = markdown_table(&reports).unwrap();
        let lines: Vec<&str> = md.lines().collect();
        assert_eq!(
            lines[0],
            "| Method | System-level Inc. | System-level Exc. | Summary-level Inc. | Summary-level Exc. |"
        );
        assert_eq!(lines[2], "| rouge_l_ref | 0.905 | 0.864 | 0.350 | 0.246 |");
        assert_eq!(lines[3], "| rouge_l_doc | undef | - | - | - |");
        assert!(markdown_table(&[]).is_err());
    }

    #[test]
    fn csv_escapes_fields() {
        let csv = csv_table(&[rep("a,b", Level::AllExamples, "", Some(0.5))]).unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), "\"a,b\",spearman,all_examples,,0.5,19,0");
    }

    #[test]
    fn cumulative_columns_sorted() {
        let series: Vec<(String, Vec<f64>)> = (0..4)
            .map(|i| (format!("set{i}"), vec![3.0 - i as f64, 1.0, 2.0]))
            .collect();
        let csv = cumulative_columns_csv(&series).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "set0,set1,set2,set3");
        assert_eq!(lines.len(), 4);
        for line in &lines[1..] {
            assert_eq!(line.split(',').count(), 4);
        }
        assert_eq!(lines[1], "1,1,1,0");
        assert_eq!(lines[3], "3,2,2,2");
        assert!(cumulative_columns_csv(&[]).is_err());
    }
}
