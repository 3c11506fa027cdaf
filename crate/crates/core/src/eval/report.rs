use std::path::{Path, PathBuf};

use super::{EvaluationReport, GroupStats};
use crate::fsutil::write_atomic;

pub fn render_report_json(report: &EvaluationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `group_kind,group,rows,correct,accuracy` for languages then countries.
pub fn render_groups_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("group_kind,group,rows,correct,accuracy\n");
    let mut emit = |kind: &str, name: &str, g: &GroupStats| {
        let acc = g.accuracy().map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!("{kind},{},{},{},{acc}\n", csv_field(name), g.rows, g.correct));
    };
    for (name, g) in &report.per_language {
        emit("language", name, g);
    }
    for (name, g) in &report.per_country {
        emit("country", name, g);
    }
    out
}

pub fn render_buckets_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("emoji_count,rows,correct,accuracy\n");
    for b in &report.buckets {
        let acc = b.accuracy.map(|a| a.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{acc}\n", b.label, b.rows, b.correct));
    }
    out
}

fn render_predictions_csv(report: &EvaluationReport) -> String {
    let opt = |s: Option<crate::Sentiment>| s.map(|s| s.to_string()).unwrap_or_default();
    let mut out = String::from("id,emoji_count,unknown_emojis,score,prediction,truth\n");
    for r in &report.rows {
        let score = r.score.map(|s| s.to_string()).unwrap_or_default();
        let pred = r.prediction.map(|s| s.to_string()).unwrap_or_else(|| "no_emoji".into());
        out.push_str(&format!(
            "{},{},{},{score},{pred},{}\n",
            csv_field(&r.id),
            r.emoji_count,
            r.unknown_emojis,
            opt(r.truth)
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub report: PathBuf,
    pub groups: PathBuf,
    pub confusion: PathBuf,
    pub buckets: PathBuf,
    pub predictions: PathBuf,
}

/// Writes `report.json`, `groups.csv`, `confusion.csv`, `buckets.csv` and
/// `predictions.csv` into `dir`, each atomically.
pub fn write_report_files(report: &EvaluationReport, dir: &Path) -> std::io::Result<ReportFiles> {
    std::fs::create_dir_all(dir)?;
    let files = ReportFiles {
        report: dir.join("report.json"),
        groups: dir.join("groups.csv"),
        confusion: dir.join("confusion.csv"),
        buckets: dir.join("buckets.csv"),
        predictions: dir.join("predictions.csv"),
    };
    write_atomic(&files.report, render_report_json(report).as_bytes())?;
    write_atomic(&files.groups, render_groups_csv(report).as_bytes())?;
    write_atomic(&files.confusion, report.matrix.to_csv().as_bytes())?;
    write_atomic(&files.buckets, render_buckets_csv(report).as_bytes())?;
    write_atomic(&files.predictions, render_predictions_csv(report).as_bytes())?;
    Ok(files)
}
