//! Evaluation of emoji-only predictions against text-level ground truth.

mod compare;
mod metrics;
mod report;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use compare::{compare_representations, render_comparison_csv, ComboComparison};
pub use metrics::{confusion, f1_per_class, ConfusionMatrix, Fraction};
pub use report::{render_buckets_csv, render_groups_csv, render_report_json, write_report_files, ReportFiles};

use crate::aggregate::{aggregate, AggregationConfig, Strategy};
use crate::lexicon::SentimentLexicon;
use crate::segment::segment;
use crate::Sentiment;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("prediction and truth lists differ in length ({pred} vs {truth})")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("no rows to score")]
    EmptyMatrix,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("bucket edges must start at 1 and increase strictly, got {0:?}")]
    BadBuckets(Vec<usize>),
    #[error("conflicting labels for {key} under combo {combo}")]
    ConflictingAnnotation { key: String, combo: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One evaluation row. Serialized field names follow the JSONL input format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub id: String,
    pub text: String,
    #[serde(rename = "lang")]
    pub language: String,
    pub country: String,
    #[serde(rename = "truth", default)]
    pub ground_truth: Option<Sentiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_truth: Option<Sentiment>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub rows: Vec<LabeledText>,
    /// Lines that failed to parse (or repeated an id); skipped and counted.
    pub errors: Vec<RowError>,
}

impl Dataset {
    pub fn parse(text: &str) -> Dataset {
        let mut ds = Dataset::default();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<LabeledText>(line) {
                Ok(row) if !seen.insert(row.id.clone()) => {
                    ds.errors.push(RowError { line: i + 1, message: format!("duplicate id {:?}", row.id) })
                }
                Ok(row) => ds.rows.push(row),
                Err(e) => ds.errors.push(RowError { line: i + 1, message: e.to_string() }),
            }
        }
        ds
    }

    pub fn load(path: &Path) -> Result<Dataset, EvalError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| EvalError::Io { path: path.display().to_string(), source })?;
        Ok(Self::parse(&text))
    }

    pub fn size(&self) -> usize {
        self.rows.len() + self.errors.len()
    }
}

/// Which text/label pair of a row is evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextSource {
    #[default]
    Original,
    Translated,
}

/// Lower bounds of the emoji-count buckets, e.g. `[1, 2, 4, 6]` for
/// `1`, `2-3`, `4-5`, `6+`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BucketEdges(Vec<usize>);

impl Default for BucketEdges {
    fn default() -> Self {
        BucketEdges(vec![1, 2, 4, 6])
    }
}

impl BucketEdges {
    pub fn new(edges: Vec<usize>) -> Result<Self, EvalError> {
        let ok = edges.first() == Some(&1) && edges.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(BucketEdges(edges))
        } else {
            Err(EvalError::BadBuckets(edges))
        }
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    fn ranges(&self) -> Vec<(usize, Option<usize>)> {
        self.0.iter().enumerate().map(|(i, &lo)| (lo, self.0.get(i + 1).map(|next| next - 1))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bucket {
    pub label: String,
    pub min: usize,
    pub max: Option<usize>,
    pub rows: u64,
    pub correct: u64,
    /// `None` for an empty bucket.
    pub accuracy: Option<Fraction>,
}

fn bucket_label(min: usize, max: Option<usize>) -> String {
    match max {
        Some(max) if max == min => min.to_string(),
        Some(max) => format!("{min}-{max}"),
        None => format!("{min}+"),
    }
}

/// Groups `(emoji_count, correct)` pairs into count ranges.
pub fn bucket_by_emoji_count(rows: &[(usize, bool)], edges: &BucketEdges) -> Vec<Bucket> {
    let mut buckets: Vec<Bucket> = edges
        .ranges()
        .into_iter()
        .map(|(min, max)| Bucket { label: bucket_label(min, max), min, max, rows: 0, correct: 0, accuracy: None })
        .collect();
    for &(count, correct) in rows {
        if let Some(b) = buckets.iter_mut().rev().find(|b| count >= b.min) {
            b.rows += 1;
            b.correct += u64::from(correct);
        }
    }
    for b in &mut buckets {
        b.accuracy = Fraction::new(b.correct, b.rows);
    }
    buckets
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GroupStats {
    pub rows: u64,
    pub correct: u64,
}

impl GroupStats {
    pub fn accuracy(&self) -> Option<Fraction> {
        Fraction::new(self.correct, self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowOutcome {
    pub id: String,
    pub emoji_count: usize,
    pub unknown_emojis: usize,
    pub prediction: Option<Sentiment>,
    pub truth: Option<Sentiment>,
    pub score: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub strategy: Strategy,
    pub weights: (i64, i64, i64),
    pub theta: i64,
    pub qualify_min: usize,
    pub text_source: TextSource,
    pub bucket_edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationReport {
    pub config: ConfigEcho,
    pub dataset_rows: usize,
    pub evaluated_rows: u64,
    pub excluded_no_emoji: usize,
    pub excluded_missing_truth: usize,
    pub skipped_parse_errors: usize,
    pub matrix: ConfusionMatrix,
    /// Row-level (micro) accuracy.
    pub accuracy: Option<Fraction>,
    /// Unweighted mean of per-country accuracies.
    pub macro_country_accuracy: Option<String>,
    pub f1: BTreeMap<Sentiment, Option<Fraction>>,
    pub per_language: BTreeMap<String, GroupStats>,
    pub per_country: BTreeMap<String, GroupStats>,
    pub buckets: Vec<Bucket>,
    #[serde(skip)]
    pub rows: Vec<RowOutcome>,
}

impl EvaluationReport {
    pub fn total_excluded(&self) -> usize {
        self.excluded_no_emoji + self.excluded_missing_truth + self.skipped_parse_errors
    }

    pub fn macro_country_value(&self) -> Option<f64> {
        macro_mean(&self.per_country)
    }
}

fn macro_mean(groups: &BTreeMap<String, GroupStats>) -> Option<f64> {
    let accs: Vec<f64> = groups.values().filter_map(|g| g.accuracy()).map(Fraction::value).collect();
    (!accs.is_empty()).then(|| accs.iter().sum::<f64>() / accs.len() as f64)
}

/// Segments, looks up and aggregates every row, then scores predictions.
///
/// Rows without ground truth and rows with no known emoji are excluded and
/// counted; `dataset.errors` are reported as skipped.
pub fn evaluate_strategy(
    dataset: &Dataset,
    lexicon: &SentimentLexicon,
    cfg: &AggregationConfig,
    source: TextSource,
    edges: &BucketEdges,
) -> Result<EvaluationReport, EvalError> {
    if dataset.size() == 0 {
        return Err(EvalError::EmptyDataset);
    }
    let mut matrix = ConfusionMatrix::default();
    let mut per_language: BTreeMap<String, GroupStats> = BTreeMap::new();
    let mut per_country: BTreeMap<String, GroupStats> = BTreeMap::new();
    let mut scored = Vec::new();
    let mut rows = Vec::with_capacity(dataset.rows.len());
    let (mut no_emoji, mut missing_truth) = (0, 0);

    for row in &dataset.rows {
        let (text, truth) = match source {
            TextSource::Original => (Some(row.text.as_str()), row.ground_truth),
            TextSource::Translated => (row.translated_text.as_deref(), row.translated_truth),
        };
        let seq = lexicon.sentiment_sequence(&segment(text.unwrap_or("")));
        let outcome = aggregate(&seq, cfg);
        let prediction = outcome.label.sentiment();
        rows.push(RowOutcome {
            id: row.id.clone(),
            emoji_count: seq.len(),
            unknown_emojis: seq.unknown_count,
            prediction,
            truth,
            score: outcome.score,
        });
        let (Some(truth), Some(_)) = (truth, text) else {
            missing_truth += 1;
            continue;
        };
        let Some(pred) = prediction else {
            no_emoji += 1;
            continue;
        };
        matrix.record(truth, pred);
        let correct = pred == truth;
        for (map, group) in [(&mut per_language, &row.language), (&mut per_country, &row.country)] {
            let g = map.entry(group.clone()).or_default();
            g.rows += 1;
            g.correct += u64::from(correct);
        }
        scored.push((seq.len(), correct));
    }

    let f1 = Sentiment::ALL.into_iter().zip(f1_per_class(&matrix)).collect();
    Ok(EvaluationReport {
        config: ConfigEcho {
            strategy: cfg.strategy(),
            weights: cfg.weights().triple(),
            theta: cfg.theta(),
            qualify_min: cfg.qualify_min(),
            text_source: source,
            bucket_edges: edges.edges().to_vec(),
        },
        dataset_rows: dataset.size(),
        evaluated_rows: matrix.total(),
        excluded_no_emoji: no_emoji,
        excluded_missing_truth: missing_truth,
        skipped_parse_errors: dataset.errors.len(),
        accuracy: matrix.accuracy().ok(),
        macro_country_accuracy: macro_mean(&per_country).map(|v| format!("{v:.4}")),
        matrix,
        f1,
        per_language,
        per_country,
        buckets: bucket_by_emoji_count(&scored, edges),
        rows,
    })
}
