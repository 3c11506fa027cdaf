//! Import of the Emoji Sentiment Ranking v1.0 table.
//!
//! The published CSV carries raw per-class occurrence counts; each row is
//! reduced to the class with the largest share, with ties going to neutral.

use std::collections::BTreeSet;
use std::path::Path;

use super::{LexiconError, SentimentLexicon};
use crate::segment::NormalizedKey;
use crate::Sentiment;

pub const ESR_SOURCE_TAG: &str = "esr-v1.0";

#[derive(Debug, thiserror::Error)]
pub enum EsrError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column {0:?} in header")]
    MissingColumn(String),
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: {column} score {value} outside [0, 1]")]
    ScoreOutOfRange { row: usize, column: String, value: f64 },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

/// How the per-class score columns are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// Raw counts, divided by the occurrence column.
    Counts,
    /// Already fractions in [0, 1].
    Fractions,
}

#[derive(Debug, Clone)]
pub struct EsrColumns {
    pub emoji: String,
    pub occurrences: String,
    pub negative: String,
    pub neutral: String,
    pub positive: String,
}

impl Default for EsrColumns {
    fn default() -> Self {
        Self {
            emoji: "Emoji".into(),
            occurrences: "Occurrences".into(),
            negative: "Negative".into(),
            neutral: "Neutral".into(),
            positive: "Positive".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EsrOptions {
    pub columns: EsrColumns,
    pub score_kind: ScoreKind,
    /// Rows with fewer occurrences are skipped. The public ranking lists the
    /// emojis with at least 5 occurrences.
    pub min_occurrences: u64,
}

impl Default for EsrOptions {
    fn default() -> Self {
        Self { columns: EsrColumns::default(), score_kind: ScoreKind::Counts, min_occurrences: 5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsrRecord {
    pub key: NormalizedKey,
    pub icon: String,
    pub occurrences: u64,
    pub score_negative: f64,
    pub score_neutral: f64,
    pub score_positive: f64,
    /// 1-based data row number in the source file.
    pub row: usize,
}

impl EsrRecord {
    /// Class with the strictly largest score; any tie resolves to neutral.
    pub fn label(&self) -> Sentiment {
        let scores = [
            (Sentiment::Positive, self.score_positive),
            (Sentiment::Neutral, self.score_neutral),
            (Sentiment::Negative, self.score_negative),
        ];
        let max = scores.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        let mut winners = scores.iter().filter(|(_, v)| *v == max);
        match (winners.next(), winners.next()) {
            (Some((s, _)), None) => *s,
            _ => Sentiment::Neutral,
        }
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, EsrError> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| EsrError::MissingColumn(name.to_string()))
}

pub fn read_esr(path: &Path, opts: &EsrOptions) -> Result<Vec<EsrRecord>, EsrError> {
    let file = std::fs::File::open(path).map_err(|source| EsrError::Io { path: path.display().to_string(), source })?;
    read_esr_from(file, opts)
}

pub fn read_esr_from<R: std::io::Read>(reader: R, opts: &EsrOptions) -> Result<Vec<EsrRecord>, EsrError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let c = &opts.columns;
    let idx_emoji = column_index(&headers, &c.emoji)?;
    let idx_occ = column_index(&headers, &c.occurrences)?;
    let idx = [
        (column_index(&headers, &c.negative)?, c.negative.as_str()),
        (column_index(&headers, &c.neutral)?, c.neutral.as_str()),
        (column_index(&headers, &c.positive)?, c.positive.as_str()),
    ];

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec?;
        let field = |j: usize| {
            rec.get(j)
                .map(str::trim)
                .ok_or_else(|| EsrError::Malformed { row, message: format!("missing field {}", j + 1) })
        };
        let glyph = field(idx_emoji)?;
        let key = NormalizedKey::from_glyph(glyph);
        if key.is_empty() {
            return Err(EsrError::Malformed { row, message: "empty emoji field".into() });
        }
        let occurrences: u64 = field(idx_occ)?.parse().map_err(|_| EsrError::Malformed {
            row,
            message: format!("bad occurrence count {:?}", rec.get(idx_occ)),
        })?;
        let mut scores = [0f64; 3];
        for (slot, (j, name)) in scores.iter_mut().zip(idx) {
            let raw: f64 = field(j)?
                .parse()
                .map_err(|_| EsrError::Malformed { row, message: format!("bad {name} value {:?}", rec.get(j)) })?;
            let value = match opts.score_kind {
                ScoreKind::Fractions => raw,
                ScoreKind::Counts if occurrences == 0 => 0.0,
                ScoreKind::Counts => raw / occurrences as f64,
            };
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(EsrError::ScoreOutOfRange { row, column: name.to_string(), value });
            }
            *slot = value;
        }
        if occurrences < opts.min_occurrences {
            continue;
        }
        out.push(EsrRecord {
            key,
            icon: glyph.to_string(),
            occurrences,
            score_negative: scores[0],
            score_neutral: scores[1],
            score_positive: scores[2],
            row,
        });
    }
    Ok(out)
}

/// Reads the ESR table and reduces each row to its majority class.
pub fn import_esr(path: &Path, opts: &EsrOptions) -> Result<SentimentLexicon, EsrError> {
    let records = read_esr(path, opts)?;
    lexicon_from_records(&records)
}

pub fn lexicon_from_records(records: &[EsrRecord]) -> Result<SentimentLexicon, EsrError> {
    let mut builder = SentimentLexicon::builder(format!("{ESR_SOURCE_TAG} import"));
    for r in records {
        builder.insert(r.key.clone(), &r.icon, r.label(), ESR_SOURCE_TAG)?;
    }
    Ok(builder.build())
}

/// Splits ESR rows into those whose key occurs in `dataset_keys` and the rest.
pub fn match_records<'a>(
    records: &'a [EsrRecord],
    dataset_keys: &BTreeSet<NormalizedKey>,
) -> (Vec<&'a EsrRecord>, Vec<&'a EsrRecord>) {
    records.iter().partition(|r| dataset_keys.contains(&r.key))
}
