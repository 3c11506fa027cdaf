//! Emoji → sentiment lexicons.
//!
//! File format, one record per line, UTF-8, tab separated (shown as `\t`):
//!
//! ```text
//! # source: esr-v1.0 import
//! # created: 2024-01-01T00:00:00Z
//! 1F602\t😂\tpositive\tesr-v1.0
//! ```
//!
//! Leading `# key: value` lines carry the metadata; other `#` lines and blank
//! lines are ignored.

mod dataset;
mod esr;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub use dataset::{build_representation_dataset, CompletenessSummary, DatasetBuild, DatasetError, EmojiEntry};
pub use esr::{
    import_esr, lexicon_from_records, match_records, read_esr, read_esr_from, EsrColumns, EsrError, EsrOptions,
    EsrRecord, ScoreKind, ESR_SOURCE_TAG,
};

use crate::aggregate::SentimentSequence;
use crate::fsutil::write_atomic;
use crate::segment::{EmojiToken, NormalizedKey};
use crate::Sentiment;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown sentiment word {word:?}")]
    UnknownSentiment { line: usize, word: String },
    #[error("duplicate key {key}{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    DuplicateKey { key: NormalizedKey, line: Option<usize> },
    #[error("field {field} must not contain tabs or line breaks: {value:?}")]
    InvalidField { field: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub sentiment: Sentiment,
    /// Glyph as written in the file; may carry variation selectors.
    pub icon: String,
    pub source: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconMetadata {
    pub source: String,
    /// Caller-supplied creation stamp. Never filled from the clock, so that
    /// rewriting an unchanged lexicon is byte-identical.
    pub created: Option<String>,
}

/// Which link of the lookup fallback chain resolved a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackStage {
    Exact,
    SkinToneStripped,
    ZwjBase,
}

/// Immutable map from normalized emoji key to sentiment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentimentLexicon {
    entries: BTreeMap<NormalizedKey, LexiconEntry>,
    metadata: LexiconMetadata,
}

impl SentimentLexicon {
    pub fn builder(source: impl Into<String>) -> LexiconBuilder {
        LexiconBuilder { entries: BTreeMap::new(), metadata: LexiconMetadata { source: source.into(), created: None } }
    }

    pub fn metadata(&self) -> &LexiconMetadata {
        &self.metadata
    }

    /// Replaces the `created` stamp written to the file header.
    pub fn with_created(mut self, created: Option<String>) -> Self {
        self.metadata.created = created;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &NormalizedKey) -> Option<&LexiconEntry> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NormalizedKey, &LexiconEntry)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &NormalizedKey> {
        self.entries.keys()
    }

    /// Resolves a key through exact match, then with skin tones removed, then
    /// via the first element of a ZWJ sequence.
    pub fn resolve(&self, key: &NormalizedKey) -> Option<(Sentiment, FallbackStage)> {
        if let Some(e) = self.entries.get(key) {
            return Some((e.sentiment, FallbackStage::Exact));
        }
        let toneless = key.without_skin_tones();
        if toneless != *key && !toneless.is_empty() {
            if let Some(e) = self.entries.get(&toneless) {
                return Some((e.sentiment, FallbackStage::SkinToneStripped));
            }
        }
        key.zwj_base().and_then(|base| self.entries.get(&base)).map(|e| (e.sentiment, FallbackStage::ZwjBase))
    }

    /// `None` stands for an unknown emoji.
    pub fn lookup(&self, token: &EmojiToken) -> Option<Sentiment> {
        self.resolve(&token.key()).map(|(s, _)| s)
    }

    /// Looks up every token, dropping (and counting) unknown ones.
    pub fn sentiment_sequence(&self, tokens: &[EmojiToken]) -> SentimentSequence {
        let mut seq = SentimentSequence::default();
        for t in tokens {
            let key = t.key();
            match self.resolve(&key) {
                Some((s, _)) => seq.tokens.push((key, s)),
                None => seq.unknown_count += 1,
            }
        }
        seq
    }

    /// Keys present both here and in `keys`.
    pub fn intersect_keys<'a>(&self, keys: impl IntoIterator<Item = &'a NormalizedKey>) -> BTreeSet<NormalizedKey> {
        keys.into_iter().filter(|k| self.entries.contains_key(*k)).cloned().collect()
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# source: {}\n", self.metadata.source));
        if let Some(created) = &self.metadata.created {
            out.push_str(&format!("# created: {created}\n"));
        }
        for (key, e) in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", key.to_hex(), e.icon, e.sentiment, e.source));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut builder = SentimentLexicon::builder("");
        let mut in_header = true;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            if raw.trim().is_empty() {
                continue;
            }
            if let Some(comment) = raw.strip_prefix('#') {
                if in_header {
                    if let Some((k, v)) = comment.trim_start().split_once(':') {
                        match k.trim() {
                            "source" => builder.metadata.source = v.trim().to_string(),
                            "created" => builder.metadata.created = Some(v.trim().to_string()),
                            _ => {}
                        }
                    }
                }
                continue;
            }
            in_header = false;
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() != 4 {
                return Err(LexiconError::Malformed {
                    line,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let key =
                NormalizedKey::from_hex(fields[0]).map_err(|message| LexiconError::Malformed { line, message })?;
            let sentiment = fields[2]
                .parse::<Sentiment>()
                .map_err(|_| LexiconError::UnknownSentiment { line, word: fields[2].to_string() })?;
            let icon_key = NormalizedKey::from_glyph(fields[1]);
            if icon_key != key {
                return Err(LexiconError::Malformed {
                    line,
                    message: format!("icon {:?} does not match key {key}", fields[1]),
                });
            }
            builder.insert_at(key, fields[1], sentiment, fields[3], Some(line))?;
        }
        Ok(builder.build())
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        write_atomic(path, self.to_file_string().as_bytes())
    }
}

pub fn load_lexicon(path: &Path) -> Result<SentimentLexicon, LexiconError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
    SentimentLexicon::parse(&text)
}

pub fn write_lexicon(lexicon: &SentimentLexicon, path: &Path) -> std::io::Result<()> {
    lexicon.write(path)
}

#[derive(Debug, Clone)]
pub struct LexiconBuilder {
    entries: BTreeMap<NormalizedKey, LexiconEntry>,
    metadata: LexiconMetadata,
}

impl LexiconBuilder {
    pub fn created(mut self, created: impl Into<String>) -> Self {
        self.metadata.created = Some(created.into());
        self
    }

    pub fn set_created(&mut self, created: Option<String>) {
        self.metadata.created = created;
    }

    pub fn insert(
        &mut self,
        key: NormalizedKey,
        icon: &str,
        sentiment: Sentiment,
        source: &str,
    ) -> Result<(), LexiconError> {
        self.insert_at(key, icon, sentiment, source, None)
    }

    pub fn insert_glyph(&mut self, glyph: &str, sentiment: Sentiment, source: &str) -> Result<(), LexiconError> {
        self.insert(NormalizedKey::from_glyph(glyph), glyph, sentiment, source)
    }

    fn insert_at(
        &mut self,
        key: NormalizedKey,
        icon: &str,
        sentiment: Sentiment,
        source: &str,
        line: Option<usize>,
    ) -> Result<(), LexiconError> {
        for (field, value) in [("icon", icon), ("source", source)] {
            if value.contains(['\t', '\n', '\r']) {
                return Err(LexiconError::InvalidField { field, value: value.to_string() });
            }
        }
        let key = key.normalize();
        if key.is_empty() {
            return Err(LexiconError::Malformed { line: line.unwrap_or(0), message: "empty key".into() });
        }
        if self.entries.contains_key(&key) {
            return Err(LexiconError::DuplicateKey { key, line });
        }
        let icon = if icon.is_empty() { key.glyph() } else { icon.to_string() };
        self.entries.insert(key, LexiconEntry { sentiment, icon, source: source.to_string() });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(self) -> SentimentLexicon {
        SentimentLexicon { entries: self.entries, metadata: self.metadata }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::segment;
    use proptest::prelude::*;

    fn lex(pairs: &[(&str, Sentiment)]) -> SentimentLexicon {
        let mut b = SentimentLexicon::builder("test");
        for (g, s) in pairs {
            b.insert_glyph(g, *s, "t").unwrap();
        }
        b.build()
    }

    #[test]
    fn three_lines_give_three_entries() {
        let text = "1F602\t😂\tpositive\tesr\n1F62D\t😭\tnegative\tesr\n1F610\t😐\tneutral\tesr\n";
        let l = SentimentLexicon::parse(text).unwrap();
        assert_eq!(l.len(), 3);
    }

    #[test]
    fn duplicate_key_is_reported() {
        let text = "1F602\t😂\tpositive\tesr\n1F602\t😂\tnegative\tesr\n";
        match SentimentLexicon::parse(text) {
            Err(LexiconError::DuplicateKey { key, line }) => {
                assert_eq!(key.to_hex(), "1F602");
                assert_eq!(line, Some(2));
            }
            other => panic!("expected duplicate-key error, got {other:?}"),
        }
        // Keys differing only by VS16 collide after normalization.
        let text = "2764\t❤\tpositive\ta\n2764 FE0F\t❤️\tpositive\ta\n";
        assert!(matches!(SentimentLexicon::parse(text), Err(LexiconError::DuplicateKey { .. })));
    }

    #[test]
    fn empty_file_is_empty_lexicon() {
        let l = SentimentLexicon::parse("").unwrap();
        assert_eq!(l.len(), 0);
    }

    #[test]
    fn malformed_lines() {
        let e = SentimentLexicon::parse("1F602\t😂\tpositive\n").unwrap_err();
        assert!(matches!(e, LexiconError::Malformed { line: 1, .. }));
        let e = SentimentLexicon::parse("# c\n\n1F602\t😂\tjoyful\tx\n").unwrap_err();
        assert!(matches!(e, LexiconError::UnknownSentiment { line: 3, .. }));
        let e = SentimentLexicon::parse("XYZ\t😂\tpositive\tx\n").unwrap_err();
        assert!(matches!(e, LexiconError::Malformed { line: 1, .. }));
        let e = SentimentLexicon::parse("1F602\t👍\tpositive\tx\n").unwrap_err();
        assert!(e.to_string().contains("does not match"));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_lexicon(Path::new("/nonexistent/lex.tsv")), Err(LexiconError::Io { .. })));
    }

    #[test]
    fn lookup_fallback_chain() {
        let l = lex(&[("👍", Sentiment::Positive), ("👩", Sentiment::Neutral)]);
        let tok = |s: &str| segment(s).remove(0);
        assert_eq!(l.lookup(&tok("👍🏽")), Some(Sentiment::Positive));
        assert_eq!(l.resolve(&tok("👍🏽").key()).unwrap().1, FallbackStage::SkinToneStripped);
        assert_eq!(l.lookup(&tok("👍")), Some(Sentiment::Positive));
        assert_eq!(l.resolve(&tok("👩🏽‍💻").key()).unwrap(), (Sentiment::Neutral, FallbackStage::ZwjBase));
        assert_eq!(l.lookup(&tok("😂")), None);
    }

    #[test]
    fn exact_entry_overrides_fallback() {
        let base = lex(&[("👍", Sentiment::Positive)]);
        let t = segment("👍🏿").remove(0);
        assert_eq!(base.resolve(&t.key()).unwrap().1, FallbackStage::SkinToneStripped);
        let both = lex(&[("👍", Sentiment::Positive), ("👍🏿", Sentiment::Negative)]);
        assert_eq!(both.resolve(&t.key()), Some((Sentiment::Negative, FallbackStage::Exact)));
    }

    #[test]
    fn sequence_drops_unknowns() {
        let l = lex(&[("😂", Sentiment::Positive)]);
        let seq = l.sentiment_sequence(&segment("😂 🦀 😂"));
        assert_eq!(seq.tokens.len(), 2);
        assert_eq!(seq.unknown_count, 1);
    }

    #[test]
    fn rejects_tabs_in_source_tag() {
        let mut b = SentimentLexicon::builder("x");
        assert!(b.insert_glyph("😂", Sentiment::Positive, "a\tb").is_err());
    }

    fn arb_lexicon() -> impl Strategy<Value = SentimentLexicon> {
        let inv = crate::unicode_data::EmojiInventory::bundled();
        let glyphs: Vec<String> = inv.fully_qualified().map(|l| l.codepoints.iter().collect()).collect();
        (
            proptest::collection::btree_map(0..glyphs.len(), (0..3usize, "[a-z0-9./+-]{1,12}"), 0..40),
            "[a-zA-Z0-9 ._-]{0,20}",
            proptest::option::of("[0-9TZ:-]{1,20}"),
        )
            .prop_map(move |(picks, source, created)| {
                let mut b = SentimentLexicon::builder(source.trim().to_string());
                b.set_created(created);
                for (i, (s, tag)) in picks {
                    let _ = b.insert_glyph(&glyphs[i], Sentiment::ALL[s], &tag);
                }
                b.build()
            })
    }

    proptest! {
        #[test]
        fn file_roundtrip(l in arb_lexicon()) {
            let back = SentimentLexicon::parse(&l.to_file_string()).unwrap();
            prop_assert_eq!(back, l);
        }

        #[test]
        fn literal_keys_never_unknown(l in arb_lexicon()) {
            for (k, e) in l.iter() {
                prop_assert_eq!(l.resolve(k), Some((e.sentiment, FallbackStage::Exact)));
            }
        }
    }
}
