//! LLM-backed sentiment annotation of emojis and texts.
//!
//! Every request goes through the cache first. Misses are sent to a
//! [`Transport`] with bounded retries on transient failures; a reply that
//! does not parse as a sentiment word is an answer, so it is neither retried
//! nor cached.

mod cache;
mod prompt;
mod transport;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use cache::{AnnotationCache, CacheError, CacheRecord};
pub use prompt::{
    build_emoji_prompt, build_tweet_prompt, cache_key, entry_supports, parse_sentiment_reply, ComboParseError,
    ImageAttachment, PromptPayload, ReplyParseError, Representation, RepresentationCombo, EMOJI_PROMPT_TEMPLATE,
    TWEET_PROMPT,
};
pub use transport::{
    extract_reply, request_body, CacheOnlyTransport, HttpTransport, MockTransport, Transport, TransportError,
};

use crate::lexicon::{EmojiEntry, LexiconError, SentimentLexicon};
use crate::segment::NormalizedKey;
use crate::Sentiment;

pub const DEFAULT_MODEL_ID: &str = "gpt-4o";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("emoji {key} has no {} representation", field.as_str())]
    MissingRepresentation { key: NormalizedKey, field: Representation },
    #[error("cannot read pixel image {path}: {source}")]
    PixelRead {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {error} after {attempts} attempt(s)")]
    Transport { context: String, attempts: u32, error: TransportError },
    #[error("{context}: unparseable reply {raw:?}")]
    Parse { context: String, raw: String },
    #[error(transparent)]
    Cache(#[from] CacheError),
}

impl AnnotateError {
    pub fn is_transport(&self) -> bool {
        matches!(self, AnnotateError::Transport { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 3, base_delay: Duration::from_millis(500) }
    }
}

impl RetryPolicy {
    pub fn no_delay(max_attempts: u32) -> Self {
        RetryPolicy { max_attempts, base_delay: Duration::ZERO }
    }

    fn delay_before(&self, attempt: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(attempt.saturating_sub(2))
    }
}

#[derive(Debug, Clone)]
pub struct AnnotatorOptions {
    pub model_id: String,
    pub retry: RetryPolicy,
}

impl Default for AnnotatorOptions {
    fn default() -> Self {
        AnnotatorOptions { model_id: DEFAULT_MODEL_ID.to_string(), retry: RetryPolicy::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub key: NormalizedKey,
    pub combo: RepresentationCombo,
    pub label: Sentiment,
    pub raw_reply: String,
    pub model_id: String,
    /// Whether the reply came from the cache. Not persisted.
    #[serde(skip)]
    pub cached: bool,
}

/// Reply for `payload`, from cache or transport; new replies are cached.
fn resolve(
    payload: &PromptPayload,
    context: &str,
    transport: &dyn Transport,
    cache: &AnnotationCache,
    retry: RetryPolicy,
) -> Result<(Sentiment, String, bool), AnnotateError> {
    if let Some(hit) = cache.get(&payload.cache_key) {
        return Ok((hit.label, hit.raw_reply, true));
    }
    let mut attempt = 0;
    let raw = loop {
        attempt += 1;
        if attempt > 1 {
            std::thread::sleep(retry.delay_before(attempt));
        }
        match transport.complete(payload) {
            Ok(raw) => break raw,
            Err(e) if e.is_transient() && attempt < retry.max_attempts.max(1) => {
                log::warn!("{context}: attempt {attempt} failed: {e}");
            }
            Err(error) => {
                return Err(AnnotateError::Transport { context: context.to_string(), attempts: attempt, error })
            }
        }
    };
    let label =
        parse_sentiment_reply(&raw).map_err(|e| AnnotateError::Parse { context: context.to_string(), raw: e.raw })?;
    cache.put(CacheRecord {
        cache_key: payload.cache_key.clone(),
        model_id: payload.model_id.clone(),
        label,
        raw_reply: raw.clone(),
    })?;
    Ok((label, raw, false))
}

pub fn annotate_emoji(
    entry: &EmojiEntry,
    combo: RepresentationCombo,
    transport: &dyn Transport,
    cache: &AnnotationCache,
    opts: &AnnotatorOptions,
) -> Result<AnnotationRecord, AnnotateError> {
    let payload = build_emoji_prompt(entry, combo, &opts.model_id)?;
    let context = format!("emoji {} ({combo})", entry.key);
    let (label, raw_reply, cached) = resolve(&payload, &context, transport, cache, opts.retry)?;
    Ok(AnnotationRecord { key: entry.key.clone(), combo, label, raw_reply, model_id: opts.model_id.clone(), cached })
}

/// Labels one text with the tweet ground-truth prompt.
pub fn annotate_text_ground_truth(
    id: &str,
    text: &str,
    transport: &dyn Transport,
    cache: &AnnotationCache,
    opts: &AnnotatorOptions,
) -> Result<Sentiment, AnnotateError> {
    let payload = build_tweet_prompt(text, &opts.model_id);
    resolve(&payload, &format!("text {id}"), transport, cache, opts.retry).map(|(label, _, _)| label)
}

/// Runs `work` over `0..n` on at most `in_flight` threads, returning results
/// in index order.
fn bounded_map<T: Send>(n: usize, in_flight: usize, work: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let workers = in_flight.clamp(1, n.max(1));
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let out = work(i);
                results.lock().unwrap_or_else(|e| e.into_inner())[i] = Some(out);
            });
        }
    });
    slots.into_iter().map(|o| o.expect("every index processed")).collect()
}

/// Annotates many entries with up to `in_flight` concurrent requests.
pub fn annotate_entries(
    entries: &[EmojiEntry],
    combo: RepresentationCombo,
    transport: &dyn Transport,
    cache: &AnnotationCache,
    opts: &AnnotatorOptions,
    in_flight: usize,
) -> Vec<Result<AnnotationRecord, AnnotateError>> {
    bounded_map(entries.len(), in_flight, |i| annotate_emoji(&entries[i], combo, transport, cache, opts))
}

/// Source tag recorded for annotated lexicon entries: `<model_id>/<combo>`.
pub fn annotation_source_tag(model_id: &str, combo: RepresentationCombo) -> String {
    format!("{model_id}/{}", combo.name())
}

/// Parses a source tag written by [`annotation_source_tag`].
pub fn combo_from_source_tag(tag: &str) -> Option<RepresentationCombo> {
    tag.rsplit_once('/').and_then(|(_, combo)| combo.parse().ok())
}

pub fn records_to_lexicon(
    records: &[AnnotationRecord],
    entries: &[EmojiEntry],
    created: Option<String>,
) -> Result<SentimentLexicon, LexiconError> {
    let icons: std::collections::HashMap<&NormalizedKey, &str> =
        entries.iter().map(|e| (&e.key, e.icon.as_str())).collect();
    let source = records
        .first()
        .map(|r| format!("LLM annotation {}", annotation_source_tag(&r.model_id, r.combo)))
        .unwrap_or_else(|| "LLM annotation".to_string());
    let mut b = SentimentLexicon::builder(source);
    b.set_created(created);
    for r in records {
        let icon = icons.get(&r.key).copied().unwrap_or("");
        b.insert(r.key.clone(), icon, r.label, &annotation_source_tag(&r.model_id, r.combo))?;
    }
    Ok(b.build())
}
