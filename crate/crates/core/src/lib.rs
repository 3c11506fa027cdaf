//! Emoji-driven sentiment inference for multilingual text.
//!
//! The crate is organised around the pipeline a text goes through:
//!
//! - [`segment`] extracts the ordered emoji sequence from arbitrary UTF-8 text,
//!   using a vendored Unicode `emoji-test.txt` snapshot ([`unicode_data`]).
//! - [`lexicon`] maps each emoji to a [`Sentiment`], imports the Emoji
//!   Sentiment Ranking reference table and assembles multi-representation
//!   emoji datasets.
//! - [`aggregate`] turns a sequence of per-emoji sentiments into one label with
//!   the weighted-sum, majority-vote and position-aware strategies.
//! - [`annotate`] drives a chat-completions service (or an offline mock) to
//!   label emojis and texts, with an append-only on-disk cache.
//! - [`eval`] computes confusion matrices, accuracy, per-class F1 and the
//!   per-group and per-emoji-count breakdowns.
//!
//! ```
//! use emoji_sentiment::{aggregate, lexicon::SentimentLexicon, segment, Sentiment};
//!
//! let mut lexicon = SentimentLexicon::builder("example");
//! lexicon.insert_glyph("😂", Sentiment::Positive, "manual").unwrap();
//! lexicon.insert_glyph("👍", Sentiment::Positive, "manual").unwrap();
//! let lexicon = lexicon.build();
//!
//! let seq = lexicon.sentiment_sequence(&segment::segment("Great 😂👍"));
//! let outcome = aggregate::bsa(&seq);
//! assert_eq!(outcome.label.sentiment(), Some(Sentiment::Positive));
//! assert_eq!(outcome.score, Some(2));
//! ```

pub mod aggregate;
pub mod annotate;
pub mod eval;
pub mod fsutil;
pub mod lexicon;
pub mod segment;
pub mod sentiment;
pub mod unicode_data;

pub use aggregate::{AggregationConfig, AggregationOutcome, Strategy};
pub use segment::{EmojiToken, NormalizedKey};
pub use sentiment::Sentiment;
