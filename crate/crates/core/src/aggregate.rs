//! Aggregation of per-emoji sentiments into one text-level label.
//!
//! Score-bearing strategies compute an integer Σ-weight score and compare it
//! with the threshold: above is positive, equal is neutral, below is negative.
//! Everything here is integer arithmetic so the equality case is exact.
//!
//! | strategy   | score                                                    |
//! |------------|----------------------------------------------------------|
//! | `Bsa`      | Σ w(sᵢ) with weights (1, 0, −1)                          |
//! | `Dpm`      | Σ w(sᵢ) with weights (2, 1, −2)                          |
//! | `Majority` | none; strict-maximum class count                         |
//! | `First`    | w(s₁)                                                    |
//! | `Last`     | w(sₙ)                                                    |
//! | `Consec`   | Σ w · run length over runs of length ≥ `qualify_min`     |
//! | `Repeat`   | Σ w · frequency over keys with frequency ≥ `qualify_min` |
//! | `All`      | First + Consec + Repeat + Last                           |
//!
//! `Consec` and `Repeat` fall back to the plain weighted sum when no run or
//! key qualifies. With `qualify_min = 1` both reduce to the weighted sum.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::segment::NormalizedKey;
use crate::Sentiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Bsa,
    Dpm,
    Majority,
    First,
    Consec,
    Repeat,
    Last,
    All,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::Bsa,
        Strategy::Dpm,
        Strategy::Majority,
        Strategy::First,
        Strategy::Consec,
        Strategy::Repeat,
        Strategy::Last,
        Strategy::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Bsa => "bsa",
            Strategy::Dpm => "dpm",
            Strategy::Majority => "majority",
            Strategy::First => "first",
            Strategy::Consec => "consec",
            Strategy::Repeat => "repeat",
            Strategy::Last => "last",
            Strategy::All => "all",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown strategy {0:?} (expected one of bsa, dpm, majority, first, consec, repeat, last, all)")]
    UnknownStrategy(String),
    #[error("weights must satisfy w_pos > w_neu > w_neg, got ({pos}, {neu}, {neg})")]
    WeightOrder { pos: i64, neu: i64, neg: i64 },
    #[error("qualify_min must be at least 1")]
    QualifyMin,
}

impl FromStr for Strategy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConfigError::UnknownStrategy(s.to_string()))
    }
}

/// Integer sentiment weights, ordered `pos > neu > neg`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Weights {
    pos: i64,
    neu: i64,
    neg: i64,
}

impl Weights {
    pub const BSA: Weights = Weights { pos: 1, neu: 0, neg: -1 };
    pub const DPM: Weights = Weights { pos: 2, neu: 1, neg: -2 };

    pub fn new(pos: i64, neu: i64, neg: i64) -> Result<Self, ConfigError> {
        if pos > neu && neu > neg {
            Ok(Weights { pos, neu, neg })
        } else {
            Err(ConfigError::WeightOrder { pos, neu, neg })
        }
    }

    pub fn of(&self, s: Sentiment) -> i64 {
        match s {
            Sentiment::Positive => self.pos,
            Sentiment::Neutral => self.neu,
            Sentiment::Negative => self.neg,
        }
    }

    pub fn triple(&self) -> (i64, i64, i64) {
        (self.pos, self.neu, self.neg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AggregationConfig {
    weights: Weights,
    theta: i64,
    strategy: Strategy,
    qualify_min: usize,
}

impl AggregationConfig {
    /// Default configuration for a strategy: DPM weights for `Dpm`, BSA
    /// weights otherwise; θ = 0; `qualify_min` = 2.
    pub fn for_strategy(strategy: Strategy) -> Self {
        let weights = if strategy == Strategy::Dpm { Weights::DPM } else { Weights::BSA };
        AggregationConfig { weights, theta: 0, strategy, qualify_min: 2 }
    }

    pub fn new(strategy: Strategy, weights: Weights, theta: i64, qualify_min: usize) -> Result<Self, ConfigError> {
        if qualify_min == 0 {
            return Err(ConfigError::QualifyMin);
        }
        Ok(AggregationConfig { weights, theta, strategy, qualify_min })
    }

    pub fn with_qualify_min(self, qualify_min: usize) -> Result<Self, ConfigError> {
        Self::new(self.strategy, self.weights, self.theta, qualify_min)
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_theta(mut self, theta: i64) -> Self {
        self.theta = theta;
        self
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn theta(&self) -> i64 {
        self.theta
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn qualify_min(&self) -> usize {
        self.qualify_min
    }
}

/// Known-sentiment emojis of one text, in order of appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentimentSequence {
    pub tokens: Vec<(NormalizedKey, Sentiment)>,
    /// Emojis that had no lexicon entry and were dropped.
    pub unknown_count: usize,
}

impl SentimentSequence {
    pub fn new(tokens: Vec<(NormalizedKey, Sentiment)>) -> Self {
        SentimentSequence { tokens, unknown_count: 0 }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentiments(&self) -> impl Iterator<Item = Sentiment> + '_ {
        self.tokens.iter().map(|(_, s)| *s)
    }

    /// (positive, neutral, negative) counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for s in self.sentiments() {
            match s {
                Sentiment::Positive => c.0 += 1,
                Sentiment::Neutral => c.1 += 1,
                Sentiment::Negative => c.2 += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub key: NormalizedKey,
    pub sentiment: Sentiment,
    pub length: usize,
}

/// Maximal runs of identical adjacent keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunEncoding {
    pub runs: Vec<Run>,
}

/// Per-key frequency, keyed in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    pub freqs: Vec<(NormalizedKey, Sentiment, usize)>,
}

impl FrequencyTable {
    pub fn get(&self, key: &NormalizedKey) -> Option<usize> {
        self.freqs.iter().find(|(k, _, _)| k == key).map(|(_, _, n)| *n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeLabel {
    Sentiment(Sentiment),
    NoEmoji,
}

impl OutcomeLabel {
    pub fn sentiment(self) -> Option<Sentiment> {
        match self {
            OutcomeLabel::Sentiment(s) => Some(s),
            OutcomeLabel::NoEmoji => None,
        }
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeLabel::Sentiment(s) => s.fmt(f),
            OutcomeLabel::NoEmoji => f.write_str("no_emoji"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AggregationOutcome {
    pub label: OutcomeLabel,
    /// Σ-weight score; `None` for majority vote and for empty input.
    pub score: Option<i64>,
    pub strategy: Strategy,
}

impl AggregationOutcome {
    fn no_emoji(strategy: Strategy) -> Self {
        AggregationOutcome { label: OutcomeLabel::NoEmoji, score: None, strategy }
    }

    fn scored(strategy: Strategy, score: i64, theta: i64) -> Self {
        AggregationOutcome {
            label: OutcomeLabel::Sentiment(classify_score(score, theta)),
            score: Some(score),
            strategy,
        }
    }
}

pub fn weighted_sum(seq: &SentimentSequence, cfg: &AggregationConfig) -> i64 {
    seq.sentiments().map(|s| cfg.weights.of(s)).sum()
}

pub fn classify_score(score: i64, theta: i64) -> Sentiment {
    match score.cmp(&theta) {
        std::cmp::Ordering::Greater => Sentiment::Positive,
        std::cmp::Ordering::Equal => Sentiment::Neutral,
        std::cmp::Ordering::Less => Sentiment::Negative,
    }
}

pub fn run_length_encode(seq: &SentimentSequence) -> RunEncoding {
    let mut runs: Vec<Run> = Vec::new();
    for (key, s) in &seq.tokens {
        match runs.last_mut() {
            Some(run) if run.key == *key => run.length += 1,
            _ => runs.push(Run { key: key.clone(), sentiment: *s, length: 1 }),
        }
    }
    RunEncoding { runs }
}

pub fn frequency_table(seq: &SentimentSequence) -> FrequencyTable {
    let mut index: HashMap<&NormalizedKey, usize> = HashMap::new();
    let mut freqs: Vec<(NormalizedKey, Sentiment, usize)> = Vec::new();
    for (key, s) in &seq.tokens {
        match index.get(key) {
            Some(&i) => freqs[i].2 += 1,
            None => {
                index.insert(key, freqs.len());
                freqs.push((key.clone(), *s, 1));
            }
        }
    }
    FrequencyTable { freqs }
}

fn first_score(seq: &SentimentSequence, cfg: &AggregationConfig) -> Option<i64> {
    seq.tokens.first().map(|(_, s)| cfg.weights.of(*s))
}

fn last_score(seq: &SentimentSequence, cfg: &AggregationConfig) -> Option<i64> {
    seq.tokens.last().map(|(_, s)| cfg.weights.of(*s))
}

fn consecutive_score(seq: &SentimentSequence, cfg: &AggregationConfig) -> i64 {
    let qualifying: Vec<Run> =
        run_length_encode(seq).runs.into_iter().filter(|r| r.length >= cfg.qualify_min).collect();
    if qualifying.is_empty() {
        return weighted_sum(seq, cfg);
    }
    qualifying.iter().map(|r| cfg.weights.of(r.sentiment) * r.length as i64).sum()
}

fn repeated_score(seq: &SentimentSequence, cfg: &AggregationConfig) -> i64 {
    let table = frequency_table(seq);
    let mut any = false;
    let mut score = 0;
    for (_, s, f) in &table.freqs {
        if *f >= cfg.qualify_min {
            any = true;
            score += cfg.weights.of(*s) * *f as i64;
        }
    }
    if any {
        score
    } else {
        weighted_sum(seq, cfg)
    }
}

fn weighted(seq: &SentimentSequence, cfg: &AggregationConfig, strategy: Strategy) -> AggregationOutcome {
    if seq.is_empty() {
        return AggregationOutcome::no_emoji(strategy);
    }
    AggregationOutcome::scored(strategy, weighted_sum(seq, cfg), cfg.theta)
}

pub fn bsa(seq: &SentimentSequence) -> AggregationOutcome {
    weighted(seq, &AggregationConfig::for_strategy(Strategy::Bsa), Strategy::Bsa)
}

pub fn dpm(seq: &SentimentSequence) -> AggregationOutcome {
    weighted(seq, &AggregationConfig::for_strategy(Strategy::Dpm), Strategy::Dpm)
}

/// Strict-maximum class count. Without a strict maximum the sign of
/// `c_pos − c_neg` decides, and zero gives neutral.
pub fn majority_vote(seq: &SentimentSequence) -> AggregationOutcome {
    if seq.is_empty() {
        return AggregationOutcome::no_emoji(Strategy::Majority);
    }
    let (pos, neu, neg) = seq.counts();
    let label = if pos > neu.max(neg) {
        Sentiment::Positive
    } else if neu > pos.max(neg) {
        Sentiment::Neutral
    } else if neg > pos.max(neu) {
        Sentiment::Negative
    } else {
        classify_score(pos as i64 - neg as i64, 0)
    };
    AggregationOutcome { label: OutcomeLabel::Sentiment(label), score: None, strategy: Strategy::Majority }
}

pub fn first(seq: &SentimentSequence) -> AggregationOutcome {
    first_with(seq, &AggregationConfig::for_strategy(Strategy::First))
}

pub fn last(seq: &SentimentSequence) -> AggregationOutcome {
    last_with(seq, &AggregationConfig::for_strategy(Strategy::Last))
}

fn first_with(seq: &SentimentSequence, cfg: &AggregationConfig) -> AggregationOutcome {
    match first_score(seq, cfg) {
        Some(score) => AggregationOutcome::scored(Strategy::First, score, cfg.theta),
        None => AggregationOutcome::no_emoji(Strategy::First),
    }
}

fn last_with(seq: &SentimentSequence, cfg: &AggregationConfig) -> AggregationOutcome {
    match last_score(seq, cfg) {
        Some(score) => AggregationOutcome::scored(Strategy::Last, score, cfg.theta),
        None => AggregationOutcome::no_emoji(Strategy::Last),
    }
}

pub fn consecutive(seq: &SentimentSequence, cfg: &AggregationConfig) -> AggregationOutcome {
    if seq.is_empty() {
        return AggregationOutcome::no_emoji(Strategy::Consec);
    }
    AggregationOutcome::scored(Strategy::Consec, consecutive_score(seq, cfg), cfg.theta)
}

pub fn repeated(seq: &SentimentSequence, cfg: &AggregationConfig) -> AggregationOutcome {
    if seq.is_empty() {
        return AggregationOutcome::no_emoji(Strategy::Repeat);
    }
    AggregationOutcome::scored(Strategy::Repeat, repeated_score(seq, cfg), cfg.theta)
}

/// Sum of the raw First, Consec, Repeat and Last scores.
pub fn aggregate_all(seq: &SentimentSequence, cfg: &AggregationConfig) -> AggregationOutcome {
    let (Some(f), Some(l)) = (first_score(seq, cfg), last_score(seq, cfg)) else {
        return AggregationOutcome::no_emoji(Strategy::All);
    };
    let score = f + consecutive_score(seq, cfg) + repeated_score(seq, cfg) + l;
    AggregationOutcome::scored(Strategy::All, score, cfg.theta)
}

/// Applies `cfg.strategy()` with the configured weights and threshold.
pub fn aggregate(seq: &SentimentSequence, cfg: &AggregationConfig) -> AggregationOutcome {
    match cfg.strategy {
        Strategy::Bsa => weighted(seq, cfg, Strategy::Bsa),
        Strategy::Dpm => weighted(seq, cfg, Strategy::Dpm),
        Strategy::Majority => majority_vote(seq),
        Strategy::First => first_with(seq, cfg),
        Strategy::Last => last_with(seq, cfg),
        Strategy::Consec => consecutive(seq, cfg),
        Strategy::Repeat => repeated(seq, cfg),
        Strategy::All => aggregate_all(seq, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, prop_assume, proptest};
    use proptest::strategy::Strategy as PropStrategy;
    use Sentiment::{Negative as Neg, Neutral as Neu, Positive as Pos};

    fn key(i: usize) -> NormalizedKey {
        NormalizedKey::new(&[char::from_u32(0x1F600 + i as u32).unwrap()])
    }

    /// Every emoji distinct.
    fn distinct(labels: &[Sentiment]) -> SentimentSequence {
        SentimentSequence::new(labels.iter().enumerate().map(|(i, s)| (key(i), *s)).collect())
    }

    fn keyed(items: &[(usize, Sentiment)]) -> SentimentSequence {
        SentimentSequence::new(items.iter().map(|(k, s)| (key(*k), *s)).collect())
    }

    fn label(o: AggregationOutcome) -> Option<Sentiment> {
        o.label.sentiment()
    }

    fn cfg(strategy: Strategy) -> AggregationConfig {
        AggregationConfig::for_strategy(strategy)
    }

    #[test]
    fn weighted_sum_examples() {
        assert_eq!(weighted_sum(&distinct(&[Pos, Neg]), &cfg(Strategy::Bsa)), 0);
        assert_eq!(weighted_sum(&distinct(&[Pos, Pos, Neg]), &cfg(Strategy::Bsa)), 1);
        assert_eq!(weighted_sum(&distinct(&[Neu, Neu, Neg]), &cfg(Strategy::Dpm)), 0);
        assert_eq!(weighted_sum(&distinct(&[]), &cfg(Strategy::Bsa)), 0);
    }

    #[test]
    fn classify_score_three_cases() {
        assert_eq!(classify_score(1, 0), Pos);
        assert_eq!(classify_score(0, 0), Neu);
        assert_eq!(classify_score(-3, 0), Neg);
        assert_eq!(classify_score(2, 2), Neu);
    }

    #[test]
    fn bsa_examples() {
        assert_eq!(label(bsa(&distinct(&[Pos, Neg]))), Some(Neu));
        assert_eq!(label(bsa(&distinct(&[Neu, Neu, Neg]))), Some(Neg));
        assert_eq!(bsa(&distinct(&[])).label, OutcomeLabel::NoEmoji);
        assert_eq!(bsa(&distinct(&[])).score, None);
    }

    #[test]
    fn dpm_examples() {
        assert_eq!(label(dpm(&distinct(&[Neu]))), Some(Pos));
        assert_eq!(label(dpm(&distinct(&[Neu, Neu, Neg]))), Some(Neu));
        assert_eq!(label(dpm(&distinct(&[Pos, Neg]))), Some(Neu));
    }

    #[test]
    fn majority_examples() {
        let counts = |p: usize, u: usize, n: usize| {
            let mut v = vec![Pos; p];
            v.extend(vec![Neu; u]);
            v.extend(vec![Neg; n]);
            distinct(&v)
        };
        assert_eq!(label(majority_vote(&counts(2, 0, 1))), Some(Pos));
        assert_eq!(label(majority_vote(&counts(1, 1, 1))), Some(Neu));
        assert_eq!(label(majority_vote(&counts(2, 2, 0))), Some(Pos));
        assert_eq!(label(majority_vote(&counts(0, 2, 2))), Some(Neg));
        assert_eq!(label(majority_vote(&counts(0, 3, 1))), Some(Neu));
        assert_eq!(majority_vote(&counts(2, 0, 1)).score, None);
    }

    #[test]
    fn first_and_last_examples() {
        let s = distinct(&[Neg, Pos, Pos]);
        assert_eq!(label(first(&s)), Some(Neg));
        assert_eq!(label(last(&s)), Some(Pos));
        assert_eq!(label(first(&distinct(&[Neu]))), Some(Neu));
        assert_eq!(first(&distinct(&[])).label, OutcomeLabel::NoEmoji);
    }

    #[test]
    fn run_and_frequency_examples() {
        let aab = keyed(&[(0, Pos), (0, Pos), (1, Neg)]);
        let runs: Vec<_> = run_length_encode(&aab).runs.iter().map(|r| (r.key.clone(), r.length)).collect();
        assert_eq!(runs, vec![(key(0), 2), (key(1), 1)]);

        let aba = keyed(&[(0, Pos), (1, Neg), (0, Pos)]);
        let runs: Vec<_> = run_length_encode(&aba).runs.iter().map(|r| r.length).collect();
        assert_eq!(runs, vec![1, 1, 1]);
        let ft = frequency_table(&aba);
        assert_eq!(ft.get(&key(0)), Some(2));
        assert_eq!(ft.get(&key(1)), Some(1));

        assert!(run_length_encode(&distinct(&[])).runs.is_empty());
        assert!(frequency_table(&distinct(&[])).freqs.is_empty());
    }

    #[test]
    fn consecutive_examples() {
        let c = cfg(Strategy::Consec);
        let o = consecutive(&keyed(&[(0, Pos), (0, Pos), (1, Neg)]), &c);
        assert_eq!((o.score, label(o)), (Some(2), Some(Pos)));
        let o = consecutive(&keyed(&[(0, Pos), (1, Neg)]), &c);
        assert_eq!((o.score, label(o)), (Some(0), Some(Neu)));
        let o = consecutive(&keyed(&[(0, Neg), (0, Neg), (0, Neg)]), &c);
        assert_eq!((o.score, label(o)), (Some(-3), Some(Neg)));
    }

    #[test]
    fn repeated_examples() {
        let c = cfg(Strategy::Repeat);
        let o = repeated(&keyed(&[(0, Pos), (1, Neg), (0, Pos), (1, Neg), (2, Neu)]), &c);
        assert_eq!((o.score, label(o)), (Some(0), Some(Neu)));
        let o = repeated(&keyed(&[(0, Pos), (1, Neg), (2, Neu)]), &c);
        assert_eq!((o.score, label(o)), (Some(0), Some(Neu)));
        let o = repeated(&keyed(&[(0, Pos), (0, Pos)]), &c);
        assert_eq!((o.score, label(o)), (Some(2), Some(Pos)));
    }

    #[test]
    fn aggregate_all_examples() {
        let c = cfg(Strategy::All);
        let o = aggregate_all(&keyed(&[(0, Pos), (0, Pos), (1, Neg)]), &c);
        assert_eq!((o.score, label(o)), (Some(4), Some(Pos)));
        let o = aggregate_all(&keyed(&[(0, Neu)]), &c);
        assert_eq!((o.score, label(o)), (Some(0), Some(Neu)));
        let o = aggregate_all(&keyed(&[(0, Neg), (1, Pos)]), &c);
        assert_eq!((o.score, label(o)), (Some(0), Some(Neu)));
    }

    #[test]
    fn divergence_witnesses() {
        let s = distinct(&[Neg, Pos, Pos]);
        assert_eq!(label(first(&s)), Some(Neg));
        assert_eq!(label(bsa(&s)), Some(Pos));
        let s = distinct(&[Pos, Pos, Neg]);
        assert_eq!(label(last(&s)), Some(Neg));
        assert_eq!(label(first(&s)), Some(Pos));
    }

    #[test]
    fn config_validation() {
        assert!(Weights::new(1, 1, 0).is_err());
        assert!(Weights::new(1, 0, 0).is_err());
        assert!(Weights::new(0, 1, -1).is_err());
        assert_eq!(Weights::new(3, 0, -5).unwrap().triple(), (3, 0, -5));
        assert_eq!(AggregationConfig::new(Strategy::Consec, Weights::BSA, 0, 0).unwrap_err(), ConfigError::QualifyMin);
        assert_eq!("MAJORITY".parse::<Strategy>().unwrap(), Strategy::Majority);
        assert!("median".parse::<Strategy>().is_err());
    }

    #[test]
    fn aggregate_dispatch_respects_custom_weights_and_theta() {
        let c =
            AggregationConfig::for_strategy(Strategy::Bsa).with_weights(Weights::new(3, 1, -1).unwrap()).with_theta(2);
        let o = aggregate(&distinct(&[Neu, Neu]), &c);
        assert_eq!((o.score, label(o)), (Some(2), Some(Neu)));
    }

    fn arb_seq() -> impl PropStrategy<Value = SentimentSequence> {
        // One sentiment per key, as a lexicon would assign.
        (proptest::collection::vec(0..3usize, 4), proptest::collection::vec(0..4usize, 0..12)).prop_map(
            |(labels, keys)| keyed(&keys.into_iter().map(|k| (k, Sentiment::ALL[labels[k]])).collect::<Vec<_>>()),
        )
    }

    proptest! {
        #[test]
        fn order_free_strategies_are_permutation_invariant(seq in arb_seq(), seed in any::<u64>()) {
            let mut shuffled = seq.clone();
            // Deterministic Fisher-Yates driven by the seed.
            let mut state = seed | 1;
            for i in (1..shuffled.tokens.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                shuffled.tokens.swap(i, (state % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(bsa(&seq), bsa(&shuffled));
            prop_assert_eq!(dpm(&seq), dpm(&shuffled));
            prop_assert_eq!(majority_vote(&seq), majority_vote(&shuffled));
            let c = cfg(Strategy::Repeat);
            prop_assert_eq!(repeated(&seq, &c), repeated(&shuffled, &c));
        }

        #[test]
        fn sign_identities(seq in arb_seq()) {
            prop_assume!(!seq.is_empty());
            let (p, u, n) = seq.counts();
            let (p, u, n) = (p as i64, u as i64, n as i64);
            prop_assert_eq!(label(bsa(&seq)), Some(classify_score(p - n, 0)));
            prop_assert_eq!(label(dpm(&seq)), Some(classify_score(2 * p + u - 2 * n, 0)));
        }

        #[test]
        fn appending_positive_never_lowers_score(
            seq in arb_seq(),
            (pos, neu, neg) in (1i64..5, -5i64..5, -10i64..5),
        ) {
            prop_assume!(pos > neu && neu > neg);
            let c = AggregationConfig::for_strategy(Strategy::Bsa).with_weights(Weights::new(pos, neu, neg).unwrap());
            let mut longer = seq.clone();
            longer.tokens.push((key(9), Pos));
            prop_assert!(weighted_sum(&longer, &c) >= weighted_sum(&seq, &c));
        }
    }

    #[test]
    fn first_is_not_permutation_invariant() {
        let a = distinct(&[Pos, Neg]);
        let b = distinct(&[Neg, Pos]);
        assert_ne!(label(first(&a)), label(first(&b)));
    }
}
