use std::collections::BTreeMap;

use emoji_sentiment::aggregate::{AggregationConfig, Strategy as Agg};
use emoji_sentiment::eval::{
    confusion, evaluate_strategy, f1_per_class, BucketEdges, Dataset, LabeledText, TextSource,
};
use emoji_sentiment::lexicon::SentimentLexicon;
use emoji_sentiment::Sentiment;
use proptest::prelude::*;

fn sentiment() -> impl Strategy<Value = Sentiment> {
    prop::sample::select(Sentiment::ALL.to_vec())
}

fn lexicon() -> SentimentLexicon {
    let mut b = SentimentLexicon::builder("test");
    for (glyph, s) in [
        ("😂", Sentiment::Positive),
        ("👍", Sentiment::Positive),
        ("😐", Sentiment::Neutral),
        ("⚽", Sentiment::Neutral),
        ("😭", Sentiment::Negative),
        ("💔", Sentiment::Negative),
    ] {
        b.insert_glyph(glyph, s, "test").unwrap();
    }
    b.build()
}

/// Glyphs drawn for rows; the last one is missing from the lexicon.
const GLYPHS: [&str; 7] = ["😂", "👍", "😐", "⚽", "😭", "💔", "🦄"];

fn row() -> impl Strategy<Value = (Vec<usize>, Option<Sentiment>, usize, usize)> {
    (prop::collection::vec(0..GLYPHS.len(), 0..9), prop::option::weighted(0.9, sentiment()), 0..4usize, 0..6usize)
}

fn dataset(rows: &[(Vec<usize>, Option<Sentiment>, usize, usize)]) -> Dataset {
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, (glyphs, truth, lang, country))| LabeledText {
            id: format!("r{i}"),
            text: format!("row {i} {}", glyphs.iter().map(|&g| GLYPHS[g]).collect::<String>()),
            language: ["en", "es", "ja", "ar"][*lang].to_string(),
            country: format!("C{country}"),
            ground_truth: *truth,
            translated_text: None,
            translated_truth: None,
        })
        .collect();
    Dataset { rows, errors: Vec::new() }
}

fn strategy() -> impl Strategy<Value = Agg> {
    prop::sample::select(vec![
        Agg::Bsa,
        Agg::Dpm,
        Agg::Majority,
        Agg::First,
        Agg::Consec,
        Agg::Repeat,
        Agg::Last,
        Agg::All,
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f1_matches_brute_force(pairs in prop::collection::vec((sentiment(), sentiment()), 0..=1000)) {
        let (pred, truth): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
        let m = confusion(&pred, &truth).unwrap();
        prop_assert_eq!(m.total(), pairs.len() as u64);
        for (c, f1) in Sentiment::ALL.into_iter().zip(f1_per_class(&m)) {
            let tp = pairs.iter().filter(|(p, t)| *p == c && *t == c).count() as u64;
            let fp = pairs.iter().filter(|(p, t)| *p == c && *t != c).count() as u64;
            let fneg = pairs.iter().filter(|(p, t)| *p != c && *t == c).count() as u64;
            match f1 {
                None => prop_assert_eq!(tp + fp + fneg, 0),
                Some(f) => prop_assert!(f.equals(2 * tp, 2 * tp + fp + fneg)),
            }
        }
        if !pairs.is_empty() {
            let correct = pairs.iter().filter(|(p, t)| p == t).count() as u64;
            prop_assert!(m.accuracy().unwrap().equals(correct, pairs.len() as u64));
        }
    }

    #[test]
    fn report_invariants(rows in prop::collection::vec(row(), 1..200), strat in strategy()) {
        let ds = dataset(&rows);
        let report = evaluate_strategy(
            &ds,
            &lexicon(),
            &AggregationConfig::for_strategy(strat),
            TextSource::Original,
            &BucketEdges::default(),
        )
        .unwrap();

        // accuracy = trace / total
        match report.accuracy {
            Some(acc) => prop_assert!(acc.equals(report.matrix.trace(), report.matrix.total())),
            None => prop_assert_eq!(report.matrix.total(), 0),
        }

        // Exclusions plus bucket populations account for every row.
        let bucketed: u64 = report.buckets.iter().map(|b| b.rows).sum();
        prop_assert_eq!(report.total_excluded() as u64 + bucketed, report.dataset_rows as u64);
        prop_assert_eq!(bucketed, report.evaluated_rows);

        // Population-weighted group accuracy equals overall accuracy.
        for groups in [&report.per_language, &report.per_country] {
            let rows: u64 = groups.values().map(|g| g.rows).sum();
            let correct: u64 = groups.values().map(|g| g.correct).sum();
            prop_assert_eq!(rows, report.matrix.total());
            prop_assert_eq!(correct, report.matrix.trace());
        }

        // Row outcomes agree with an independent tally.
        let expected_no_emoji = rows
            .iter()
            .filter(|(glyphs, truth, _, _)| truth.is_some() && glyphs.iter().all(|&g| g == GLYPHS.len() - 1))
            .count();
        prop_assert_eq!(report.excluded_no_emoji, expected_no_emoji);
        prop_assert_eq!(report.excluded_missing_truth, rows.iter().filter(|r| r.1.is_none()).count());
    }

    #[test]
    fn row_order_does_not_change_metrics(rows in prop::collection::vec(row(), 1..100), strat in strategy()) {
        let cfg = AggregationConfig::for_strategy(strat);
        let edges = BucketEdges::default();
        let a = evaluate_strategy(&dataset(&rows), &lexicon(), &cfg, TextSource::Original, &edges).unwrap();
        let mut reversed = dataset(&rows);
        reversed.rows.reverse();
        let b = evaluate_strategy(&reversed, &lexicon(), &cfg, TextSource::Original, &edges).unwrap();
        prop_assert_eq!(a.matrix, b.matrix);
        prop_assert_eq!(a.per_country, b.per_country);
        prop_assert_eq!(a.buckets, b.buckets);
    }
}

#[test]
fn four_row_fixture_scores_three_of_four() {
    let ds = Dataset::parse(concat!(
        r#"{"id":"a","text":"great 😂","lang":"en","country":"US","truth":"positive"}"#,
        "\n",
        r#"{"id":"b","text":"sad 😭😭","lang":"en","country":"US","truth":"negative"}"#,
        "\n",
        r#"{"id":"c","text":"ok ⚽","lang":"es","country":"MX","truth":"neutral"}"#,
        "\n",
        r#"{"id":"d","text":"hmm 👍","lang":"es","country":"MX","truth":"negative"}"#,
        "\n",
        r#"{"id":"e","text":"no emoji here","lang":"es","country":"MX","truth":"negative"}"#,
        "\n",
        r#"{"id":"f","text":"unlabelled 😂","lang":"es","country":"MX"}"#,
        "\n",
        "not json\n",
    ));
    let report = evaluate_strategy(
        &ds,
        &lexicon(),
        &AggregationConfig::for_strategy(Agg::Bsa),
        TextSource::Original,
        &BucketEdges::default(),
    )
    .unwrap();
    assert!(report.accuracy.unwrap().equals(3, 4));
    assert_eq!(report.accuracy.unwrap().to_string(), "0.7500");
    assert_eq!((report.excluded_no_emoji, report.excluded_missing_truth, report.skipped_parse_errors), (1, 1, 1));
    assert_eq!(report.dataset_rows, 7);
    // US 2/2, MX 1/2: the macro mean is 0.75 here, equal to the micro value
    // only because both countries have two rows.
    assert_eq!(report.macro_country_accuracy.as_deref(), Some("0.7500"));
    let populations: BTreeMap<&str, u64> = report.buckets.iter().map(|b| (b.label.as_str(), b.rows)).collect();
    assert_eq!(populations, BTreeMap::from([("1", 3), ("2-3", 1), ("4-5", 0), ("6+", 0)]));
}

#[test]
fn macro_average_weights_countries_equally() {
    let mut lines = String::new();
    for i in 0..4 {
        lines.push_str(&format!(
            "{{\"id\":\"big{i}\",\"text\":\"😂\",\"lang\":\"en\",\"country\":\"BIG\",\"truth\":\"positive\"}}\n"
        ));
    }
    lines.push_str(r#"{"id":"small","text":"😂","lang":"en","country":"SMALL","truth":"negative"}"#);
    let report = evaluate_strategy(
        &Dataset::parse(&lines),
        &lexicon(),
        &AggregationConfig::for_strategy(Agg::Bsa),
        TextSource::Original,
        &BucketEdges::default(),
    )
    .unwrap();
    assert!(report.accuracy.unwrap().equals(4, 5));
    assert_eq!(report.macro_country_accuracy.as_deref(), Some("0.5000"));
}
