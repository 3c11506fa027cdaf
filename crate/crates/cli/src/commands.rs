use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, Context};
use emoji_sentiment::aggregate::{aggregate, AggregationConfig, Strategy, Weights};
use emoji_sentiment::annotate::{
    annotate_entries, combo_from_source_tag, entry_supports, records_to_lexicon, AnnotateError, AnnotationCache,
    AnnotationRecord, AnnotatorOptions, CacheOnlyTransport, HttpTransport, MockTransport, RetryPolicy, Transport,
    DEFAULT_API_KEY_ENV, DEFAULT_ENDPOINT, DEFAULT_MODEL_ID,
};
use emoji_sentiment::eval::{
    compare_representations, evaluate_strategy, render_comparison_csv, write_report_files, BucketEdges, Dataset,
};
use emoji_sentiment::fsutil::write_atomic;
use emoji_sentiment::lexicon::{
    build_representation_dataset, load_lexicon, EmojiEntry, EsrOptions, ScoreKind, SentimentLexicon,
};
use emoji_sentiment::segment::{format_token_listing, segment_bytes};

use crate::config::FileConfig;
use crate::{
    AnalyzeArgs, AnnotateArgs, BuildDatasetArgs, CompareArgs, CreatedArg, EvaluateArgs, Failure, ImportEsrArgs,
    SegmentArgs, StrategyArgs, TransportKind,
};

pub fn segment(args: &SegmentArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let (bytes, origin) = match (&args.text, &args.file) {
        (Some(text), _) => (text.clone().into_bytes(), "argument".to_string()),
        (None, Some(path)) => (read(path)?, path.display().to_string()),
        (None, None) => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).context("cannot read stdin")?;
            (buf, "stdin".to_string())
        }
    };
    let tokens = segment_bytes(&bytes).with_context(|| format!("cannot segment {origin}"))?;
    stdout.write_all(format_token_listing(&tokens).as_bytes())?;
    Ok(())
}

pub fn import_esr(args: &ImportEsrArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let opts = EsrOptions {
        min_occurrences: args.min_occurrences,
        score_kind: if args.fractions { ScoreKind::Fractions } else { ScoreKind::Counts },
        ..EsrOptions::default()
    };
    let lexicon = emoji_sentiment::lexicon::import_esr(&args.csv, &opts)
        .with_context(|| format!("cannot import {}", args.csv.display()))?
        .with_created(created(&args.created, cfg)?);
    write(&args.out, lexicon.to_file_string().as_bytes())?;
    log::info!("wrote {} entries to {}", lexicon.len(), args.out.display());
    Ok(())
}

pub fn build_dataset(args: &BuildDatasetArgs) -> Result<(), Failure> {
    let build = build_representation_dataset(&args.unicode, &args.descriptions, &args.pixels)?;
    let mut jsonl = String::new();
    for entry in &build.entries {
        jsonl.push_str(&serde_json::to_string(entry)?);
        jsonl.push('\n');
    }
    let summary_path = args.summary.clone().unwrap_or_else(|| with_suffix(&args.out, ".summary.json"));
    let mut summary = serde_json::to_string_pretty(&build.summary)?;
    summary.push('\n');
    write(&args.out, jsonl.as_bytes())?;
    write(&summary_path, summary.as_bytes())?;
    let s = &build.summary;
    log::info!(
        "{} entries: {} without description, {} without image",
        s.entries,
        s.without_description,
        s.without_pixel
    );
    Ok(())
}

pub fn annotate(args: &AnnotateArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let transport = build_transport(args, cfg)?;
    annotate_with(args, cfg, transport.as_ref())
}

/// [`annotate`] with a caller-supplied transport; `--transport` and the
/// connection flags are ignored.
pub fn annotate_with(args: &AnnotateArgs, cfg: &FileConfig, transport: &dyn Transport) -> Result<(), Failure> {
    let entries = load_entries(&args.entries)?;
    let (usable, skipped): (Vec<EmojiEntry>, Vec<EmojiEntry>) =
        entries.into_iter().partition(|e| entry_supports(e, args.combo));
    if !skipped.is_empty() {
        log::warn!("skipping {} entries lacking a {} representation", skipped.len(), args.combo);
    }

    let cache = match &args.cache {
        Some(path) => AnnotationCache::open(path)?,
        None => AnnotationCache::in_memory(),
    };
    let opts = AnnotatorOptions {
        model_id: args.model.clone().or_else(|| cfg.model.clone()).unwrap_or_else(|| DEFAULT_MODEL_ID.into()),
        retry: RetryPolicy { max_attempts: args.retries.or(cfg.retries).unwrap_or(3), ..RetryPolicy::default() },
    };
    let in_flight = args.in_flight.or(cfg.in_flight).unwrap_or(4);

    let mut records = Vec::with_capacity(usable.len());
    let mut transport_failures = 0;
    let mut other_failures = 0;
    for result in annotate_entries(&usable, args.combo, transport, &cache, &opts, in_flight) {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                log::error!("{e}");
                if matches!(e, AnnotateError::Transport { .. }) {
                    transport_failures += 1;
                } else {
                    other_failures += 1;
                }
            }
        }
    }
    let cached = records.iter().filter(|r| r.cached).count();
    log::info!("{} labelled ({cached} from cache), {} failed", records.len(), transport_failures + other_failures);
    if transport_failures > 0 {
        return Err(Failure::transport(anyhow!(
            "{transport_failures} request(s) failed; no lexicon written to {}",
            args.out.display()
        )));
    }
    if other_failures > 0 {
        return Err(anyhow!(
            "{other_failures} entr(ies) could not be labelled; no lexicon written to {}",
            args.out.display()
        )
        .into());
    }

    let lexicon = records_to_lexicon(&records, &usable, created(&args.created, cfg)?)?;
    if let Some(path) = &args.records {
        let mut jsonl = String::new();
        for r in &records {
            jsonl.push_str(&serde_json::to_string(r)?);
            jsonl.push('\n');
        }
        write(path, jsonl.as_bytes())?;
    }
    write(&args.out, lexicon.to_file_string().as_bytes())?;
    Ok(())
}

fn build_transport(args: &AnnotateArgs, cfg: &FileConfig) -> Result<Box<dyn Transport>, Failure> {
    let kind = args.transport.or(cfg.transport).unwrap_or(TransportKind::Live);
    Ok(match kind {
        TransportKind::Live => {
            let endpoint =
                args.endpoint.clone().or_else(|| cfg.endpoint.clone()).unwrap_or_else(|| DEFAULT_ENDPOINT.into());
            let env = args.api_key_env.clone().or_else(|| cfg.api_key_env.clone());
            let env = env.as_deref().unwrap_or(DEFAULT_API_KEY_ENV);
            let timeout = Duration::from_secs(cfg.timeout_secs.unwrap_or(60));
            Box::new(HttpTransport::from_env(endpoint, env, timeout).map_err(|e| Failure::transport(e.into()))?)
        }
        TransportKind::Mock => match &args.mock_fixtures {
            Some(path) => Box::new(MockTransport::from_fixture_file(path).map_err(|e| anyhow!(e))?),
            None => Box::new(MockTransport::new()),
        },
        TransportKind::CacheOnly => Box::new(CacheOnlyTransport),
    })
}

fn load_entries(path: &Path) -> Result<Vec<EmojiEntry>, Failure> {
    let text = String::from_utf8(read(path)?).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(line).with_context(|| format!("{} line {}", path.display(), i + 1))?;
        entries.push(entry);
    }
    Ok(entries)
}

pub fn analyze(args: &AnalyzeArgs, cfg: &FileConfig, stdout: &mut dyn Write) -> Result<(), Failure> {
    let lexicon = lexicon(&args.lexicon)?;
    let agg = aggregation_config(&args.strategy, cfg)?;
    let tokens = emoji_sentiment::segment::segment(&args.text);
    let seq = lexicon.sentiment_sequence(&tokens);
    let outcome = aggregate(&seq, &agg);
    let record = serde_json::json!({
        "strategy": outcome.strategy,
        "score": outcome.score,
        "label": outcome.label.to_string(),
        "emojis": tokens.len(),
        "unknown_emojis": seq.unknown_count,
    });
    writeln!(stdout, "{record}")?;
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let dataset = Dataset::load(&args.dataset)?;
    for e in &dataset.errors {
        log::warn!("{} line {}: {}", args.dataset.display(), e.line, e.message);
    }
    let lexicon = lexicon(&args.lexicon)?;
    let agg = aggregation_config(&args.strategy, cfg)?;
    let edges = match args.buckets.clone().or_else(|| cfg.buckets.clone()) {
        Some(edges) => BucketEdges::new(edges)?,
        None => BucketEdges::default(),
    };
    let source = args.text_source.map(Into::into).or(cfg.text_source).unwrap_or_default();
    let report = evaluate_strategy(&dataset, &lexicon, &agg, source, &edges)
        .with_context(|| format!("cannot evaluate {}", args.dataset.display()))?;
    write_report_files(&report, &args.out)
        .with_context(|| format!("cannot write reports to {}", args.out.display()))?;
    log::info!(
        "{} of {} rows scored, accuracy {}",
        report.evaluated_rows,
        report.dataset_rows,
        report.accuracy.map(|a| a.to_string()).unwrap_or_else(|| "undefined".into())
    );
    Ok(())
}

pub fn compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let reference = lexicon(&args.reference)?;
    let mut records = Vec::new();
    for path in &args.annotations {
        let lex = lexicon(path)?;
        for (key, entry) in lex.iter() {
            let combo = combo_from_source_tag(&entry.source).ok_or_else(|| {
                anyhow!("{}: entry {key} has source {:?}, expected <model>/<combo>", path.display(), entry.source)
            })?;
            let model_id = entry.source.rsplit_once('/').map(|(m, _)| m).unwrap_or_default();
            records.push(AnnotationRecord {
                key: key.clone(),
                combo,
                label: entry.sentiment,
                raw_reply: entry.sentiment.to_string(),
                model_id: model_id.to_string(),
                cached: false,
            });
        }
    }
    let rows = compare_representations(&records, &reference)?;
    for r in &rows {
        if let Some(w) = &r.warning {
            log::warn!("{}: {w}", r.combo);
        }
    }
    let csv = render_comparison_csv(&rows);
    match &args.out {
        Some(path) => write(path, csv.as_bytes())?,
        None => stdout.write_all(csv.as_bytes())?,
    }
    Ok(())
}

pub fn aggregation_config(args: &StrategyArgs, cfg: &FileConfig) -> Result<AggregationConfig, Failure> {
    let strategy = match (args.strategy, &cfg.strategy) {
        (Some(s), _) => s,
        (None, Some(name)) => name.parse().context("config file")?,
        (None, None) => Strategy::Bsa,
    };
    let mut agg = AggregationConfig::for_strategy(strategy);
    let weights = match (&args.weights, cfg.weights) {
        (Some(w), _) => Some(w.clone()),
        (None, Some(w)) => Some(w.to_vec()),
        (None, None) => None,
    };
    if let Some(w) = weights {
        let [pos, neu, neg] = w[..] else {
            return Err(anyhow!("--weights needs three values pos,neu,neg, got {}", w.len()).into());
        };
        agg = agg.with_weights(Weights::new(pos, neu, neg)?);
    }
    if let Some(theta) = args.theta.or(cfg.theta) {
        agg = agg.with_theta(theta);
    }
    if let Some(q) = args.qualify_min.or(cfg.qualify_min) {
        agg = agg.with_qualify_min(q)?;
    }
    Ok(agg)
}

/// `--created`, then the config file, then SOURCE_DATE_EPOCH as a date.
fn created(arg: &CreatedArg, cfg: &FileConfig) -> anyhow::Result<Option<String>> {
    if let Some(c) = arg.created.clone().or_else(|| cfg.created.clone()) {
        return Ok(Some(c));
    }
    let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") else {
        return Ok(None);
    };
    let secs: i64 = epoch.trim().parse().with_context(|| format!("SOURCE_DATE_EPOCH={epoch:?} is not an integer"))?;
    let at = time::OffsetDateTime::from_unix_timestamp(secs).context("SOURCE_DATE_EPOCH out of range")?;
    Ok(Some(at.date().to_string()))
}

fn lexicon(path: &Path) -> anyhow::Result<SentimentLexicon> {
    load_lexicon(path).with_context(|| format!("cannot load lexicon {}", path.display()))
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    write_atomic(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
