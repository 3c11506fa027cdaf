//! Command-line front end for `emoji-sentiment`.
//!
//! [`run`] executes a parsed [`Cli`] and maps failures to exit codes: 1 for
//! bad input, 2 when the annotation service could not be reached.

pub mod commands;
pub mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use emoji_sentiment::annotate::RepresentationCombo;
use emoji_sentiment::eval::TextSource;
use serde::Deserialize;

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_TRANSPORT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "emoji-sentiment", version, about = "Emoji-based sentiment lexicons, annotation and evaluation")]
pub struct Cli {
    /// Increase log verbosity (repeatable). Logs go to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the emoji tokens of a text: `ordinal<TAB>code points<TAB>byte offset`.
    Segment(SegmentArgs),
    /// Convert the Emoji Sentiment Ranking CSV into a lexicon file.
    ImportEsr(ImportEsrArgs),
    /// Join emoji names, descriptions and images into an annotation dataset.
    BuildDataset(BuildDatasetArgs),
    /// Label dataset entries with a language model and write a lexicon.
    Annotate(AnnotateArgs),
    /// Predict the sentiment of one text and print it as JSON.
    Analyze(AnalyzeArgs),
    /// Score a strategy against a labelled dataset and write report files.
    Evaluate(EvaluateArgs),
    /// Count, per representation combination, labels agreeing with a reference lexicon.
    CompareRepresentations(CompareArgs),
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// Text to segment. Reads `--file` or stdin when omitted.
    pub text: Option<String>,
    #[arg(long, conflicts_with = "text")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportEsrArgs {
    pub csv: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Skip emojis seen fewer times than this.
    #[arg(long, default_value_t = 5)]
    pub min_occurrences: u64,
    /// Treat the score columns as fractions instead of raw counts.
    #[arg(long)]
    pub fractions: bool,
    #[command(flatten)]
    pub created: CreatedArg,
}

#[derive(Debug, Args)]
pub struct BuildDatasetArgs {
    /// Code points and names in `emoji-test.txt` format.
    #[arg(long)]
    pub unicode: PathBuf,
    /// `<hex code points><TAB><description>` lines.
    #[arg(long)]
    pub descriptions: PathBuf,
    /// Directory of emoji images named by code points.
    #[arg(long)]
    pub pixels: PathBuf,
    /// Output JSONL, one entry per line.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Completeness summary JSON; defaults to `<out>.summary.json`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// Entries JSONL written by `build-dataset`.
    pub entries: PathBuf,
    #[arg(long, default_value_t = RepresentationCombo::best())]
    pub combo: RepresentationCombo,
    #[arg(long, value_enum)]
    pub transport: Option<TransportKind>,
    /// Request→reply fixtures for `--transport mock`.
    #[arg(long)]
    pub mock_fixtures: Option<PathBuf>,
    /// Append-only reply cache.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Lexicon written when every entry was labelled.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the annotation records as JSONL.
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,
    /// Maximum concurrent requests.
    #[arg(long)]
    pub in_flight: Option<usize>,
    /// Attempts per request, including the first.
    #[arg(long)]
    pub retries: Option<u32>,
    #[command(flatten)]
    pub created: CreatedArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub text: String,
    #[arg(long, short)]
    pub lexicon: PathBuf,
    #[command(flatten)]
    pub strategy: StrategyArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Labelled JSONL dataset.
    pub dataset: PathBuf,
    #[arg(long, short)]
    pub lexicon: PathBuf,
    /// Output directory for the report files.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub text_source: Option<TextSourceArg>,
    /// Lower bounds of the emoji-count buckets, e.g. `1,2,4,6`.
    #[arg(long, value_delimiter = ',')]
    pub buckets: Option<Vec<usize>>,
    #[command(flatten)]
    pub strategy: StrategyArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Annotated lexicons; entries are grouped by the combo in their source tag.
    #[arg(required = true)]
    pub annotations: Vec<PathBuf>,
    /// Reference lexicon, usually the imported ESR table.
    #[arg(long)]
    pub reference: PathBuf,
    /// CSV output; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StrategyArgs {
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<emoji_sentiment::Strategy>,
    /// Weights `pos,neu,neg`; must be strictly decreasing.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub weights: Option<Vec<i64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<i64>,
    /// Minimum run length / frequency for consec and repeat.
    #[arg(long)]
    pub qualify_min: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CreatedArg {
    /// Value for the lexicon `created` header. Defaults to the date of
    /// SOURCE_DATE_EPOCH when set; otherwise no header is written.
    #[arg(long)]
    pub created: Option<String>,
}

fn parse_strategy(s: &str) -> Result<emoji_sentiment::Strategy, String> {
    s.parse().map_err(|e: emoji_sentiment::aggregate::ConfigError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportKind {
    Live,
    Mock,
    CacheOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextSourceArg {
    Original,
    Translated,
}

impl From<TextSourceArg> for TextSource {
    fn from(t: TextSourceArg) -> Self {
        match t {
            TextSourceArg::Original => TextSource::Original,
            TextSourceArg::Translated => TextSource::Translated,
        }
    }
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn transport(error: anyhow::Error) -> Self {
        Failure { code: EXIT_TRANSPORT, error }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: EXIT_INPUT, error: e.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Runs one command. Data goes to `stdout`; logs go through `log`.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write) -> Result<(), Failure> {
    let file_cfg = match &cli.config {
        Some(path) => config::FileConfig::load(path)?,
        None => config::FileConfig::default(),
    };
    match &cli.command {
        Command::Segment(a) => commands::segment(a, stdout),
        Command::ImportEsr(a) => commands::import_esr(a, &file_cfg),
        Command::BuildDataset(a) => commands::build_dataset(a),
        Command::Annotate(a) => commands::annotate(a, &file_cfg),
        Command::Analyze(a) => commands::analyze(a, &file_cfg, stdout),
        Command::Evaluate(a) => commands::evaluate(a, &file_cfg),
        Command::CompareRepresentations(a) => commands::compare(a, stdout),
    }
}
