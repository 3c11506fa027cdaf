//! Optional TOML defaults. Every key mirrors a command-line flag, and flags
//! always win.

use std::path::Path;

use anyhow::Context;
use emoji_sentiment::eval::TextSource;
use serde::Deserialize;

use crate::TransportKind;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub strategy: Option<String>,
    pub weights: Option<[i64; 3]>,
    pub theta: Option<i64>,
    pub qualify_min: Option<usize>,
    pub buckets: Option<Vec<usize>>,
    pub text_source: Option<TextSource>,
    pub transport: Option<TransportKind>,
    pub model: Option<String>,
    pub endpoint: Option<String>,
    pub api_key_env: Option<String>,
    pub in_flight: Option<usize>,
    pub retries: Option<u32>,
    pub timeout_secs: Option<u64>,
    pub created: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }
}
