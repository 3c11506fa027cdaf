//! Append-only on-disk reply cache.
//!
//! One record per line: `<cache_key>\t<model_id>\t<label>\t<raw_reply>` with
//! the reply escaped so it stays on one line. When a key appears more than
//! once the last line wins.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use crate::fsutil::{escape_field, unescape_field};
use crate::Sentiment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheRecord {
    pub cache_key: String,
    pub model_id: String,
    pub label: Sentiment,
    pub raw_reply: String,
}

impl CacheRecord {
    fn to_line(&self) -> String {
        format!("{}\t{}\t{}\t{}\n", self.cache_key, self.model_id, self.label, escape_field(&self.raw_reply))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cache {path} line {line}: {message}")]
    Malformed { path: String, line: usize, message: String },
}

pub struct AnnotationCache {
    path: Option<PathBuf>,
    records: RwLock<HashMap<String, CacheRecord>>,
    file: Mutex<Option<File>>,
}

impl AnnotationCache {
    pub fn in_memory() -> Self {
        AnnotationCache { path: None, records: RwLock::new(HashMap::new()), file: Mutex::new(None) }
    }

    /// Loads `path` if it exists; new records are appended to it.
    pub fn open(path: &Path) -> Result<Self, CacheError> {
        let io = |source| CacheError::Io { path: path.display().to_string(), source };
        let mut records = HashMap::new();
        match std::fs::read_to_string(path) {
            Ok(text) => {
                for (i, line) in text.lines().enumerate() {
                    if line.is_empty() {
                        continue;
                    }
                    let rec = parse_line(line).map_err(|message| CacheError::Malformed {
                        path: path.display().to_string(),
                        line: i + 1,
                        message,
                    })?;
                    records.insert(rec.cache_key.clone(), rec);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(io(e)),
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        Ok(AnnotationCache {
            path: Some(path.to_path_buf()),
            records: RwLock::new(records),
            file: Mutex::new(Some(file)),
        })
    }

    pub fn get(&self, cache_key: &str) -> Option<CacheRecord> {
        self.records.read().unwrap_or_else(|e| e.into_inner()).get(cache_key).cloned()
    }

    pub fn len(&self) -> usize {
        self.records.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends the record to disk (one `write` per line), then makes it
    /// visible to readers.
    pub fn put(&self, record: CacheRecord) -> Result<(), CacheError> {
        {
            let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
            if let Some(f) = file.as_mut() {
                f.write_all(record.to_line().as_bytes()).map_err(|source| CacheError::Io {
                    path: self.path.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                    source,
                })?;
            }
        }
        self.records.write().unwrap_or_else(|e| e.into_inner()).insert(record.cache_key.clone(), record);
        Ok(())
    }
}

fn parse_line(line: &str) -> Result<CacheRecord, String> {
    let mut parts = line.splitn(4, '\t');
    let (Some(key), Some(model), Some(label), Some(raw)) = (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err("expected 4 tab-separated fields".into());
    };
    let label = label.parse::<Sentiment>().map_err(|e| e.to_string())?;
    Ok(CacheRecord { cache_key: key.to_string(), model_id: model.to_string(), label, raw_reply: unescape_field(raw) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(key: &str, raw: &str) -> CacheRecord {
        CacheRecord { cache_key: key.into(), model_id: "m".into(), label: Sentiment::Positive, raw_reply: raw.into() }
    }

    #[test]
    fn persists_and_reloads_with_last_write_wins() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cache.tsv");
        {
            let c = AnnotationCache::open(&p).unwrap();
            c.put(rec("a", "Positive.\n")).unwrap();
            c.put(rec("b", "positive")).unwrap();
            c.put(rec("a", "positive\t!")).unwrap();
        }
        let c = AnnotationCache::open(&p).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("a").unwrap().raw_reply, "positive\t!");
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 3);
    }

    #[test]
    fn malformed_cache_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cache.tsv");
        std::fs::write(&p, "k\tm\tpositive\tok\nbroken\n").unwrap();
        assert!(matches!(AnnotationCache::open(&p), Err(CacheError::Malformed { line: 2, .. })));
    }

    #[test]
    fn concurrent_appends_keep_lines_whole() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cache.tsv");
        let c = AnnotationCache::open(&p).unwrap();
        std::thread::scope(|s| {
            for t in 0..4 {
                let c = &c;
                s.spawn(move || {
                    for i in 0..50 {
                        c.put(rec(&format!("{t}-{i}"), "positive")).unwrap();
                    }
                });
            }
        });
        drop(c);
        let c = AnnotationCache::open(&p).unwrap();
        assert_eq!(c.len(), 200);
    }
}
