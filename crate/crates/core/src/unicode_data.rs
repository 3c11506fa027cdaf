//! Parser and in-memory index for Unicode `emoji-test.txt` files.
//!
//! The bundled snapshot is Emoji 15.1 (file date 2023-06-05). Recognition
//! never consults platform tables, so results are identical on every machine.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

/// Version of the vendored `emoji-test.txt`.
pub const BUNDLED_EMOJI_VERSION: &str = "15.1";

const BUNDLED_EMOJI_TEST: &str = include_str!("../data/emoji-test.txt");

pub const VS15: char = '\u{FE0E}';
pub const VS16: char = '\u{FE0F}';
pub const ZWJ: char = '\u{200D}';

pub fn is_variation_selector(c: char) -> bool {
    c == VS15 || c == VS16
}

pub fn is_skin_tone(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

pub fn is_regional_indicator(c: char) -> bool {
    ('\u{1F1E6}'..='\u{1F1FF}').contains(&c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qualification {
    Component,
    FullyQualified,
    MinimallyQualified,
    Unqualified,
}

impl Qualification {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "component" => Some(Self::Component),
            "fully-qualified" => Some(Self::FullyQualified),
            "minimally-qualified" => Some(Self::MinimallyQualified),
            "unqualified" => Some(Self::Unqualified),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventoryLine {
    pub codepoints: Vec<char>,
    pub status: Qualification,
    /// CLDR short name, e.g. `face with tears of joy`.
    pub name: String,
    pub line: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum InventoryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Parses a whitespace-separated list of hex code points (`1F44D 1F3FD`).
pub fn parse_hex_codepoints(s: &str) -> Result<Vec<char>, String> {
    let mut out = Vec::new();
    for part in s.split_whitespace() {
        let part = part
            .strip_prefix("U+")
            .or_else(|| part.strip_prefix("u+"))
            .or_else(|| part.strip_prefix("0x"))
            .unwrap_or(part);
        let value = u32::from_str_radix(part, 16).map_err(|_| format!("invalid hex code point {part:?}"))?;
        let c = char::from_u32(value).ok_or_else(|| format!("{part} is not a Unicode scalar value"))?;
        out.push(c);
    }
    if out.is_empty() {
        return Err("empty code point list".to_string());
    }
    Ok(out)
}

pub struct HexCodepoints<'a>(pub &'a [char]);

impl fmt::Display for HexCodepoints<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{:04X}", *c as u32)?;
        }
        Ok(())
    }
}

/// Parsed `emoji-test.txt` plus the lookup sets used by the segmenter.
///
/// Keys are stored with variation selectors removed, so fully-qualified,
/// minimally-qualified and unqualified forms of one emoji share a key.
pub struct EmojiInventory {
    lines: Vec<InventoryLine>,
    keys: HashSet<Vec<char>>,
    prefixes: HashSet<Vec<char>>,
}

impl EmojiInventory {
    pub fn parse(text: &str) -> Result<Self, InventoryError> {
        let mut lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let (data, comment) = match raw.split_once('#') {
                Some((d, c)) => (d.trim(), c),
                None => (raw.trim(), ""),
            };
            if data.is_empty() {
                continue;
            }
            let (cps, status) = data
                .split_once(';')
                .ok_or_else(|| InventoryError::Malformed { line: line_no, message: "missing ';' separator".into() })?;
            let codepoints =
                parse_hex_codepoints(cps).map_err(|message| InventoryError::Malformed { line: line_no, message })?;
            let status = Qualification::parse(status.trim()).ok_or_else(|| InventoryError::Malformed {
                line: line_no,
                message: format!("unknown status {:?}", status.trim()),
            })?;
            lines.push(InventoryLine { codepoints, status, name: comment_name(comment), line: line_no });
        }
        Ok(Self::from_lines(lines))
    }

    pub fn from_path(path: &Path) -> Result<Self, InventoryError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| InventoryError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    fn from_lines(lines: Vec<InventoryLine>) -> Self {
        let mut keys = HashSet::new();
        let mut prefixes = HashSet::new();
        for l in &lines {
            let key = strip_variation_selectors(&l.codepoints);
            for end in 1..=key.len() {
                prefixes.insert(key[..end].to_vec());
            }
            keys.insert(key);
        }
        Self { lines, keys, prefixes }
    }

    /// The vendored snapshot, parsed once per process.
    pub fn bundled() -> &'static EmojiInventory {
        static INVENTORY: OnceLock<EmojiInventory> = OnceLock::new();
        INVENTORY.get_or_init(|| EmojiInventory::parse(BUNDLED_EMOJI_TEST).expect("bundled emoji-test.txt parses"))
    }

    pub fn lines(&self) -> &[InventoryLine] {
        &self.lines
    }

    pub fn fully_qualified(&self) -> impl Iterator<Item = &InventoryLine> {
        self.lines.iter().filter(|l| l.status == Qualification::FullyQualified)
    }

    /// Number of distinct variation-selector-free keys.
    pub fn key_count(&self) -> usize {
        self.keys.len()
    }

    /// `key` must already be free of variation selectors.
    pub fn contains_key(&self, key: &[char]) -> bool {
        self.keys.contains(key)
    }

    pub fn is_key_prefix(&self, key: &[char]) -> bool {
        self.prefixes.contains(key)
    }
}

/// Extracts the name from a comment like ` 😀 E1.0 grinning face`.
fn comment_name(comment: &str) -> String {
    let mut parts = comment.trim().splitn(3, ' ');
    let _glyph = parts.next();
    match (parts.next(), parts.next()) {
        (Some(version), Some(name)) if version.starts_with('E') => name.trim().to_string(),
        (Some(first), Some(rest)) => format!("{first} {rest}").trim().to_string(),
        (Some(only), None) => only.to_string(),
        _ => String::new(),
    }
}

pub fn strip_variation_selectors(cps: &[char]) -> Vec<char> {
    cps.iter().copied().filter(|c| !is_variation_selector(*c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_status_counts_match_file_trailer() {
        let inv = EmojiInventory::bundled();
        let count = |q| inv.lines().iter().filter(|l| l.status == q).count();
        assert_eq!(count(Qualification::FullyQualified), 3773);
        assert_eq!(count(Qualification::MinimallyQualified), 1009);
        assert_eq!(count(Qualification::Unqualified), 243);
        assert_eq!(count(Qualification::Component), 9);
        assert_eq!(inv.key_count(), 3782);
    }

    #[test]
    fn names_are_extracted() {
        let inv = EmojiInventory::bundled();
        let joy = inv.lines().iter().find(|l| l.codepoints == ['\u{1F602}']).unwrap();
        assert_eq!(joy.name, "face with tears of joy");
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err =
            EmojiInventory::parse("# header\n1F600 ; fully-qualified # x\nZZZZ ; fully-qualified\n").err().unwrap();
        assert!(matches!(err, InventoryError::Malformed { line: 3, .. }), "{err}");
        let err = EmojiInventory::parse("1F600 ; sort-of-qualified\n").err().unwrap();
        assert!(err.to_string().contains("unknown status"));
    }

    #[test]
    fn hex_roundtrip() {
        let cps = parse_hex_codepoints("1F44D 1f3fd").unwrap();
        assert_eq!(HexCodepoints(&cps).to_string(), "1F44D 1F3FD");
        assert_eq!(HexCodepoints(&['#']).to_string(), "0023");
        assert!(parse_hex_codepoints("D800").is_err());
        assert!(parse_hex_codepoints("  ").is_err());
    }
}
