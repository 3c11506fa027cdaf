//! Emoji sequence extraction.
//!
//! Text is first split on extended grapheme cluster boundaries. Each cluster
//! is then scanned for the longest runs of code points that form a known
//! emoji key (variation selectors ignored). A ZWJ sequence therefore stays a
//! single token only when the joined sequence is listed in the inventory;
//! unknown combinations fall apart into their known components.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use unicode_segmentation::UnicodeSegmentation;

use crate::unicode_data::{
    is_skin_tone, is_variation_selector, parse_hex_codepoints, strip_variation_selectors, EmojiInventory,
    HexCodepoints, ZWJ,
};

/// One emoji occurrence in a source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiToken {
    /// Code points exactly as they appear in the source, including any
    /// variation selectors.
    pub codepoints: Vec<char>,
    pub byte_offset: usize,
    pub ordinal: usize,
}

impl EmojiToken {
    pub fn as_string(&self) -> String {
        self.codepoints.iter().collect()
    }

    pub fn byte_len(&self) -> usize {
        self.codepoints.iter().map(|c| c.len_utf8()).sum()
    }

    pub fn key(&self) -> NormalizedKey {
        normalize(self)
    }
}

/// Variation-selector-free code point sequence used as a lexicon key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedKey(Vec<char>);

impl NormalizedKey {
    pub fn new(codepoints: &[char]) -> Self {
        NormalizedKey(strip_variation_selectors(codepoints))
    }

    pub fn from_glyph(glyph: &str) -> Self {
        let cps: Vec<char> = glyph.chars().collect();
        Self::new(&cps)
    }

    /// Parses `1F44D 1F3FD`-style hex lists.
    pub fn from_hex(hex: &str) -> Result<Self, String> {
        parse_hex_codepoints(hex).map(|cps| Self::new(&cps))
    }

    pub fn codepoints(&self) -> &[char] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        HexCodepoints(&self.0).to_string()
    }

    pub fn glyph(&self) -> String {
        self.0.iter().collect()
    }

    pub fn normalize(&self) -> NormalizedKey {
        NormalizedKey::new(&self.0)
    }

    /// Removes Fitzpatrick skin-tone modifiers.
    pub fn without_skin_tones(&self) -> NormalizedKey {
        NormalizedKey(self.0.iter().copied().filter(|c| !is_skin_tone(*c)).collect())
    }

    /// First element of a ZWJ sequence with skin tones removed, or `None`
    /// when the key contains no joiner.
    pub fn zwj_base(&self) -> Option<NormalizedKey> {
        let pos = self.0.iter().position(|c| *c == ZWJ)?;
        let head = NormalizedKey(self.0[..pos].to_vec()).without_skin_tones();
        (!head.is_empty()).then_some(head)
    }
}

impl fmt::Display for NormalizedKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        HexCodepoints(&self.0).fmt(f)
    }
}

impl Serialize for NormalizedKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for NormalizedKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        NormalizedKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("input is not valid UTF-8: {0}")]
pub struct EncodingError(#[from] pub std::str::Utf8Error);

/// Emoji extractor bound to one inventory.
#[derive(Clone, Copy)]
pub struct Segmenter<'a> {
    inventory: &'a EmojiInventory,
}

impl Default for Segmenter<'static> {
    fn default() -> Self {
        Segmenter { inventory: EmojiInventory::bundled() }
    }
}

impl<'a> Segmenter<'a> {
    pub fn new(inventory: &'a EmojiInventory) -> Self {
        Segmenter { inventory }
    }

    pub fn segment(&self, text: &str) -> Vec<EmojiToken> {
        let mut tokens = Vec::new();
        for (cluster_offset, cluster) in text.grapheme_indices(true) {
            // A lone ASCII character is never an emoji key; keycaps carry U+20E3
            // in the same cluster.
            if cluster.len() == 1 {
                continue;
            }
            self.scan_cluster(cluster, cluster_offset, &mut tokens);
        }
        tokens
    }

    fn scan_cluster(&self, cluster: &str, base: usize, out: &mut Vec<EmojiToken>) {
        let chars: Vec<(usize, char)> = cluster.char_indices().collect();
        let mut i = 0;
        let mut key = Vec::with_capacity(8);
        while i < chars.len() {
            let c = chars[i].1;
            if is_variation_selector(c) || c == ZWJ {
                i += 1;
                continue;
            }
            key.clear();
            let mut best = None;
            for (j, &(_, cj)) in chars.iter().enumerate().skip(i) {
                if is_variation_selector(cj) {
                    continue;
                }
                key.push(cj);
                if !self.inventory.is_key_prefix(&key) {
                    break;
                }
                if self.inventory.contains_key(&key) {
                    best = Some(j);
                }
            }
            match best {
                Some(last) => {
                    let mut end = last + 1;
                    while end < chars.len() && is_variation_selector(chars[end].1) {
                        end += 1;
                    }
                    out.push(EmojiToken {
                        codepoints: chars[i..end].iter().map(|(_, c)| *c).collect(),
                        byte_offset: base + chars[i].0,
                        ordinal: out.len(),
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
    }

    pub fn is_emoji(&self, candidate: &[char]) -> bool {
        let key = strip_variation_selectors(candidate);
        !key.is_empty() && self.inventory.contains_key(&key)
    }
}

/// Extracts every emoji sequence in `text`, in order of appearance.
pub fn segment(text: &str) -> Vec<EmojiToken> {
    Segmenter::default().segment(text)
}

/// Like [`segment`] but accepts raw bytes and rejects invalid UTF-8.
pub fn segment_bytes(bytes: &[u8]) -> Result<Vec<EmojiToken>, EncodingError> {
    Ok(segment(std::str::from_utf8(bytes)?))
}

/// True iff `candidate` is a recognised emoji sequence in the bundled snapshot.
pub fn is_emoji(candidate: &[char]) -> bool {
    Segmenter::default().is_emoji(candidate)
}

pub fn normalize(token: &EmojiToken) -> NormalizedKey {
    NormalizedKey::new(&token.codepoints)
}

/// `<ordinal>\t<hex codepoints>\t<byte_offset>` listing, one token per line.
pub fn format_token_listing(tokens: &[EmojiToken]) -> String {
    let mut out = String::new();
    for t in tokens {
        out.push_str(&format!("{}\t{}\t{}\n", t.ordinal, HexCodepoints(&t.codepoints), t.byte_offset));
    }
    out
}
