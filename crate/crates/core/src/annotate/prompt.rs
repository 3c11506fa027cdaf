use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::AnnotateError;
use crate::lexicon::EmojiEntry;
use crate::Sentiment;

pub const EMOJI_PROMPT_TEMPLATE: &str = include_str!("../../assets/emoji_prompt.txt");
pub const TWEET_PROMPT: &str = include_str!("../../assets/tweet_prompt.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Pixel,
    Icon,
    Title,
    Description,
}

impl Representation {
    /// Order used for prompt wording and canonical combo names.
    pub const ORDER: [Representation; 4] =
        [Representation::Pixel, Representation::Icon, Representation::Title, Representation::Description];

    fn bit(self) -> u8 {
        match self {
            Representation::Icon => 1,
            Representation::Title => 2,
            Representation::Description => 4,
            Representation::Pixel => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Pixel => "pixel",
            Representation::Icon => "icon",
            Representation::Title => "title",
            Representation::Description => "description",
        }
    }

    fn phrase(self) -> &'static str {
        match self {
            Representation::Pixel => "Emoji's picture",
            Representation::Icon => "emoji icon",
            Representation::Title => "emoji title",
            Representation::Description => "emoji description",
        }
    }
}

/// Non-empty subset of {pixel, icon, title, description}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepresentationCombo(u8);

impl RepresentationCombo {
    pub fn new(reps: &[Representation]) -> Option<Self> {
        let bits = reps.iter().fold(0u8, |acc, r| acc | r.bit());
        (bits != 0).then_some(RepresentationCombo(bits))
    }

    /// All 15 combinations, in the row order of the representation
    /// comparison table.
    pub fn all() -> [RepresentationCombo; 15] {
        use Representation::*;
        let c = |reps: &[Representation]| RepresentationCombo::new(reps).unwrap();
        [
            c(&[Icon]),
            c(&[Title]),
            c(&[Description]),
            c(&[Pixel]),
            c(&[Icon, Description]),
            c(&[Icon, Title]),
            c(&[Icon, Pixel]),
            c(&[Title, Description]),
            c(&[Title, Pixel]),
            c(&[Pixel, Description]),
            c(&[Icon, Title, Description]),
            c(&[Pixel, Icon, Title]),
            c(&[Pixel, Icon, Description]),
            c(&[Pixel, Title, Description]),
            c(&[Pixel, Icon, Title, Description]),
        ]
    }

    pub fn best() -> Self {
        use Representation::*;
        RepresentationCombo::new(&[Pixel, Icon, Description]).unwrap()
    }

    pub fn contains(self, r: Representation) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn members(self) -> impl Iterator<Item = Representation> {
        Representation::ORDER.into_iter().filter(move |r| self.contains(*r))
    }

    /// Canonical name such as `pixel+icon+description`.
    pub fn name(self) -> String {
        self.members().map(Representation::as_str).collect::<Vec<_>>().join("+")
    }

    /// Table-style label such as `Pixel & Icon & Description`.
    pub fn label(self) -> String {
        let names: Vec<String> = self
            .members()
            .map(|r| {
                let s = r.as_str();
                s[..1].to_uppercase() + &s[1..]
            })
            .collect();
        names.join(" & ")
    }

    /// The part of the instruction sentence naming the representations.
    fn subject(self) -> String {
        let members: Vec<Representation> = self.members().collect();
        if members.len() == 1 {
            return members[0].phrase().to_string();
        }
        let (head, rest): (&str, Vec<&str>) = if self.contains(Representation::Pixel) {
            (Representation::Pixel.phrase(), members[1..].iter().map(|r| r.phrase()).collect())
        } else {
            ("emoji", members.iter().map(|r| r.phrase()).collect())
        };
        format!("{head} by combining {}", join_and(&rest))
    }
}

fn join_and(items: &[&str]) -> String {
    match items {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

impl fmt::Display for RepresentationCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid representation combo {0:?}")]
pub struct ComboParseError(pub String);

impl FromStr for RepresentationCombo {
    type Err = ComboParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut reps = Vec::new();
        for part in s.split(['+', '&', ',']) {
            let part = part.trim().to_ascii_lowercase();
            let r = Representation::ORDER
                .into_iter()
                .find(|r| r.as_str() == part)
                .ok_or_else(|| ComboParseError(s.to_string()))?;
            reps.push(r);
        }
        RepresentationCombo::new(&reps).ok_or_else(|| ComboParseError(s.to_string()))
    }
}

impl Serialize for RepresentationCombo {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for RepresentationCombo {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageAttachment {
    pub media_type: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptPayload {
    pub text: String,
    pub image: Option<ImageAttachment>,
    pub model_id: String,
    pub cache_key: String,
}

impl PromptPayload {
    pub fn new(text: String, image: Option<ImageAttachment>, model_id: &str) -> Self {
        let cache_key = cache_key(model_id, &text, image.as_ref().map(|i| i.bytes.as_slice()));
        PromptPayload { text, image, model_id: model_id.to_string(), cache_key }
    }
}

/// SHA-256 over length-prefixed (model, text, image) fields, hex encoded.
pub fn cache_key(model_id: &str, text: &str, image: Option<&[u8]>) -> String {
    let mut h = Sha256::new();
    for part in [model_id.as_bytes(), text.as_bytes(), image.unwrap_or_default()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    h.update([u8::from(image.is_some())]);
    hex::encode(h.finalize())
}

fn media_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        _ => "image/png",
    }
}

/// Whether `entry` carries every representation `combo` needs.
pub fn entry_supports(entry: &EmojiEntry, combo: RepresentationCombo) -> bool {
    combo.members().all(|rep| match rep {
        Representation::Pixel => entry.pixel_ref.is_some(),
        Representation::Icon => !entry.icon.is_empty(),
        Representation::Title => !entry.title.is_empty(),
        Representation::Description => !entry.description.is_empty(),
    })
}

pub fn build_emoji_prompt(
    entry: &EmojiEntry,
    combo: RepresentationCombo,
    model_id: &str,
) -> Result<PromptPayload, AnnotateError> {
    let missing = |field: Representation| AnnotateError::MissingRepresentation { key: entry.key.clone(), field };
    let mut text = EMOJI_PROMPT_TEMPLATE.trim_end().replace("{representations}", &combo.subject());
    let mut details = Vec::new();
    for rep in combo.members() {
        match rep {
            Representation::Pixel => {}
            Representation::Icon if entry.icon.is_empty() => return Err(missing(rep)),
            Representation::Icon => details.push(format!("Emoji icon: {}", entry.icon)),
            Representation::Title if entry.title.is_empty() => return Err(missing(rep)),
            Representation::Title => details.push(format!("Emoji title: {}", entry.title)),
            Representation::Description if entry.description.is_empty() => return Err(missing(rep)),
            Representation::Description => details.push(format!("Emoji description: {}", entry.description)),
        }
    }
    if !details.is_empty() {
        text.push_str("\n\n");
        text.push_str(&details.join("\n"));
    }
    let image = if combo.contains(Representation::Pixel) {
        let path = entry.pixel_ref.as_ref().ok_or_else(|| missing(Representation::Pixel))?;
        let bytes = std::fs::read(path)
            .map_err(|source| AnnotateError::PixelRead { path: path.display().to_string(), source })?;
        Some(ImageAttachment { media_type: media_type(path).to_string(), bytes })
    } else {
        None
    };
    Ok(PromptPayload::new(text, image, model_id))
}

pub fn build_tweet_prompt(text: &str, model_id: &str) -> PromptPayload {
    PromptPayload::new(format!("{}\n\n{}", TWEET_PROMPT.trim_end(), text), None, model_id)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unparseable sentiment reply {raw:?}")]
pub struct ReplyParseError {
    pub raw: String,
}

/// Accepts exactly one of the three sentiment words, ignoring case and
/// surrounding whitespace, punctuation and quotes.
pub fn parse_sentiment_reply(raw: &str) -> Result<Sentiment, ReplyParseError> {
    let trimmed = raw.trim_matches(|c: char| c.is_whitespace() || c.is_ascii_punctuation() || "“”‘’«»".contains(c));
    match trimmed.to_ascii_lowercase().as_str() {
        "positive" => Ok(Sentiment::Positive),
        "neutral" => Ok(Sentiment::Neutral),
        "negative" => Ok(Sentiment::Negative),
        _ => Err(ReplyParseError { raw: raw.to_string() }),
    }
}
