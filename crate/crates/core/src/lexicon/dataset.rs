//! Assembly of the multi-representation emoji dataset (icon, title,
//! description, pixel image) from local files.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fsutil::unescape_field;
use crate::segment::NormalizedKey;
use crate::unicode_data::{EmojiInventory, InventoryError, Qualification};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmojiEntry {
    pub key: NormalizedKey,
    pub icon: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pixel_ref: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessSummary {
    pub entries: usize,
    pub with_icon: usize,
    pub with_title: usize,
    pub with_description: usize,
    pub without_description: usize,
    pub with_pixel: usize,
    pub without_pixel: usize,
    /// Keys lacking a description, in dataset order.
    pub missing_description: Vec<NormalizedKey>,
    pub missing_pixel: Vec<NormalizedKey>,
}

impl CompletenessSummary {
    pub fn from_entries(entries: &[EmojiEntry]) -> Self {
        let mut s = CompletenessSummary { entries: entries.len(), ..Default::default() };
        for e in entries {
            s.with_icon += usize::from(!e.icon.is_empty());
            s.with_title += usize::from(!e.title.is_empty());
            if e.description.is_empty() {
                s.without_description += 1;
                s.missing_description.push(e.key.clone());
            } else {
                s.with_description += 1;
            }
            if e.pixel_ref.is_some() {
                s.with_pixel += 1;
            } else {
                s.without_pixel += 1;
                s.missing_pixel.push(e.key.clone());
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct DatasetBuild {
    pub entries: Vec<EmojiEntry>,
    pub summary: CompletenessSummary,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} line {line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("pixel file {path} cannot be decoded: {message}")]
    UndecodablePixel { path: String, message: String },
}

/// Joins an `emoji-test.txt`-format code point/name file with a description
/// table and a directory of raster images.
///
/// Descriptions are read as `<hex code points>\t<description>` lines. Pixel
/// files are matched by file stem, written as hex code points joined with `-`
/// or `_` (an `emoji_u` prefix is accepted).
pub fn build_representation_dataset(
    unicode_path: &Path,
    descriptions_path: &Path,
    pixels_dir: &Path,
) -> Result<DatasetBuild, DatasetError> {
    let inventory = EmojiInventory::from_path(unicode_path)?;

    let mut entries: Vec<EmojiEntry> = Vec::new();
    let mut index: HashMap<NormalizedKey, usize> = HashMap::new();
    for line in inventory.lines() {
        let key = NormalizedKey::new(&line.codepoints);
        let glyph: String = line.codepoints.iter().collect();
        match index.get(&key) {
            Some(&i) => {
                if line.status == Qualification::FullyQualified {
                    entries[i].icon = glyph;
                }
            }
            None => {
                index.insert(key.clone(), entries.len());
                entries.push(EmojiEntry {
                    key,
                    icon: glyph,
                    title: line.name.clone(),
                    description: String::new(),
                    pixel_ref: None,
                });
            }
        }
    }

    for (key, description) in read_descriptions(descriptions_path)? {
        if let Some(&i) = index.get(&key) {
            entries[i].description = description;
        }
    }

    for (key, path) in scan_pixels(pixels_dir)? {
        let Some(&i) = index.get(&key) else {
            continue;
        };
        image::ImageReader::open(&path)
            .and_then(|r| r.with_guessed_format())
            .map_err(|e| DatasetError::UndecodablePixel { path: path.display().to_string(), message: e.to_string() })?
            .decode()
            .map_err(|e| DatasetError::UndecodablePixel { path: path.display().to_string(), message: e.to_string() })?;
        entries[i].pixel_ref = Some(path);
    }

    let summary = CompletenessSummary::from_entries(&entries);
    Ok(DatasetBuild { entries, summary })
}

fn read_descriptions(path: &Path) -> Result<Vec<(NormalizedKey, String)>, DatasetError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed =
            |message: String| DatasetError::Malformed { path: path.display().to_string(), line: i + 1, message };
        let (hex, desc) = line.split_once('\t').ok_or_else(|| malformed("expected <hex>\\t<description>".into()))?;
        let key = NormalizedKey::from_hex(hex).map_err(malformed)?;
        out.push((key, unescape_field(desc.trim_end_matches('\r'))));
    }
    Ok(out)
}

fn pixel_key(stem: &str) -> Option<NormalizedKey> {
    let stem = stem.strip_prefix("emoji_u").unwrap_or(stem);
    let hex = stem.replace(['-', '_'], " ");
    NormalizedKey::from_hex(&hex).ok()
}

fn scan_pixels(dir: &Path) -> Result<Vec<(NormalizedKey, PathBuf)>, DatasetError> {
    let io = |source| DatasetError::Io { path: dir.display().to_string(), source };
    let mut out = Vec::new();
    let mut paths: Vec<PathBuf> =
        std::fs::read_dir(dir).map_err(io)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(io)?;
    paths.sort();
    for path in paths {
        if !path.is_file() {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        match pixel_key(stem) {
            Some(key) => out.push((key, path)),
            None => log::warn!("ignoring {}: file name is not a hex code point sequence", path.display()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNICODE: &str = "# group: Smileys\n\
1F602 ; fully-qualified # 😂 E0.6 face with tears of joy\n\
2764 FE0F ; fully-qualified # ❤️ E0.6 red heart\n\
2764 ; unqualified # ❤ E0.6 red heart\n\
1F44D ; fully-qualified # 👍 E0.6 thumbs up\n";

    fn write_png(path: &Path) {
        let img = image::RgbaImage::from_pixel(2, 2, image::Rgba([255, 200, 0, 255]));
        img.save(path).unwrap();
    }

    #[test]
    fn joins_all_sources() {
        let dir = tempfile::tempdir().unwrap();
        let u = dir.path().join("emoji-test.txt");
        std::fs::write(&u, UNICODE).unwrap();
        let d = dir.path().join("desc.tsv");
        std::fs::write(&d, "1F602\tA face crying with laughter.\n2764 FE0F\tClassic love heart.\n").unwrap();
        let px = dir.path().join("px");
        std::fs::create_dir(&px).unwrap();
        write_png(&px.join("1f602.png"));
        write_png(&px.join("emoji_u2764.png"));
        std::fs::write(px.join("README"), "not an image").unwrap();

        let built = build_representation_dataset(&u, &d, &px).unwrap();
        assert_eq!(built.entries.len(), 3);
        let heart = &built.entries[1];
        assert_eq!(heart.icon, "❤️");
        assert_eq!(heart.title, "red heart");
        assert_eq!(heart.description, "Classic love heart.");
        assert!(heart.pixel_ref.is_some());
        let thumbs = &built.entries[2];
        assert!(thumbs.description.is_empty());
        assert_eq!(built.summary.without_description, 1);
        assert_eq!(built.summary.missing_description, vec![thumbs.key.clone()]);
        assert_eq!(built.summary.with_pixel, 2);
    }

    #[test]
    fn empty_unicode_file_gives_empty_dataset() {
        let dir = tempfile::tempdir().unwrap();
        let u = dir.path().join("u.txt");
        std::fs::write(&u, "").unwrap();
        let d = dir.path().join("d.tsv");
        std::fs::write(&d, "").unwrap();
        let built = build_representation_dataset(&u, &d, dir.path()).unwrap();
        assert!(built.entries.is_empty());
        assert_eq!(built.summary.entries, 0);
    }

    #[test]
    fn undecodable_pixel_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let u = dir.path().join("u.txt");
        std::fs::write(&u, UNICODE).unwrap();
        let d = dir.path().join("d.tsv");
        std::fs::write(&d, "").unwrap();
        let px = dir.path().join("px");
        std::fs::create_dir(&px).unwrap();
        std::fs::write(px.join("1F44D.png"), b"garbage").unwrap();
        let err = build_representation_dataset(&u, &d, &px).unwrap_err();
        assert!(matches!(err, DatasetError::UndecodablePixel { .. }), "{err}");
    }

    #[test]
    fn unreadable_inputs() {
        let missing = Path::new("/nonexistent/x");
        assert!(build_representation_dataset(missing, missing, missing).is_err());
    }

    #[test]
    fn entry_json_uses_hex_key() {
        let e = EmojiEntry {
            key: NormalizedKey::from_glyph("👍"),
            icon: "👍".into(),
            title: "thumbs up".into(),
            description: String::new(),
            pixel_ref: None,
        };
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"key\":\"1F44D\""));
        assert_eq!(serde_json::from_str::<EmojiEntry>(&json).unwrap(), e);
    }
}
