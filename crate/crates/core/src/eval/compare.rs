use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::annotate::{AnnotationRecord, RepresentationCombo};
use crate::lexicon::SentimentLexicon;
use crate::segment::NormalizedKey;
use crate::Sentiment;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComboComparison {
    pub combo: RepresentationCombo,
    /// `None` when no annotation exists for the combo.
    pub matched: Option<usize>,
    /// Keys annotated under the combo that also have a reference label.
    pub population: usize,
    pub warning: Option<String>,
}

/// Counts, per representation combo, the annotated keys whose label equals
/// the reference label. Rows come out in the fixed combo table order.
pub fn compare_representations(
    annotations: &[AnnotationRecord],
    reference: &SentimentLexicon,
) -> Result<Vec<ComboComparison>, EvalError> {
    let mut grouped: BTreeMap<RepresentationCombo, BTreeMap<&NormalizedKey, Sentiment>> = BTreeMap::new();
    for rec in annotations {
        let labels = grouped.entry(rec.combo).or_default();
        if let Some(prev) = labels.insert(&rec.key, rec.label) {
            if prev != rec.label {
                return Err(EvalError::ConflictingAnnotation { key: rec.key.to_hex(), combo: rec.combo.name() });
            }
        }
    }
    let reference_keys: BTreeSet<&NormalizedKey> = reference.keys().collect();

    Ok(RepresentationCombo::all()
        .into_iter()
        .map(|combo| {
            let Some(labels) = grouped.get(&combo) else {
                return ComboComparison { combo, matched: None, population: 0, warning: None };
            };
            let mut population = 0;
            let mut matched = 0;
            for (key, label) in labels {
                if let Some(entry) = reference.get(key) {
                    population += 1;
                    matched += usize::from(entry.sentiment == *label);
                }
            }
            let annotated: BTreeSet<&NormalizedKey> = labels.keys().copied().collect();
            let warning = (annotated != reference_keys).then(|| {
                format!(
                    "population mismatch: {} annotated, {} reference, {} shared",
                    annotated.len(),
                    reference_keys.len(),
                    population
                )
            });
            ComboComparison { combo, matched: Some(matched), population, warning }
        })
        .collect())
}

pub fn render_comparison_csv(rows: &[ComboComparison]) -> String {
    let mut out = String::from("representation,combo,matched,population\n");
    for r in rows {
        let matched = r.matched.map(|m| m.to_string()).unwrap_or_else(|| "absent".into());
        out.push_str(&format!("{},{},{matched},{}\n", r.combo.label(), r.combo.name(), r.population));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> SentimentLexicon {
        let mut b = SentimentLexicon::builder("esr");
        b.insert_glyph("😂", Sentiment::Positive, "esr").unwrap();
        b.insert_glyph("😭", Sentiment::Negative, "esr").unwrap();
        b.insert_glyph("😐", Sentiment::Neutral, "esr").unwrap();
        b.build()
    }

    fn rec(glyph: &str, combo: &str, label: Sentiment) -> AnnotationRecord {
        AnnotationRecord {
            key: NormalizedKey::from_glyph(glyph),
            combo: combo.parse().unwrap(),
            label,
            raw_reply: label.to_string(),
            model_id: "m".into(),
            cached: false,
        }
    }

    #[test]
    fn identical_annotations_match_whole_population() {
        let anns: Vec<_> = reference().iter().map(|(k, e)| rec(&k.glyph(), "icon", e.sentiment)).collect();
        let rows = compare_representations(&anns, &reference()).unwrap();
        assert_eq!(rows.len(), 15);
        assert_eq!(rows[0].combo.name(), "icon");
        assert_eq!(rows[0].matched, Some(3));
        assert_eq!(rows[0].population, 3);
        assert!(rows[0].warning.is_none());
        assert!(rows[1..].iter().all(|r| r.matched.is_none()));
    }

    #[test]
    fn disjoint_keys_give_zero_with_warning() {
        let anns = vec![rec("👍", "title", Sentiment::Positive)];
        let rows = compare_representations(&anns, &reference()).unwrap();
        assert_eq!(rows[1].matched, Some(0));
        assert!(rows[1].warning.as_deref().unwrap().contains("mismatch"));
    }

    #[test]
    fn order_of_annotations_does_not_matter() {
        let mut anns = vec![
            rec("😂", "pixel+icon+description", Sentiment::Positive),
            rec("😭", "pixel+icon+description", Sentiment::Neutral),
            rec("😐", "icon+description", Sentiment::Neutral),
            rec("😂", "icon+description", Sentiment::Negative),
        ];
        let a = compare_representations(&anns, &reference()).unwrap();
        anns.reverse();
        assert_eq!(a, compare_representations(&anns, &reference()).unwrap());
        assert_eq!(a[12].matched, Some(1));
    }

    #[test]
    fn conflicting_duplicates_are_rejected() {
        let anns = vec![rec("😂", "icon", Sentiment::Positive), rec("😂", "icon", Sentiment::Negative)];
        assert!(compare_representations(&anns, &reference()).is_err());
    }

    #[test]
    fn csv_marks_absent_combos() {
        let rows = compare_representations(&[rec("😂", "icon", Sentiment::Positive)], &reference()).unwrap();
        let csv = render_comparison_csv(&rows);
        assert!(csv.starts_with("representation,combo,matched,population\nIcon,icon,1,1\nTitle,title,absent,0\n"));
    }
}
