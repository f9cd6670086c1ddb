//! Word clouds inside large leaf circles.
//!
//! A cloud holds the concept label at the center followed by the most
//! frequent content words of the sentences the concept occurs in. Words
//! inside the concept's own matches do not count. Items go on an
//! Archimedean spiral and are dropped once nothing more fits.

use std::collections::{BTreeMap, BTreeSet};

use crate::matcher::ConceptDictionary;
use crate::ontology::OntologyStore;
use crate::text::{Document, Span, Tag};

use super::{BubbleLayout, LabelLevel, LayoutConfig, WordCloudItem};

/// Glyph advance relative to font size.
const CHAR_WIDTH: f64 = 0.6;
/// Largest font size relative to the circle radius.
const MAX_FONT: f64 = 0.35;
const SPIRAL_STEP: f64 = 0.1;

#[derive(Clone, Copy)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn centered(x: f64, y: f64, w: f64, h: f64) -> Rect {
        Rect {
            x0: x - w / 2.0,
            y0: y - h / 2.0,
            x1: x + w / 2.0,
            y1: y + h / 2.0,
        }
    }

    fn overlaps(&self, o: &Rect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    fn inside_circle(&self, r: f64) -> bool {
        [
            (self.x0, self.y0),
            (self.x0, self.y1),
            (self.x1, self.y0),
            (self.x1, self.y1),
        ]
        .iter()
        .all(|(x, y)| x.hypot(*y) <= r)
    }
}

/// Glyph box of a word drawn centered at `(x, y)`.
pub fn glyph_box(word: &str, font_size: f64) -> (f64, f64) {
    (
        CHAR_WIDTH * font_size * word.chars().count() as f64,
        font_size,
    )
}

/// Content words counted over the concept's sentences, most frequent first,
/// ties alphabetical.
pub(crate) fn related_terms(
    concept_id: &str,
    doc: &Document,
    dict: &ConceptDictionary,
    limit: usize,
    min_count: u32,
) -> Vec<(String, u32)> {
    let Some(sentences) = dict.occurrences.get(concept_id) else {
        return Vec::new();
    };
    let own: Vec<Span> = dict
        .matches
        .iter()
        .filter(|m| m.concept_id == concept_id)
        .map(|m| m.span)
        .collect();
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for &i in sentences {
        let Some(sent) = doc.sentences.get(i) else {
            continue;
        };
        for tok in &sent.tokens {
            if tok.is_stopword
                || !matches!(tok.tag, Tag::Noun | Tag::Propn | Tag::Adj)
                || !tok.surface.chars().any(char::is_alphabetic)
                || own.iter().any(|s| s.contains(&tok.span))
            {
                continue;
            }
            *counts.entry(tok.surface.to_lowercase()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, u32)> = counts
        .into_iter()
        .filter(|(_, c)| *c >= min_count)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(limit);
    ranked
}

fn place_cloud(radius: f64, words: &[(String, u32)]) -> Vec<WordCloudItem> {
    let Some((label, label_weight)) = words.first() else {
        return Vec::new();
    };
    let wmax = words.iter().map(|w| w.1).max().unwrap_or(1).max(1) as f64;
    // The label must fit at the center; shrink every size with it if needed.
    let n = label.chars().count() as f64;
    let label_cap = 0.98 * 2.0 * radius / ((CHAR_WIDTH * n).powi(2) + 1.0).sqrt();
    let scale = (MAX_FONT * radius / wmax.sqrt()).min(label_cap / f64::from(*label_weight).sqrt());

    let mut placed: Vec<Rect> = Vec::new();
    let mut items = Vec::new();
    let spacing = scale * 0.15;
    for (k, (word, weight)) in words.iter().enumerate() {
        let size = scale * f64::from(*weight).sqrt();
        let (w, h) = glyph_box(word, size);
        let mut t: f64 = 0.0;
        let limit = 2.0 * radius / spacing.max(1e-9);
        while t <= limit {
            let (x, y) = (spacing * t * t.cos(), spacing * t * t.sin());
            let rect = Rect::centered(x, y, w, h);
            if rect.inside_circle(radius) && !placed.iter().any(|p| p.overlaps(&rect)) {
                placed.push(rect);
                items.push(WordCloudItem {
                    word: word.clone(),
                    weight: *weight,
                    x,
                    y,
                    font_size: size,
                });
                break;
            }
            t += SPIRAL_STEP;
            if k == 0 {
                // The label goes at the center or nowhere.
                break;
            }
        }
    }
    items
}

/// Clouds for every circle large enough to carry one, keyed by concept id.
pub fn build_word_clouds(
    layout: &BubbleLayout,
    doc: &Document,
    dict: &ConceptDictionary,
    store: &OntologyStore,
    config: &LayoutConfig,
) -> BTreeMap<String, Vec<WordCloudItem>> {
    let mut clouds = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for circle in &layout.circles {
        if circle.label_level != LabelLevel::LabeledWithCloud || !seen.insert(&circle.concept_id) {
            continue;
        }
        let id = &circle.concept_id;
        let label = store.label(id).unwrap_or(id).to_owned();
        let frequency = dict.frequency.get(id).copied().unwrap_or(1).max(1);
        let mut words = vec![(label, frequency)];
        words.extend(related_terms(
            id,
            doc,
            dict,
            config.cloud_terms,
            config.cloud_min_count,
        ));
        clouds.insert(id.clone(), place_cloud(circle.radius, &words));
    }
    clouds
}
