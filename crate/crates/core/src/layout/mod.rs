//! Bubble Treemap geometry.
//!
//! Leaves become circles with area proportional to frequency. Every interior
//! node packs its children (leaf circles or the enclosing circles of child
//! subtrees) with front-chain packing, then draws its contour as the outer
//! boundary of its children grown by one margin. Contours get lighter toward
//! the root; leaf circles take the color of their top-level concept.

mod cloud;
mod color;
pub mod outline;
pub mod pack;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use cloud::build_word_clouds;
pub use color::{gray_hex, hex_to_lab, lch_to_hex};

use crate::hierarchy::{ConceptNode, ConceptTree};
use crate::ontology::OntologyStore;
use crate::{Error, Result};
use outline::{union_outline, Point};
use pack::{enclose, pack_siblings, Circle};

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    /// Contour offset per hierarchy level, in layout units.
    pub margin: f64,
    pub canvas_size: f64,
    /// Fraction of the square canvas covered by leaf circles.
    pub leaf_area_fraction: f64,
    pub luminance_outer: f64,
    pub luminance_step: f64,
    pub luminance_floor: f64,
    pub label_radius: f64,
    pub cloud_radius: f64,
    pub palette_lightness: f64,
    pub palette_chroma: f64,
    pub cloud_terms: usize,
    pub cloud_min_count: u32,
    /// Maximum distance between a contour polyline and the true arcs.
    pub contour_tolerance: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            margin: 6.0,
            canvas_size: 1000.0,
            leaf_area_fraction: 0.3,
            luminance_outer: 92.0,
            luminance_step: 8.0,
            luminance_floor: 52.0,
            label_radius: 14.0,
            cloud_radius: 40.0,
            palette_lightness: 70.0,
            palette_chroma: 40.0,
            cloud_terms: 10,
            cloud_min_count: 1,
            contour_tolerance: 0.05,
        }
    }
}

impl LayoutConfig {
    pub fn label_level(&self, radius: f64) -> LabelLevel {
        if radius < self.label_radius {
            LabelLevel::Unlabeled
        } else if radius < self.cloud_radius {
            LabelLevel::Labeled
        } else {
            LabelLevel::LabeledWithCloud
        }
    }

    /// Fill lightness per contour depth. The step shrinks when the default
    /// ramp would hit the floor before the deepest contour, so lightness
    /// stays strictly decreasing.
    pub fn contour_luminance(&self, depth: usize, max_depth: usize) -> f64 {
        let mut step = self.luminance_step;
        if max_depth > 0 {
            let span = self.luminance_outer - self.luminance_floor;
            step = step.min(span / max_depth as f64);
        }
        (self.luminance_outer - step * depth as f64).max(self.luminance_floor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LabelLevel {
    Unlabeled,
    Labeled,
    LabeledWithCloud,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutCircle {
    #[serde(rename = "id")]
    pub concept_id: String,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "r")]
    pub radius: f64,
    pub color: String,
    pub label_level: LabelLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPath {
    #[serde(rename = "id")]
    pub concept_id: String,
    pub depth: usize,
    #[serde(rename = "luminance")]
    pub fill_luminance: f64,
    pub path: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCloudItem {
    pub word: String,
    pub weight: u32,
    /// Offset from the circle center.
    pub x: f64,
    pub y: f64,
    #[serde(rename = "size")]
    pub font_size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleLayout {
    pub document_id: String,
    pub bounds: Bounds,
    pub circles: Vec<LayoutCircle>,
    pub contours: Vec<ContourPath>,
    pub clouds: BTreeMap<String, Vec<WordCloudItem>>,
}

impl BubbleLayout {
    /// Layout of a tree holding nothing but its root; renders blank.
    pub fn empty(document_id: &str) -> BubbleLayout {
        BubbleLayout {
            document_id: document_id.to_owned(),
            bounds: Bounds {
                min_x: 0.0,
                min_y: 0.0,
                max_x: 0.0,
                max_y: 0.0,
            },
            circles: Vec::new(),
            contours: Vec::new(),
            clouds: BTreeMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty() && self.contours.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(bytes: &[u8]) -> Result<BubbleLayout> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

/// Top-level concept id to sRGB hex, shared by every layout.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorAssignment {
    pub colors: BTreeMap<String, String>,
}

impl ColorAssignment {
    pub fn get(&self, id: &str) -> Option<&str> {
        self.colors.get(id).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// One color per distinct top-level ancestor across all trees, hues spaced
/// evenly at fixed CIELAB lightness and chroma, in concept id order.
pub fn assign_colors(
    trees: &[ConceptTree],
    store: &OntologyStore,
    config: &LayoutConfig,
) -> Result<ColorAssignment> {
    let mut tops = BTreeSet::new();
    for tree in trees {
        for node in tree.detected() {
            tops.insert(store.top_level_ancestor(&node.concept_id)?);
        }
    }
    let n = tops.len().max(1) as f64;
    let colors = tops
        .into_iter()
        .enumerate()
        .map(|(i, id)| {
            let hue = 360.0 * i as f64 / n;
            (
                id,
                lch_to_hex(config.palette_lightness, config.palette_chroma, hue),
            )
        })
        .collect();
    Ok(ColorAssignment { colors })
}

struct LeafItem {
    id: String,
    top: String,
    circle: Circle,
}

struct ContourItem {
    id: String,
    depth: usize,
    disks: Vec<Circle>,
}

#[derive(Default)]
struct Placed {
    leaves: Vec<LeafItem>,
    contours: Vec<ContourItem>,
    enclosing: Option<Circle>,
}

impl Placed {
    fn translate(&mut self, dx: f64, dy: f64) {
        for l in &mut self.leaves {
            l.circle.x += dx;
            l.circle.y += dy;
        }
        for c in &mut self.contours {
            for d in &mut c.disks {
                d.x += dx;
                d.y += dy;
            }
        }
        if let Some(e) = &mut self.enclosing {
            e.x += dx;
            e.y += dy;
        }
    }
}

fn place(node: &ConceptNode, top: &str, scale: f64, margin: f64) -> Placed {
    if node.is_leaf() {
        let r = scale * f64::from(node.frequency).sqrt();
        let circle = Circle::new(0.0, 0.0, r);
        return Placed {
            leaves: vec![LeafItem {
                id: node.concept_id.clone(),
                top: top.to_owned(),
                circle,
            }],
            contours: Vec::new(),
            enclosing: Some(circle),
        };
    }
    let is_root = node.depth == 0;
    let mut parts: Vec<Placed> = node
        .children
        .iter()
        .map(|c| {
            let child_top = if is_root { c.concept_id.as_str() } else { top };
            place(c, child_top, scale, margin)
        })
        .collect();
    // Padding of one margin between siblings keeps their own contours apart
    // while the grown disks below still overlap into one region.
    let mut slots: Vec<Circle> = parts
        .iter()
        .map(|p| {
            Circle::new(
                0.0,
                0.0,
                p.enclosing.expect("child placed").r + margin / 2.0,
            )
        })
        .collect();
    pack_siblings(&mut slots);
    let mut placed = Placed::default();
    let mut disks = Vec::with_capacity(parts.len());
    for (part, slot) in parts.iter_mut().zip(&slots) {
        let e = part.enclosing.expect("child placed");
        part.translate(slot.x - e.x, slot.y - e.y);
        disks.push(Circle::new(slot.x, slot.y, e.r + margin));
    }
    for part in parts {
        placed.leaves.extend(part.leaves);
        placed.contours.extend(part.contours);
    }
    placed.enclosing = Some(enclose(&disks));
    placed.contours.insert(
        0,
        ContourItem {
            id: node.concept_id.clone(),
            depth: node.depth,
            disks,
        },
    );
    placed
}

/// Lays out one concept tree. A tree with nothing but its root yields
/// [`BubbleLayout::empty`]. Word clouds are filled separately by
/// [`build_word_clouds`].
pub fn compute_layout(
    tree: &ConceptTree,
    colors: &ColorAssignment,
    config: &LayoutConfig,
) -> Result<BubbleLayout> {
    if tree.is_root_only() {
        return Ok(BubbleLayout::empty(&tree.document_id));
    }
    let total: f64 = tree
        .nodes()
        .filter(|n| n.is_leaf())
        .map(|n| f64::from(n.frequency))
        .sum();
    if total <= 0.0 {
        return Err(Error::Integrity(format!(
            "tree {} has leaves without frequency",
            tree.document_id
        )));
    }
    let target_area = config.leaf_area_fraction * config.canvas_size * config.canvas_size;
    let scale = (target_area / (PI * total)).sqrt();

    let mut placed = place(&tree.root, tree.root_id(), scale, config.margin);
    let e = placed.enclosing.expect("root placed");
    let center = config.canvas_size / 2.0;
    placed.translate(center - e.x, center - e.y);

    let mut circles = Vec::with_capacity(placed.leaves.len());
    for leaf in &placed.leaves {
        let color = colors.get(&leaf.top).ok_or_else(|| {
            Error::Integrity(format!(
                "no color assigned for top-level concept {}",
                leaf.top
            ))
        })?;
        circles.push(LayoutCircle {
            concept_id: leaf.id.clone(),
            x: leaf.circle.x,
            y: leaf.circle.y,
            radius: leaf.circle.r,
            color: color.to_owned(),
            label_level: config.label_level(leaf.circle.r),
        });
    }
    let max_depth = placed.contours.iter().map(|c| c.depth).max().unwrap_or(0);
    let contours: Vec<ContourPath> = placed
        .contours
        .iter()
        .map(|c| ContourPath {
            concept_id: c.id.clone(),
            depth: c.depth,
            fill_luminance: config.contour_luminance(c.depth, max_depth),
            path: union_outline(&c.disks, config.contour_tolerance),
        })
        .collect();

    let mut bounds = Bounds {
        min_x: f64::INFINITY,
        min_y: f64::INFINITY,
        max_x: f64::NEG_INFINITY,
        max_y: f64::NEG_INFINITY,
    };
    let mut grow = |x: f64, y: f64| {
        bounds.min_x = bounds.min_x.min(x);
        bounds.min_y = bounds.min_y.min(y);
        bounds.max_x = bounds.max_x.max(x);
        bounds.max_y = bounds.max_y.max(y);
    };
    for c in &circles {
        grow(c.x - c.radius, c.y - c.radius);
        grow(c.x + c.radius, c.y + c.radius);
    }
    for c in &contours {
        for p in &c.path {
            grow(p[0], p[1]);
        }
    }

    Ok(BubbleLayout {
        document_id: tree.document_id.clone(),
        bounds,
        circles,
        contours,
        clouds: BTreeMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::build_concept_tree;
    use crate::matcher::{ConceptDictionary, ConceptMatch, MatchKind};
    use crate::ontology::{load_ontology, TripleRecord};
    use crate::text::Span;

    fn store() -> OntologyStore {
        let t = |s: &str, o: &str| TripleRecord::new(s, "cso#superTopicOf", o).unwrap();
        load_ontology(vec![
            t("cs", "a"),
            t("cs", "b"),
            t("a", "a1"),
            t("a", "a2"),
            t("b", "b1"),
        ])
        .unwrap()
    }

    fn tree(entries: &[(&str, u32)]) -> ConceptTree {
        let matches = entries
            .iter()
            .flat_map(|(id, n)| {
                (0..*n).map(move |k| ConceptMatch {
                    concept_id: id.to_string(),
                    candidate_text: id.to_string(),
                    kind: MatchKind::Accurate,
                    similarity: 1.0,
                    sentence_index: k as usize,
                    span: Span::new(0, 1),
                })
            })
            .collect();
        build_concept_tree("doc", &ConceptDictionary::from_matches(matches), &store()).unwrap()
    }

    fn layout(t: &ConceptTree) -> BubbleLayout {
        let colors =
            assign_colors(std::slice::from_ref(t), &store(), &LayoutConfig::default()).unwrap();
        compute_layout(t, &colors, &LayoutConfig::default()).unwrap()
    }

    #[test]
    fn radii_follow_square_root_of_frequency() {
        let l = layout(&tree(&[("a1", 1), ("a2", 4)]));
        assert_eq!(l.circles.len(), 2);
        let ratio = l.circles[1].radius / l.circles[0].radius;
        assert!((ratio - 2.0).abs() < 1e-12, "{ratio}");
    }

    #[test]
    fn single_leaf_has_contours_around_it() {
        let l = layout(&tree(&[("b1", 2)]));
        assert_eq!(l.circles.len(), 1);
        // cs and b each get a contour.
        assert_eq!(l.contours.len(), 2);
        let c = &l.circles[0];
        for contour in &l.contours {
            assert!(outline::contains(
                &contour.path,
                [c.x + c.radius * 0.99, c.y]
            ));
        }
    }

    #[test]
    fn root_only_tree_is_empty_layout() {
        let l = layout(&tree(&[]));
        assert!(l.is_empty());
    }

    #[test]
    fn luminance_ramp_stays_strict() {
        let cfg = LayoutConfig::default();
        assert_eq!(cfg.contour_luminance(0, 3), 92.0);
        assert_eq!(cfg.contour_luminance(1, 3), 84.0);
        let deep: Vec<f64> = (0..=10).map(|d| cfg.contour_luminance(d, 10)).collect();
        assert!(deep.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(deep[10], 52.0);
    }

    #[test]
    fn label_levels() {
        let cfg = LayoutConfig::default();
        assert_eq!(cfg.label_level(10.0), LabelLevel::Unlabeled);
        assert_eq!(cfg.label_level(14.0), LabelLevel::Labeled);
        assert_eq!(cfg.label_level(40.0), LabelLevel::LabeledWithCloud);
    }

    #[test]
    fn colors_follow_top_level_concept() {
        let l = layout(&tree(&[("a1", 1), ("a2", 1), ("b1", 1)]));
        let color = |id: &str| {
            l.circles
                .iter()
                .find(|c| c.concept_id == id)
                .unwrap()
                .color
                .clone()
        };
        assert_eq!(color("a1"), color("a2"));
        assert_ne!(color("a1"), color("b1"));
    }
}
