//! Layout geometry checks shared by the integration and acceptance suites.

use std::collections::BTreeMap;

use conceptscope::hierarchy::{ConceptNode, ConceptTree};
use conceptscope::layout::{assign_colors, compute_layout, BubbleLayout, LayoutConfig};
use conceptscope::matcher::{ConceptDictionary, ConceptMatch, MatchKind};
use conceptscope::ontology::OntologyStore;
use conceptscope::text::Span;

use super::topic;

pub fn dictionary(entries: &[(&str, u32)]) -> ConceptDictionary {
    let mut matches = Vec::new();
    for (slug, n) in entries {
        for k in 0..*n {
            matches.push(ConceptMatch {
                concept_id: topic(slug),
                candidate_text: slug.to_string(),
                kind: MatchKind::Accurate,
                similarity: 1.0,
                sentence_index: k as usize,
                span: Span::new(0, 1),
            });
        }
    }
    ConceptDictionary::from_matches(matches)
}

pub const TWELVE: &[(&str, u32)] = &[
    ("quicksort", 5),
    ("bubble_sort", 1),
    ("merge_sort", 2),
    ("shortest_path", 3),
    ("deep_learning", 8),
    ("neural_networks", 4),
    ("supervised_learning", 2),
    ("optical_character_recognition", 6),
    ("object-oriented_programming", 3),
    ("software_testing", 1),
    ("2d_computer_animation", 2),
    ("treemaps", 7),
];

pub fn layout_of(tree: &ConceptTree, store: &OntologyStore) -> BubbleLayout {
    let cfg = LayoutConfig::default();
    let colors = assign_colors(std::slice::from_ref(tree), store, &cfg).unwrap();
    compute_layout(tree, &colors, &cfg).unwrap()
}

/// Independent even-odd / winding test: nonzero winding number.
fn inside(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut wn = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            wn -= 1;
        }
    }
    wn != 0
}

/// `n` points spread evenly along a closed polyline.
fn resample(poly: &[[f64; 2]], n: usize) -> Vec<[f64; 2]> {
    let seg = |i: usize| {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        (a, b, (b[0] - a[0]).hypot(b[1] - a[1]))
    };
    let total: f64 = (0..poly.len()).map(|i| seg(i).2).sum();
    let mut out = Vec::with_capacity(n);
    let (mut i, mut acc) = (0, 0.0);
    for k in 0..n {
        let target = total * k as f64 / n as f64;
        while acc + seg(i).2 < target {
            acc += seg(i).2;
            i += 1;
        }
        let (a, b, len) = seg(i);
        let t = if len > 0.0 { (target - acc) / len } else { 0.0 };
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out
}

fn segments_cross(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2]) -> bool {
    let o = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    };
    let (d1, d2, d3, d4) = (o(r, s, p), o(r, s, q), o(p, q, r), o(p, q, s));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn simple(poly: &[[f64; 2]]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Every geometry property of one layout; returns violation messages.
pub fn geometry_violations(
    tree: &ConceptTree,
    layout: &BubbleLayout,
    samples: usize,
) -> Vec<String> {
    let mut bad = Vec::new();
    let circles: BTreeMap<&str, _> = layout
        .circles
        .iter()
        .map(|c| (c.concept_id.as_str(), c))
        .collect();
    let contours: BTreeMap<&str, _> = layout
        .contours
        .iter()
        .map(|c| (c.concept_id.as_str(), c))
        .collect();

    let leaves: Vec<&ConceptNode> = tree.nodes().filter(|n| n.is_leaf()).collect();
    if leaves.len() != layout.circles.len() {
        bad.push(format!(
            "{} leaves, {} circles",
            leaves.len(),
            layout.circles.len()
        ));
    }
    for a in &leaves {
        for b in &leaves {
            let (ca, cb) = (
                circles[a.concept_id.as_str()],
                circles[b.concept_id.as_str()],
            );
            let (ra2, rb2) = (ca.radius * ca.radius, cb.radius * cb.radius);
            let (fa, fb) = (f64::from(a.frequency), f64::from(b.frequency));
            if (ra2 * fb - rb2 * fa).abs() > 1e-9 * ra2 * fb {
                bad.push(format!("area ratio {} / {}", a.concept_id, b.concept_id));
            }
        }
    }

    for node in tree.nodes().filter(|n| !n.is_leaf()) {
        let Some(contour) = contours.get(node.concept_id.as_str()) else {
            bad.push(format!("no contour for {}", node.concept_id));
            continue;
        };
        if contour.depth != node.depth {
            bad.push(format!("contour depth of {}", node.concept_id));
        }
        if !simple(&contour.path) {
            bad.push(format!("contour of {} self-intersects", node.concept_id));
        }
        let kids: Vec<&ConceptNode> = node.children.iter().collect();
        for (i, a) in kids.iter().enumerate() {
            for b in &kids[i + 1..] {
                if let (true, true) = (a.is_leaf(), b.is_leaf()) {
                    let (ca, cb) = (
                        circles[a.concept_id.as_str()],
                        circles[b.concept_id.as_str()],
                    );
                    let d = (ca.x - cb.x).hypot(ca.y - cb.y);
                    if d < ca.radius + cb.radius - 1e-6 {
                        bad.push(format!(
                            "siblings {} and {} overlap",
                            a.concept_id, b.concept_id
                        ));
                    }
                }
            }
        }
        for kid in kids {
            let points: Vec<[f64; 2]> = if kid.is_leaf() {
                let c = circles[kid.concept_id.as_str()];
                (0..samples)
                    .map(|k| {
                        let t = std::f64::consts::TAU * k as f64 / samples as f64;
                        [c.x + c.radius * t.cos(), c.y + c.radius * t.sin()]
                    })
                    .collect()
            } else {
                resample(&contours[kid.concept_id.as_str()].path, samples)
            };
            let misses = points
                .iter()
                .filter(|p| !inside(&contour.path, **p))
                .count();
            if misses > 0 {
                bad.push(format!(
                    "{misses} points of {} outside {}",
                    kid.concept_id, node.concept_id
                ));
            }
        }
    }
    for a in &layout.contours {
        for b in &layout.contours {
            if a.depth < b.depth && a.fill_luminance <= b.fill_luminance {
                bad.push(format!("luminance not decreasing at depth {}", b.depth));
            }
        }
    }
    bad
}
