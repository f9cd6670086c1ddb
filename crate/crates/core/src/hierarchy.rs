//! Concept trees rebuilt from canonical ontology paths, and cross-document
//! comparison summaries.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::matcher::ConceptDictionary;
use crate::ontology::OntologyStore;
use crate::{Error, Result};

/// One node of a concept tree.
///
/// A concept that was detected and also has detected descendants stays an
/// undetected interior node and gets a synthetic child (`is_self`) with the
/// same id that carries its frequency and occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptNode {
    #[serde(rename = "id")]
    pub concept_id: String,
    pub label: String,
    pub detected: bool,
    #[serde(rename = "self")]
    pub is_self: bool,
    pub frequency: u32,
    pub occurrences: BTreeSet<usize>,
    pub children: Vec<ConceptNode>,
    #[serde(skip)]
    pub depth: usize,
}

impl ConceptNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Depth-first, parents before children.
    pub fn walk(&self) -> impl Iterator<Item = &ConceptNode> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    fn set_depths(&mut self, depth: usize) {
        self.depth = depth;
        for c in &mut self.children {
            c.set_depths(depth + 1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptTree {
    pub document_id: String,
    pub root: ConceptNode,
    /// Concept id to the child-index route of its structural node.
    #[serde(skip)]
    index: BTreeMap<String, Vec<usize>>,
}

impl ConceptTree {
    fn new(document_id: String, mut root: ConceptNode) -> ConceptTree {
        root.set_depths(0);
        let mut index = BTreeMap::new();
        fn visit(
            node: &ConceptNode,
            route: &mut Vec<usize>,
            index: &mut BTreeMap<String, Vec<usize>>,
        ) {
            if !node.is_self {
                index.insert(node.concept_id.clone(), route.clone());
            }
            for (i, c) in node.children.iter().enumerate() {
                route.push(i);
                visit(c, route, index);
                route.pop();
            }
        }
        visit(&root, &mut Vec::new(), &mut index);
        ConceptTree {
            document_id,
            root,
            index,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<ConceptTree> {
        let raw: ConceptTree = serde_json::from_slice(bytes)?;
        Ok(ConceptTree::new(raw.document_id, raw.root))
    }

    /// Pretty JSON, stable key and child order.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn root_id(&self) -> &str {
        &self.root.concept_id
    }

    pub fn is_root_only(&self) -> bool {
        self.root.children.is_empty()
    }

    /// Structural node of a concept (the interior node when a self-leaf
    /// exists).
    pub fn node(&self, id: &str) -> Option<&ConceptNode> {
        let route = self.index.get(id)?;
        Some(route.iter().fold(&self.root, |n, &i| &n.children[i]))
    }

    /// The node carrying a detected concept's frequency.
    pub fn detected_node(&self, id: &str) -> Option<&ConceptNode> {
        let node = self.node(id)?;
        if node.detected {
            return Some(node);
        }
        node.children
            .iter()
            .find(|c| c.is_self && c.concept_id == id)
    }

    /// Ids from the concept's structural node up to the tree root.
    pub fn path_to_root(&self, id: &str) -> Option<Vec<String>> {
        let route = self.index.get(id)?;
        let mut path = Vec::with_capacity(route.len() + 1);
        let mut node = &self.root;
        path.push(node.concept_id.clone());
        for &i in route {
            node = &node.children[i];
            path.push(node.concept_id.clone());
        }
        path.reverse();
        Some(path)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &ConceptNode> {
        self.root.walk()
    }

    pub fn detected(&self) -> impl Iterator<Item = &ConceptNode> {
        self.nodes().filter(|n| n.detected)
    }

    pub fn total_frequency(&self) -> u64 {
        self.detected().map(|n| u64::from(n.frequency)).sum()
    }

    pub fn max_depth(&self) -> usize {
        self.nodes().map(|n| n.depth).max().unwrap_or(0)
    }
}

pub fn build_concept_tree(
    document_id: &str,
    dict: &ConceptDictionary,
    store: &OntologyStore,
) -> Result<ConceptTree> {
    let mut kids: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for id in dict.frequency.keys() {
        if !store.contains(id) {
            return Err(Error::Integrity(format!(
                "detected concept {id} is not in the ontology"
            )));
        }
        let path = store.path_to_root(id)?;
        for pair in path.windows(2) {
            kids.entry(pair[1].clone())
                .or_default()
                .insert(pair[0].clone());
        }
    }

    fn node(
        id: &str,
        dict: &ConceptDictionary,
        store: &OntologyStore,
        kids: &BTreeMap<String, BTreeSet<String>>,
        is_root: bool,
    ) -> ConceptNode {
        let label = store.label(id).unwrap_or(id).to_owned();
        let frequency = dict.frequency.get(id).copied().unwrap_or(0);
        let occurrences = dict.occurrences.get(id).cloned().unwrap_or_default();
        let mut children: Vec<ConceptNode> = kids
            .get(id)
            .into_iter()
            .flatten()
            .map(|c| node(c, dict, store, kids, false))
            .collect();
        let detected = frequency > 0;
        // The root is always drawn as a contour, so a detected root gets a
        // self-leaf even with no other children.
        if detected && (!children.is_empty() || is_root) {
            children.push(ConceptNode {
                concept_id: id.to_owned(),
                label: label.clone(),
                detected: true,
                is_self: true,
                frequency,
                occurrences,
                children: Vec::new(),
                depth: 0,
            });
            children.sort_by(|a, b| a.concept_id.cmp(&b.concept_id));
            return ConceptNode {
                concept_id: id.to_owned(),
                label,
                detected: false,
                is_self: false,
                frequency: 0,
                occurrences: BTreeSet::new(),
                children,
                depth: 0,
            };
        }
        ConceptNode {
            concept_id: id.to_owned(),
            label,
            detected,
            is_self: false,
            frequency,
            occurrences,
            children,
            depth: 0,
        }
    }

    let root = node(store.root_id(), dict, store, &kids, true);
    Ok(ConceptTree::new(document_id.to_owned(), root))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    /// Document ids, in input order; frequency vectors follow this order.
    pub documents: Vec<String>,
    pub frequencies: BTreeMap<String, Vec<u32>>,
    pub shared: BTreeSet<String>,
    pub unique: BTreeMap<String, BTreeSet<String>>,
}

pub fn compare_trees(trees: &[ConceptTree]) -> Result<ComparisonSummary> {
    let first = trees
        .first()
        .ok_or_else(|| Error::Integrity("comparison needs at least one tree".into()))?;
    for t in trees {
        if t.root_id() != first.root_id() {
            return Err(Error::RootMismatch {
                expected: first.root_id().to_owned(),
                found: t.root_id().to_owned(),
            });
        }
    }
    let mut frequencies: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (i, t) in trees.iter().enumerate() {
        for n in t.detected() {
            frequencies
                .entry(n.concept_id.clone())
                .or_insert_with(|| vec![0; trees.len()])[i] = n.frequency;
        }
    }
    let mut shared = BTreeSet::new();
    let mut unique: BTreeMap<String, BTreeSet<String>> = trees
        .iter()
        .map(|t| (t.document_id.clone(), BTreeSet::new()))
        .collect();
    for (id, freqs) in &frequencies {
        let present: Vec<usize> = (0..freqs.len()).filter(|&i| freqs[i] > 0).collect();
        match present.as_slice() {
            [only] => {
                unique
                    .get_mut(&trees[*only].document_id)
                    .expect("document registered")
                    .insert(id.clone());
            }
            _ => {
                shared.insert(id.clone());
            }
        }
    }
    Ok(ComparisonSummary {
        documents: trees.iter().map(|t| t.document_id.clone()).collect(),
        frequencies,
        shared,
        unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::{ConceptMatch, MatchKind};
    use crate::ontology::{load_ontology, TripleRecord};
    use crate::text::Span;

    fn store() -> OntologyStore {
        let st = "cso#superTopicOf";
        let t = |s: &str, o: &str| TripleRecord::new(s, st, o).unwrap();
        load_ontology(vec![
            t("cs", "algorithms"),
            t("cs", "ai"),
            t("algorithms", "sorting"),
            t("sorting", "quicksort"),
            t("ai", "ml"),
            t("ml", "dl"),
        ])
        .unwrap()
    }

    fn dict(entries: &[(&str, u32)]) -> ConceptDictionary {
        let mut matches = Vec::new();
        for (i, (id, n)) in entries.iter().enumerate() {
            for k in 0..*n {
                matches.push(ConceptMatch {
                    concept_id: id.to_string(),
                    candidate_text: id.to_string(),
                    kind: MatchKind::Accurate,
                    similarity: 1.0,
                    sentence_index: i + k as usize,
                    span: Span::new(0, 1),
                });
            }
        }
        ConceptDictionary::from_matches(matches)
    }

    #[test]
    fn single_chain() {
        let tree = build_concept_tree("d", &dict(&[("quicksort", 2)]), &store()).unwrap();
        let ids: Vec<_> = tree
            .nodes()
            .map(|n| (n.concept_id.as_str(), n.detected, n.depth))
            .collect();
        assert_eq!(
            ids,
            [
                ("cs", false, 0),
                ("algorithms", false, 1),
                ("sorting", false, 2),
                ("quicksort", true, 3)
            ]
        );
        assert_eq!(tree.detected_node("quicksort").unwrap().frequency, 2);
    }

    #[test]
    fn empty_dictionary_is_root_only() {
        let tree = build_concept_tree("d", &ConceptDictionary::default(), &store()).unwrap();
        assert!(tree.is_root_only());
        assert_eq!(tree.root_id(), "cs");
    }

    #[test]
    fn detected_ancestor_gets_self_leaf() {
        let tree = build_concept_tree("d", &dict(&[("ml", 3), ("dl", 1)]), &store()).unwrap();
        let ml = tree.node("ml").unwrap();
        assert!(!ml.detected);
        let leaf = tree.detected_node("ml").unwrap();
        assert!(leaf.is_self && leaf.detected && leaf.is_leaf());
        assert_eq!(leaf.frequency, 3);
        assert_eq!(tree.total_frequency(), 4);
        assert_eq!(tree.path_to_root("ml").unwrap(), ["ml", "ai", "cs"]);
    }

    #[test]
    fn detected_root_is_kept_as_contour() {
        let tree = build_concept_tree("d", &dict(&[("cs", 1)]), &store()).unwrap();
        assert!(!tree.is_root_only());
        assert!(tree.root.children[0].is_self);
    }

    #[test]
    fn missing_concept_is_integrity_error() {
        let err = build_concept_tree("d", &dict(&[("nope", 1)]), &store()).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn json_round_trip_restores_index() {
        let tree = build_concept_tree("d", &dict(&[("ml", 3), ("dl", 1)]), &store()).unwrap();
        let json = tree.to_json().unwrap();
        assert!(json.contains("\"self\": true"));
        let back = ConceptTree::from_json(json.as_bytes()).unwrap();
        assert_eq!(back, tree);
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn comparison_of_one_tree() {
        let t = build_concept_tree("d0", &dict(&[("ml", 1), ("quicksort", 2)]), &store()).unwrap();
        let s = compare_trees(&[t]).unwrap();
        assert!(s.shared.is_empty());
        assert_eq!(s.unique["d0"].len(), 2);
        assert_eq!(s.frequencies["quicksort"], [2]);
    }

    #[test]
    fn identical_documents_share_everything() {
        let d = dict(&[("ml", 1), ("quicksort", 2)]);
        let a = build_concept_tree("a", &d, &store()).unwrap();
        let b = build_concept_tree("b", &d, &store()).unwrap();
        let s = compare_trees(&[a, b]).unwrap();
        assert!(s.unique.values().all(BTreeSet::is_empty));
        assert_eq!(s.shared.len(), 2);
        assert_eq!(s.frequencies["quicksort"], [2, 2]);
    }

    #[test]
    fn mismatched_roots_are_rejected() {
        let a = build_concept_tree("a", &dict(&[("ml", 1)]), &store()).unwrap();
        let other = load_ontology(vec![
            TripleRecord::new("x", "cso#superTopicOf", "ml").unwrap()
        ])
        .unwrap();
        let b = build_concept_tree("b", &dict(&[("ml", 1)]), &other).unwrap();
        assert!(matches!(
            compare_trees(&[a, b]),
            Err(Error::RootMismatch { .. })
        ));
        assert!(compare_trees(&[]).is_err());
    }
}
