//! Immutable domain ontology loaded from subject/predicate/object triples.
//!
//! Super-topic edges form a DAG with a single root. Every concept is given a
//! canonical parent (shortest route to the root, ties broken by the smallest
//! id sequence) so the DAG can be rendered as a tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::Read;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::{Error, Result};

pub const SUPER_TOPIC_OF: &str = "#superTopicOf";
pub const LABEL: &str = "#label";
pub const RELATED_EQUIVALENT: &str = "#relatedEquivalent";
pub const PREFERENTIAL_EQUIVALENT: &str = "#preferentialEquivalent";
pub const SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("ontology has no root concept")]
    NoRoot,
    #[error("ontology has multiple root concepts: {}", .0.join(", "))]
    MultipleRoots(Vec<String>),
    #[error("super-topic cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("triple {line} has an empty field")]
    EmptyField { line: usize },
    #[error("malformed ontology file: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleRecord {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl TripleRecord {
    pub fn new(
        subject: impl Into<String>,
        predicate: impl Into<String>,
        object: impl Into<String>,
    ) -> Option<TripleRecord> {
        let t = TripleRecord {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        };
        let filled = [&t.subject, &t.predicate, &t.object]
            .iter()
            .all(|f| !f.trim().is_empty());
        filled.then_some(t)
    }
}

/// Reads headerless `"subject","predicate","object"` CSV records.
pub fn read_triples<R: Read>(reader: R) -> Result<Vec<TripleRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let record = record.map_err(|e| OntologyError::Malformed(e.to_string()))?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if record.len() != 3 {
            return Err(OntologyError::Malformed(format!(
                "line {}: expected 3 fields, found {}",
                i + 1,
                record.len()
            ))
            .into());
        }
        let triple = TripleRecord::new(&record[0], &record[1], &record[2])
            .ok_or(OntologyError::EmptyField { line: i + 1 })?;
        out.push(triple);
    }
    Ok(out)
}

/// Case-folds, applies NFC, treats hyphens as spaces and collapses runs of
/// whitespace.
pub fn normalize(s: &str) -> String {
    let folded: String = s
        .nfc()
        .flat_map(char::to_lowercase)
        .map(|c| {
            if matches!(c, '-' | '\u{2010}' | '\u{2011}') {
                ' '
            } else {
                c
            }
        })
        .collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_uri(term: &str) -> &str {
    let t = term.trim();
    t.strip_prefix('<')
        .and_then(|t| t.strip_suffix('>'))
        .unwrap_or(t)
}

fn is_uri(term: &str) -> bool {
    let t = term.trim();
    (t.starts_with('<') && t.ends_with('>')) || t.contains("://")
}

/// Literal text of an object such as `"quicksort"@en` or `quicksort`.
fn literal(term: &str) -> String {
    let t = term.trim();
    if let Some(rest) = t.strip_prefix('"') {
        if let Some(end) = rest.rfind('"') {
            return rest[..end].to_owned();
        }
    }
    t.to_owned()
}

/// Display label derived from the last URI segment.
fn label_from_uri(uri: &str) -> String {
    let seg = uri
        .rsplit(['/', '#'])
        .find(|s| !s.is_empty())
        .unwrap_or(uri);
    seg.replace("%20", " ").replace('_', " ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub label: String,
    pub synonyms: BTreeSet<String>,
    pub parents: BTreeSet<String>,
    pub same_as: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptRef {
    pub id: String,
    pub label: String,
}

/// Tooltip content for a concept, whether or not it occurs in a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptCard {
    pub id: String,
    pub label: String,
    pub synonyms: Vec<String>,
    pub same_as: Vec<String>,
    pub parents: Vec<ConceptRef>,
    pub siblings: Vec<ConceptRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyStore {
    concepts: BTreeMap<String, Concept>,
    children: BTreeMap<String, BTreeSet<String>>,
    root_id: String,
    label_index: BTreeMap<String, String>,
    same_as_index: BTreeMap<String, BTreeSet<String>>,
    canonical_parent: BTreeMap<String, String>,
    depth: BTreeMap<String, usize>,
    ignored_predicates: usize,
}

#[derive(Default)]
struct Draft {
    label: Option<String>,
    synonyms: Vec<String>,
    equivalents: Vec<String>,
    parents: BTreeSet<String>,
    same_as: BTreeSet<String>,
}

pub fn load_ontology<I>(records: I) -> Result<OntologyStore>
where
    I: IntoIterator<Item = TripleRecord>,
{
    let mut drafts: BTreeMap<String, Draft> = BTreeMap::new();
    let mut in_hierarchy: BTreeSet<String> = BTreeSet::new();
    let mut equivalent_targets: BTreeSet<String> = BTreeSet::new();
    let mut labels: BTreeMap<String, String> = BTreeMap::new();
    let mut ignored = 0usize;

    for t in records {
        let subject = strip_uri(&t.subject).to_owned();
        let predicate = strip_uri(&t.predicate);
        if predicate.ends_with(SUPER_TOPIC_OF) {
            let child = strip_uri(&t.object).to_owned();
            in_hierarchy.insert(subject.clone());
            in_hierarchy.insert(child.clone());
            drafts.entry(subject.clone()).or_default();
            drafts.entry(child).or_default().parents.insert(subject);
        } else if predicate.ends_with(LABEL) {
            let label = literal(&t.object);
            labels.insert(subject.clone(), label.clone());
            drafts.entry(subject).or_default().label = Some(label);
        } else if predicate.ends_with(RELATED_EQUIVALENT)
            || predicate.ends_with(PREFERENTIAL_EQUIVALENT)
        {
            let draft = drafts.entry(subject).or_default();
            if is_uri(&t.object) {
                let target = strip_uri(&t.object).to_owned();
                equivalent_targets.insert(target.clone());
                draft.equivalents.push(target);
            } else {
                draft.synonyms.push(literal(&t.object));
            }
        } else if predicate == SAME_AS {
            drafts
                .entry(subject)
                .or_default()
                .same_as
                .insert(strip_uri(&t.object).to_owned());
        } else {
            ignored += 1;
        }
    }
    if ignored > 0 {
        warn!("ignored {ignored} triples with unrecognized predicates");
    }

    // A URI only ever named as an equivalent of another topic is a synonym,
    // not a concept of its own.
    drafts.retain(|id, _| in_hierarchy.contains(id) || !equivalent_targets.contains(id));

    let mut concepts = BTreeMap::new();
    for (id, d) in drafts {
        let label = d.label.unwrap_or_else(|| label_from_uri(&id));
        let mut synonyms: BTreeSet<String> = d.synonyms.into_iter().collect();
        for target in d.equivalents {
            let syn = labels
                .get(&target)
                .cloned()
                .unwrap_or_else(|| label_from_uri(&target));
            synonyms.insert(syn);
        }
        synonyms.remove(&label);
        concepts.insert(
            id.clone(),
            Concept {
                id,
                label,
                synonyms,
                parents: d.parents,
                same_as: d.same_as,
            },
        );
    }
    OntologyStore::from_concepts(concepts, ignored)
}

impl OntologyStore {
    fn from_concepts(concepts: BTreeMap<String, Concept>, ignored: usize) -> Result<OntologyStore> {
        let mut children: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for c in concepts.values() {
            for p in &c.parents {
                children.entry(p.clone()).or_default().insert(c.id.clone());
            }
        }
        if let Some(cycle) = find_cycle(&concepts) {
            return Err(OntologyError::Cycle(cycle).into());
        }
        let roots: Vec<String> = concepts
            .values()
            .filter(|c| c.parents.is_empty())
            .map(|c| c.id.clone())
            .collect();
        let root_id = match roots.len() {
            0 => return Err(OntologyError::NoRoot.into()),
            1 => roots[0].clone(),
            _ => return Err(OntologyError::MultipleRoots(roots).into()),
        };

        // Shortest distance from the root, then the smallest parent id among
        // those one level closer.
        let mut depth = BTreeMap::new();
        depth.insert(root_id.clone(), 0usize);
        let mut queue = VecDeque::from([root_id.clone()]);
        while let Some(id) = queue.pop_front() {
            let d = depth[&id];
            for child in children.get(&id).into_iter().flatten() {
                if !depth.contains_key(child) {
                    depth.insert(child.clone(), d + 1);
                    queue.push_back(child.clone());
                }
            }
        }
        let canonical_parent = concepts
            .values()
            .filter_map(|c| {
                let best = c.parents.iter().min_by_key(|p| (depth[*p], *p))?;
                Some((c.id.clone(), best.clone()))
            })
            .collect();

        let mut same_as_index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for c in concepts.values() {
            for uri in &c.same_as {
                same_as_index
                    .entry(uri.clone())
                    .or_default()
                    .insert(c.id.clone());
            }
        }

        let label_index = build_label_index(&concepts);
        info!(
            "loaded ontology with {} concepts rooted at {}",
            concepts.len(),
            root_id
        );
        Ok(OntologyStore {
            concepts,
            children,
            root_id,
            label_index,
            same_as_index,
            canonical_parent,
            depth,
            ignored_predicates: ignored,
        })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<OntologyStore> {
        load_ontology(read_triples(reader)?)
    }

    pub fn root_id(&self) -> &str {
        &self.root_id
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn ignored_predicates(&self) -> usize {
        self.ignored_predicates
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn get(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.concepts.contains_key(id)
    }

    fn concept(&self, id: &str) -> Result<&Concept> {
        self.concepts
            .get(id)
            .ok_or_else(|| Error::NotFound(id.to_owned()))
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        self.concepts.get(id).map(|c| c.label.as_str())
    }

    pub fn children(&self, id: &str) -> impl Iterator<Item = &str> {
        self.children
            .get(id)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn canonical_parent(&self, id: &str) -> Option<&str> {
        self.canonical_parent.get(id).map(String::as_str)
    }

    /// Longest canonical path length, counted in edges.
    pub fn max_depth(&self) -> usize {
        self.depth.values().copied().max().unwrap_or(0)
    }

    pub fn lookup_exact(&self, surface: &str) -> Option<&str> {
        self.label_index
            .get(&normalize(surface))
            .map(String::as_str)
    }

    /// Concepts whose same-as links include `uri`.
    pub fn concepts_linked_to(&self, uri: &str) -> impl Iterator<Item = &str> {
        self.same_as_index
            .get(uri)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// `[id, parent, ..., root]` along canonical parents.
    pub fn path_to_root(&self, id: &str) -> Result<Vec<String>> {
        self.concept(id)?;
        let mut path = vec![id.to_owned()];
        let mut cur = id;
        while let Some(p) = self.canonical_parent.get(cur) {
            path.push(p.clone());
            cur = p;
        }
        Ok(path)
    }

    pub fn top_level_ancestor(&self, id: &str) -> Result<String> {
        let path = self.path_to_root(id)?;
        Ok(if path.len() >= 2 {
            path[path.len() - 2].clone()
        } else {
            path[0].clone()
        })
    }

    fn reference(&self, id: &str) -> ConceptRef {
        ConceptRef {
            id: id.to_owned(),
            label: self.label(id).unwrap_or(id).to_owned(),
        }
    }

    pub fn concept_card(&self, id: &str) -> Result<ConceptCard> {
        let c = self.concept(id)?;
        let siblings = match self.canonical_parent(id) {
            Some(p) => self
                .children(p)
                .filter(|s| *s != id)
                .map(|s| self.reference(s))
                .collect(),
            None => Vec::new(),
        };
        Ok(ConceptCard {
            id: c.id.clone(),
            label: c.label.clone(),
            synonyms: c.synonyms.iter().cloned().collect(),
            same_as: c.same_as.iter().cloned().collect(),
            parents: c.parents.iter().map(|p| self.reference(p)).collect(),
            siblings,
        })
    }
}

/// Primary labels win over synonyms; remaining ties go to the smaller id.
fn build_label_index(concepts: &BTreeMap<String, Concept>) -> BTreeMap<String, String> {
    let mut index: BTreeMap<String, (bool, String)> = BTreeMap::new();
    let entries = concepts.values().flat_map(|c| {
        std::iter::once((true, &c.label, &c.id))
            .chain(c.synonyms.iter().map(move |s| (false, s, &c.id)))
    });
    for (primary, text, id) in entries {
        let key = normalize(text);
        if key.is_empty() {
            continue;
        }
        match index.get(&key) {
            Some((p, existing)) if existing == id => {
                if primary && !p {
                    index.insert(key, (true, id.clone()));
                }
            }
            Some((p, existing)) => {
                let wins = (primary && !p) || (primary == *p && id < existing);
                warn!(
                    "label {key:?} shared by {existing} and {id}; keeping {}",
                    if wins { id } else { existing }
                );
                if wins {
                    index.insert(key, (primary, id.clone()));
                }
            }
            None => {
                index.insert(key, (primary, id.clone()));
            }
        }
    }
    index.into_iter().map(|(k, (_, id))| (k, id)).collect()
}

/// One super-topic cycle, listed parent-to-child and closed on its start.
fn find_cycle(concepts: &BTreeMap<String, Concept>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    for start in concepts.keys() {
        if marks.contains_key(start.as_str()) {
            continue;
        }
        // Iterative DFS along parent edges.
        let mut stack: Vec<(&str, Vec<&str>)> = vec![(
            start.as_str(),
            concepts[start].parents.iter().map(String::as_str).collect(),
        )];
        marks.insert(start, Mark::Open);
        while let Some((node, pending)) = stack.last_mut() {
            let node = *node;
            match pending.pop() {
                Some(next) => match marks.get(next) {
                    Some(Mark::Open) => {
                        let pos = stack.iter().position(|(n, _)| *n == next).unwrap_or(0);
                        let mut cycle: Vec<String> =
                            stack[pos..].iter().map(|(n, _)| n.to_string()).collect();
                        cycle.push(next.to_owned());
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next, Mark::Open);
                        let parents = concepts
                            .get(next)
                            .map(|c| c.parents.iter().map(String::as_str).collect())
                            .unwrap_or_default();
                        stack.push((next, parents));
                    }
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const ST: &str = "http://cso.kmi.open.ac.uk/schema/cso#superTopicOf";
    const LB: &str = "http://www.w3.org/2000/01/rdf-schema#label";

    fn t(s: &str, p: &str, o: &str) -> TripleRecord {
        TripleRecord::new(s, p, o).unwrap()
    }

    fn small() -> Vec<TripleRecord> {
        vec![
            t("root", ST, "a"),
            t("root", ST, "b"),
            t("a", ST, "c"),
            t("root", LB, "\"computer science\"@en"),
            t("c", LB, "Object-Oriented Programming"),
        ]
    }

    #[test]
    fn loads_small_fixture() {
        let store = load_ontology(small()).unwrap();
        assert_eq!(store.len(), 4);
        assert_eq!(store.root_id(), "root");
        assert_eq!(store.label("root"), Some("computer science"));
        assert_eq!(store.label("b"), Some("b"));
        assert_eq!(store.path_to_root("c").unwrap(), ["c", "a", "root"]);
    }

    #[test]
    fn empty_input_has_no_root() {
        let err = load_ontology(Vec::new()).unwrap_err();
        assert!(matches!(err, Error::Ontology(OntologyError::NoRoot)));
    }

    #[test]
    fn multiple_roots_are_named() {
        let err = load_ontology(vec![t("r1", ST, "a"), t("r2", ST, "b")]).unwrap_err();
        match err {
            Error::Ontology(OntologyError::MultipleRoots(ids)) => assert_eq!(ids, ["r1", "r2"]),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn cycle_is_reported_with_witness() {
        let err =
            load_ontology(vec![t("r", ST, "a"), t("a", ST, "b"), t("b", ST, "a")]).unwrap_err();
        match err {
            Error::Ontology(OntologyError::Cycle(c)) => {
                assert_eq!(c.first(), c.last());
                assert!(c.contains(&"a".to_owned()) && c.contains(&"b".to_owned()));
            }
            e => panic!("{e}"),
        }
        let err = load_ontology(vec![t("r", ST, "a"), t("a", ST, "a")]).unwrap_err();
        assert!(matches!(err, Error::Ontology(OntologyError::Cycle(_))));
    }

    #[test]
    fn empty_field_rejected() {
        assert!(TripleRecord::new("a", "", "b").is_none());
        let err = read_triples("\"a\",\"\",\"b\"\n".as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            Error::Ontology(OntologyError::EmptyField { line: 1 })
        ));
    }

    #[test]
    fn normalization_unifies_case_and_separators() {
        assert_eq!(
            normalize("Object-Oriented  Programming"),
            "object oriented programming"
        );
        assert_eq!(
            normalize(" object oriented\tprogramming "),
            "object oriented programming"
        );
        // NFD "é" composes to the same key as NFC.
        assert_eq!(normalize("caf\u{0065}\u{0301}"), normalize("caf\u{00e9}"));
    }

    #[test]
    fn lookup_matches_hyphen_and_space_forms() {
        let store = load_ontology(small()).unwrap();
        assert_eq!(store.lookup_exact("object oriented programming"), Some("c"));
        assert_eq!(store.lookup_exact("OBJECT-ORIENTED PROGRAMMING"), Some("c"));
        assert_eq!(store.lookup_exact("nonexistent phrase xyz"), None);
    }

    #[test]
    fn primary_label_beats_synonym() {
        let store = load_ontology(vec![
            t("r", ST, "a"),
            t("r", ST, "b"),
            t("a", LB, "alpha"),
            t("b", LB, "beta"),
            t("a", "x#relatedEquivalent", "\"beta\""),
        ])
        .unwrap();
        assert_eq!(store.lookup_exact("beta"), Some("b"));
    }

    #[test]
    fn equivalent_uri_becomes_synonym() {
        let store = load_ontology(vec![
            t("<r>", ST, "<http://x/topics/oop>"),
            t(
                "<http://x/topics/oop>",
                "<cso#preferentialEquivalent>",
                "<http://x/topics/object_oriented_programming>",
            ),
            t(
                "<http://x/topics/object_oriented_programming>",
                LB,
                "\"object-oriented programming\"@en",
            ),
        ])
        .unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(
            store.lookup_exact("object oriented programming"),
            Some("http://x/topics/oop")
        );
    }

    #[test]
    fn unknown_predicates_are_counted() {
        let mut triples = small();
        triples.push(t("a", "http://example.org/other", "z"));
        let store = load_ontology(triples).unwrap();
        assert_eq!(store.ignored_predicates(), 1);
    }

    #[test]
    fn unknown_id_is_not_found() {
        let store = load_ontology(small()).unwrap();
        assert!(matches!(store.path_to_root("zz"), Err(Error::NotFound(_))));
        assert!(matches!(
            store.top_level_ancestor("zz"),
            Err(Error::NotFound(_))
        ));
        assert!(matches!(store.concept_card("zz"), Err(Error::NotFound(_))));
    }

    #[test]
    fn top_level_and_card_edges() {
        let store = load_ontology(small()).unwrap();
        assert_eq!(store.top_level_ancestor("root").unwrap(), "root");
        assert_eq!(store.top_level_ancestor("a").unwrap(), "a");
        assert_eq!(store.top_level_ancestor("c").unwrap(), "a");
        assert!(store.concept_card("root").unwrap().parents.is_empty());
        assert!(store.concept_card("c").unwrap().siblings.is_empty());
        let card = store.concept_card("a").unwrap();
        assert_eq!(card.siblings.len(), 1);
        assert_eq!(card.siblings[0].id, "b");
    }
}
