#![allow(dead_code)]

pub mod geometry;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use conceptscope::candidates::{extract_candidates, train_ngram_model, NGramConfig};
use conceptscope::config::Config;
use conceptscope::matcher::{EntityLookup, LookupCache, MatcherConfig, SimilarityTaxonomy};
use conceptscope::ontology::{read_triples, OntologyStore};
use conceptscope::text::{analyze_document, load_document, Document};
use conceptscope::workspace::{InputDocument, Pipeline, Workspace};

pub const TOPICS: &str = "https://cso.kmi.open.ac.uk/topics/";

pub fn topic(slug: &str) -> String {
    format!("{TOPICS}{slug}")
}

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn read_fixture(rel: &str) -> Vec<u8> {
    std::fs::read(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn store() -> OntologyStore {
    OntologyStore::from_csv(read_fixture("ontology.csv").as_slice()).unwrap()
}

pub fn cache() -> LookupCache {
    LookupCache::open(fixture("lookup_cache.json")).unwrap()
}

pub fn offline_lookup() -> EntityLookup {
    EntityLookup::offline(cache())
}

pub fn document(name: &str) -> Document {
    let bytes = read_fixture(&format!("docs/{name}.txt"));
    analyze_document(load_document(&bytes, name).unwrap())
}

pub fn exact_only() -> MatcherConfig {
    MatcherConfig {
        fuzzy_enabled: false,
        ..MatcherConfig::default()
    }
}

pub fn input(name: &str) -> InputDocument {
    InputDocument::read(&fixture(&format!("docs/{name}.txt"))).unwrap()
}

pub fn process(names: &[&str], config: &Config) -> Workspace {
    let store = store();
    let lookup = offline_lookup();
    let pipeline = Pipeline {
        store: &store,
        taxonomy: SimilarityTaxonomy::bundled(),
        lookup: &lookup,
        config,
    };
    let inputs: Vec<InputDocument> = names.iter().map(|n| input(n)).collect();
    pipeline.run(&inputs, read_fixture("ontology.csv")).unwrap()
}

/// Case-fold, hyphen as space, collapse whitespace. Written independently of
/// the library's normalizer; fixture text is ASCII so NFC is a no-op.
pub fn oracle_normalize(s: &str) -> String {
    s.to_lowercase()
        .replace('-', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Every `(id, label-or-synonym)` pair read straight from the CSV.
pub fn oracle_surfaces() -> Vec<(String, String)> {
    let triples = read_triples(read_fixture("ontology.csv").as_slice()).unwrap();
    let strip = |s: &str| s.trim_matches(|c| c == '<' || c == '>').to_owned();
    let lit = |s: &str| {
        let s = s.trim();
        match s.strip_prefix('"') {
            Some(rest) => rest[..rest.rfind('"').unwrap()].to_owned(),
            None => s.to_owned(),
        }
    };
    let mut label: BTreeMap<String, String> = BTreeMap::new();
    let mut hierarchy: BTreeSet<String> = BTreeSet::new();
    for t in &triples {
        if t.predicate.ends_with("#label>") {
            label.insert(strip(&t.subject), lit(&t.object));
        }
        if t.predicate.ends_with("#superTopicOf>") {
            hierarchy.insert(strip(&t.subject));
            hierarchy.insert(strip(&t.object));
        }
    }
    let mut out: Vec<(String, String)> = hierarchy
        .iter()
        .filter_map(|id| label.get(id).map(|l| (id.clone(), l.clone())))
        .collect();
    for t in &triples {
        let subject = strip(&t.subject);
        if t.predicate.ends_with("#relatedEquivalent>")
            || t.predicate.ends_with("#preferentialEquivalent>")
        {
            let syn = if t.object.starts_with('<') {
                label[&strip(&t.object)].clone()
            } else {
                lit(&t.object)
            };
            out.push((subject, syn));
        }
    }
    out
}

pub fn oracle_exact_pairs(doc: &Document) -> BTreeSet<(String, usize)> {
    oracle_exact_matches(doc).into_iter().collect()
}

/// Brute force: every candidate of every sentence against every surface.
/// Primary labels beat synonyms, then the smaller id wins. One entry per
/// matched candidate.
pub fn oracle_exact_matches(doc: &Document) -> Vec<(String, usize)> {
    let surfaces = oracle_surfaces();
    let primary: BTreeSet<(String, String)> = {
        let triples = read_triples(read_fixture("ontology.csv").as_slice()).unwrap();
        triples
            .iter()
            .filter(|t| t.predicate.ends_with("#label>"))
            .map(|t| {
                let id = t.subject.trim_matches(|c| c == '<' || c == '>').to_owned();
                let l = t.object.trim();
                (id, oracle_normalize(&l[1..l.rfind('"').unwrap()]))
            })
            .collect()
    };
    let model = train_ngram_model(&doc.sentences, &NGramConfig::default());
    let mut pairs = Vec::new();
    for sent in &doc.sentences {
        for cand in extract_candidates(sent, &model) {
            let key = oracle_normalize(&cand.text);
            let mut hits: Vec<(bool, &String)> = surfaces
                .iter()
                .filter(|(_, s)| oracle_normalize(s) == key)
                .map(|(id, _)| (!primary.contains(&(id.clone(), key.clone())), id))
                .collect();
            hits.sort();
            if let Some((_, id)) = hits.first() {
                pairs.push(((*id).clone(), sent.index));
            }
        }
    }
    pairs
}

/// Super-topic edges child -> parents, read straight from the CSV.
pub fn oracle_parents() -> BTreeMap<String, BTreeSet<String>> {
    let triples = read_triples(read_fixture("ontology.csv").as_slice()).unwrap();
    let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for t in triples
        .iter()
        .filter(|t| t.predicate.ends_with("#superTopicOf>"))
    {
        let p = t.subject.trim_matches(|c| c == '<' || c == '>').to_owned();
        let c = t.object.trim_matches(|c| c == '<' || c == '>').to_owned();
        parents.entry(p.clone()).or_default();
        parents.entry(c).or_default().insert(p);
    }
    parents
}

/// Enumerates every upward path and keeps the shortest, then the
/// lexicographically smallest.
pub fn oracle_canonical_path(
    parents: &BTreeMap<String, BTreeSet<String>>,
    id: &str,
) -> Vec<String> {
    fn all(parents: &BTreeMap<String, BTreeSet<String>>, id: &str) -> Vec<Vec<String>> {
        let ps = &parents[id];
        if ps.is_empty() {
            return vec![vec![id.to_owned()]];
        }
        ps.iter()
            .flat_map(|p| all(parents, p))
            .map(|mut up| {
                up.insert(0, id.to_owned());
                up
            })
            .collect()
    }
    all(parents, id)
        .into_iter()
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
        .unwrap()
}

/// Content words (lowercased) counted over the given sentences, skipping
/// anything inside `own` byte ranges. A second, plain implementation of the
/// cloud term ranking.
pub fn oracle_cooccurrence(
    doc: &Document,
    sentences: &BTreeSet<usize>,
    own: &[(usize, usize)],
) -> BTreeMap<String, u32> {
    use conceptscope::text::Tag;
    let mut counts = BTreeMap::new();
    for &i in sentences {
        for t in &doc.sentences[i].tokens {
            let inside = own
                .iter()
                .any(|&(s, e)| s <= t.span.start && t.span.end <= e);
            let content = matches!(t.tag, Tag::Noun | Tag::Propn | Tag::Adj)
                && !t.is_stopword
                && t.surface.chars().any(char::is_alphabetic);
            if content && !inside {
                *counts.entry(t.surface.to_lowercase()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Sentences built from concept labels and filler, for randomized runs.
pub const SENTENCE_POOL: &[&str] = &[
    "Quicksort is faster than bubble sort on most inputs.",
    "Merge sort and quicksort are classic sorting algorithms.",
    "The shortest path between two cities was computed with graph algorithms.",
    "Machine learning models need large amounts of data.",
    "Deep learning relies on neural networks with many layers.",
    "Supervised learning uses labelled examples.",
    "Reinforcement learning agents explore their environment.",
    "Natural language processing helps with text extraction.",
    "Computer vision and optical character recognition read scanned forms.",
    "Software engineering teams write software testing plans.",
    "Object-oriented programming remains popular in software engineering.",
    "Computer graphics covers computer animation and visualization.",
    "Information visualization often uses treemaps.",
    "The internet links every local area network.",
    "Computer networks carry traffic between data centres.",
    "Artificial intelligence is a broad field of computer science.",
    "Algorithms are studied in every computer science course.",
    "We walked to the harbour after lunch.",
    "The weather was pleasant for the whole week.",
    "2D computer animation tools are cheap nowadays.",
];
