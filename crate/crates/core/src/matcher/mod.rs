//! Maps query candidates onto ontology concepts.
//!
//! Each candidate is first matched exactly against normalized labels and
//! synonyms. Failing that, the external entity lookup proposes entities,
//! which are linked back to the ontology through same-as links and accepted
//! only when the Wu-Palmer similarity between the candidate's head noun and
//! the concept label's head noun reaches the configured threshold.

mod lookup;
mod taxonomy;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use log::debug;
use serde::{Deserialize, Serialize};

pub use lookup::{
    parse_response, EntityLookup, FuzzyCandidate, HttpLookup, LookupCache, LookupService,
    DEFAULT_ENDPOINT,
};
pub use taxonomy::{load_similarity_taxonomy, wu_palmer, SimilarityTaxonomy, TaxonomyError};

use crate::candidates::{extract_candidates, CandidateTerm, NGramModel};
use crate::ontology::OntologyStore;
use crate::text::{Document, Span, Tagger};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MatchKind {
    Accurate,
    Fuzzy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptMatch {
    pub concept_id: String,
    pub candidate_text: String,
    pub kind: MatchKind,
    pub similarity: f64,
    pub sentence_index: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatcherConfig {
    pub threshold: f64,
    pub fuzzy_enabled: bool,
    pub cache_path: Option<PathBuf>,
    pub service_endpoint: String,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            threshold: 0.7,
            fuzzy_enabled: true,
            cache_path: None,
            service_endpoint: DEFAULT_ENDPOINT.to_owned(),
        }
    }
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "matcher threshold {} is outside [0, 1]",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Detected concepts of one document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConceptDictionary {
    pub matches: Vec<ConceptMatch>,
    pub frequency: BTreeMap<String, u32>,
    pub occurrences: BTreeMap<String, BTreeSet<usize>>,
}

impl ConceptDictionary {
    pub fn from_matches(matches: Vec<ConceptMatch>) -> ConceptDictionary {
        let mut frequency: BTreeMap<String, u32> = BTreeMap::new();
        let mut occurrences: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for m in &matches {
            *frequency.entry(m.concept_id.clone()).or_default() += 1;
            occurrences
                .entry(m.concept_id.clone())
                .or_default()
                .insert(m.sentence_index);
        }
        ConceptDictionary {
            matches,
            frequency,
            occurrences,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    pub fn concept_count(&self) -> usize {
        self.frequency.len()
    }

    pub fn total_matches(&self) -> u64 {
        self.frequency.values().map(|&f| u64::from(f)).sum()
    }
}

/// Last non-stop-word of a phrase, case-folded and stripped of edge
/// punctuation.
pub fn head_noun(phrase: &str) -> Option<String> {
    let tagger = Tagger::bundled();
    phrase
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .rfind(|w| !w.is_empty() && !tagger.is_stopword(w))
        .map(str::to_lowercase)
}

pub fn fuzzy_resolve(
    candidate: &CandidateTerm,
    store: &OntologyStore,
    lookup: &EntityLookup,
    tax: &SimilarityTaxonomy,
    config: &MatcherConfig,
) -> Result<Option<ConceptMatch>> {
    let Some(head) = head_noun(&candidate.text) else {
        return Ok(None);
    };
    let entities = lookup.query(&candidate.text)?;

    // (similarity, service score, concept id); best wins, smaller id on ties.
    let mut best: Option<(f64, f64, &str)> = None;
    for entity in &entities {
        for concept_id in store.concepts_linked_to(&entity.external_uri) {
            let Some(label_head) = store.label(concept_id).and_then(head_noun) else {
                continue;
            };
            let Some(sim) = wu_palmer(tax, &head, &label_head) else {
                continue;
            };
            if sim < config.threshold {
                continue;
            }
            let better = match best {
                None => true,
                Some((bs, bscore, bid)) => {
                    sim > bs
                        || (sim == bs && entity.service_score > bscore)
                        || (sim == bs && entity.service_score == bscore && concept_id < bid)
                }
            };
            if better {
                if let Some((_, _, prev)) = best {
                    debug!("{:?}: {concept_id} replaces {prev}", candidate.text);
                }
                best = Some((sim, entity.service_score, concept_id));
            }
        }
    }
    Ok(best.map(|(similarity, _, id)| ConceptMatch {
        concept_id: id.to_owned(),
        candidate_text: candidate.text.clone(),
        kind: MatchKind::Fuzzy,
        similarity,
        sentence_index: candidate.sentence_index,
        span: candidate.span,
    }))
}

/// Accurate match first, fuzzy fallback second, for every candidate of
/// every sentence. Each candidate yields at most one match.
pub fn detect_concepts(
    doc: &Document,
    store: &OntologyStore,
    model: &NGramModel,
    lookup: &EntityLookup,
    tax: &SimilarityTaxonomy,
    config: &MatcherConfig,
) -> Result<ConceptDictionary> {
    config.validate()?;
    let mut matches = Vec::new();
    for sent in &doc.sentences {
        for cand in extract_candidates(sent, model) {
            if let Some(id) = store.lookup_exact(&cand.text) {
                matches.push(ConceptMatch {
                    concept_id: id.to_owned(),
                    candidate_text: cand.text,
                    kind: MatchKind::Accurate,
                    similarity: 1.0,
                    sentence_index: cand.sentence_index,
                    span: cand.span,
                });
            } else if config.fuzzy_enabled {
                if let Some(m) = fuzzy_resolve(&cand, store, lookup, tax, config)? {
                    matches.push(m);
                }
            }
        }
    }
    Ok(ConceptDictionary::from_matches(matches))
}
