//! Query candidate generation: noun chunks and collocation n-grams.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::text::{Sentence, Span, Tag, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CandidateSource {
    NounChunk,
    Ngram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateTerm {
    pub text: String,
    pub source: CandidateSource,
    pub sentence_index: usize,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NGramConfig {
    pub min_count: u32,
    pub pmi_threshold: f64,
}

impl Default for NGramConfig {
    fn default() -> Self {
        NGramConfig {
            min_count: 2,
            pmi_threshold: 3.0,
        }
    }
}

/// Bigram and trigram collocations of one document, keyed by case-folded
/// token sequence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NGramModel {
    entries: BTreeMap<Vec<String>, NGramStats>,
    pub min_count: u32,
    pub score_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NGramStats {
    pub count: u32,
    pub pmi: f64,
}

impl NGramModel {
    /// Model holding exactly the given n-grams, bypassing training.
    pub fn with_entries<I, S>(ngrams: I) -> NGramModel
    where
        I: IntoIterator<Item = Vec<S>>,
        S: AsRef<str>,
    {
        let entries = ngrams
            .into_iter()
            .map(|words| {
                let key = words.iter().map(|w| w.as_ref().to_lowercase()).collect();
                (
                    key,
                    NGramStats {
                        count: 0,
                        pmi: f64::INFINITY,
                    },
                )
            })
            .collect();
        NGramModel {
            entries,
            min_count: 0,
            score_threshold: f64::NEG_INFINITY,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains<S: AsRef<str>>(&self, words: &[S]) -> bool {
        self.get(words).is_some()
    }

    pub fn get<S: AsRef<str>>(&self, words: &[S]) -> Option<&NGramStats> {
        let key: Vec<String> = words.iter().map(|w| w.as_ref().to_lowercase()).collect();
        self.entries.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], &NGramStats)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }
}

fn folded(tok: &Token) -> String {
    tok.surface.to_lowercase()
}

fn collocable(tok: &Token) -> bool {
    tok.tag != Tag::Punct && !tok.is_stopword
}

/// Counts bigrams and trigrams that neither cross punctuation nor contain a
/// stop word, and keeps those above the count floor and PMI threshold.
///
/// PMI is `log2(c(w1..wn) * N^(n-1) / (c(w1) * ... * c(wn)))` with `N` the
/// number of non-punctuation tokens in the corpus.
pub fn train_ngram_model(sentences: &[Sentence], config: &NGramConfig) -> NGramModel {
    let mut unigrams: HashMap<String, u32> = HashMap::new();
    let mut total = 0u64;
    let mut counts: HashMap<Vec<String>, u32> = HashMap::new();

    for sent in sentences {
        for tok in sent.tokens.iter().filter(|t| t.tag != Tag::Punct) {
            *unigrams.entry(folded(tok)).or_default() += 1;
            total += 1;
        }
        for n in 2..=3 {
            for window in sent.tokens.windows(n) {
                if window.iter().all(collocable) {
                    *counts
                        .entry(window.iter().map(folded).collect())
                        .or_default() += 1;
                }
            }
        }
    }

    let n_total = total as f64;
    let entries = counts
        .into_iter()
        .filter(|(_, count)| *count >= config.min_count)
        .filter_map(|(key, count)| {
            let denom: f64 = key.iter().map(|w| unigrams[w] as f64).product();
            let pmi = (count as f64 * n_total.powi(key.len() as i32 - 1) / denom).log2();
            (pmi >= config.pmi_threshold).then_some((key, NGramStats { count, pmi }))
        })
        .collect();

    NGramModel {
        entries,
        min_count: config.min_count,
        score_threshold: config.pmi_threshold,
    }
}

fn is_chunk_word(tag: Tag) -> bool {
    matches!(tag, Tag::Adj | Tag::Noun | Tag::Propn)
}

/// Maximal `(ADJ|NOUN|PROPN)* (NOUN|PROPN)` runs with stop words trimmed
/// from both edges, as token index ranges.
fn noun_chunks(tokens: &[Token]) -> Vec<(usize, usize)> {
    let mut chunks = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !is_chunk_word(tokens[i].tag) {
            i += 1;
            continue;
        }
        let start = i;
        while i < tokens.len() && is_chunk_word(tokens[i].tag) {
            i += 1;
        }
        let (mut lo, mut hi) = (start, i);
        loop {
            let before = (lo, hi);
            while hi > lo && !tokens[hi - 1].tag.is_nominal() {
                hi -= 1;
            }
            while lo < hi && tokens[lo].is_stopword {
                lo += 1;
            }
            while hi > lo && tokens[hi - 1].is_stopword {
                hi -= 1;
            }
            if (lo, hi) == before {
                break;
            }
        }
        if lo < hi {
            chunks.push((lo, hi));
        }
    }
    chunks
}

/// Occurrences of model n-grams in the sentence, dropping any occurrence
/// covered by a longer one.
fn ngram_hits(tokens: &[Token], model: &NGramModel) -> Vec<(usize, usize)> {
    let words: Vec<String> = tokens.iter().map(folded).collect();
    let mut hits: Vec<(usize, usize)> = Vec::new();
    for n in [3, 2] {
        for lo in 0..words.len().saturating_sub(n - 1) {
            let hi = lo + n;
            if hits.iter().any(|&(a, b)| a <= lo && hi <= b) {
                continue;
            }
            if model.contains(&words[lo..hi]) {
                hits.push((lo, hi));
            }
        }
    }
    hits
}

pub fn extract_candidates(sent: &Sentence, model: &NGramModel) -> Vec<CandidateTerm> {
    let tokens = &sent.tokens;
    let make = |(lo, hi): (usize, usize), source| {
        let span = Span::new(tokens[lo].span.start, tokens[hi - 1].span.end);
        CandidateTerm {
            text: sent.slice(span).to_owned(),
            source,
            sentence_index: sent.index,
            span,
        }
    };

    // Keyed by span so a chunk and an n-gram over the same text merge,
    // keeping the chunk since NounChunk sorts first.
    let mut merged: BTreeMap<Span, CandidateTerm> = BTreeMap::new();
    let all = noun_chunks(tokens)
        .into_iter()
        .map(|r| make(r, CandidateSource::NounChunk))
        .chain(
            ngram_hits(tokens, model)
                .into_iter()
                .map(|r| make(r, CandidateSource::Ngram)),
        );
    for cand in all {
        merged
            .entry(cand.span)
            .and_modify(|c| c.source = c.source.min(cand.source))
            .or_insert(cand);
    }
    merged.into_values().collect()
}
