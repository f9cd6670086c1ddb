//! Document loading, sentence segmentation and part-of-speech tagging.
//!
//! All spans are UTF-8 byte offsets into [`Document::raw_text`], so
//! `&raw_text[span.range()]` always yields the exact source text.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords.txt");
const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");

/// Abbreviations whose trailing period never ends a sentence. Compared
/// case-folded, without the final period.
const ABBREVIATIONS: &[&str] = &[
    "al", "approx", "cf", "dr", "e.g", "eq", "eqs", "fig", "figs", "i.e", "inc", "ltd", "mr",
    "mrs", "ms", "no", "nos", "pp", "prof", "ref", "refs", "resp", "sec", "secs", "st", "tab",
    "vol", "vs", "viz",
];

/// Half-open byte range into a document's raw text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

impl From<[usize; 2]> for Span {
    fn from([start, end]: [usize; 2]) -> Self {
        Span { start, end }
    }
}

impl From<Span> for [usize; 2] {
    fn from(span: Span) -> Self {
        [span.start, span.end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Tag {
    Noun,
    Propn,
    Adj,
    Verb,
    Adv,
    Det,
    Adp,
    Num,
    Punct,
    Other,
}

impl Tag {
    pub const ALL: [Tag; 10] = [
        Tag::Noun,
        Tag::Propn,
        Tag::Adj,
        Tag::Verb,
        Tag::Adv,
        Tag::Det,
        Tag::Adp,
        Tag::Num,
        Tag::Punct,
        Tag::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Noun => "NOUN",
            Tag::Propn => "PROPN",
            Tag::Adj => "ADJ",
            Tag::Verb => "VERB",
            Tag::Adv => "ADV",
            Tag::Det => "DET",
            Tag::Adp => "ADP",
            Tag::Num => "NUM",
            Tag::Punct => "PUNCT",
            Tag::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self, Tag::Noun | Tag::Propn)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub tag: Tag,
    pub span: Span,
    pub is_stopword: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
    pub span: Span,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Source text covered by a document-absolute span inside this sentence.
    pub fn slice(&self, span: Span) -> &str {
        &self.text[span.start - self.span.start..span.end - self.span.start]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub raw_text: String,
    pub sentences: Vec<Sentence>,
}

/// Content-derived document id: the first 16 hex digits of the SHA-256 of
/// the source bytes.
pub fn document_id(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    hex::encode(&digest[..8])
}

pub fn load_document(source: &[u8], title: &str) -> Result<Document> {
    let raw_text = std::str::from_utf8(source)?.to_owned();
    Ok(Document {
        id: document_id(source),
        title: title.to_owned(),
        raw_text,
        sentences: Vec::new(),
    })
}

/// Splits, tags and returns a fully analyzed document.
pub fn analyze_document(doc: Document) -> Document {
    let mut doc = split_sentences(doc);
    doc.sentences = doc.sentences.into_iter().map(analyze_sentence).collect();
    doc
}

pub fn split_sentences(mut doc: Document) -> Document {
    doc.sentences = sentence_spans(&doc.raw_text)
        .into_iter()
        .enumerate()
        .map(|(index, span)| Sentence {
            index,
            text: doc.raw_text[span.range()].to_owned(),
            span,
            tokens: Vec::new(),
        })
        .collect();
    doc
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}')
}

fn is_abbreviation(text: &str, period: usize) -> bool {
    let head = &text[..period];
    let word_start = head
        .rfind(char::is_whitespace)
        .map(|i| i + head[i..].chars().next().map_or(1, char::len_utf8))
        .unwrap_or(0);
    let word = head[word_start..].trim_start_matches(|c: char| !c.is_alphanumeric());
    let word = word.to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

fn sentence_spans(text: &str) -> Vec<Span> {
    let mut spans = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if start.is_none() {
            if !c.is_whitespace() {
                start = Some(pos);
            } else {
                i += 1;
                continue;
            }
        }
        if c == '\n' {
            // A blank line closes any open sentence.
            let mut j = i + 1;
            while j < chars.len() && chars[j].1 != '\n' && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j].1 == '\n' {
                let s = start.take().expect("sentence open");
                let end = text[..pos].trim_end().len();
                if end > s {
                    spans.push(Span::new(s, end));
                }
                i = j + 1;
                continue;
            }
        }
        if matches!(c, '.' | '?' | '!') {
            let mut j = i + 1;
            while j < chars.len()
                && (matches!(chars[j].1, '.' | '?' | '!') || is_closer(chars[j].1))
            {
                j += 1;
            }
            let at_boundary = j == chars.len() || chars[j].1.is_whitespace();
            let abbreviation = c == '.' && j == i + 1 && is_abbreviation(text, pos);
            if at_boundary && !abbreviation {
                let end = if j == chars.len() {
                    text.len()
                } else {
                    chars[j].0
                };
                spans.push(Span::new(start.take().expect("sentence open"), end));
            }
            i = j;
            continue;
        }
        i += 1;
    }
    if let Some(s) = start {
        let end = text.trim_end().len();
        if end > s {
            spans.push(Span::new(s, end));
        }
    }
    spans
}

/// Lexicon and stop-word list backing [`analyze_sentence`].
#[derive(Debug, Clone)]
pub struct Tagger {
    lexicon: HashMap<String, Tag>,
    stopwords: HashSet<String>,
}

impl Tagger {
    /// Builds a tagger from a `word<TAB>TAG` lexicon and a one-word-per-line
    /// stop-word list. Lines starting with `#` are comments.
    pub fn from_sources(lexicon: &str, stopwords: &str) -> Tagger {
        let lexicon = data_lines(lexicon)
            .filter_map(|line| {
                let (word, tag) = line.split_once('\t')?;
                Some((word.trim().to_lowercase(), Tag::parse(tag.trim())?))
            })
            .collect();
        let stopwords = data_lines(stopwords).map(str::to_lowercase).collect();
        Tagger { lexicon, stopwords }
    }

    pub fn bundled() -> &'static Tagger {
        static TAGGER: OnceLock<Tagger> = OnceLock::new();
        TAGGER.get_or_init(|| Tagger::from_sources(BUNDLED_LEXICON, BUNDLED_STOPWORDS))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&word.to_lowercase())
    }

    pub fn stopwords(&self) -> impl Iterator<Item = &str> {
        self.stopwords.iter().map(String::as_str)
    }

    pub fn tag_word(&self, surface: &str) -> Tag {
        if !surface.chars().any(char::is_alphanumeric) {
            return Tag::Punct;
        }
        if surface
            .chars()
            .all(|c| c.is_numeric() || c == '.' || c == ',')
        {
            return Tag::Num;
        }
        let lower = surface.to_lowercase();
        if let Some(tag) = self.lexicon.get(&lower) {
            return *tag;
        }
        if let Some((_, last)) = lower.rsplit_once('-') {
            if !last.is_empty() {
                return match self.tag_word(last) {
                    Tag::Adj | Tag::Verb => Tag::Adj,
                    Tag::Propn => Tag::Propn,
                    _ => Tag::Noun,
                };
            }
        }
        let n = lower.chars().count();
        let verb_suffix =
            lower.ends_with("ing") || (lower.ends_with("ed") && !lower.ends_with("eed"));
        if n > 4 && verb_suffix {
            Tag::Verb
        } else if n > 3 && lower.ends_with("ly") {
            Tag::Adv
        } else {
            // Covers the -tion / -ment suffixes and the unknown-word fallback.
            Tag::Noun
        }
    }

    pub fn analyze(&self, mut sent: Sentence) -> Sentence {
        sent.tokens = token_pattern()
            .find_iter(&sent.text)
            .map(|m| {
                let surface = m.as_str().to_owned();
                Token {
                    tag: self.tag_word(&surface),
                    is_stopword: self.is_stopword(&surface),
                    span: Span::new(sent.span.start + m.start(), sent.span.start + m.end()),
                    surface,
                }
            })
            .collect();
        sent
    }
}

fn data_lines(src: &str) -> impl Iterator<Item = &str> {
    src.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

fn token_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"\p{N}+(?:[.,]\p{N}+)+|[\p{L}\p{N}]+(?:[-'\u{2019}_][\p{L}\p{N}]+)*|\S")
            .expect("token pattern compiles")
    })
}

/// Tokenizes and tags a sentence with the bundled lexicon.
pub fn analyze_sentence(sent: Sentence) -> Sentence {
    Tagger::bundled().analyze(sent)
}
