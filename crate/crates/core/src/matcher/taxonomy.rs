use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

const BUNDLED_TAXONOMY: &str = include_str!("../../data/taxonomy.tsv");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("taxonomy is empty")]
    Empty,
    #[error("taxonomy line {line} is not `child<TAB>parent`")]
    BadLine { line: usize },
    #[error("term {term:?} has more than one parent: {parents:?}")]
    MultipleParents { term: String, parents: Vec<String> },
    #[error("taxonomy has multiple roots: {}", .0.join(", "))]
    MultipleRoots(Vec<String>),
    #[error("taxonomy has no root (cycle through {0:?})")]
    Cycle(String),
}

/// Is-a tree over case-folded lexical terms. The root has depth 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityTaxonomy {
    parent: BTreeMap<String, String>,
    depth: BTreeMap<String, u32>,
    root: String,
}

impl SimilarityTaxonomy {
    pub fn bundled() -> &'static SimilarityTaxonomy {
        static TAX: OnceLock<SimilarityTaxonomy> = OnceLock::new();
        TAX.get_or_init(|| {
            load_similarity_taxonomy(BUNDLED_TAXONOMY).expect("bundled taxonomy is valid")
        })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn contains(&self, term: &str) -> bool {
        self.depth.contains_key(&term.to_lowercase())
    }

    pub fn depth(&self, term: &str) -> Option<u32> {
        self.depth.get(&term.to_lowercase()).copied()
    }

    pub fn parent(&self, term: &str) -> Option<&str> {
        self.parent.get(&term.to_lowercase()).map(String::as_str)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.depth.keys().map(String::as_str)
    }

    fn ancestors<'a>(&'a self, term: &'a str) -> impl Iterator<Item = &'a str> {
        std::iter::successors(Some(term), move |t| self.parent.get(*t).map(String::as_str))
    }

    /// Wu-Palmer similarity as the unreduced fraction
    /// `(2 * depth(lcs), depth(a) + depth(b))`, or `None` when either term is
    /// missing from the taxonomy.
    pub fn wu_palmer_parts(&self, a: &str, b: &str) -> Option<(u32, u32)> {
        let a = a.to_lowercase();
        let b = b.to_lowercase();
        let (da, db) = (*self.depth.get(&a)?, *self.depth.get(&b)?);
        let seen: BTreeSet<&str> = self.ancestors(&a).collect();
        let lcs = self.ancestors(&b).find(|t| seen.contains(t))?;
        Some((2 * self.depth[lcs], da + db))
    }
}

/// Wu-Palmer similarity in `(0, 1]`; `None` marks an absent term and is
/// treated as below every threshold.
pub fn wu_palmer(tax: &SimilarityTaxonomy, a: &str, b: &str) -> Option<f64> {
    tax.wu_palmer_parts(a, b)
        .map(|(num, den)| f64::from(num) / f64::from(den))
}

/// Parses `child<TAB>parent` lines. Blank lines and `#` comments are
/// skipped and repeated edges collapse to one.
pub fn load_similarity_taxonomy(source: &str) -> Result<SimilarityTaxonomy, TaxonomyError> {
    let mut parents: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut terms: BTreeSet<String> = BTreeSet::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (child, parent) = line
            .split_once('\t')
            .map(|(c, p)| (c.trim().to_lowercase(), p.trim().to_lowercase()))
            .filter(|(c, p)| !c.is_empty() && !p.is_empty())
            .ok_or(TaxonomyError::BadLine { line: i + 1 })?;
        terms.insert(child.clone());
        terms.insert(parent.clone());
        parents.entry(child).or_default().insert(parent);
    }
    if terms.is_empty() {
        return Err(TaxonomyError::Empty);
    }
    let mut parent = BTreeMap::new();
    for (child, ps) in parents {
        if ps.len() > 1 {
            return Err(TaxonomyError::MultipleParents {
                term: child,
                parents: ps.into_iter().collect(),
            });
        }
        parent.insert(child, ps.into_iter().next().expect("one parent"));
    }
    let roots: Vec<String> = terms
        .iter()
        .filter(|t| !parent.contains_key(*t))
        .cloned()
        .collect();
    let root = match roots.len() {
        0 => {
            return Err(TaxonomyError::Cycle(
                terms.into_iter().next().expect("nonempty"),
            ))
        }
        1 => roots[0].clone(),
        _ => return Err(TaxonomyError::MultipleRoots(roots)),
    };
    let mut depth = BTreeMap::new();
    for term in &terms {
        let mut chain = vec![term.as_str()];
        let mut cur = term.as_str();
        while let Some(p) = parent.get(cur) {
            if chain.len() > terms.len() {
                return Err(TaxonomyError::Cycle(term.clone()));
            }
            chain.push(p);
            cur = p;
        }
        if cur != root {
            return Err(TaxonomyError::Cycle(term.clone()));
        }
        depth.insert(term.clone(), chain.len() as u32);
    }
    Ok(SimilarityTaxonomy {
        parent,
        depth,
        root,
    })
}
