//! Batch processing of documents into on-disk artifacts, and loading them
//! back for serving.
//!
//! An output directory holds `manifest.json`, a copy of the ontology as
//! `ontology.csv`, and four files per document named after the input file
//! stem: `.document.json`, `.concepts.json`, `.tree.json`, `.layout.json`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde::{Deserialize, Serialize};

use crate::candidates::train_ngram_model;
use crate::config::Config;
use crate::hierarchy::{build_concept_tree, compare_trees, ComparisonSummary, ConceptTree};
use crate::layout::{
    assign_colors, build_word_clouds, compute_layout, BubbleLayout, ColorAssignment,
};
use crate::matcher::{detect_concepts, ConceptDictionary, EntityLookup, SimilarityTaxonomy};
use crate::ontology::OntologyStore;
use crate::text::{analyze_document, load_document, Document};
use crate::{Error, Result};

pub const MANIFEST: &str = "manifest.json";
pub const ONTOLOGY_COPY: &str = "ontology.csv";

/// Everything derived from one input document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentArtifacts {
    /// File name stem shared by the artifact files.
    pub stem: String,
    pub document: Document,
    pub concepts: ConceptDictionary,
    pub tree: ConceptTree,
    pub layout: BubbleLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub title: String,
    pub stem: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub ontology_root: String,
    pub documents: Vec<ManifestEntry>,
    pub colors: ColorAssignment,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<ComparisonSummary>,
}

/// One input before processing.
#[derive(Debug, Clone)]
pub struct InputDocument {
    pub stem: String,
    pub title: String,
    pub bytes: Vec<u8>,
}

impl InputDocument {
    /// Reads a file; the stem and title come from its name.
    pub fn read(path: &Path) -> Result<InputDocument> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::Config(format!("{} has no file name", path.display())))?;
        Ok(InputDocument {
            title: stem.clone(),
            stem,
            bytes,
        })
    }
}

#[derive(Debug)]
pub struct Workspace {
    pub store: OntologyStore,
    /// Ontology source, kept so a saved workspace can be reloaded alone.
    pub ontology_csv: Vec<u8>,
    /// In input order.
    pub documents: Vec<DocumentArtifacts>,
    pub colors: ColorAssignment,
    pub comparison: Option<ComparisonSummary>,
}

/// Shared, read-only resources for processing documents.
pub struct Pipeline<'a> {
    pub store: &'a OntologyStore,
    pub taxonomy: &'a SimilarityTaxonomy,
    pub lookup: &'a EntityLookup,
    pub config: &'a Config,
}

impl Pipeline<'_> {
    /// Text analysis, candidate extraction and concept detection for one
    /// document.
    pub fn detect(&self, input: &InputDocument) -> Result<(Document, ConceptDictionary)> {
        let doc = analyze_document(load_document(&input.bytes, &input.title)?);
        let model = train_ngram_model(&doc.sentences, &self.config.ngram);
        let dict = detect_concepts(
            &doc,
            self.store,
            &model,
            self.lookup,
            self.taxonomy,
            &self.config.matcher,
        )?;
        info!(
            "{}: {} sentences, {} matches of {} concepts",
            input.stem,
            doc.sentences.len(),
            dict.total_matches(),
            dict.concept_count()
        );
        Ok((doc, dict))
    }

    pub fn run(&self, inputs: &[InputDocument], ontology_csv: Vec<u8>) -> Result<Workspace> {
        if inputs.is_empty() {
            return Err(Error::Config("no input documents".into()));
        }
        let mut stems = BTreeMap::new();
        for input in inputs {
            if let Some(prev) = stems.insert(input.stem.as_str(), &input.title) {
                return Err(Error::Config(format!(
                    "two inputs share the file stem {:?} ({prev})",
                    input.stem
                )));
            }
        }

        let mut detected = Vec::with_capacity(inputs.len());
        for input in inputs {
            let (doc, dict) = self.detect(input)?;
            if detected
                .iter()
                .any(|(d, _, _): &(Document, _, _)| d.id == doc.id)
            {
                return Err(Error::Config(format!(
                    "{} duplicates another input",
                    input.stem
                )));
            }
            let tree = build_concept_tree(&doc.id, &dict, self.store)?;
            detected.push((doc, dict, tree));
        }

        let trees: Vec<ConceptTree> = detected.iter().map(|d| d.2.clone()).collect();
        let colors = assign_colors(&trees, self.store, &self.config.layout)?;
        let (store, layout_config) = (self.store, &self.config.layout);
        let layouts = std::thread::scope(|s| {
            let handles: Vec<_> = detected
                .iter()
                .map(|(doc, dict, tree)| {
                    let colors = &colors;
                    s.spawn(move || -> Result<BubbleLayout> {
                        let mut layout = compute_layout(tree, colors, layout_config)?;
                        layout.clouds = build_word_clouds(&layout, doc, dict, store, layout_config);
                        Ok(layout)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("layout thread panicked"))
                .collect::<Result<Vec<_>>>()
        })?;

        let comparison = if trees.len() >= 2 {
            Some(compare_trees(&trees)?)
        } else {
            None
        };
        let documents = inputs
            .iter()
            .zip(detected)
            .zip(layouts)
            .map(
                |((input, (document, concepts, tree)), layout)| DocumentArtifacts {
                    stem: input.stem.clone(),
                    document,
                    concepts,
                    tree,
                    layout,
                },
            )
            .collect();
        Ok(Workspace {
            store: self.store.clone(),
            ontology_csv,
            documents,
            colors,
            comparison,
        })
    }
}

fn artifact(dir: &Path, stem: &str, kind: &str) -> PathBuf {
    dir.join(format!("{stem}.{kind}.json"))
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn pretty<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    Ok((serde_json::to_string_pretty(value)? + "\n").into_bytes())
}

impl Workspace {
    pub fn document(&self, id: &str) -> Option<&DocumentArtifacts> {
        self.documents.iter().find(|d| d.document.id == id)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            ontology_root: self.store.root_id().to_owned(),
            documents: self
                .documents
                .iter()
                .map(|d| ManifestEntry {
                    id: d.document.id.clone(),
                    title: d.document.title.clone(),
                    stem: d.stem.clone(),
                })
                .collect(),
            colors: self.colors.clone(),
            comparison: self.comparison.clone(),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write(&dir.join(ONTOLOGY_COPY), &self.ontology_csv)?;
        for d in &self.documents {
            write(&artifact(dir, &d.stem, "document"), &pretty(&d.document)?)?;
            write(&artifact(dir, &d.stem, "concepts"), &pretty(&d.concepts)?)?;
            write(
                &artifact(dir, &d.stem, "tree"),
                d.tree.to_json()?.as_bytes(),
            )?;
            write(
                &artifact(dir, &d.stem, "layout"),
                d.layout.to_json()?.as_bytes(),
            )?;
        }
        write(&dir.join(MANIFEST), &pretty(&self.manifest())?)
    }

    pub fn load(dir: &Path) -> Result<Workspace> {
        let manifest: Manifest = serde_json::from_slice(&read(&dir.join(MANIFEST))?)?;
        let ontology_csv = read(&dir.join(ONTOLOGY_COPY))?;
        let store = OntologyStore::from_csv(ontology_csv.as_slice())?;
        if store.root_id() != manifest.ontology_root {
            return Err(Error::RootMismatch {
                expected: manifest.ontology_root,
                found: store.root_id().to_owned(),
            });
        }
        let mut documents = Vec::with_capacity(manifest.documents.len());
        for entry in &manifest.documents {
            let document: Document =
                serde_json::from_slice(&read(&artifact(dir, &entry.stem, "document"))?)?;
            let concepts: ConceptDictionary =
                serde_json::from_slice(&read(&artifact(dir, &entry.stem, "concepts"))?)?;
            let tree = ConceptTree::from_json(&read(&artifact(dir, &entry.stem, "tree"))?)?;
            let layout = BubbleLayout::from_json(&read(&artifact(dir, &entry.stem, "layout"))?)?;
            for (what, id) in [
                ("document", &document.id),
                ("tree", &tree.document_id),
                ("layout", &layout.document_id),
            ] {
                if *id != entry.id {
                    return Err(Error::Integrity(format!(
                        "{} {what} belongs to {id}, manifest says {}",
                        entry.stem, entry.id
                    )));
                }
            }
            if tree.root_id() != store.root_id() {
                return Err(Error::RootMismatch {
                    expected: store.root_id().to_owned(),
                    found: tree.root_id().to_owned(),
                });
            }
            documents.push(DocumentArtifacts {
                stem: entry.stem.clone(),
                document,
                concepts,
                tree,
                layout,
            });
        }
        if manifest.comparison.is_some() != (documents.len() >= 2) {
            return Err(Error::Integrity(
                "manifest comparison does not match the document count".into(),
            ));
        }
        Ok(Workspace {
            store,
            ontology_csv,
            documents,
            colors: manifest.colors,
            comparison: manifest.comparison,
        })
    }
}
