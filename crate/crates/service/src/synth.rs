//! Synthetic corpora with planted dominating / sub-dominating terms.
//!
//! Terms are split into topic groups of five. Every page draws one group,
//! shuffles it, and plants the group's terms with occurrence counts chosen so
//! that the shuffled order is the page's term relevance order. The manifest
//! records that intended order. In clean mode the whole group is planted,
//! every planted trv exceeds the next one by at least one weight unit and no
//! other ontology term occurs, so extraction reproduces the manifest exactly.
//! Noisy mode sometimes plants only part of the group, narrows the gaps and
//! sprinkles terms from other groups.

use std::fs;
use std::io::Write;
use std::path::Path;

use ontoindex_core::ontology::{OntologyDocument, TermRecord};
use ontoindex_core::Document;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const GROUP_SIZE: usize = 5;

pub const ONTOLOGY_FILE: &str = "ontology.json";
pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const MANIFEST_FILE: &str = "manifest.jsonl";

const FILLER: [&str; 32] = [
    "the", "a", "of", "and", "to", "in", "is", "for", "on", "with", "as", "by", "this", "that", "new", "from",
    "page", "more", "about", "our", "best", "all", "your", "can", "will", "news", "home", "view", "here", "now",
    "see", "also",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TermSpec {
    /// Generate this many terms, each with one synonym.
    Count(usize),
    /// Use these names, without synonyms.
    Names(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub pages: usize,
    pub terms: TermSpec,
    pub seed: u64,
    pub noisy: bool,
}

impl GenSpec {
    pub fn clean(pages: usize, terms: usize, seed: u64) -> Self {
        GenSpec {
            pages,
            terms: TermSpec::Count(terms),
            seed,
            noisy: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub page_id: String,
    pub dominating: String,
    pub sub_dominating: Vec<String>,
}

impl ManifestEntry {
    /// Whether the page was planted with `term` as dominating or sub-dominating.
    pub fn mentions(&self, term: &str) -> bool {
        self.dominating == term || self.sub_dominating.iter().any(|s| s == term)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpus {
    pub ontology: OntologyDocument<f64>,
    pub documents: Vec<Document>,
    pub manifest: Vec<ManifestEntry>,
}

struct PlantedTerm {
    name: String,
    synonym: Option<String>,
    weight: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("a corpus needs at least one page")]
    NoPages,
    #[error("a corpus needs at least one ontology term")]
    NoTerms,
}

pub fn generate(spec: &GenSpec) -> Result<GeneratedCorpus, GenError> {
    if spec.pages == 0 {
        return Err(GenError::NoPages);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let terms: Vec<PlantedTerm> = match &spec.terms {
        TermSpec::Count(k) => (0..*k)
            .map(|i| PlantedTerm {
                name: format!("term{i:03}"),
                synonym: Some(format!("alias{i:03}")),
                weight: f64::from(rng.gen_range(10..=100u32)) / 100.0,
            })
            .collect(),
        TermSpec::Names(names) => names
            .iter()
            .map(|n| PlantedTerm {
                name: n.trim().to_lowercase(),
                synonym: None,
                weight: f64::from(rng.gen_range(10..=100u32)) / 100.0,
            })
            .collect(),
    };
    if terms.is_empty() {
        return Err(GenError::NoTerms);
    }
    let groups: Vec<Vec<usize>> = (0..terms.len())
        .collect::<Vec<_>>()
        .chunks(GROUP_SIZE)
        .map(<[usize]>::to_vec)
        .collect();
    let filler: Vec<&str> = FILLER
        .iter()
        .copied()
        .filter(|w| !terms.iter().any(|t| t.name.split_whitespace().any(|p| p == *w)))
        .collect();

    let width = spec.pages.max(1).to_string().len();
    let mut documents = Vec::with_capacity(spec.pages);
    let mut manifest = Vec::with_capacity(spec.pages);
    for page in 0..spec.pages {
        let page_id = format!("page{page:0width$}");
        let mut order = groups[rng.gen_range(0..groups.len())].clone();
        order.shuffle(&mut rng);
        let planted = if !spec.noisy || order.len() == 1 || rng.gen_bool(0.75) {
            order.len()
        } else {
            rng.gen_range(1..=order.len())
        };
        order.truncate(planted);

        // target trvs, strictly decreasing along the planted order
        let mut targets = vec![0.0f64; planted];
        let gap = |rng: &mut ChaCha8Rng| {
            if spec.noisy {
                f64::from(rng.gen_range(0..=2u32))
            } else {
                f64::from(rng.gen_range(1..=4u32))
            }
        };
        for r in (0..planted).rev() {
            targets[r] = if r + 1 == planted {
                f64::from(rng.gen_range(1..=4u32))
            } else {
                targets[r + 1] + gap(&mut rng)
            };
        }

        let mut units: Vec<&str> = Vec::new();
        for (&t, target) in order.iter().zip(&targets) {
            let term = &terms[t];
            let count = (target / term.weight).ceil().max(1.0) as usize;
            for _ in 0..count {
                match &term.synonym {
                    Some(s) if rng.gen_bool(0.3) => units.push(s),
                    _ => units.push(&term.name),
                }
            }
        }
        if spec.noisy && terms.len() > order.len() {
            for _ in 0..rng.gen_range(1..=3) {
                let t = rng.gen_range(0..terms.len());
                if order.contains(&t) {
                    continue;
                }
                let target = f64::from(rng.gen_range(1..=(targets[0] as u32 + 2)));
                let count = (target / terms[t].weight).ceil() as usize;
                units.extend(std::iter::repeat_n(terms[t].name.as_str(), count));
            }
        }
        for _ in 0..rng.gen_range(20..=80) {
            units.push(filler[rng.gen_range(0..filler.len())]);
        }
        units.shuffle(&mut rng);

        documents.push(Document::new(
            page_id.clone(),
            format!("https://synthetic.example/{page_id}"),
            units.join(" "),
        ));
        manifest.push(ManifestEntry {
            page_id,
            dominating: terms[order[0]].name.clone(),
            sub_dominating: order[1..].iter().map(|&t| terms[t].name.clone()).collect(),
        });
    }

    Ok(GeneratedCorpus {
        ontology: OntologyDocument {
            domain: "synthetic".into(),
            terms: terms
                .iter()
                .map(|t| TermRecord {
                    name: t.name.clone(),
                    weight: t.weight,
                    synonyms: t.synonym.iter().cloned().collect(),
                })
                .collect(),
        },
        documents,
        manifest,
    })
}

/// Topic groups of the generated ontology, in generation order.
pub fn term_groups(ontology: &OntologyDocument<f64>) -> Vec<Vec<String>> {
    ontology
        .terms
        .chunks(GROUP_SIZE)
        .map(|c| c.iter().map(|t| t.name.clone()).collect())
        .collect()
}

fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

impl GeneratedCorpus {
    /// Writes `ontology.json`, `corpus.jsonl` and `manifest.jsonl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(ONTOLOGY_FILE), serde_json::to_string_pretty(&self.ontology)? + "\n")?;
        write_jsonl(&dir.join(CORPUS_FILE), &self.documents)?;
        write_jsonl(&dir.join(MANIFEST_FILE), &self.manifest)
    }
}

pub fn read_manifest(path: &Path) -> anyhow::Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}
