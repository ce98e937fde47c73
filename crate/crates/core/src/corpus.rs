//! Document ingest, tokenization and term relevance scoring.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{Ontology, OntologyTerm};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("duplicate page id {0:?}")]
    DuplicatePage(String),
    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{0}: no usable file stem for a page id")]
    BadFileName(String),
    #[error("reading corpus: {0}")]
    Io(#[from] std::io::Error),
}

/// A page of the repository.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(rename = "id")]
    pub page_id: String,
    pub url: String,
    pub content: String,
}

impl Document {
    pub fn new(page_id: impl Into<String>, url: impl Into<String>, content: impl Into<String>) -> Self {
        Document {
            page_id: page_id.into(),
            url: url.into(),
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct TermStat<S> {
    pub count: u64,
    pub trv: S,
}

/// Per-page term relevance values and the page relevance (their sum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct PageProfile<S> {
    pub page_id: String,
    pub term_stats: BTreeMap<String, TermStat<S>>,
    pub relevance: S,
}

impl<S: Scalar> PageProfile<S> {
    /// Builds a profile from term statistics; zero-count entries are dropped
    /// and the relevance is summed in term name order.
    pub fn new(page_id: impl Into<String>, term_stats: BTreeMap<String, TermStat<S>>) -> Self {
        let term_stats: BTreeMap<_, _> = term_stats.into_iter().filter(|(_, s)| s.count > 0).collect();
        let relevance = term_stats.values().fold(S::zero(), |acc, s| acc + s.trv);
        PageProfile {
            page_id: page_id.into(),
            term_stats,
            relevance,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.term_stats.is_empty()
    }
}

/// Case-folded tokens, split on every non-alphanumeric character.
pub fn tokenize(content: &str) -> Vec<String> {
    content
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Replaces every `<...>` span with a single space.
pub fn strip_tags(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut in_tag = false;
    for c in html.chars() {
        match (in_tag, c) {
            (false, '<') => {
                in_tag = true;
                out.push(' ');
            }
            (true, '>') => in_tag = false,
            (false, c) => out.push(c),
            (true, _) => {}
        }
    }
    out
}

/// Occurrences of a term's name and synonyms in a token stream. Matching is
/// greedy left to right with the longest pattern tried first, so matches never
/// overlap.
pub fn count_occurrences<S: Scalar>(tokens: &[String], term: &OntologyTerm<S>) -> u64 {
    let mut count = 0;
    let mut i = 0;
    while i < tokens.len() {
        match term
            .patterns()
            .iter()
            .find(|p| tokens[i..].starts_with(p))
        {
            Some(p) => {
                count += 1;
                i += p.len();
            }
            None => i += 1,
        }
    }
    count
}

/// Scores documents against one ontology. Builds a first-token table once so
/// each document is scanned in a single pass.
pub struct Scorer<'a, S> {
    ontology: &'a Ontology<S>,
    // first token -> terms having a pattern that starts with it
    starts: HashMap<&'a str, Vec<usize>>,
}

impl<'a, S: Scalar> Scorer<'a, S> {
    pub fn new(ontology: &'a Ontology<S>) -> Self {
        let mut starts: HashMap<&'a str, Vec<usize>> = HashMap::new();
        for (idx, term) in ontology.terms().iter().enumerate() {
            for pattern in term.patterns() {
                let entry = starts.entry(pattern[0].as_str()).or_default();
                if entry.last() != Some(&idx) {
                    entry.push(idx);
                }
            }
        }
        Scorer { ontology, starts }
    }

    pub fn count_all(&self, tokens: &[String]) -> Vec<u64> {
        let terms = self.ontology.terms();
        let mut counts = vec![0u64; terms.len()];
        let mut next_free = vec![0usize; terms.len()];
        for (i, token) in tokens.iter().enumerate() {
            let Some(candidates) = self.starts.get(token.as_str()) else {
                continue;
            };
            for &t in candidates {
                if next_free[t] > i {
                    continue;
                }
                if let Some(p) = terms[t].patterns().iter().find(|p| tokens[i..].starts_with(p)) {
                    counts[t] += 1;
                    next_free[t] = i + p.len();
                }
            }
        }
        counts
    }

    pub fn score(&self, doc: &Document) -> PageProfile<S> {
        let counts = self.count_all(&tokenize(&doc.content));
        let stats = self
            .ontology
            .terms()
            .iter()
            .zip(counts)
            .filter(|(_, c)| *c > 0)
            .map(|(term, count)| {
                let trv = term.weight() * S::from_count(count);
                (term.name().to_string(), TermStat { count, trv })
            })
            .collect();
        PageProfile::new(doc.page_id.clone(), stats)
    }
}

/// `trv = weight × occurrences` for every term present; page relevance is the
/// sum of term relevance values.
pub fn score_page<S: Scalar>(doc: &Document, ontology: &Ontology<S>) -> PageProfile<S> {
    Scorer::new(ontology).score(doc)
}

pub fn is_domain_page<S: Scalar>(profile: &PageProfile<S>, relevance_limit: S) -> bool {
    profile.relevance >= relevance_limit
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct ScoredCorpus<S> {
    /// Profiles of pages at or above the relevance limit, in input order.
    pub profiles: Vec<PageProfile<S>>,
    /// Pages rejected by the relevance limit.
    pub below_limit: Vec<String>,
}

/// Scores every document and keeps the domain pages.
pub fn score_corpus<S: Scalar>(
    docs: &[Document],
    ontology: &Ontology<S>,
    relevance_limit: S,
) -> Result<ScoredCorpus<S>, CorpusError> {
    check_unique(docs)?;
    let scorer = Scorer::new(ontology);
    let mut out = ScoredCorpus {
        profiles: Vec::with_capacity(docs.len()),
        below_limit: Vec::new(),
    };
    for doc in docs {
        let profile = scorer.score(doc);
        if is_domain_page(&profile, relevance_limit) {
            out.profiles.push(profile);
        } else {
            out.below_limit.push(profile.page_id);
        }
    }
    Ok(out)
}

fn check_unique(docs: &[Document]) -> Result<(), CorpusError> {
    let mut seen = HashSet::with_capacity(docs.len());
    for doc in docs {
        if !seen.insert(doc.page_id.as_str()) {
            return Err(CorpusError::DuplicatePage(doc.page_id.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Delete markup tags before tokenizing.
    pub strip_html: bool,
}

/// Loads a corpus from a directory of text files (page id = file stem) or a
/// line-delimited JSON file of `{"id", "url", "content"}` records.
pub fn load_corpus(path: impl AsRef<Path>, options: IngestOptions) -> Result<Vec<Document>, CorpusError> {
    let path = path.as_ref();
    let mut docs = if path.is_dir() {
        load_dir(path)?
    } else {
        load_jsonl(path)?
    };
    if options.strip_html {
        for doc in &mut docs {
            doc.content = strip_tags(&doc.content);
        }
    }
    check_unique(&docs)?;
    Ok(docs)
}

fn load_dir(dir: &Path) -> Result<Vec<Document>, CorpusError> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_file() {
            paths.push(entry.path());
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let stem = p
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| CorpusError::BadFileName(p.display().to_string()))?
                .to_string();
            let content = fs::read_to_string(&p)?;
            Ok(Document::new(stem, p.display().to_string(), content))
        })
        .collect()
}

fn load_jsonl(path: &Path) -> Result<Vec<Document>, CorpusError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut docs = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
            path: path.display().to_string(),
            line: n + 1,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    Ok(docs)
}
