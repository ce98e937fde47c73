//! One loaded domain: ontology, attachment index and page URLs, plus the
//! request/response types shared by the CLI and the HTTP API.

use std::collections::HashMap;
use std::time::Instant;

use ontoindex_core::corpus::{score_corpus, CorpusError};
use ontoindex_core::indexer::{build_index, IndexError};
use ontoindex_core::retrieval::{QueryError, RetrievalError};
use ontoindex_core::{relevance_bounds, search, AttachmentIndex, BuildReport, Document, Extraction, Ontology, Query, RelevanceRange, Source};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Failure of a search or bounds request, classified for the HTTP layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RequestError {
    #[error("{0}")]
    Invalid(String),
    #[error("term not found: {0}")]
    UnknownTerm(String),
    #[error("index holds no pages")]
    NoBounds,
}

impl From<QueryError> for RequestError {
    fn from(e: QueryError) -> Self {
        RequestError::Invalid(e.to_string())
    }
}

impl From<RetrievalError> for RequestError {
    fn from(e: RetrievalError) -> Self {
        match e {
            RetrievalError::InvalidQuery(q) => q.into(),
            RetrievalError::TermNotFound(t) => RequestError::UnknownTerm(t),
            RetrievalError::NoBounds => RequestError::NoBounds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeBody {
    pub from: f64,
    pub to: f64,
}

/// Body of `POST /api/search`. Every field except `sub_dominating` is
/// mandatory; missing fields are reported as validation errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchRequest {
    #[serde(default)]
    pub dominating: Option<String>,
    #[serde(default)]
    pub sub_dominating: Vec<String>,
    #[serde(default)]
    pub range: Option<RangeBody>,
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub page_id: String,
    pub url: String,
    pub relevance: f64,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub requested: usize,
    pub fulfilled: usize,
    pub quotas: [usize; 5],
    pub results: Vec<SearchRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EngineStats {
    pub domain: String,
    pub corpus_size: usize,
    pub term_count: usize,
    pub indexed_pages: usize,
    pub skipped_pages: Vec<String>,
    pub below_relevance_limit: usize,
    pub build_millis: u128,
}

pub struct Engine {
    ontology: Option<Ontology>,
    index: AttachmentIndex,
    extractions: Vec<Extraction>,
    urls: HashMap<String, String>,
    stats: EngineStats,
}

impl Engine {
    /// Scores and indexes a corpus. Pages below `relevance_limit` are dropped
    /// before indexing.
    pub fn build(ontology: Ontology, docs: &[Document], relevance_limit: f64) -> Result<Self, EngineError> {
        let started = Instant::now();
        let scored = score_corpus(docs, &ontology, relevance_limit)?;
        let out = build_index(&scored.profiles, &ontology)?;
        let stats = stats_for(&ontology, docs.len(), &out.report, scored.below_limit.len(), started);
        Ok(Engine {
            urls: docs.iter().map(|d| (d.page_id.clone(), d.url.clone())).collect(),
            index: out.index,
            extractions: out.extractions,
            ontology: Some(ontology),
            stats,
        })
    }

    /// Wraps a previously saved index. URLs default to the page id unless
    /// given.
    pub fn from_index(index: AttachmentIndex, urls: HashMap<String, String>) -> Self {
        let stats = EngineStats {
            domain: index.domain().to_string(),
            corpus_size: index.page_count(),
            term_count: index.term_count(),
            indexed_pages: index.page_count(),
            ..EngineStats::default()
        };
        Engine {
            ontology: None,
            index,
            extractions: Vec::new(),
            urls,
            stats,
        }
    }

    pub fn index(&self) -> &AttachmentIndex {
        &self.index
    }

    pub fn ontology(&self) -> Option<&Ontology> {
        self.ontology.as_ref()
    }

    pub fn extractions(&self) -> &[Extraction] {
        &self.extractions
    }

    pub fn stats(&self) -> &EngineStats {
        &self.stats
    }

    pub fn term_names(&self) -> Vec<String> {
        self.index.term_names().map(str::to_string).collect()
    }

    pub fn bounds(&self) -> Result<Bounds, RequestError> {
        let (min, max) = relevance_bounds(&self.index)?;
        Ok(Bounds { min, max })
    }

    pub fn url(&self, page_id: &str) -> String {
        self.urls.get(page_id).cloned().unwrap_or_else(|| page_id.to_string())
    }

    pub fn query(&self, req: &SearchRequest) -> Result<Query, RequestError> {
        let dominating = req.dominating.as_deref().unwrap_or("");
        if dominating.trim().is_empty() {
            return Err(QueryError::MissingDominating.into());
        }
        let range = req
            .range
            .ok_or_else(|| RequestError::Invalid("relevance range is mandatory".into()))?;
        let count = req
            .count
            .ok_or_else(|| RequestError::Invalid("number of search results is mandatory".into()))?;
        Ok(Query::new(dominating, &req.sub_dominating, RelevanceRange { lo: range.from, hi: range.to }, count)?)
    }

    pub fn search(&self, req: &SearchRequest) -> Result<SearchResponse, RequestError> {
        let query = self.query(req)?;
        let list = search(&self.index, &query)?;
        Ok(SearchResponse {
            requested: list.requested,
            fulfilled: list.fulfilled,
            quotas: list.quotas,
            results: list
                .entries
                .into_iter()
                .map(|e| SearchRecord {
                    url: self.url(&e.page_id),
                    page_id: e.page_id,
                    relevance: e.relevance,
                    source: e.source,
                })
                .collect(),
        })
    }
}

fn stats_for(ontology: &Ontology, corpus_size: usize, report: &BuildReport, below: usize, started: Instant) -> EngineStats {
    EngineStats {
        domain: ontology.domain().to_string(),
        corpus_size,
        term_count: ontology.term_count(),
        indexed_pages: report.pages_indexed,
        skipped_pages: report.skipped_empty.clone(),
        below_relevance_limit: below,
        build_millis: started.elapsed().as_millis(),
    }
}
