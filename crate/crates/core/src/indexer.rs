//! Dominating / sub-dominating term extraction and the primary/secondary
//! attachment index.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::PageProfile;
use crate::ontology::{counted_search, Lookup, Ontology};
use crate::scalar::Scalar;

/// Maximum number of sub-dominating terms recorded per page.
pub const SUB_DOMINATING_LIMIT: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("page {0:?} has no ontology term occurrences")]
    NoDominatingTerm(String),
    #[error("page {page:?} references term {term:?} which is not in the ontology")]
    UnknownTerm { page: String, term: String },
    #[error("duplicate page id {0:?}")]
    DuplicatePage(String),
}

/// A page's dominating term and its sub-dominating terms in priority order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct Extraction<S> {
    pub page_id: String,
    pub dominating: String,
    pub sub_dominating: Vec<String>,
    pub relevance: S,
}

/// Ranks the page's terms by trv descending, then weight ascending (equal trv
/// with a lower weight means more occurrences), then name ascending. Rank one
/// dominates; the next four are sub-dominating.
pub fn extract<S: Scalar>(profile: &PageProfile<S>, ontology: &Ontology<S>) -> Result<Extraction<S>, IndexError> {
    let mut ranked = Vec::with_capacity(profile.term_stats.len());
    for (name, stat) in &profile.term_stats {
        if stat.count == 0 {
            continue;
        }
        let term = ontology.get(name).ok_or_else(|| IndexError::UnknownTerm {
            page: profile.page_id.clone(),
            term: name.clone(),
        })?;
        ranked.push((stat.trv, term.weight(), term.name()));
    }
    ranked.sort_by(|a, b| term_priority(a, b));

    let mut names = ranked.into_iter().map(|(_, _, name)| name.to_string());
    let dominating = names
        .next()
        .ok_or_else(|| IndexError::NoDominatingTerm(profile.page_id.clone()))?;
    Ok(Extraction {
        page_id: profile.page_id.clone(),
        dominating,
        sub_dominating: names.take(SUB_DOMINATING_LIMIT).collect(),
        relevance: profile.relevance,
    })
}

fn term_priority<S: Scalar>(a: &(S, S, &str), b: &(S, S, &str)) -> Ordering {
    b.0.total_order(&a.0)
        .then_with(|| a.1.total_order(&b.1))
        .then_with(|| a.2.cmp(b.2))
}

/// One entry of an attachment list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
#[serde(from = "(String, S)", into = "(String, S)")]
pub struct Posting<S: Clone> {
    pub page_id: String,
    pub relevance: S,
}

impl<S: Clone> From<(String, S)> for Posting<S> {
    fn from((page_id, relevance): (String, S)) -> Self {
        Posting { page_id, relevance }
    }
}

impl<S: Clone> From<Posting<S>> for (String, S) {
    fn from(p: Posting<S>) -> Self {
        (p.page_id, p.relevance)
    }
}

/// Posting order: relevance descending, page id ascending.
pub(crate) fn posting_order<S: Scalar>(a: &Posting<S>, b: &Posting<S>) -> Ordering {
    b.relevance
        .total_order(&a.relevance)
        .then_with(|| a.page_id.cmp(&b.page_id))
}

/// The two attachment tables kept for every ontology term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"), deny_unknown_fields)]
pub struct TermAttachments<S: Clone> {
    /// Pages for which the term is dominating.
    pub primary: Vec<Posting<S>>,
    /// Pages for which the term is sub-dominating.
    pub secondary: Vec<Posting<S>>,
}

impl<S: Clone> Default for TermAttachments<S> {
    fn default() -> Self {
        TermAttachments {
            primary: Vec::new(),
            secondary: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttachmentIndex<S: Clone> {
    pub(crate) domain: String,
    /// Sorted by term name.
    pub(crate) terms: Vec<(String, TermAttachments<S>)>,
    pub(crate) bounds: Option<(S, S)>,
}

impl<S: Scalar> AttachmentIndex<S> {
    /// Builds an index over the given term names from precomputed extractions.
    pub fn from_extractions<'a>(
        domain: &str,
        term_names: impl IntoIterator<Item = &'a str>,
        extractions: &[Extraction<S>],
    ) -> Result<Self, IndexError> {
        let mut terms: Vec<(String, TermAttachments<S>)> = term_names
            .into_iter()
            .map(|n| (n.to_string(), TermAttachments::default()))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        terms.dedup_by(|a, b| a.0 == b.0);

        let mut seen = HashSet::with_capacity(extractions.len());
        let mut bounds: Option<(S, S)> = None;
        for ex in extractions {
            if !seen.insert(ex.page_id.as_str()) {
                return Err(IndexError::DuplicatePage(ex.page_id.clone()));
            }
            let posting = Posting {
                page_id: ex.page_id.clone(),
                relevance: ex.relevance,
            };
            let slot = |name: &str| {
                counted_search(&terms, name, |t| t.0.as_str())
                    .position
                    .ok_or_else(|| IndexError::UnknownTerm {
                        page: ex.page_id.clone(),
                        term: name.to_string(),
                    })
            };
            let d = slot(&ex.dominating)?;
            let subs = ex
                .sub_dominating
                .iter()
                .map(|s| slot(s))
                .collect::<Result<Vec<_>, _>>()?;
            terms[d].1.primary.push(posting.clone());
            for s in subs {
                terms[s].1.secondary.push(posting.clone());
            }
            bounds = Some(match bounds {
                None => (ex.relevance, ex.relevance),
                Some((lo, hi)) => (lo.min(ex.relevance), hi.max(ex.relevance)),
            });
        }

        for (_, att) in &mut terms {
            att.primary.sort_by(posting_order);
            att.secondary.sort_by(posting_order);
        }
        Ok(AttachmentIndex {
            domain: domain.to_string(),
            terms,
            bounds,
        })
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn term_names(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(n, _)| n.as_str())
    }

    pub fn terms(&self) -> &[(String, TermAttachments<S>)] {
        &self.terms
    }

    /// Binary search of the term table by canonical name.
    pub fn lookup(&self, name: &str) -> Lookup {
        counted_search(&self.terms, &crate::ontology::canonical_name(name), |t| t.0.as_str())
    }

    pub fn attachments(&self, name: &str) -> Option<&TermAttachments<S>> {
        self.lookup(name).position.map(|p| &self.terms[p].1)
    }

    /// Number of indexed pages (one primary posting each).
    pub fn page_count(&self) -> usize {
        self.terms.iter().map(|(_, a)| a.primary.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    /// Minimum and maximum page relevance over all indexed pages.
    pub fn bounds(&self) -> Option<(S, S)> {
        self.bounds
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    /// Profiles visited; each profile is processed exactly once.
    pub pages_visited: usize,
    pub pages_indexed: usize,
    /// Pages without any ontology term occurrence.
    pub skipped_empty: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BuildOutput<S: Clone> {
    pub index: AttachmentIndex<S>,
    pub extractions: Vec<Extraction<S>>,
    pub report: BuildReport,
}

/// Extracts every profile and attaches the page to its dominating term's
/// primary list and to each sub-dominating term's secondary list.
pub fn build_index<S: Scalar>(profiles: &[PageProfile<S>], ontology: &Ontology<S>) -> Result<BuildOutput<S>, IndexError> {
    let mut report = BuildReport::default();
    let mut extractions = Vec::with_capacity(profiles.len());
    let mut seen = HashSet::with_capacity(profiles.len());
    for profile in profiles {
        report.pages_visited += 1;
        if !seen.insert(profile.page_id.as_str()) {
            return Err(IndexError::DuplicatePage(profile.page_id.clone()));
        }
        match extract(profile, ontology) {
            Ok(ex) => extractions.push(ex),
            Err(IndexError::NoDominatingTerm(id)) => report.skipped_empty.push(id),
            Err(e) => return Err(e),
        }
    }
    report.pages_indexed = extractions.len();
    let index = AttachmentIndex::from_extractions(
        ontology.domain(),
        ontology.terms().iter().map(|t| t.name()),
        &extractions,
    )?;
    Ok(BuildOutput {
        index,
        extractions,
        report,
    })
}
