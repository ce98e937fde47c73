//! Query answering by quota mixing over the attachment lists, plus the
//! unindexed linear-scan baseline.
//!
//! A query names one dominating term and up to four sub-dominating terms in
//! priority order. The `x` requested results are drawn 50% from the dominating
//! term's primary list and 20/15/10/5% from the sub-dominating terms'
//! secondary lists, each list restricted to the requested relevance range.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indexer::{AttachmentIndex, Extraction, Posting, SUB_DOMINATING_LIMIT};
use crate::ontology::{canonical_name, Ontology};
use crate::scalar::Scalar;

/// Bucket shares in percent: primary, then sub-dominating 1..4.
pub const QUOTA_PERCENT: [usize; 5] = [50, 20, 15, 10, 5];

pub const BUCKETS: usize = SUB_DOMINATING_LIMIT + 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("dominating term is mandatory")]
    MissingDominating,
    #[error("at most {SUB_DOMINATING_LIMIT} sub-dominating terms may be selected, got {0}")]
    TooManySubTerms(usize),
    #[error("sub-dominating term #{0} is empty")]
    EmptySubTerm(usize),
    #[error("term {0:?} is selected more than once")]
    RepeatedTerm(String),
    #[error("relevance range is invalid: from {lo} to {hi}")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("number of search results must be at least 1")]
    ZeroCount,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RetrievalError {
    #[error(transparent)]
    InvalidQuery(#[from] QueryError),
    #[error("term not found: {0:?}")]
    TermNotFound(String),
    #[error("index holds no pages, relevance bounds are undefined")]
    NoBounds,
}

/// Closed interval of page relevance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct RelevanceRange<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> RelevanceRange<S> {
    pub fn contains(&self, relevance: S) -> bool {
        self.lo <= relevance && relevance <= self.hi
    }

    /// Every finite relevance value.
    pub fn full() -> Self {
        RelevanceRange {
            lo: S::neg_infinity(),
            hi: S::infinity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query<S> {
    dominating: String,
    sub_dominating: Vec<String>,
    range: RelevanceRange<S>,
    count: usize,
}

impl<S: Scalar> Query<S> {
    pub fn new<T: AsRef<str>>(
        dominating: &str,
        sub_dominating: &[T],
        range: RelevanceRange<S>,
        count: usize,
    ) -> Result<Self, QueryError> {
        let dominating = canonical_name(dominating);
        if dominating.is_empty() {
            return Err(QueryError::MissingDominating);
        }
        if sub_dominating.len() > SUB_DOMINATING_LIMIT {
            return Err(QueryError::TooManySubTerms(sub_dominating.len()));
        }
        let mut seen = HashSet::new();
        seen.insert(dominating.clone());
        let mut subs = Vec::with_capacity(sub_dominating.len());
        for (i, s) in sub_dominating.iter().enumerate() {
            let s = canonical_name(s.as_ref());
            if s.is_empty() {
                return Err(QueryError::EmptySubTerm(i + 1));
            }
            if !seen.insert(s.clone()) {
                return Err(QueryError::RepeatedTerm(s));
            }
            subs.push(s);
        }
        if range.lo.is_nan() || range.hi.is_nan() || range.lo > range.hi {
            return Err(QueryError::InvalidRange {
                lo: range.lo.to_f64_lossy(),
                hi: range.hi.to_f64_lossy(),
            });
        }
        if count == 0 {
            return Err(QueryError::ZeroCount);
        }
        Ok(Query {
            dominating,
            sub_dominating: subs,
            range,
            count,
        })
    }

    pub fn dominating(&self) -> &str {
        &self.dominating
    }

    pub fn sub_dominating(&self) -> &[String] {
        &self.sub_dominating
    }

    pub fn range(&self) -> RelevanceRange<S> {
        self.range
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Bucket terms in priority order: the dominating term, then the subs.
    fn bucket_terms(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.dominating.as_str()).chain(self.sub_dominating.iter().map(String::as_str))
    }
}

/// Attachment bucket that supplied a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "primary")]
    Primary,
    #[serde(rename = "sub1")]
    Sub1,
    #[serde(rename = "sub2")]
    Sub2,
    #[serde(rename = "sub3")]
    Sub3,
    #[serde(rename = "sub4")]
    Sub4,
}

impl Source {
    pub const ALL: [Source; BUCKETS] = [Source::Primary, Source::Sub1, Source::Sub2, Source::Sub3, Source::Sub4];

    pub fn priority(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Primary => "primary",
            Source::Sub1 => "sub1",
            Source::Sub2 => "sub2",
            Source::Sub3 => "sub3",
            Source::Sub4 => "sub4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct ResultEntry<S> {
    pub page_id: String,
    pub relevance: S,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct ResultList<S> {
    pub entries: Vec<ResultEntry<S>>,
    pub requested: usize,
    pub fulfilled: usize,
    pub quotas: [usize; BUCKETS],
}

/// Per-query instrumentation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub lookups: u32,
    pub comparisons: u32,
}

/// Splits `x` into five bucket sizes by largest-remainder apportionment of
/// 50/20/15/10/5 percent. Shares of sub-dominating buckets beyond `num_sub`
/// fold into the primary bucket. Equal remainders go to the higher priority
/// bucket. The sizes always sum to `x`.
pub fn quotas(x: usize, num_sub: usize) -> [usize; BUCKETS] {
    let num_sub = num_sub.min(SUB_DOMINATING_LIMIT);
    let mut percent = QUOTA_PERCENT;
    for i in num_sub + 1..BUCKETS {
        percent[0] += percent[i];
        percent[i] = 0;
    }

    let mut q = [0usize; BUCKETS];
    let mut rem = [0usize; BUCKETS];
    for i in 0..BUCKETS {
        q[i] = x * percent[i] / 100;
        rem[i] = x * percent[i] % 100;
    }
    let mut order: Vec<usize> = (0..BUCKETS).collect();
    // stable sort keeps priority order among equal remainders
    order.sort_by(|&a, &b| rem[b].cmp(&rem[a]));
    let left = x - q.iter().sum::<usize>();
    for &i in order.iter().take(left) {
        q[i] += 1;
    }
    q
}

/// Answers a query from the attachment index.
pub fn search<S: Scalar>(index: &AttachmentIndex<S>, query: &Query<S>) -> Result<ResultList<S>, RetrievalError> {
    search_with_stats(index, query).map(|(list, _)| list)
}

pub fn search_with_stats<S: Scalar>(
    index: &AttachmentIndex<S>,
    query: &Query<S>,
) -> Result<(ResultList<S>, SearchStats), RetrievalError> {
    let mut stats = SearchStats::default();
    let range = query.range();
    let mut buckets: Vec<&[Posting<S>]> = Vec::with_capacity(BUCKETS);
    for (priority, name) in query.bucket_terms().enumerate() {
        let lookup = index.lookup(name);
        stats.lookups += 1;
        stats.comparisons += lookup.comparisons;
        let position = lookup
            .position
            .ok_or_else(|| RetrievalError::TermNotFound(name.to_string()))?;
        let att = &index.terms()[position].1;
        let list = if priority == 0 { &att.primary } else { &att.secondary };
        // lists are relevance-descending, so the range is one contiguous run
        let start = list.partition_point(|p| p.relevance > range.hi);
        let end = list.partition_point(|p| p.relevance >= range.lo);
        buckets.push(&list[start..end.max(start)]);
    }

    let q = quotas(query.count(), query.sub_dominating().len());
    let x = query.count();
    let mut taken: HashSet<&str> = HashSet::with_capacity(x);
    let mut picked: Vec<Vec<&Posting<S>>> = vec![Vec::new(); buckets.len()];
    let mut cursor = vec![0usize; buckets.len()];
    let mut total = 0;

    // quota pass, then redistribution of any shortfall in priority order
    for pass in 0..2 {
        for (b, list) in buckets.iter().enumerate() {
            while cursor[b] < list.len() {
                let limit_reached = if pass == 0 { picked[b].len() >= q[b] } else { total >= x };
                if limit_reached {
                    break;
                }
                let posting = &list[cursor[b]];
                cursor[b] += 1;
                if taken.insert(posting.page_id.as_str()) {
                    picked[b].push(posting);
                    total += 1;
                }
            }
        }
    }

    let entries: Vec<ResultEntry<S>> = picked
        .into_iter()
        .enumerate()
        .flat_map(|(b, postings)| {
            postings.into_iter().map(move |p| ResultEntry {
                page_id: p.page_id.clone(),
                relevance: p.relevance,
                source: Source::ALL[b],
            })
        })
        .collect();
    Ok((
        ResultList {
            fulfilled: entries.len(),
            entries,
            requested: x,
            quotas: q,
        },
        stats,
    ))
}

/// Unindexed baseline: rebuilds every bucket by scanning all extractions.
/// Produces the same result list as [`search`] over an index built from the
/// same extractions.
pub fn linear_scan_search<S: Scalar>(
    extractions: &[Extraction<S>],
    ontology: &Ontology<S>,
    query: &Query<S>,
) -> Result<ResultList<S>, RetrievalError> {
    let terms: Vec<&str> = query.bucket_terms().collect();
    for name in &terms {
        if ontology.lookup_term(name).position.is_none() {
            return Err(RetrievalError::TermNotFound(name.to_string()));
        }
    }

    let range = query.range();
    let mut buckets: Vec<Vec<(S, &str)>> = vec![Vec::new(); terms.len()];
    for ex in extractions.iter().filter(|e| range.contains(e.relevance)) {
        if ex.dominating == terms[0] {
            buckets[0].push((ex.relevance, &ex.page_id));
        }
        for (b, term) in terms.iter().enumerate().skip(1) {
            if ex.sub_dominating.iter().any(|s| s == term) {
                buckets[b].push((ex.relevance, &ex.page_id));
            }
        }
    }
    for bucket in &mut buckets {
        bucket.sort_by(|a, b| b.0.total_order(&a.0).then_with(|| a.1.cmp(b.1)));
    }

    let x = query.count();
    let q = quotas(x, terms.len() - 1);
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut chosen: Vec<Vec<bool>> = buckets.iter().map(|b| vec![false; b.len()]).collect();

    for (b, bucket) in buckets.iter().enumerate() {
        let mut got = 0;
        for (i, (_, id)) in bucket.iter().enumerate() {
            if got == q[b] {
                break;
            }
            if seen.insert(id) {
                chosen[b][i] = true;
                got += 1;
            }
        }
    }
    let mut remaining = x - seen.len().min(x);
    for (b, bucket) in buckets.iter().enumerate() {
        for (i, (_, id)) in bucket.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if !chosen[b][i] && !seen.contains(id) {
                seen.insert(id);
                chosen[b][i] = true;
                remaining -= 1;
            }
        }
    }

    let mut entries = Vec::new();
    for (b, bucket) in buckets.iter().enumerate() {
        for (i, (relevance, id)) in bucket.iter().enumerate() {
            if chosen[b][i] {
                entries.push(ResultEntry {
                    page_id: id.to_string(),
                    relevance: *relevance,
                    source: Source::ALL[b],
                });
            }
        }
    }
    Ok(ResultList {
        fulfilled: entries.len(),
        entries,
        requested: x,
        quotas: q,
    })
}

/// Minimum and maximum page relevance of the index, used to seed the range
/// fields of a query form.
pub fn relevance_bounds<S: Scalar>(index: &AttachmentIndex<S>) -> Result<(S, S), RetrievalError> {
    index.bounds().ok_or(RetrievalError::NoBounds)
}
