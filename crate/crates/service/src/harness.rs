//! Latency benchmark (indexed search vs linear scan) and planted-ground-truth
//! accuracy harness.

use std::collections::HashMap;
use std::fmt;
use std::hint::black_box;
use std::time::Instant;

use ontoindex_core::{linear_scan_search, search, Query, RelevanceRange};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Engine;
use crate::synth::ManifestEntry;

pub const MIN_REPETITIONS: usize = 5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("the engine was loaded from a saved index; benchmarking needs the scored corpus")]
    NoCorpus,
    #[error("the index holds no pages")]
    EmptyIndex,
    #[error("indexed and linear-scan results differ for query on {term:?} with x = {x}")]
    Mismatch { term: String, x: usize },
    #[error("accuracy needs a ground-truth manifest")]
    MissingManifest,
    #[error("manifest has no entry for page {0:?}")]
    UnknownPage(String),
    #[error("at least {MIN_REPETITIONS} repetitions are required, got {0}")]
    TooFewRepetitions(usize),
    #[error(transparent)]
    Query(#[from] ontoindex_core::retrieval::RetrievalError),
}

/// Query shape without a result count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTemplate {
    pub dominating: String,
    pub sub_dominating: Vec<String>,
}

impl QueryTemplate {
    fn with(&self, range: RelevanceRange, x: usize) -> Result<Query, HarnessError> {
        Query::new(&self.dominating, &self.sub_dominating, range, x)
            .map_err(|e| HarnessError::Query(e.into()))
    }
}

/// Picks sub-dominating selections for each dominating term: its four most
/// frequent companions, ties by name. Terms are ordered by how often they
/// dominate, then by name.
fn templates_from<'a>(pairs: impl Iterator<Item = (&'a str, &'a [String])>, limit: usize) -> Vec<QueryTemplate> {
    let mut companions: HashMap<&str, (usize, HashMap<&str, usize>)> = HashMap::new();
    for (dom, subs) in pairs {
        let entry = companions.entry(dom).or_default();
        entry.0 += 1;
        for s in subs {
            *entry.1.entry(s.as_str()).or_default() += 1;
        }
    }
    let mut doms: Vec<_> = companions.into_iter().collect();
    doms.sort_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.0.cmp(b.0)));
    doms.into_iter()
        .take(limit)
        .map(|(dom, (_, subs))| {
            let mut subs: Vec<_> = subs.into_iter().collect();
            subs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            QueryTemplate {
                dominating: dom.to_string(),
                sub_dominating: subs.into_iter().take(4).map(|(s, _)| s.to_string()).collect(),
            }
        })
        .collect()
}

/// Benchmark queries derived from the engine's own extractions.
pub fn bench_queries(engine: &Engine, limit: usize) -> Vec<QueryTemplate> {
    templates_from(
        engine.extractions().iter().map(|e| (e.dominating.as_str(), e.sub_dominating.as_slice())),
        limit,
    )
}

/// Accuracy queries derived from the manifest's intended terms.
pub fn manifest_queries(manifest: &[ManifestEntry], limit: usize) -> Vec<QueryTemplate> {
    templates_from(
        manifest.iter().map(|m| (m.dominating.as_str(), m.sub_dominating.as_slice())),
        limit,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub x: usize,
    /// Median wall-clock seconds to answer the whole query set by linear scan.
    pub scan_seconds: f64,
    /// Median wall-clock seconds to answer the whole query set from the index.
    pub indexed_seconds: f64,
    pub corpus_size: usize,
    pub repetitions: usize,
    pub queries: usize,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}

/// Times linear scan and indexed search for every result count. Before any
/// timing, each query's two result lists are checked for equality.
pub fn bench(engine: &Engine, counts: &[usize], repetitions: usize, max_queries: usize) -> Result<BenchReport, HarnessError> {
    if repetitions < MIN_REPETITIONS {
        return Err(HarnessError::TooFewRepetitions(repetitions));
    }
    let ontology = engine.ontology().ok_or(HarnessError::NoCorpus)?;
    let (lo, hi) = engine.index().bounds().ok_or(HarnessError::EmptyIndex)?;
    let range = RelevanceRange { lo, hi };
    let templates = bench_queries(engine, max_queries);
    let extractions = engine.extractions();

    let mut rows = Vec::with_capacity(counts.len());
    for &x in counts {
        let queries = templates
            .iter()
            .map(|t| t.with(range, x))
            .collect::<Result<Vec<_>, _>>()?;
        for (t, q) in templates.iter().zip(&queries) {
            if search(engine.index(), q)? != linear_scan_search(extractions, ontology, q)? {
                return Err(HarnessError::Mismatch { term: t.dominating.clone(), x });
            }
        }

        let mut scan = Vec::with_capacity(repetitions);
        let mut indexed = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let started = Instant::now();
            for q in &queries {
                black_box(linear_scan_search(extractions, ontology, q)?);
            }
            scan.push(started.elapsed().as_secs_f64());

            let started = Instant::now();
            for q in &queries {
                black_box(search(engine.index(), q)?);
            }
            indexed.push(started.elapsed().as_secs_f64());
        }
        let scan_seconds = median(scan);
        let indexed_seconds = median(indexed).max(f64::MIN_POSITIVE);
        rows.push(BenchRow {
            x,
            scan_seconds,
            indexed_seconds,
            corpus_size: engine.stats().corpus_size,
            repetitions,
            queries: queries.len(),
            speedup: scan_seconds / indexed_seconds,
        });
    }
    Ok(BenchReport { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub x: usize,
    pub avg_relevant: f64,
    pub avg_non_relevant: f64,
    pub corpus_size: usize,
    pub queries: usize,
    /// Result slots the index could not fill, counted as non-relevant.
    pub shortfall: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub rows: Vec<AccuracyRow>,
}

/// Runs one query per manifest dominating term (full relevance range) and
/// counts a result as relevant when the manifest lists the queried
/// dominating term among the page's intended dominating or sub-dominating
/// terms. Unfilled slots count as non-relevant so each row sums to `x`.
pub fn accuracy(engine: &Engine, manifest: Option<&[ManifestEntry]>, counts: &[usize], max_queries: usize) -> Result<AccuracyReport, HarnessError> {
    let manifest = manifest.ok_or(HarnessError::MissingManifest)?;
    let truth: HashMap<&str, &ManifestEntry> = manifest.iter().map(|m| (m.page_id.as_str(), m)).collect();
    let (lo, hi) = engine.index().bounds().ok_or(HarnessError::EmptyIndex)?;
    let templates = manifest_queries(manifest, max_queries);

    let mut rows = Vec::with_capacity(counts.len());
    for &x in counts {
        let mut relevant = 0usize;
        let mut shortfall = 0usize;
        for t in &templates {
            let result = search(engine.index(), &t.with(RelevanceRange { lo, hi }, x)?)?;
            for e in &result.entries {
                let entry = truth.get(e.page_id.as_str()).ok_or_else(|| HarnessError::UnknownPage(e.page_id.clone()))?;
                if entry.mentions(&t.dominating) {
                    relevant += 1;
                }
            }
            shortfall += x - result.fulfilled;
        }
        let n = templates.len().max(1) as f64;
        let avg_relevant = relevant as f64 / n;
        rows.push(AccuracyRow {
            x,
            avg_relevant,
            avg_non_relevant: x as f64 - avg_relevant,
            corpus_size: engine.stats().corpus_size,
            queries: templates.len(),
            shortfall,
        });
    }
    Ok(AccuracyReport { rows })
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6} {:>14} {:>14} {:>9} {:>8}", "x", "scan (s)", "indexed (s)", "speedup", "pages")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6} {:>14.9} {:>14.9} {:>8.1}x {:>8}",
                r.x, r.scan_seconds, r.indexed_seconds, r.speedup, r.corpus_size
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for AccuracyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6} {:>12} {:>14} {:>8}", "x", "relevant", "non-relevant", "pages")?;
        for r in &self.rows {
            writeln!(f, "{:>6} {:>12.2} {:>14.2} {:>8}", r.x, r.avg_relevant, r.avg_non_relevant, r.corpus_size)?;
        }
        Ok(())
    }
}
