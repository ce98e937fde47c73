//! Command-line front end.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ontoindex_core::corpus::{load_corpus, score_corpus, IngestOptions};
use ontoindex_core::ontology::load_ontology;
use ontoindex_core::{persist, AttachmentIndex, Document, Ontology};

use crate::config::Config;
use crate::engine::{Engine, RangeBody, SearchRequest};
use crate::harness::{accuracy, bench, MIN_REPETITIONS};
use crate::http::{self, AppState};
use crate::synth::{generate, read_manifest, GenSpec, TermSpec, CORPUS_FILE, MANIFEST_FILE, ONTOLOGY_FILE};

const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

#[derive(Debug, Parser)]
#[command(name = "ontoindex", version, about = "Ontology-term attachment indexing and search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a corpus and write one page profile per line.
    Ingest {
        #[command(flatten)]
        source: SourceArgs,
        /// Output JSONL file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a corpus, build the attachment index and save it.
    BuildIndex {
        #[command(flatten)]
        source: SourceArgs,
        /// Output index file.
        #[arg(long)]
        out: PathBuf,
        /// Also print the build statistics as JSON.
        #[arg(long)]
        report: bool,
    },
    /// Query a saved index and print the result list as JSON.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        dominating: String,
        /// Comma-separated sub-dominating terms, in priority order.
        #[arg(long, value_delimiter = ',')]
        sub: Vec<String>,
        /// Relevance range `lo:hi`; defaults to the index bounds.
        #[arg(long, value_parser = parse_range)]
        range: Option<RangeBody>,
        #[arg(long)]
        count: usize,
        /// Corpus to take page URLs from.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Run the HTTP API. Settings default to the file named by ONTOINDEX_CONFIG.
    Serve {
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Serve a saved index instead of building one.
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        relevance_limit: Option<f64>,
        #[arg(long)]
        strip_html: bool,
        #[arg(long)]
        listen: Option<String>,
    },
    /// Time indexed search against a linear scan.
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
        counts: Vec<usize>,
        #[arg(long, default_value_t = MIN_REPETITIONS)]
        repetitions: usize,
        /// Maximum number of distinct queries per result count.
        #[arg(long, default_value_t = 50)]
        queries: usize,
        #[arg(long)]
        json: bool,
    },
    /// Measure relevant results per query against a ground-truth manifest.
    Accuracy {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        queries: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write a synthetic ontology, corpus and ground-truth manifest.
    GenCorpus {
        #[arg(long)]
        pages: usize,
        /// Number of generated terms.
        #[arg(long, default_value_t = 100, conflicts_with = "term_names")]
        terms: usize,
        /// Comma-separated term names to use instead of generated ones.
        #[arg(long, value_delimiter = ',')]
        term_names: Option<Vec<String>>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        noisy: bool,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    #[arg(long)]
    pub ontology: PathBuf,
    /// Directory of page files or a JSONL file.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub strip_html: bool,
    /// Pages scoring below this are not domain pages.
    #[arg(long, default_value_t = 0.0)]
    pub relevance_limit: f64,
}

/// Either an existing ontology and corpus, or a directory written by
/// `gen-corpus`, or parameters for a fresh synthetic corpus.
#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long, requires = "corpus", conflicts_with = "dir")]
    pub ontology: Option<PathBuf>,
    #[arg(long, requires = "ontology", conflicts_with = "dir")]
    pub corpus: Option<PathBuf>,
    /// Directory holding ontology.json, corpus.jsonl and manifest.jsonl.
    #[arg(long)]
    pub dir: Option<PathBuf>,
    /// Size of the generated corpus when no data is given.
    #[arg(long = "corpus-size", alias = "pages", default_value_t = 5000)]
    pub pages: usize,
    #[arg(long, default_value_t = 100)]
    pub terms: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub noisy: bool,
}

fn parse_range(s: &str) -> Result<RangeBody, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(RangeBody { from: parse(lo)?, to: parse(hi)? })
}

fn ontology_at(path: &Path) -> anyhow::Result<Ontology> {
    load_ontology(path).with_context(|| format!("loading ontology {}", path.display()))
}

fn corpus_at(path: &Path, strip_html: bool) -> anyhow::Result<Vec<Document>> {
    load_corpus(path, IngestOptions { strip_html }).with_context(|| format!("loading corpus {}", path.display()))
}

fn index_at(path: &Path) -> anyhow::Result<AttachmentIndex> {
    let file = fs::File::open(path).with_context(|| format!("opening index {}", path.display()))?;
    persist::load_index(std::io::BufReader::new(file)).with_context(|| format!("loading index {}", path.display()))
}

fn urls_of(docs: &[Document]) -> HashMap<String, String> {
    docs.iter().map(|d| (d.page_id.clone(), d.url.clone())).collect()
}

struct Data {
    engine: Engine,
    manifest: Option<Vec<crate::synth::ManifestEntry>>,
}

impl DataArgs {
    fn load(&self, manifest: Option<&Path>) -> anyhow::Result<Data> {
        let (ontology, docs, generated) = if let Some(dir) = &self.dir {
            let ontology = ontology_at(&dir.join(ONTOLOGY_FILE))?;
            let docs = corpus_at(&dir.join(CORPUS_FILE), false)?;
            (ontology, docs, Some(read_manifest(&dir.join(MANIFEST_FILE))?))
        } else if let (Some(o), Some(c)) = (&self.ontology, &self.corpus) {
            (ontology_at(o)?, corpus_at(c, false)?, None)
        } else {
            let g = generate(&GenSpec {
                pages: self.pages,
                terms: TermSpec::Count(self.terms),
                seed: self.seed,
                noisy: self.noisy,
            })?;
            tracing::info!(pages = self.pages, terms = self.terms, seed = self.seed, "generated corpus");
            (Ontology::from_document(g.ontology)?, g.documents, Some(g.manifest))
        };
        let manifest = match manifest {
            Some(p) => Some(read_manifest(p).with_context(|| format!("reading manifest {}", p.display()))?),
            None => generated,
        };
        Ok(Data {
            engine: Engine::build(ontology, &docs, 0.0)?,
            manifest,
        })
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { source, out: path } => {
            let ontology = ontology_at(&source.ontology)?;
            let docs = corpus_at(&source.corpus, source.strip_html)?;
            let scored = score_corpus(&docs, &ontology, source.relevance_limit)?;
            let mut w = BufWriter::new(fs::File::create(&path)?);
            for p in &scored.profiles {
                serde_json::to_writer(&mut w, p)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
            writeln!(
                out,
                "scored {} pages: {} domain pages, {} below the relevance limit",
                docs.len(),
                scored.profiles.len(),
                scored.below_limit.len()
            )?;
        }
        Command::BuildIndex { source, out: path, report } => {
            let ontology = ontology_at(&source.ontology)?;
            let docs = corpus_at(&source.corpus, source.strip_html)?;
            let engine = Engine::build(ontology, &docs, source.relevance_limit)?;
            let mut w = BufWriter::new(fs::File::create(&path)?);
            persist::save_index(engine.index(), &mut w)?;
            w.flush()?;
            if report {
                serde_json::to_writer_pretty(&mut *out, engine.stats())?;
                writeln!(out)?;
            } else {
                let s = engine.stats();
                writeln!(
                    out,
                    "indexed {} of {} pages over {} terms into {}",
                    s.indexed_pages,
                    s.corpus_size,
                    s.term_count,
                    path.display()
                )?;
            }
        }
        Command::Search { index, dominating, sub, range, count, corpus } => {
            let index = index_at(&index)?;
            let urls = match corpus {
                Some(c) => urls_of(&corpus_at(&c, false)?),
                None => HashMap::new(),
            };
            let engine = Engine::from_index(index, urls);
            let range = match range {
                Some(r) => r,
                None => {
                    let b = engine.bounds()?;
                    RangeBody { from: b.min, to: b.max }
                }
            };
            let response = engine.search(&SearchRequest {
                dominating: Some(dominating),
                sub_dominating: sub,
                range: Some(range),
                count: Some(count),
            })?;
            serde_json::to_writer_pretty(&mut *out, &response)?;
            writeln!(out)?;
        }
        Command::Serve { ontology, corpus, index, relevance_limit, strip_html, listen } => {
            let config = Config::from_env()?;
            let listen = listen.or(config.listen).unwrap_or_else(|| DEFAULT_LISTEN.to_string());
            let addr: SocketAddr = listen.parse().with_context(|| format!("bad listen address {listen:?}"))?;
            let ontology = ontology.or(config.ontology);
            let corpus = corpus.or(config.corpus);
            let index = index.or(config.index);
            let relevance_limit = relevance_limit.or(config.relevance_limit).unwrap_or(0.0);
            let strip_html = strip_html || config.strip_html;
            if index.is_none() && (ontology.is_none() || corpus.is_none()) {
                bail!("serve needs --index, or both --ontology and --corpus");
            }
            let state = AppState::new();
            let loader = state.clone();
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                // the API answers 503 until the loader installs the engine
                let load = tokio::task::spawn_blocking(move || {
                    let engine = match index {
                        Some(path) => {
                            let urls = match &corpus {
                                Some(c) => urls_of(&corpus_at(c, strip_html)?),
                                None => HashMap::new(),
                            };
                            Engine::from_index(index_at(&path)?, urls)
                        }
                        None => {
                            let ontology = ontology_at(ontology.as_deref().unwrap())?;
                            let docs = corpus_at(corpus.as_deref().unwrap(), strip_html)?;
                            Engine::build(ontology, &docs, relevance_limit)?
                        }
                    };
                    tracing::info!(pages = engine.stats().indexed_pages, "index ready");
                    loader.install(engine);
                    anyhow::Ok(())
                });
                let server = http::serve(addr, state);
                tokio::pin!(server);
                tokio::select! {
                    r = &mut server => return Ok(r?),
                    r = load => r??,
                }
                server.await?;
                anyhow::Ok(())
            })?;
        }
        Command::Bench { data, counts, repetitions, queries, json } => {
            let data = data.load(None)?;
            let report = bench(&data.engine, &counts, repetitions, queries)?;
            if json {
                serde_json::to_writer_pretty(&mut *out, &report)?;
                writeln!(out)?;
            } else {
                write!(out, "{report}")?;
            }
        }
        Command::Accuracy { data, manifest, counts, queries, json } => {
            let data = data.load(manifest.as_deref())?;
            let report = accuracy(&data.engine, data.manifest.as_deref(), &counts, queries)?;
            if json {
                serde_json::to_writer_pretty(&mut *out, &report)?;
                writeln!(out)?;
            } else {
                write!(out, "{report}")?;
            }
        }
        Command::GenCorpus { pages, terms, term_names, seed, noisy, out: dir } => {
            let terms = match term_names {
                Some(names) => TermSpec::Names(names),
                None => TermSpec::Count(terms),
            };
            let g = generate(&GenSpec { pages, terms, seed, noisy })?;
            g.write_to(&dir)?;
            writeln!(
                out,
                "wrote {} pages over {} terms to {}",
                g.documents.len(),
                g.ontology.terms.len(),
                dir.display()
            )?;
        }
    }
    Ok(())
}
