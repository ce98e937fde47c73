//! JSON index file.
//!
//! ```text
//! {"version": 1, "domain": "...", "min_relevance": 11.3, "max_relevance": 489.7,
//!  "terms": {"mobile": {"primary": [["p1", 45.0]], "secondary": [...]}}}
//! ```
//!
//! Bounds are `null` for an index without pages. Loading re-validates every
//! structural invariant, so a hand-edited or damaged file is reported as
//! corrupt rather than producing an index that answers queries wrongly.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::indexer::{posting_order, AttachmentIndex, TermAttachments, SUB_DOMINATING_LIMIT};
use crate::scalar::Scalar;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("unsupported index version {found} (this build reads version {FORMAT_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("corrupt index file: {0}")]
    Corrupt(String),
    #[error("index i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"), deny_unknown_fields)]
struct IndexFile<S: Clone> {
    version: u64,
    domain: String,
    min_relevance: Option<S>,
    max_relevance: Option<S>,
    terms: BTreeMap<String, TermAttachments<S>>,
}

pub fn to_json<S: Scalar>(index: &AttachmentIndex<S>) -> String {
    let file = IndexFile {
        version: FORMAT_VERSION,
        domain: index.domain.clone(),
        min_relevance: index.bounds.map(|b| b.0),
        max_relevance: index.bounds.map(|b| b.1),
        terms: index.terms.iter().cloned().collect(),
    };
    serde_json::to_string(&file).expect("index serialization is infallible")
}

pub fn save_index<S: Scalar>(index: &AttachmentIndex<S>, mut sink: impl Write) -> Result<(), PersistError> {
    sink.write_all(to_json(index).as_bytes())?;
    sink.flush()?;
    Ok(())
}

pub fn load_index<S: Scalar>(mut source: impl Read) -> Result<AttachmentIndex<S>, PersistError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    from_json(&text)
}

pub fn from_json<S: Scalar>(text: &str) -> Result<AttachmentIndex<S>, PersistError> {
    let value: Value = serde_json::from_str(text).map_err(|e| PersistError::Corrupt(e.to_string()))?;
    let version = value
        .get("version")
        .and_then(Value::as_u64)
        .ok_or_else(|| PersistError::Corrupt("missing version".into()))?;
    if version != FORMAT_VERSION {
        return Err(PersistError::VersionMismatch { found: version });
    }
    let file: IndexFile<S> = serde_json::from_value(value).map_err(|e| PersistError::Corrupt(e.to_string()))?;
    validate(file)
}

fn validate<S: Scalar>(file: IndexFile<S>) -> Result<AttachmentIndex<S>, PersistError> {
    let corrupt = |m: String| Err(PersistError::Corrupt(m));

    // page -> (relevance, term) of its single primary posting
    let mut primary: HashMap<&str, (S, &str)> = HashMap::new();
    let mut extrema: Option<(S, S)> = None;
    for (term, att) in &file.terms {
        for list in [&att.primary, &att.secondary] {
            if let Some(p) = list.iter().find(|p| !(p.relevance.is_finite() && p.relevance >= S::zero())) {
                return corrupt(format!("term {term:?}: invalid relevance for page {:?}", p.page_id));
            }
            if list.windows(2).any(|w| posting_order(&w[0], &w[1]).is_ge()) {
                return corrupt(format!("term {term:?}: posting list out of order or duplicated"));
            }
        }
        for p in &att.primary {
            if primary.insert(&p.page_id, (p.relevance, term)).is_some() {
                return corrupt(format!("page {:?} has more than one primary attachment", p.page_id));
            }
            extrema = Some(match extrema {
                None => (p.relevance, p.relevance),
                Some((lo, hi)) => (lo.min(p.relevance), hi.max(p.relevance)),
            });
        }
    }

    let mut secondary_count: HashMap<&str, usize> = HashMap::new();
    for (term, att) in &file.terms {
        for p in &att.secondary {
            match primary.get(p.page_id.as_str()) {
                None => return corrupt(format!("page {:?} has a secondary but no primary attachment", p.page_id)),
                Some((r, _)) if *r != p.relevance => {
                    return corrupt(format!("page {:?}: relevance differs between attachments", p.page_id))
                }
                Some((_, t)) if *t == term.as_str() => {
                    return corrupt(format!("term {term:?}: page {:?} is both primary and secondary", p.page_id))
                }
                _ => {}
            }
            let n = secondary_count.entry(&p.page_id).or_default();
            *n += 1;
            if *n > SUB_DOMINATING_LIMIT {
                return corrupt(format!("page {:?} has more than {SUB_DOMINATING_LIMIT} secondary attachments", p.page_id));
            }
        }
    }

    let stored = match (file.min_relevance, file.max_relevance) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => return corrupt("only one relevance bound present".into()),
    };
    if stored != extrema {
        return corrupt("stored relevance bounds disagree with the primary postings".into());
    }

    Ok(AttachmentIndex {
        domain: file.domain,
        terms: file.terms.into_iter().collect(),
        bounds: stored,
    })
}
