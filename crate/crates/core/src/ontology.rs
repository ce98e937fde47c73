//! Domain ontology: weighted terms with synonyms, sorted by canonical name
//! for logarithmic lookup.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::tokenize;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("malformed ontology document: {0}")]
    Malformed(String),
    #[error("ontology contains no terms")]
    NoTerms,
    #[error("term #{position}: name has no alphanumeric content")]
    EmptyName { position: usize },
    #[error("term {term:?}: weight out of range (0, 1]: {weight}")]
    WeightOutOfRange { term: String, weight: f64 },
    #[error("duplicate term name {0:?}")]
    DuplicateTerm(String),
    #[error("term {term:?}: synonym #{position} has no alphanumeric content")]
    EmptySynonym { term: String, position: usize },
    #[error("term {term:?}: synonym {synonym:?} repeats the term name")]
    SynonymIsName { term: String, synonym: String },
    #[error("term {term:?}: duplicate synonym {synonym:?}")]
    DuplicateSynonym { term: String, synonym: String },
    #[error("term {term:?}: synonym {synonym:?} collides with term {other:?}")]
    SynonymCollision {
        term: String,
        synonym: String,
        other: String,
    },
    #[error("reading ontology: {0}")]
    Io(#[from] std::io::Error),
}

/// Serialized form of an ontology, as stored in the ontology JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct OntologyDocument<S> {
    pub domain: String,
    pub terms: Vec<TermRecord<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "S: Scalar"))]
pub struct TermRecord<S> {
    pub name: String,
    pub weight: S,
    #[serde(default)]
    pub synonyms: Vec<String>,
}

/// A validated ontology term.
#[derive(Debug, Clone, PartialEq)]
pub struct OntologyTerm<S> {
    name: String,
    weight: S,
    synonyms: Vec<String>,
    /// Token sequences of the name and every synonym, longest first.
    patterns: Vec<Vec<String>>,
}

impl<S: Scalar> OntologyTerm<S> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> S {
        self.weight
    }

    pub fn synonyms(&self) -> &[String] {
        &self.synonyms
    }

    /// Token patterns matched when counting occurrences of this term.
    pub fn patterns(&self) -> &[Vec<String>] {
        &self.patterns
    }
}

/// Result of a name lookup, with the number of key comparisons performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lookup {
    pub position: Option<usize>,
    pub comparisons: u32,
}

/// Case-folds a user supplied term name into the canonical lookup key.
pub fn canonical_name(name: &str) -> String {
    name.trim().to_lowercase()
}

/// Binary search over a slice sorted by name, counting three-way comparisons.
pub(crate) fn counted_search<T>(items: &[T], key: &str, name_of: impl Fn(&T) -> &str) -> Lookup {
    let mut lo = 0usize;
    let mut hi = items.len();
    let mut comparisons = 0u32;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        comparisons += 1;
        match name_of(&items[mid]).cmp(key) {
            Ordering::Equal => {
                return Lookup {
                    position: Some(mid),
                    comparisons,
                }
            }
            Ordering::Less => lo = mid + 1,
            Ordering::Greater => hi = mid,
        }
    }
    Lookup {
        position: None,
        comparisons,
    }
}

/// Validated domain ontology. Terms are sorted ascending by canonical name.
#[derive(Debug, Clone, PartialEq)]
pub struct Ontology<S> {
    domain: String,
    terms: Vec<OntologyTerm<S>>,
}

impl<S: Scalar> Ontology<S> {
    pub fn from_document(doc: OntologyDocument<S>) -> Result<Self, OntologyError> {
        if doc.terms.is_empty() {
            return Err(OntologyError::NoTerms);
        }

        // phrase key (tokens joined by a space) -> owning term name
        let mut owners: HashMap<String, String> = HashMap::new();
        let mut terms = Vec::with_capacity(doc.terms.len());

        for (position, record) in doc.terms.iter().enumerate() {
            let name = canonical_name(&record.name);
            let tokens = tokenize(&name);
            if tokens.is_empty() {
                return Err(OntologyError::EmptyName { position });
            }
            let weight = record.weight;
            if !(weight > S::zero() && weight <= S::one()) {
                return Err(OntologyError::WeightOutOfRange {
                    term: name,
                    weight: weight.to_f64_lossy(),
                });
            }
            if owners.insert(tokens.join(" "), name.clone()).is_some() {
                return Err(OntologyError::DuplicateTerm(name));
            }
            terms.push(OntologyTerm {
                name,
                weight,
                synonyms: Vec::new(),
                patterns: vec![tokens],
            });
        }

        for (record, term) in doc.terms.iter().zip(terms.iter_mut()) {
            for (position, raw) in record.synonyms.iter().enumerate() {
                let synonym = canonical_name(raw);
                let tokens = tokenize(&synonym);
                if tokens.is_empty() {
                    return Err(OntologyError::EmptySynonym {
                        term: term.name.clone(),
                        position,
                    });
                }
                let key = tokens.join(" ");
                if let Some(owner) = owners.get(&key) {
                    let err = if *owner != term.name {
                        OntologyError::SynonymCollision {
                            term: term.name.clone(),
                            synonym,
                            other: owner.clone(),
                        }
                    } else if term.patterns[0] == tokens {
                        OntologyError::SynonymIsName {
                            term: term.name.clone(),
                            synonym,
                        }
                    } else {
                        OntologyError::DuplicateSynonym {
                            term: term.name.clone(),
                            synonym,
                        }
                    };
                    return Err(err);
                }
                owners.insert(key, term.name.clone());
                term.synonyms.push(synonym);
                term.patterns.push(tokens);
            }
            // stable: equal-length patterns keep name-then-synonym order
            term.patterns.sort_by_key(|p| std::cmp::Reverse(p.len()));
        }

        terms.sort_by(|a, b| a.name.cmp(&b.name));
        Ok(Ontology {
            domain: doc.domain,
            terms,
        })
    }

    pub fn from_json_str(json: &str) -> Result<Self, OntologyError> {
        let doc: OntologyDocument<S> =
            serde_json::from_str(json).map_err(|e| OntologyError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    /// Terms sorted by canonical name.
    pub fn terms(&self) -> &[OntologyTerm<S>] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, position: usize) -> &OntologyTerm<S> {
        &self.terms[position]
    }

    pub fn lookup_term(&self, name: &str) -> Lookup {
        counted_search(&self.terms, &canonical_name(name), |t| t.name.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&OntologyTerm<S>> {
        self.lookup_term(name).position.map(|p| &self.terms[p])
    }

    /// Terms ordered by weight descending, then name. A display view; lookup
    /// always goes through the name-sorted array.
    pub fn terms_by_weight(&self) -> Vec<&OntologyTerm<S>> {
        let mut view: Vec<_> = self.terms.iter().collect();
        view.sort_by(|a, b| {
            b.weight
                .total_order(&a.weight)
                .then_with(|| a.name.cmp(&b.name))
        });
        view
    }

    pub fn to_document(&self) -> OntologyDocument<S> {
        OntologyDocument {
            domain: self.domain.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermRecord {
                    name: t.name.clone(),
                    weight: t.weight,
                    synonyms: t.synonyms.clone(),
                })
                .collect(),
        }
    }
}

/// Reads and validates an ontology JSON file.
pub fn load_ontology<S: Scalar>(path: impl AsRef<Path>) -> Result<Ontology<S>, OntologyError> {
    let text = fs::read_to_string(path)?;
    Ontology::from_json_str(&text)
}

/// Splits a comma separated synonym cell, trimming whitespace around each entry.
pub fn parse_synonym_list(cell: &str) -> Vec<String> {
    cell.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Converts a tab separated weight table (`term<TAB>weight`) and syntable
/// (`term<TAB>syn1, syn2, ...`) into an ontology document. Blank lines and
/// lines starting with `#` are ignored.
pub fn document_from_tables<S: Scalar>(
    domain: &str,
    weight_table: &str,
    syntable: &str,
) -> Result<OntologyDocument<S>, OntologyError> {
    let rows = |text: &str| -> Vec<(usize, String, String)> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(n, l)| {
                let (a, b) = l.split_once('\t').unwrap_or((l, ""));
                (n + 1, a.trim().to_string(), b.trim().to_string())
            })
            .collect()
    };

    let mut terms = Vec::new();
    for (line, name, weight) in rows(weight_table) {
        let weight: f64 = weight.parse().map_err(|_| {
            OntologyError::Malformed(format!("weight table line {line}: bad weight {weight:?}"))
        })?;
        terms.push(TermRecord {
            name,
            weight: S::from_f64_lossy(weight),
            synonyms: Vec::new(),
        });
    }
    for (line, name, cell) in rows(syntable) {
        let key = canonical_name(&name);
        let record = terms
            .iter_mut()
            .find(|t| canonical_name(&t.name) == key)
            .ok_or_else(|| {
                OntologyError::Malformed(format!("syntable line {line}: unknown term {name:?}"))
            })?;
        record.synonyms.extend(parse_synonym_list(&cell));
    }
    Ok(OntologyDocument {
        domain: domain.to_string(),
        terms,
    })
}
