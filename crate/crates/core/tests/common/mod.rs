#![allow(dead_code)]

use std::collections::BTreeMap;

use ontoindex_core::corpus::TermStat;
use ontoindex_core::ontology::{OntologyDocument, TermRecord};
use ontoindex_core::{Ontology, PageProfile};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn named_ontology(names: &[String], weights: &[f64]) -> Ontology {
    Ontology::from_document(OntologyDocument {
        domain: "synthetic".into(),
        terms: names
            .iter()
            .zip(weights)
            .map(|(n, w)| TermRecord {
                name: n.clone(),
                weight: *w,
                synonyms: vec![],
            })
            .collect(),
    })
    .unwrap()
}

pub fn term_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("t{i:04}")).collect()
}

/// Ontology of `k` terms with weights drawn from a small grid so ties happen.
pub fn random_ontology(rng: &mut impl Rng, k: usize) -> Ontology {
    let names = term_names(k);
    let weights: Vec<f64> = (0..k).map(|_| f64::from(rng.gen_range(1..=10u32)) / 10.0).collect();
    named_ontology(&names, &weights)
}

/// Profile with `trv = weight × count` for a random subset of terms.
pub fn random_profile(rng: &mut impl Rng, id: &str, ontology: &Ontology, max_terms: usize) -> PageProfile {
    let n = rng.gen_range(0..=max_terms.min(ontology.term_count()));
    let mut chosen: Vec<_> = ontology.terms().iter().collect();
    chosen.shuffle(rng);
    let stats: BTreeMap<_, _> = chosen
        .into_iter()
        .take(n)
        .map(|t| {
            let count = rng.gen_range(1..=6u64);
            (t.name().to_string(), TermStat { count, trv: t.weight() * count as f64 })
        })
        .collect();
    PageProfile::new(id, stats)
}

pub fn random_profiles(rng: &mut impl Rng, ontology: &Ontology, pages: usize, max_terms: usize) -> Vec<PageProfile> {
    (0..pages)
        .map(|i| random_profile(rng, &format!("p{i:05}"), ontology, max_terms))
        .collect()
}
