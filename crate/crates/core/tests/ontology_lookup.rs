mod common;

use common::{named_ontology, term_names};
use ontoindex_core::ontology::{canonical_name, OntologyDocument, TermRecord};
use ontoindex_core::Ontology;
use proptest::prelude::*;

fn ceil_log2(k: usize) -> u32 {
    usize::BITS - (k - 1).leading_zeros()
}

fn uniform(k: usize) -> Ontology {
    named_ontology(&term_names(k), &vec![0.5; k])
}

#[test]
fn every_name_is_found_within_log_bound() {
    for k in [1usize, 2, 3, 5, 7, 100, 1000, 1024] {
        let o = uniform(k);
        let bound = ceil_log2(k) + 1;
        for (pos, name) in term_names(k).iter().enumerate() {
            let l = o.lookup_term(name);
            assert_eq!(o.term(l.position.unwrap()).name(), name);
            assert!(l.comparisons <= bound, "k={k} pos={pos}: {} > {bound}", l.comparisons);
        }
    }
}

#[test]
fn k1024_worst_case_is_eleven() {
    let o = uniform(1024);
    let worst = term_names(1024).iter().map(|n| o.lookup_term(n).comparisons).max().unwrap();
    assert!(worst <= 11);
}

#[test]
fn misses_are_not_found_within_bound() {
    for k in [1usize, 2, 5, 100] {
        let o = uniform(k);
        let bound = ceil_log2(k) + 1;
        // probes between, before and after every stored name
        for i in 0..=k {
            for probe in [format!("t{i:04}a"), format!("t{i:04}"), "a".to_string(), "zzz".to_string()] {
                let l = o.lookup_term(&probe);
                assert!(l.comparisons <= bound);
                if i >= k || probe.len() != 5 {
                    assert_eq!(l.position, None, "{probe}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn names_and_synonyms_attribute_to_one_term(
        names in prop::collection::btree_set("[a-z]{1,6}", 1..12),
        syn_seeds in prop::collection::vec("[a-z]{1,6}( [a-z]{1,4})?", 0..20),
    ) {
        let names: Vec<String> = names.into_iter().collect();
        let mut records: Vec<TermRecord<f64>> = names
            .iter()
            .map(|n| TermRecord { name: n.clone(), weight: 0.5, synonyms: vec![] })
            .collect();
        for (i, s) in syn_seeds.iter().enumerate() {
            let n = records.len();
            records[i % n].synonyms.push(s.clone());
        }
        let doc = OntologyDocument { domain: "d".into(), terms: records };
        if let Ok(o) = Ontology::from_document(doc) {
            let mut owners = std::collections::HashMap::new();
            for t in o.terms() {
                for p in t.patterns() {
                    prop_assert!(owners.insert(p.join(" "), t.name().to_string()).is_none());
                }
            }
            let sorted: Vec<_> = o.terms().iter().map(|t| t.name().to_string()).collect();
            let mut expected = sorted.clone();
            expected.sort();
            prop_assert_eq!(sorted, expected);
            for n in &names {
                let l = o.lookup_term(n);
                prop_assert_eq!(o.term(l.position.unwrap()).name(), canonical_name(n));
            }
        }
    }
}
