mod common;

use ontoindex_core::ontology::{OntologyDocument, TermRecord};
use ontoindex_core::{count_occurrences, score_page, tokenize, Document, Ontology};
use proptest::prelude::*;

const VOCAB: [&str; 6] = ["cell", "phone", "mobile", "price", "cost", "x"];

fn ontology(order: &[usize]) -> Ontology {
    let records = [
        TermRecord { name: "mobile".into(), weight: 0.9, synonyms: vec!["cell phone".into(), "phone".into()] },
        TermRecord { name: "price".into(), weight: 0.7, synonyms: vec!["cost".into()] },
        TermRecord { name: "cell".into(), weight: 0.2, synonyms: vec![] },
    ];
    Ontology::from_document(OntologyDocument {
        domain: "mobile".into(),
        terms: order.iter().map(|&i| records[i].clone()).collect(),
    })
    .unwrap()
}

/// Independent counter: tries every pattern at every position, longest first,
/// and skips past each match.
fn brute_force_count(words: &[&str], patterns: &[&[&str]]) -> u64 {
    let mut sorted: Vec<&[&str]> = patterns.to_vec();
    sorted.sort_by_key(|p| std::cmp::Reverse(p.len()));
    let mut i = 0;
    let mut n = 0;
    'outer: while i < words.len() {
        for p in &sorted {
            if i + p.len() <= words.len() && (0..p.len()).all(|j| words[i + j] == p[j]) {
                n += 1;
                i += p.len();
                continue 'outer;
            }
        }
        i += 1;
    }
    n
}

fn brute_force_relevance(words: &[&str]) -> f64 {
    let mobile = brute_force_count(words, &[&["mobile"], &["cell", "phone"], &["phone"]]) as f64 * 0.9;
    let price = brute_force_count(words, &[&["price"], &["cost"]]) as f64 * 0.7;
    let cell = brute_force_count(words, &[&["cell"]]) as f64 * 0.2;
    // summed in name order, as the profile does
    cell + mobile + price
}

fn words() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(VOCAB.to_vec()), 0..40)
}

proptest! {
    #[test]
    fn relevance_matches_brute_force(words in words()) {
        let doc = Document::new("p", "u", words.join(" "));
        let profile = score_page(&doc, &ontology(&[0, 1, 2]));
        prop_assert_eq!(profile.relevance, brute_force_relevance(&words));
        let tokens = tokenize(&doc.content);
        for t in ontology(&[0, 1, 2]).terms() {
            let got = profile.term_stats.get(t.name()).map_or(0, |s| s.count);
            prop_assert_eq!(got, count_occurrences(&tokens, t));
        }
    }

    #[test]
    fn ontology_order_does_not_matter(words in words()) {
        let doc = Document::new("p", "u", words.join(" "));
        let a = score_page(&doc, &ontology(&[0, 1, 2]));
        let b = score_page(&doc, &ontology(&[2, 0, 1]));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn appending_a_match_adds_its_weight(words in words()) {
        let o = ontology(&[0, 1, 2]);
        let base = score_page(&Document::new("p", "u", words.join(" ")), &o);
        let more = score_page(&Document::new("p", "u", format!("{} . price", words.join(" "))), &o);
        let before = base.term_stats.get("price").map_or(0, |s| s.count);
        prop_assert_eq!(more.term_stats["price"].count, before + 1);
        prop_assert!(more.relevance > base.relevance);
        prop_assert!((more.relevance - base.relevance - 0.7).abs() < 1e-9);
    }

    #[test]
    fn profile_invariants(words in words()) {
        let o = ontology(&[0, 1, 2]);
        let p = score_page(&Document::new("p", "u", words.join(" ")), &o);
        let mut sum = 0.0;
        for (name, stat) in &p.term_stats {
            prop_assert!(stat.count > 0);
            prop_assert_eq!(stat.trv, o.get(name).unwrap().weight() * stat.count as f64);
            sum += stat.trv;
        }
        prop_assert_eq!(p.relevance, sum);
    }
}

#[test]
fn single_precision_scoring() {
    let o = ontoindex_core::single::Ontology::from_json_str(r#"{"domain":"d","terms":[{"name":"a","weight":0.5}]}"#).unwrap();
    let p = score_page(&Document::new("p", "u", "a a a"), &o);
    assert_eq!(p.relevance, 1.5f32);
}
