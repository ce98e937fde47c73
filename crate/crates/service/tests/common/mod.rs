#![allow(dead_code)]

use std::collections::HashMap;

use ontoindex::Engine;
use ontoindex_core::{AttachmentIndex, Extraction};

pub const TERMS: [&str; 5] = ["battery", "color", "company", "mobile", "price"];

fn ex(id: String, dom: &str, subs: &[&str], relevance: f64) -> Extraction {
    Extraction {
        page_id: id,
        dominating: dom.into(),
        sub_dominating: subs.iter().map(|s| s.to_string()).collect(),
        relevance,
    }
}

/// Mobile-domain index whose relevance bounds are 11.3 and 489.7, with every
/// bucket of the query {mobile; price, color, battery, company} holding more
/// distinct pages than a count-20 query asks of it.
pub fn mobile_index() -> AttachmentIndex {
    let mut exs = vec![ex("m00".into(), "mobile", &[], 489.7), ex("c00".into(), "company", &[], 11.3)];
    for i in 1..14 {
        exs.push(ex(format!("m{i:02}"), "mobile", &[], 400.0 - 10.0 * i as f64));
    }
    let sub_pages: [(&str, &str, usize); 4] =
        [("price", "company", 6), ("color", "company", 5), ("battery", "company", 4), ("company", "battery", 3)];
    for (sub, dom, n) in sub_pages {
        for i in 0..n {
            exs.push(ex(format!("{sub}{i:02}"), dom, &[sub], 100.0 - 5.0 * i as f64));
        }
    }
    AttachmentIndex::from_extractions("mobile", TERMS, &exs).unwrap()
}

pub fn mobile_urls() -> HashMap<String, String> {
    mobile_index()
        .terms()
        .iter()
        .flat_map(|(_, a)| a.primary.iter())
        .map(|p| (p.page_id.clone(), format!("https://shop.example/{}", p.page_id)))
        .collect()
}

pub fn mobile_engine() -> Engine {
    Engine::from_index(mobile_index(), mobile_urls())
}
