//! Acceptance suite. Every criterion runs, prints one PASS/FAIL line, and the
//! test fails if any criterion failed.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use ontoindex::harness::{accuracy, bench};
use ontoindex::synth::{generate, GenSpec};
use ontoindex::Engine;
use ontoindex_core::corpus::TermStat;
use ontoindex_core::ontology::{OntologyDocument, TermRecord};
use ontoindex_core::{
    build_index, extract, linear_scan_search, persist, quotas, search, AttachmentIndex, Ontology, PageProfile, Query,
    RelevanceRange,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn ontology(terms: &[(&str, f64)]) -> Ontology {
    Ontology::from_document(OntologyDocument {
        domain: "acceptance".into(),
        terms: terms
            .iter()
            .map(|(n, w)| TermRecord { name: n.to_string(), weight: *w, synonyms: vec![] })
            .collect(),
    })
    .unwrap()
}

fn worked_example_extraction() -> Outcome {
    let o = ontology(&[("mobile", 0.9), ("price", 0.5), ("color", 0.5), ("battery", 0.6), ("company", 0.3)]);
    let trv = [("mobile", 45.0), ("price", 31.0), ("color", 27.0), ("battery", 18.0), ("company", 15.0)];
    let stats: BTreeMap<_, _> = trv
        .iter()
        .map(|(n, v)| {
            let w = o.get(n).unwrap().weight();
            (n.to_string(), TermStat { count: (v / w).round() as u64, trv: *v })
        })
        .collect();
    let ex = extract(&PageProfile::new("example", stats), &o).map_err(|e| e.to_string())?;
    ensure!(ex.dominating == "mobile", "dominating {}", ex.dominating);
    ensure!(ex.sub_dominating == ["price", "color", "battery", "company"], "sub {:?}", ex.sub_dominating);
    ensure!(ex.relevance == 136.0, "relevance {}", ex.relevance);
    Ok(format!("dominating={} sub={:?}", ex.dominating, ex.sub_dominating))
}

fn quota_table() -> Outcome {
    ensure!(quotas(100, 4) == [50, 20, 15, 10, 5], "quotas(100,4) = {:?}", quotas(100, 4));
    ensure!(quotas(20, 4) == [10, 4, 3, 2, 1], "quotas(20,4) = {:?}", quotas(20, 4));
    let mut checked = 0;
    for x in 1..=10_000 {
        for n in 0..=4 {
            let q = quotas(x, n);
            ensure!(q.iter().sum::<usize>() == x, "sum of quotas({x},{n}) = {:?}", q);
            ensure!(q[n + 1..].iter().all(|&v| v == 0), "quotas({x},{n}) fills absent buckets: {:?}", q);
            checked += 1;
        }
    }
    Ok(format!("{checked} (x, n) pairs conserve x"))
}

/// Profiles with weights on a coarse grid so trv and relevance ties occur.
fn tied_corpus(rng: &mut ChaCha8Rng, pages: usize) -> (Ontology, Vec<PageProfile>) {
    let k = rng.gen_range(1..=12);
    let names: Vec<String> = (0..k).map(|i| format!("k{i:02}")).collect();
    let o = ontology(
        &names
            .iter()
            .map(|n| (n.as_str(), f64::from(rng.gen_range(1..=4u32)) / 4.0))
            .collect::<Vec<_>>(),
    );
    let profiles = (0..pages)
        .map(|p| {
            let mut terms: Vec<_> = o.terms().iter().collect();
            terms.shuffle(rng);
            let n = rng.gen_range(0..=k.min(7));
            let stats = terms[..n]
                .iter()
                .map(|t| {
                    let count = rng.gen_range(1..=5u64);
                    (t.name().to_string(), TermStat { count, trv: t.weight() * count as f64 })
                })
                .collect();
            PageProfile::new(format!("q{p:03}"), stats)
        })
        .collect();
    (o, profiles)
}

fn planted_corpus(rng: &mut ChaCha8Rng, pages: usize) -> (Ontology, Vec<PageProfile>) {
    let spec = GenSpec { noisy: rng.gen_bool(0.5), ..GenSpec::clean(pages, rng.gen_range(1..=30), rng.gen()) };
    let g = generate(&spec).unwrap();
    let o = Ontology::from_document(g.ontology).unwrap();
    let profiles = g.documents.iter().map(|d| ontoindex_core::score_page(d, &o)).collect();
    (o, profiles)
}

fn random_query(rng: &mut ChaCha8Rng, o: &Ontology, max_relevance: f64) -> Query {
    let mut names: Vec<&str> = o.terms().iter().map(|t| t.name()).collect();
    names.shuffle(rng);
    let subs = rng.gen_range(0..=4.min(names.len() - 1));
    let (a, b) = (rng.gen_range(0.0..=max_relevance + 1.0), rng.gen_range(0.0..=max_relevance + 1.0));
    let range = if rng.gen_bool(0.3) {
        RelevanceRange { lo: 0.0, hi: f64::MAX }
    } else {
        RelevanceRange { lo: a.min(b), hi: a.max(b) }
    };
    Query::new(names[0], &names[1..=subs], range, rng.gen_range(1..=60)).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut corpora, mut queries, mut nonempty) = (0, 0, 0);
    for c in 0..120 {
        let pages = rng.gen_range(1..=200);
        let (o, profiles) = if c % 2 == 0 { tied_corpus(&mut rng, pages) } else { planted_corpus(&mut rng, pages) };
        let out = build_index(&profiles, &o).map_err(|e| e.to_string())?;
        let max = out.index.bounds().map_or(0.0, |b| b.1);
        for _ in 0..10 {
            let q = random_query(&mut rng, &o, max);
            let indexed = serde_json::to_string(&search(&out.index, &q).map_err(|e| e.to_string())?).unwrap();
            let scanned =
                serde_json::to_string(&linear_scan_search(&out.extractions, &o, &q).map_err(|e| e.to_string())?).unwrap();
            ensure!(indexed == scanned, "corpus {c}: {q:?}\nindexed {indexed}\nscan    {scanned}");
            queries += 1;
            nonempty += usize::from(indexed.contains("page_id"));
        }
        corpora += 1;
    }
    Ok(format!("{corpora} corpora, {queries} queries ({nonempty} non-empty) byte-identical"))
}

fn structural_invariants() -> Outcome {
    let g = generate(&GenSpec { noisy: true, ..GenSpec::clean(5000, 100, 11) }).unwrap();
    let o = Ontology::from_document(g.ontology).unwrap();
    let profiles: Vec<_> = g.documents.iter().map(|d| ontoindex_core::score_page(d, &o)).collect();
    let out = build_index(&profiles, &o).map_err(|e| e.to_string())?;
    let index = &out.index;

    let mut primary: HashMap<&str, usize> = HashMap::new();
    let mut secondary: HashMap<&str, usize> = HashMap::new();
    for (_, att) in index.terms() {
        for p in &att.primary {
            *primary.entry(p.page_id.as_str()).or_default() += 1;
        }
        for p in &att.secondary {
            *secondary.entry(p.page_id.as_str()).or_default() += 1;
        }
    }
    let indexed = profiles.iter().filter(|p| !p.is_empty()).count();
    ensure!(primary.len() == indexed, "{} pages in primary lists, {indexed} indexed", primary.len());
    ensure!(primary.values().all(|&n| n == 1), "a page has several primary postings");
    ensure!(secondary.values().all(|&n| n <= 4), "a page has more than four secondary postings");
    ensure!(secondary.keys().all(|p| primary.contains_key(p)), "secondary posting without a primary one");

    let json = persist::to_json(index);
    let loaded: AttachmentIndex = persist::from_json(&json).map_err(|e| e.to_string())?;
    ensure!(&loaded == index, "loaded index differs");
    ensure!(persist::to_json(&loaded) == json, "re-saved file differs");
    let max_sec = secondary.values().max().copied().unwrap_or(0);
    Ok(format!("{indexed} pages, one primary each, at most {max_sec} secondary; round trip identical"))
}

fn latency_trend() -> Outcome {
    let started = Instant::now();
    let g = generate(&GenSpec::clean(5000, 100, 1)).unwrap();
    let o = Ontology::from_document(g.ontology).unwrap();
    let engine = Engine::build(o, &g.documents, 0.0).map_err(|e| e.to_string())?;
    let report = bench(&engine, &[10, 20, 30, 40, 50], 5, 50).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    print!("{report}");
    ensure!(report.rows.len() == 5, "{} rows", report.rows.len());
    for r in &report.rows {
        ensure!(r.corpus_size == 5000 && r.repetitions >= 5, "row {r:?}");
        ensure!(r.indexed_seconds < r.scan_seconds, "x={}: indexed {} >= scan {}", r.x, r.indexed_seconds, r.scan_seconds);
        ensure!(r.speedup >= 1.2, "x={}: speedup {:.2}", r.x, r.speedup);
    }
    ensure!(elapsed < Duration::from_secs(300), "bench took {elapsed:?}");
    let min = report.rows.iter().map(|r| r.speedup).fold(f64::INFINITY, f64::min);
    Ok(format!("minimum speedup {min:.1}x, run took {:.1} s", elapsed.as_secs_f64()))
}

/// ⌈log₂ k⌉ + 1 by counting halvings.
fn comparison_bound(k: usize) -> u32 {
    let mut levels = 0;
    while (1usize << levels) < k {
        levels += 1;
    }
    levels + 1
}

fn lookup_complexity() -> Outcome {
    let mut worst = Vec::new();
    for k in [1usize, 2, 5, 100, 1024] {
        let names: Vec<String> = (0..k).map(|i| format!("n{:05}", i * 2 + 1)).collect();
        let o = ontology(&names.iter().map(|n| (n.as_str(), 0.5)).collect::<Vec<_>>());
        let bound = comparison_bound(k);
        let mut max = 0;
        for i in 0..k {
            for (probe, hit) in [(format!("n{:05}", i * 2 + 1), true), (format!("n{:05}", i * 2), false)] {
                let l = o.lookup_term(&probe);
                ensure!(l.position.is_some() == hit, "k={k}: lookup of {probe} hit={}", l.position.is_some());
                ensure!(l.comparisons <= bound, "k={k}: {probe} took {} > {bound}", l.comparisons);
                max = max.max(l.comparisons);
            }
        }
        let l = o.lookup_term("zzz");
        ensure!(l.position.is_none() && l.comparisons <= bound, "k={k}: tail miss took {}", l.comparisons);
        worst.push(format!("k={k}:{max}/{bound}"));
    }
    Ok(worst.join(" "))
}

fn planted_accuracy() -> Outcome {
    let counts = [10, 20, 30, 40, 50];
    let run = |noisy: bool| {
        let g = generate(&GenSpec { noisy, ..GenSpec::clean(5000, 100, 42) }).unwrap();
        let o = Ontology::from_document(g.ontology).unwrap();
        let engine = Engine::build(o, &g.documents, 0.0).map_err(|e| e.to_string())?;
        accuracy(&engine, Some(&g.manifest), &counts, 100).map_err(|e| e.to_string())
    };
    let clean = run(false)?;
    for r in &clean.rows {
        ensure!(r.avg_relevant == r.x as f64, "clean x={}: avg_relevant {}", r.x, r.avg_relevant);
    }
    let noisy = run(true)?;
    for r in &noisy.rows {
        ensure!(r.avg_relevant + r.avg_non_relevant == r.x as f64, "noisy x={}: {:?}", r.x, r);
    }
    print!("clean\n{clean}noisy\n{noisy}");
    let lowest = noisy.rows.iter().map(|r| r.avg_relevant / r.x as f64).fold(1.0, f64::min);
    Ok(format!("clean rows all relevant; noisy rows sum to x (lowest precision {:.0}%)", lowest * 100.0))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("extraction of the worked mobile example", worked_example_extraction),
        ("quota table and conservation", quota_table),
        ("indexed search equals linear scan", oracle_equivalence),
        ("index structure and round trip at 5000 pages", structural_invariants),
        ("indexed retrieval faster than scan at 5000 pages", latency_trend),
        ("term lookup comparison bound", lookup_complexity),
        ("planted-ground-truth accuracy", planted_accuracy),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
