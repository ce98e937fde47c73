//! Ontology-term attachment indexing.
//!
//! Pages are scored against a weighted domain ontology, each page is attached
//! to the primary list of its dominating term and to the secondary lists of up
//! to four sub-dominating terms, and queries are answered by mixing those
//! lists with fixed per-bucket quotas.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`; [`single`] has `f32` versions.

pub mod corpus;
pub mod indexer;
pub mod ontology;
pub mod persist;
pub mod retrieval;
pub mod scalar;

pub use corpus::{count_occurrences, is_domain_page, score_page, tokenize, Document};
pub use indexer::{build_index, extract, BuildReport, SUB_DOMINATING_LIMIT};
pub use ontology::Lookup;
pub use retrieval::{linear_scan_search, quotas, relevance_bounds, search, Source};
pub use scalar::Scalar;

pub type Ontology = ontology::Ontology<f64>;
pub type OntologyTerm = ontology::OntologyTerm<f64>;
pub type PageProfile = corpus::PageProfile<f64>;
pub type Extraction = indexer::Extraction<f64>;
pub type AttachmentIndex = indexer::AttachmentIndex<f64>;
pub type Posting = indexer::Posting<f64>;
pub type Query = retrieval::Query<f64>;
pub type RelevanceRange = retrieval::RelevanceRange<f64>;
pub type ResultList = retrieval::ResultList<f64>;
pub type ResultEntry = retrieval::ResultEntry<f64>;

/// Single precision aliases.
pub mod single {
    pub type Ontology = crate::ontology::Ontology<f32>;
    pub type OntologyTerm = crate::ontology::OntologyTerm<f32>;
    pub type PageProfile = crate::corpus::PageProfile<f32>;
    pub type Extraction = crate::indexer::Extraction<f32>;
    pub type AttachmentIndex = crate::indexer::AttachmentIndex<f32>;
    pub type Query = crate::retrieval::Query<f32>;
    pub type RelevanceRange = crate::retrieval::RelevanceRange<f32>;
    pub type ResultList = crate::retrieval::ResultList<f32>;
}
