//! Service layer: corpus generation, benchmark and accuracy harnesses, the
//! HTTP API and the `ontoindex` command line.

pub mod cli;
pub mod config;
pub mod engine;
pub mod harness;
pub mod http;
pub mod synth;

pub use engine::{Engine, SearchRequest, SearchResponse};
pub use http::{router, AppState};
