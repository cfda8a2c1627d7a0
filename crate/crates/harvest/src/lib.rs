//! Polite harvesting of OAI-PMH repositories and paged JSON APIs into the
//! snapshot files read by `oaclass_core::ingest`.

mod client;
pub mod fixture;
mod job;
mod limiter;
mod oai;
mod paged;

use std::path::PathBuf;

pub use client::{HttpClient, HttpResponse};
pub use job::{HarvestJob, Politeness, Protocol};
pub use limiter::RateLimiter;
pub use oai::{harvest_oai, HarvestState, OaiOutcome};
pub use paged::{fetch_paged_json, PagedOutcome};

#[derive(Debug, thiserror::Error)]
pub enum HarvestError {
    #[error("OAI-PMH error {code}: {message}")]
    Protocol { code: String, message: String },
    #[error("transport error for {url}: {message}")]
    Transport { url: String, message: String },
    #[error("access denied ({status}) for {url}")]
    Auth { status: u16, url: String },
    #[error("invalid harvest job: {0}")]
    Config(String),
    #[error("malformed response from {url}: {message}")]
    Malformed { url: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarvestError {
    let path = path.into();
    move |source| HarvestError::Io { path, source }
}
