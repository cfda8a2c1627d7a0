//! Journal-level detection of Delayed (moving wall) Open Access.
//!
//! Three independent strategies feed one delayed-journal registry: the
//! cohort-share comparison between old and recent articles, the
//! license-delay field in publisher metadata, and the PMC embargo list.

mod cohort;
mod metadata;
mod pmc;
mod registry;

pub use cohort::{detect_delayed, ArticleObservation, Cohort, DetectError, DetectorConfig, JournalCohortStats, Verdict};
pub use metadata::{article_delay, detect_delayed_from_metadata, ArticleLicenses};
pub use pmc::{load_pmc_embargoes, pmc_embargoes_from_reader, write_pmc_embargoes, PmcEmbargo};
pub use registry::{build_delayed_registry, DelayedRegistry, DelayedRow, Strategy};
