//! Classification of scholarly publication records into a descriptive Open
//! Access taxonomy, from locally stored evidence snapshots.

pub mod model;
pub mod classify;
pub mod delayed;
pub mod ingest;
pub mod registry;
pub mod report;

pub use model::*;
