//! Domain types: identifiers, partial dates, records and the OA taxonomy.

mod class;
mod date;
mod doi;
mod issn;
mod legacy;
mod record;

pub use class::{
    AccessMode, ClassificationError, EvidenceRef, GoldKind, GreenHost, GreenTiming, OaClass,
    OaClassification, RecordContext, UnknownClassCode,
};
pub use date::{DatePrecision, PartialDate};
pub use doi::{normalize_doi, Doi};
pub use issn::{check_char, normalize_issn, Issn};
pub use legacy::{legacy_lexicon, lookup_legacy, LegacyLabel, LegacyName};
pub use record::{normalize_title, DocumentType, PublicationRecord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentifierError {
    #[error("format error: {0}")]
    Format(String),
    #[error("checksum error in {value:?}: expected check character {expected}, found {found}")]
    Checksum { value: String, expected: char, found: char },
}
