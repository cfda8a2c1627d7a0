//! Parsing of evidence snapshots and their assembly into one
//! [`EvidenceBundle`] per publication record.

mod assemble;
mod crossref;
mod evidence;
mod locations;
mod ndjson;
mod oai_dc;

pub use assemble::{assemble_bundles, Assembler, Assembly, Consumed, FallbackKey, Orphan};
pub use crossref::{parse_crossref_line, parse_crossref_snapshot, CrossrefItem};
pub use evidence::{
    AccessLocation, ContentVersion, DeclaredVersion, EvidenceBundle, HostKind, LicenseStatement,
    MatchMethod,
};
pub use locations::{
    license_url_from_code, location_snapshot_line, parse_location_line, parse_location_snapshot,
    LocationItem,
};
pub use ndjson::{read_ndjson, LineError, NdjsonLines, ParseReport};
pub use oai_dc::{
    oai_record_to_location, parse_oai_dc, DcFields, OaiError, OaiListRecords, OaiRecord,
    RecordError, ResumptionToken, XmlError,
};

/// Derives a short provenance tag (the file name) from a snapshot path.
pub fn source_tag(path: &std::path::Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
