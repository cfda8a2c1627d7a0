use std::collections::BTreeMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::{AccessLocation, DeclaredVersion, HostKind, LicenseStatement};
use crate::model::{normalize_doi, Doi, PartialDate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed OAI-PMH response: {0}")]
pub struct XmlError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("record {index}: {message}")]
pub struct RecordError {
    pub index: usize,
    pub message: String,
}

/// An OAI-PMH `<error>` element, e.g. `noRecordsMatch`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OaiError {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResumptionToken {
    pub token: String,
    pub complete_list_size: Option<u64>,
    pub cursor: Option<u64>,
}

/// Dublin Core elements keyed by local name (`identifier`, `date`, ...).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DcFields(pub BTreeMap<String, Vec<String>>);

impl DcFields {
    pub fn get(&self, name: &str) -> &[String] {
        self.0.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn identifiers(&self) -> &[String] {
        self.get("identifier")
    }

    pub fn dates(&self) -> &[String] {
        self.get("date")
    }

    pub fn rights(&self) -> &[String] {
        self.get("rights")
    }

    pub fn types(&self) -> &[String] {
        self.get("type")
    }

    pub fn titles(&self) -> &[String] {
        self.get("title")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OaiRecord {
    pub identifier: String,
    pub datestamp: Option<String>,
    pub set_specs: Vec<String>,
    pub deleted: bool,
    pub dc: DcFields,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OaiListRecords {
    pub records: Vec<Result<OaiRecord, RecordError>>,
    pub resumption_token: Option<ResumptionToken>,
    pub error: Option<OaiError>,
}

impl OaiListRecords {
    /// The token to continue with, if the list is not exhausted.
    pub fn next_token(&self) -> Option<&str> {
        self.resumption_token
            .as_ref()
            .map(|t| t.token.as_str())
            .filter(|t| !t.is_empty())
    }
}

#[derive(Default)]
struct RecordBuilder {
    identifier: Option<String>,
    datestamp: Option<String>,
    set_specs: Vec<String>,
    deleted: bool,
    dc: DcFields,
}

fn attr(e: &BytesStart<'_>, name: &[u8]) -> Result<Option<String>, XmlError> {
    for a in e.attributes() {
        let a = a.map_err(|err| XmlError(err.to_string()))?;
        if a.key.local_name().as_ref() == name {
            let v = a.unescape_value().map_err(|err| XmlError(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

/// Parses a `ListRecords` response with `oai_dc` metadata.
pub fn parse_oai_dc(xml: &str) -> Result<OaiListRecords, XmlError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);

    let mut out = OaiListRecords::default();
    let mut stack: Vec<String> = Vec::new();
    let mut text = String::new();
    let mut record: Option<RecordBuilder> = None;
    let mut saw_root = false;
    let mut record_index = 0usize;

    loop {
        let event = reader.read_event().map_err(|e| XmlError(format!("at byte {}: {e}", reader.buffer_position())))?;
        let (start, is_empty) = match &event {
            Event::Start(e) => (Some(e.clone()), false),
            Event::Empty(e) => (Some(e.clone()), true),
            _ => (None, false),
        };
        if let Some(e) = start {
            let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
            if stack.is_empty() {
                if name != "OAI-PMH" {
                    return Err(XmlError(format!("unexpected root element <{name}>")));
                }
                saw_root = true;
            }
            match name.as_str() {
                "record" if record.is_none() => record = Some(RecordBuilder::default()),
                "header" => {
                    if let Some(r) = record.as_mut() {
                        r.deleted = attr(&e, b"status")?.as_deref() == Some("deleted");
                    }
                }
                "error" if stack.len() == 1 => {
                    out.error = Some(OaiError {
                        code: attr(&e, b"code")?.unwrap_or_default(),
                        message: String::new(),
                    });
                }
                "resumptionToken" => {
                    let num = |v: Option<String>| v.and_then(|s| s.trim().parse().ok());
                    out.resumption_token = Some(ResumptionToken {
                        token: String::new(),
                        complete_list_size: num(attr(&e, b"completeListSize")?),
                        cursor: num(attr(&e, b"cursor")?),
                    });
                }
                _ => {}
            }
            stack.push(name);
            text.clear();
            if !is_empty {
                continue;
            }
        }
        match event {
            Event::Text(t) => {
                let s = t.unescape().map_err(|e| XmlError(e.to_string()))?;
                text.push_str(&s);
            }
            Event::CData(c) => text.push_str(&String::from_utf8_lossy(&c)),
            Event::Start(_) | Event::Empty(_) | Event::End(_) => {
                let name = stack.pop().ok_or_else(|| XmlError("unbalanced end tag".into()))?;
                let parent = stack.last().map(String::as_str);
                let value = text.trim().to_string();
                text.clear();
                match (name.as_str(), parent) {
                    ("record", _) if stack.iter().all(|s| s != "record") => {
                        if let Some(r) = record.take() {
                            out.records.push(finish_record(r, record_index));
                            record_index += 1;
                        }
                    }
                    ("identifier", Some("header")) => set(&mut record, |r| r.identifier = Some(value)),
                    ("datestamp", Some("header")) => set(&mut record, |r| r.datestamp = Some(value)),
                    ("setSpec", Some("header")) => set(&mut record, |r| r.set_specs.push(value)),
                    (field, Some("dc")) if !value.is_empty() => {
                        set(&mut record, |r| r.dc.0.entry(field.to_string()).or_default().push(value))
                    }
                    ("error", _) if stack.len() == 1 => {
                        if let Some(err) = out.error.as_mut() {
                            err.message = value;
                        }
                    }
                    ("resumptionToken", _) => {
                        if let Some(tok) = out.resumption_token.as_mut() {
                            tok.token = value;
                        }
                    }
                    _ => {}
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !stack.is_empty() {
        return Err(XmlError(format!("unexpected end of document inside <{}>", stack.join("/"))));
    }
    if !saw_root {
        return Err(XmlError("empty document".into()));
    }
    Ok(out)
}

fn set(record: &mut Option<RecordBuilder>, f: impl FnOnce(&mut RecordBuilder)) {
    if let Some(r) = record.as_mut() {
        f(r);
    }
}

fn finish_record(r: RecordBuilder, index: usize) -> Result<OaiRecord, RecordError> {
    let identifier = r.identifier.filter(|s| !s.is_empty()).ok_or(RecordError {
        index,
        message: "header without <identifier>".into(),
    })?;
    Ok(OaiRecord {
        identifier,
        datestamp: r.datestamp,
        set_specs: r.set_specs,
        deleted: r.deleted,
        dc: if r.deleted { DcFields::default() } else { r.dc },
    })
}

fn looks_like_doi(s: &str) -> Option<Doi> {
    let lower = s.trim().to_ascii_lowercase();
    if lower.starts_with("10.") || lower.starts_with("doi:") || lower.starts_with("info:doi/") || lower.contains("doi.org/10.") {
        normalize_doi(&lower).ok()
    } else {
        None
    }
}

/// Turns a harvested Dublin Core record into a repository access location.
/// Returns `None` for deleted records and records without a DOI or landing URL.
pub fn oai_record_to_location(record: &OaiRecord, repo_hint: Option<&str>, source: &str) -> Option<(Doi, AccessLocation)> {
    if record.deleted {
        return None;
    }
    let dc = &record.dc;
    let doi = dc
        .identifiers()
        .iter()
        .chain(dc.get("relation"))
        .find_map(|s| looks_like_doi(s))?;
    let url = dc
        .identifiers()
        .iter()
        .find(|s| (s.starts_with("http://") || s.starts_with("https://")) && !s.contains("doi.org/"))?;
    let declared_version = dc
        .types()
        .iter()
        .map(|t| DeclaredVersion::from_token(t))
        .find(|v| *v != DeclaredVersion::Unknown)
        .unwrap_or(DeclaredVersion::Unknown);
    let license = dc
        .rights()
        .iter()
        .find(|r| r.contains("://") || r.starts_with("creativecommons.org"))
        .map(|r| LicenseStatement { source: source.to_string(), ..LicenseStatement::new(r.trim()) });
    let deposit_timestamp = record.datestamp.as_deref().and_then(|d| d.parse::<PartialDate>().ok());
    Some((
        doi,
        AccessLocation {
            url: url.clone(),
            host_kind: HostKind::Repository,
            repo_hint: repo_hint.map(String::from),
            deposit_timestamp,
            declared_version,
            license,
            source: source.to_string(),
        },
    ))
}
