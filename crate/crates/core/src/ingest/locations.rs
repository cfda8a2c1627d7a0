use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{read_ndjson, AccessLocation, DeclaredVersion, HostKind, LicenseStatement, ParseReport};
use crate::model::{normalize_doi, normalize_issn, Doi, Issn, PartialDate};

/// Access locations reported for one DOI, plus the bibliographic fields a
/// location source may carry for fallback matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationItem {
    pub doi: Doi,
    pub locations: Vec<AccessLocation>,
    pub title: String,
    pub issns: Vec<Issn>,
    pub publication_date: Option<PartialDate>,
    pub source: String,
}

/// Maps Unpaywall-style license codes onto license URLs. Values that already
/// look like URLs are returned unchanged.
pub fn license_url_from_code(code: &str) -> String {
    let c = code.trim();
    if c.contains("://") || c.starts_with("creativecommons.org") {
        return c.to_string();
    }
    let lower = c.to_ascii_lowercase();
    match lower.as_str() {
        "cc0" => "https://creativecommons.org/publicdomain/zero/1.0/".into(),
        "public-domain" | "pd" => "https://creativecommons.org/publicdomain/mark/1.0/".into(),
        _ => match lower.strip_prefix("cc-") {
            Some(variant) if !variant.is_empty() && variant.chars().all(|ch| ch.is_ascii_alphabetic() || ch == '-') => {
                format!("https://creativecommons.org/licenses/{variant}/")
            }
            _ => c.to_string(),
        },
    }
}

const TIMESTAMP_FIELDS: &[&str] = &["deposit_date", "oa_date", "updated", "date"];

fn parse_location(v: &Value, source: &str) -> Result<AccessLocation, String> {
    let url = ["url", "url_for_landing_page", "url_for_pdf"]
        .iter()
        .find_map(|k| v.get(*k).and_then(Value::as_str).filter(|s| !s.is_empty()))
        .ok_or("location without url")?;
    let host_kind = match v.get("host_type").and_then(Value::as_str) {
        Some("publisher") => HostKind::PublisherSite,
        Some("repository") => HostKind::Repository,
        other => return Err(format!("unknown host_type {other:?}")),
    };
    let repo_hint = match host_kind {
        HostKind::PublisherSite => None,
        HostKind::Repository => ["repository_institution", "endpoint_id"]
            .iter()
            .find_map(|k| v.get(*k).and_then(Value::as_str).filter(|s| !s.is_empty()))
            .map(String::from),
    };
    let deposit_timestamp = TIMESTAMP_FIELDS
        .iter()
        .find_map(|k| v.get(*k).and_then(Value::as_str))
        .map(|s| s.parse::<PartialDate>().map_err(|e| format!("bad timestamp: {e}")))
        .transpose()?;
    let declared_version = v
        .get("version")
        .and_then(Value::as_str)
        .map_or(DeclaredVersion::Unknown, DeclaredVersion::from_token);
    let license = v
        .get("license")
        .and_then(Value::as_str)
        .filter(|s| !s.trim().is_empty())
        .map(|code| LicenseStatement {
            source: source.to_string(),
            ..LicenseStatement::new(license_url_from_code(code))
        });
    Ok(AccessLocation {
        url: url.to_string(),
        host_kind,
        repo_hint,
        deposit_timestamp,
        declared_version,
        license,
        source: source.to_string(),
    })
}

pub fn parse_location_line(line: &str, source: &str) -> Result<LocationItem, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let raw_doi = v.get("doi").and_then(Value::as_str).ok_or("missing \"doi\"")?;
    let doi = normalize_doi(raw_doi).map_err(|e| e.to_string())?;
    let locations = match v.get("oa_locations") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(a)) => a.iter().map(|l| parse_location(l, source)).collect::<Result<_, _>>()?,
        Some(_) => return Err("\"oa_locations\" is not an array".into()),
    };
    let issns = match v.get("journal_issns") {
        Some(Value::String(s)) => s.split(',').filter_map(|i| normalize_issn(i).ok()).collect(),
        Some(Value::Array(a)) => a.iter().filter_map(Value::as_str).filter_map(|i| normalize_issn(i).ok()).collect(),
        _ => Vec::new(),
    };
    let publication_date = v
        .get("published_date")
        .and_then(Value::as_str)
        .and_then(|s| s.parse().ok())
        .or_else(|| v.get("year").and_then(Value::as_i64).map(|y| PartialDate::year(y as i32)));
    Ok(LocationItem {
        doi,
        locations,
        title: v.get("title").and_then(Value::as_str).unwrap_or_default().to_string(),
        issns,
        publication_date,
        source: source.to_string(),
    })
}

pub fn parse_location_snapshot(path: &Path) -> std::io::Result<(Vec<LocationItem>, ParseReport)> {
    let tag = super::source_tag(path);
    read_ndjson(path, |line| parse_location_line(line, &tag))
}

/// Renders locations as one line of a location snapshot, the same shape
/// [`parse_location_line`] reads.
pub fn location_snapshot_line(doi: &Doi, locations: &[AccessLocation]) -> String {
    let locs: Vec<Value> = locations
        .iter()
        .map(|l| {
            let mut m = Map::new();
            m.insert("url".into(), json!(l.url));
            m.insert(
                "host_type".into(),
                json!(match l.host_kind {
                    HostKind::PublisherSite => "publisher",
                    HostKind::Repository => "repository",
                }),
            );
            if let Some(h) = &l.repo_hint {
                m.insert("endpoint_id".into(), json!(h));
            }
            if let Some(ts) = &l.deposit_timestamp {
                m.insert("updated".into(), json!(ts.to_string()));
            }
            if let Some(v) = l.declared_version.token() {
                m.insert("version".into(), json!(v));
            }
            if let Some(lic) = &l.license {
                m.insert("license".into(), json!(lic.url));
            }
            Value::Object(m)
        })
        .collect();
    json!({ "doi": doi.as_str(), "oa_locations": locs }).to_string()
}
