use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{read_ndjson, ContentVersion, LicenseStatement, ParseReport};
use crate::model::{normalize_doi, normalize_issn, Doi, Issn, PartialDate};

/// The parts of a Crossref work record that matter for classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossrefItem {
    pub doi: Doi,
    pub publication_date: Option<PartialDate>,
    pub issns: Vec<Issn>,
    pub licenses: Vec<LicenseStatement>,
    pub title: String,
    pub container_title: String,
    pub source: String,
}

const DATE_FIELDS: &[&str] = &["issued", "published", "published-print", "published-online"];

fn date_parts(v: &Value) -> Option<PartialDate> {
    let parts = v.get("date-parts")?.get(0)?.as_array()?;
    let nums: Vec<i64> = parts.iter().map_while(Value::as_i64).collect();
    if nums.is_empty() {
        return None;
    }
    PartialDate::from_parts(&nums).ok()
}

fn first_string(v: Option<&Value>) -> String {
    match v {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(a)) => a.first().and_then(Value::as_str).unwrap_or_default().to_string(),
        _ => String::new(),
    }
}

/// Parses one NDJSON line of a Crossref-style snapshot. Objects wrapped in a
/// `{"message": ...}` API envelope are unwrapped.
pub fn parse_crossref_line(line: &str, source: &str) -> Result<CrossrefItem, String> {
    let mut v: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    if let Some(inner) = v.get_mut("message").filter(|m| m.is_object()) {
        v = inner.take();
    }
    let raw_doi = v.get("DOI").and_then(Value::as_str).ok_or("missing \"DOI\"")?;
    let doi = normalize_doi(raw_doi).map_err(|e| e.to_string())?;

    let mut issns = Vec::new();
    let raw_issns = v.get("ISSN").and_then(Value::as_array).cloned().unwrap_or_default();
    for raw in raw_issns.iter().filter_map(Value::as_str) {
        match normalize_issn(raw) {
            Ok(i) if !issns.contains(&i) => issns.push(i),
            Ok(_) => {}
            Err(e) => log::warn!("{source}: {doi}: dropping ISSN {raw:?}: {e}"),
        }
    }

    let publication_date = DATE_FIELDS
        .iter()
        .filter_map(|f| v.get(*f).and_then(date_parts))
        .reduce(|a, b| a.earliest(&b));

    let mut licenses = Vec::new();
    for lic in v.get("license").and_then(Value::as_array).into_iter().flatten() {
        let Some(url) = lic.get("URL").and_then(Value::as_str) else {
            return Err("license without \"URL\"".into());
        };
        let delay_days = match lic.get("delay-in-days") {
            None | Some(Value::Null) => None,
            Some(d) => Some(
                d.as_u64()
                    .and_then(|d| u32::try_from(d).ok())
                    .ok_or_else(|| format!("invalid delay-in-days {d}"))?,
            ),
        };
        licenses.push(LicenseStatement {
            url: url.to_string(),
            start_date: lic.get("start").and_then(date_parts),
            delay_days,
            content_version: lic
                .get("content-version")
                .and_then(Value::as_str)
                .map_or(ContentVersion::Unspecified, ContentVersion::from_token),
            source: source.to_string(),
        });
    }

    Ok(CrossrefItem {
        doi,
        publication_date,
        issns,
        licenses,
        title: first_string(v.get("title")),
        container_title: first_string(v.get("container-title")),
        source: source.to_string(),
    })
}

pub fn parse_crossref_snapshot(path: &Path) -> std::io::Result<(Vec<CrossrefItem>, ParseReport)> {
    let tag = super::source_tag(path);
    read_ndjson(path, |line| parse_crossref_line(line, &tag))
}
