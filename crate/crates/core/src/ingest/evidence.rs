use serde::{Deserialize, Serialize};

use crate::model::{Issn, PartialDate, PublicationRecord};
use crate::registry::FullOaMatch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContentVersion {
    Vor,
    Am,
    Tdm,
    Unspecified,
}

impl ContentVersion {
    pub fn from_token(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().as_str() {
            "vor" => ContentVersion::Vor,
            "am" => ContentVersion::Am,
            "tdm" => ContentVersion::Tdm,
            _ => ContentVersion::Unspecified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseStatement {
    pub url: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_date: Option<PartialDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay_days: Option<u32>,
    pub content_version: ContentVersion,
    #[serde(default)]
    pub source: String,
}

impl LicenseStatement {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            start_date: None,
            delay_days: None,
            content_version: ContentVersion::Unspecified,
            source: String::new(),
        }
    }

    /// Days between publication and the license taking effect.
    ///
    /// Uses `delay_days` when present, otherwise the difference between the
    /// start date and `published` at their common precision. Without either
    /// the license is taken to apply from publication.
    pub fn effective_delay(&self, published: &PartialDate) -> i64 {
        match (self.delay_days, &self.start_date) {
            (Some(d), _) => i64::from(d),
            (None, Some(start)) => published.days_until(start),
            (None, None) => 0,
        }
    }

    pub fn evidence_id(&self) -> String {
        format!("{}#license:{}", self.source, self.url)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HostKind {
    PublisherSite,
    Repository,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredVersion {
    SubmittedVersion,
    AcceptedVersion,
    PublishedVersion,
    Unknown,
}

impl DeclaredVersion {
    pub fn from_token(s: &str) -> Self {
        let s = s.trim();
        let tail = s.rsplit('/').next().unwrap_or(s);
        match tail.to_ascii_lowercase().as_str() {
            "submittedversion" => DeclaredVersion::SubmittedVersion,
            "acceptedversion" => DeclaredVersion::AcceptedVersion,
            "publishedversion" => DeclaredVersion::PublishedVersion,
            _ => DeclaredVersion::Unknown,
        }
    }

    pub fn token(&self) -> Option<&'static str> {
        match self {
            DeclaredVersion::SubmittedVersion => Some("submittedVersion"),
            DeclaredVersion::AcceptedVersion => Some("acceptedVersion"),
            DeclaredVersion::PublishedVersion => Some("publishedVersion"),
            DeclaredVersion::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessLocation {
    pub url: String,
    pub host_kind: HostKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repo_hint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deposit_timestamp: Option<PartialDate>,
    pub declared_version: DeclaredVersion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license: Option<LicenseStatement>,
    #[serde(default)]
    pub source: String,
}

impl AccessLocation {
    pub fn evidence_id(&self) -> String {
        format!("{}#location:{}", self.source, self.url)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMethod {
    Doi,
    Fallback,
    Unmatched,
}

/// All access evidence gathered for one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceBundle {
    pub record: PublicationRecord,
    pub match_method: MatchMethod,
    /// Earliest known publication date across the record and its metadata.
    pub earliest_publication_date: PartialDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issn_l: Option<Issn>,
    #[serde(default)]
    pub publisher_licenses: Vec<LicenseStatement>,
    #[serde(default)]
    pub locations: Vec<AccessLocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_oa_match: Option<FullOaMatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmc_embargo_months: Option<u32>,
    #[serde(default)]
    pub source_tags: Vec<String>,
}

impl EvidenceBundle {
    /// A bundle with no evidence attached.
    pub fn bare(record: PublicationRecord) -> Self {
        Self {
            earliest_publication_date: record.publication_date,
            record,
            match_method: MatchMethod::Unmatched,
            issn_l: None,
            publisher_licenses: Vec::new(),
            locations: Vec::new(),
            full_oa_match: None,
            pmc_embargo_months: None,
            source_tags: Vec::new(),
        }
    }
}
