use std::str::FromStr;

use oaclass_core::PartialDate;
use serde::{Deserialize, Serialize};

use crate::HarvestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    OaiPmh,
    PagedJson,
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oai" | "oai_pmh" | "oai-pmh" => Ok(Protocol::OaiPmh),
            "json" | "paged_json" | "paged-json" => Ok(Protocol::PagedJson),
            other => Err(format!("unknown protocol {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Politeness {
    pub max_requests_per_second: f64,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
}

impl Default for Politeness {
    fn default() -> Self {
        Politeness { max_requests_per_second: 1.0, max_retries: 3, backoff_base_ms: 500 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarvestJob {
    pub endpoint_url: String,
    pub protocol: Protocol,
    pub from: Option<String>,
    pub until: Option<String>,
    pub set_spec: Option<String>,
    pub politeness: Politeness,
    /// OAI resumption token or JSON cursor to continue from.
    pub resume_state: Option<String>,
    /// Stop after this many pages in one run, leaving resumable state.
    pub max_pages: Option<u32>,
    /// Static headers sent with every request, e.g. an API token.
    pub headers: Vec<(String, String)>,
    /// Repository id recorded on harvested locations.
    pub repo_hint: Option<String>,
}

impl HarvestJob {
    pub fn new(endpoint_url: impl Into<String>, protocol: Protocol) -> Self {
        HarvestJob {
            endpoint_url: endpoint_url.into(),
            protocol,
            from: None,
            until: None,
            set_spec: None,
            politeness: Politeness::default(),
            resume_state: None,
            max_pages: None,
            headers: Vec::new(),
            repo_hint: None,
        }
    }

    pub fn validate(&self) -> Result<(), HarvestError> {
        let bad = |m: String| Err(HarvestError::Config(m));
        if url::Url::parse(&self.endpoint_url).is_err() {
            return bad(format!("endpoint {:?} is not an absolute URL", self.endpoint_url));
        }
        let rps = self.politeness.max_requests_per_second;
        if !(rps.is_finite() && rps > 0.0) {
            return bad(format!("max_requests_per_second must be positive, got {rps}"));
        }
        for (name, v) in [("from", &self.from), ("until", &self.until)] {
            if let Some(v) = v {
                if v.parse::<PartialDate>().is_err() {
                    return bad(format!("{name} {v:?} is not a date or timestamp"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut job = HarvestJob::new("http://127.0.0.1:1/oai", Protocol::OaiPmh);
        assert!(job.validate().is_ok());
        job.politeness.max_requests_per_second = 0.0;
        assert!(job.validate().is_err());
        job.politeness.max_requests_per_second = 2.0;
        job.from = Some("2019-13-01".into());
        assert!(job.validate().is_err());
        job.from = Some("2019-01-01T00:00:00Z".into());
        assert!(job.validate().is_ok());
        assert!(HarvestJob::new("not a url", Protocol::PagedJson).validate().is_err());
    }
}
