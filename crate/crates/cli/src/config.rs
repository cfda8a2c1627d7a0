use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use oaclass_core::classify::ClassifierConfig;
use oaclass_core::delayed::DetectorConfig;
use oaclass_harvest::Politeness;
use serde::Deserialize;

pub const CACHE_DIR_ENV: &str = "OACLASS_CACHE_DIR";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub classifier: ClassifierConfig,
    pub detector: DetectorConfig,
    pub harvest: HarvestConfig,
    pub report: ReportConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarvestConfig {
    pub max_requests_per_second: f64,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    /// Static headers sent with every request, e.g. an API token.
    pub headers: BTreeMap<String, String>,
}

impl Default for HarvestConfig {
    fn default() -> Self {
        let p = Politeness::default();
        HarvestConfig {
            max_requests_per_second: p.max_requests_per_second,
            max_retries: p.max_retries,
            backoff_base_ms: p.backoff_base_ms,
            headers: BTreeMap::new(),
        }
    }
}

impl HarvestConfig {
    pub fn politeness(&self) -> Politeness {
        Politeness {
            max_requests_per_second: self.max_requests_per_second,
            max_retries: self.max_retries,
            backoff_base_ms: self.backoff_base_ms,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub group_by: Vec<String>,
    pub mode: Option<String>,
    pub format: Option<String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let config: Config = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        config.classifier.validate().map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(config)
    }
}

/// Root for harvest output when no `--out` is given.
pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()) {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("oaclass"),
        None => PathBuf::from(".oaclass-cache"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections() {
        let c: Config = toml::from_str(
            r#"
            [classifier]
            immediate_grace_days = 14
            preprint_on_equal_date = false

            [detector]
            min_cohort = 10
            reference_date = "2020-06-30"

            [harvest]
            max_requests_per_second = 0.5
            headers = { Authorization = "Bearer t" }

            [report]
            group_by = ["year"]
            "#,
        )
        .unwrap();
        assert_eq!(c.classifier.immediate_grace_days, 14);
        assert!(!c.classifier.preprint_on_equal_date);
        assert_eq!(c.classifier.precedence.len(), 13);
        assert_eq!(c.detector.min_cohort, 10);
        assert_eq!(c.detector.horizon_months, 24);
        assert_eq!(c.harvest.politeness().max_requests_per_second, 0.5);
        assert_eq!(c.harvest.max_retries, 3);
        assert_eq!(c.report.group_by, ["year"]);
        assert!(toml::from_str::<Config>("[classifier]\ngrace = 3\n").is_err());
    }
}
