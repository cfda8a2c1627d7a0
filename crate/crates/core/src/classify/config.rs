use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{GoldKind, GreenHost, GreenTiming, Issn, OaClass};

pub const DEFAULT_GRACE_DAYS: u32 = 30;

pub fn default_license_patterns() -> Vec<String> {
    vec!["creativecommons.org/licenses/*".into(), "creativecommons.org/publicdomain/*".into()]
}

pub fn default_denylist() -> Vec<String> {
    vec!["sci-hub.".into(), "researchgate.net".into(), "academia.edu".into()]
}

/// Gold before Green; within Green, postprint before unknown timing before
/// preprint, and disciplinary before institutional before other hosts.
pub fn default_precedence() -> Vec<OaClass> {
    let mut v = vec![
        OaClass::Gold(GoldKind::FullOa),
        OaClass::Gold(GoldKind::HybridOa),
        OaClass::Gold(GoldKind::DelayedOa),
    ];
    for timing in [GreenTiming::Postprint, GreenTiming::UnknownTiming, GreenTiming::Preprint] {
        for host in [GreenHost::Disciplinary, GreenHost::Institutional, GreenHost::OtherRepository] {
            v.push(OaClass::Green { timing, host });
        }
    }
    v.push(OaClass::NonOa);
    v
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("precedence must list every class exactly once; missing {missing:?}, duplicated {duplicated:?}")]
    Precedence { missing: Vec<String>, duplicated: Vec<String> },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Licenses effective within this many days of publication count as immediate.
    pub immediate_grace_days: u32,
    pub open_license_patterns: Vec<String>,
    pub unlawful_host_denylist: Vec<String>,
    pub precedence: Vec<OaClass>,
    pub delayed_journal_set: BTreeSet<Issn>,
    /// Whether a deposit dated on the publication date counts as a preprint.
    pub preprint_on_equal_date: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            immediate_grace_days: DEFAULT_GRACE_DAYS,
            open_license_patterns: default_license_patterns(),
            unlawful_host_denylist: default_denylist(),
            precedence: default_precedence(),
            delayed_journal_set: BTreeSet::new(),
            preprint_on_equal_date: true,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let all = OaClass::all();
        let mut seen = BTreeSet::new();
        let duplicated: Vec<String> = self
            .precedence
            .iter()
            .filter(|c| !seen.insert(**c))
            .map(OaClass::code)
            .collect();
        let missing: Vec<String> = all.iter().filter(|c| !seen.contains(*c)).map(OaClass::code).collect();
        if !missing.is_empty() || !duplicated.is_empty() {
            return Err(ConfigError::Precedence { missing, duplicated });
        }
        if self.open_license_patterns.iter().any(|p| p.trim().is_empty()) {
            return Err(ConfigError::Invalid("empty license pattern".into()));
        }
        Ok(())
    }

    /// Position of a class in the precedence order.
    pub fn rank(&self, class: &OaClass) -> usize {
        self.precedence.iter().position(|c| c == class).unwrap_or(usize::MAX)
    }
}
