use std::collections::BTreeSet;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::model::{Issn, PartialDate};
use crate::registry::{lookup_journal_any, IssnLinkTable, JournalRegistry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Articles at least this old should be open under any plausible embargo.
    pub horizon_months: u32,
    pub recent_months: u32,
    /// Minimum open share among old articles ("close to one").
    pub theta_old: f64,
    /// Maximum open share among recent articles ("significantly lower").
    pub theta_recent: f64,
    pub min_cohort: u64,
    pub immediate_grace_days: u32,
    pub reference_date: Option<NaiveDate>,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            horizon_months: 24,
            recent_months: 12,
            theta_old: 0.9,
            theta_recent: 0.5,
            min_cohort: 20,
            immediate_grace_days: crate::classify::DEFAULT_GRACE_DAYS,
            reference_date: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArticleObservation {
    pub publication_date: PartialDate,
    /// Free to read at the publisher as of the reference date.
    pub publisher_open: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohort {
    pub n: u64,
    pub open: u64,
}

impl Cohort {
    pub fn share(&self) -> Option<f64> {
        (self.n > 0).then(|| self.open as f64 / self.n as f64)
    }

    fn add(&mut self, open: bool) {
        self.n += 1;
        self.open += u64::from(open);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Delayed,
    NotDelayed,
    InsufficientData,
}

impl Verdict {
    pub fn code(&self) -> &'static str {
        match self {
            Verdict::Delayed => "delayed",
            Verdict::NotDelayed => "not_delayed",
            Verdict::InsufficientData => "insufficient_data",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalCohortStats {
    pub issn_l: Issn,
    pub title: String,
    pub old_cohort: Cohort,
    pub recent_cohort: Cohort,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DetectError {
    #[error("journal {0} is registered as full OA; the cohort heuristic does not apply")]
    RegistryConflict(Issn),
    #[error("detector needs an explicit reference date")]
    MissingReferenceDate,
}

/// Compares the open share of articles older than the embargo horizon with
/// that of recent articles. Month-precision dates are placed conservatively:
/// an article is old only if its whole publication month lies before the
/// horizon, and recent only if all of it lies inside the recent window.
pub fn detect_delayed(
    issn_l: &Issn,
    title: &str,
    articles: &[ArticleObservation],
    full_oa_registries: &[JournalRegistry],
    link_table: &IssnLinkTable,
    config: &DetectorConfig,
) -> Result<JournalCohortStats, DetectError> {
    let reference = config.reference_date.ok_or(DetectError::MissingReferenceDate)?;
    let issns: BTreeSet<Issn> = [issn_l.clone()].into_iter().chain(link_table.members(issn_l).cloned()).collect();
    if lookup_journal_any(&issns, reference.year(), full_oa_registries, link_table).is_some() {
        return Err(DetectError::RegistryConflict(issn_l.clone()));
    }
    let old_cutoff = months_before(reference, config.horizon_months);
    let recent_cutoff = months_before(reference, config.recent_months);

    let mut old = Cohort::default();
    let mut recent = Cohort::default();
    for a in articles {
        if a.publication_date.last_day() <= old_cutoff {
            old.add(a.publisher_open);
        } else if a.publication_date.first_day() > recent_cutoff && a.publication_date.first_day() <= reference {
            recent.add(a.publisher_open);
        }
    }
    let verdict = if old.n < config.min_cohort || recent.n < config.min_cohort {
        Verdict::InsufficientData
    } else {
        let old_share = old.share().unwrap_or(0.0);
        let recent_share = recent.share().unwrap_or(1.0);
        if old_share >= config.theta_old && recent_share <= config.theta_recent {
            Verdict::Delayed
        } else {
            Verdict::NotDelayed
        }
    };
    Ok(JournalCohortStats {
        issn_l: issn_l.clone(),
        title: title.to_string(),
        old_cohort: old,
        recent_cohort: recent,
        verdict,
    })
}

fn months_before(date: NaiveDate, months: u32) -> NaiveDate {
    date.checked_sub_months(Months::new(months)).expect("date in range")
}
