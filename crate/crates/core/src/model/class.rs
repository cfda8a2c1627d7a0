use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Doi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GoldKind {
    FullOa,
    HybridOa,
    DelayedOa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GreenTiming {
    Preprint,
    Postprint,
    UnknownTiming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GreenHost {
    Institutional,
    Disciplinary,
    OtherRepository,
}

/// The Open Access taxonomy: Gold (formal channel), Green (other lawful
/// locations), or no evidence of openness at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OaClass {
    Gold(GoldKind),
    Green { timing: GreenTiming, host: GreenHost },
    NonOa,
}

impl GoldKind {
    pub const ALL: [GoldKind; 3] = [GoldKind::FullOa, GoldKind::HybridOa, GoldKind::DelayedOa];
}

impl GreenTiming {
    pub const ALL: [GreenTiming; 3] =
        [GreenTiming::Preprint, GreenTiming::Postprint, GreenTiming::UnknownTiming];

    fn code(self) -> &'static str {
        match self {
            GreenTiming::Preprint => "preprint",
            GreenTiming::Postprint => "postprint",
            GreenTiming::UnknownTiming => "unknown",
        }
    }
}

impl GreenHost {
    pub const ALL: [GreenHost; 3] =
        [GreenHost::Institutional, GreenHost::Disciplinary, GreenHost::OtherRepository];

    fn code(self) -> &'static str {
        match self {
            GreenHost::Institutional => "institutional",
            GreenHost::Disciplinary => "disciplinary",
            GreenHost::OtherRepository => "other",
        }
    }
}

impl OaClass {
    /// Every class in canonical reporting order.
    pub fn all() -> Vec<OaClass> {
        let mut v: Vec<OaClass> = GoldKind::ALL.iter().map(|&k| OaClass::Gold(k)).collect();
        for timing in GreenTiming::ALL {
            for host in GreenHost::ALL {
                v.push(OaClass::Green { timing, host });
            }
        }
        v.push(OaClass::NonOa);
        v
    }

    pub fn code(&self) -> String {
        match self {
            OaClass::Gold(GoldKind::FullOa) => "gold_full".into(),
            OaClass::Gold(GoldKind::HybridOa) => "gold_hybrid".into(),
            OaClass::Gold(GoldKind::DelayedOa) => "gold_delayed".into(),
            OaClass::Green { timing, host } => format!("green_{}_{}", timing.code(), host.code()),
            OaClass::NonOa => "non_oa".into(),
        }
    }

    pub fn is_gold(&self) -> bool {
        matches!(self, OaClass::Gold(_))
    }

    pub fn is_green(&self) -> bool {
        matches!(self, OaClass::Green { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown OA class code {0:?}")]
pub struct UnknownClassCode(pub String);

impl FromStr for OaClass {
    type Err = UnknownClassCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OaClass::all()
            .into_iter()
            .find(|c| c.code() == s)
            .ok_or_else(|| UnknownClassCode(s.to_string()))
    }
}

impl fmt::Display for OaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

impl Serialize for OaClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.code())
    }
}

impl<'de> Deserialize<'de> for OaClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether free reading is accompanied by reuse rights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessMode {
    Libre,
    Gratis,
    Closed,
}

impl AccessMode {
    pub fn code(&self) -> &'static str {
        match self {
            AccessMode::Libre => "libre",
            AccessMode::Gratis => "gratis",
            AccessMode::Closed => "closed",
        }
    }
}

/// Links a label to a piece of evidence that justified it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvidenceRef {
    pub label: OaClass,
    pub source: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassificationError {
    #[error("classification must carry at least one label")]
    Empty,
    #[error("primary label {0} is not among the labels")]
    PrimaryNotInLabels(OaClass),
    #[error("non_oa cannot be combined with other labels")]
    MixedNonOa,
    #[error("non_oa classification must have closed access mode")]
    NonOaNotClosed,
}

/// Validated label set with its primary label and access mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OaClassification {
    pub doi: Option<Doi>,
    pub labels: BTreeSet<OaClass>,
    pub primary: OaClass,
    pub access_mode: AccessMode,
    pub evidence_refs: Vec<EvidenceRef>,
    pub diagnostics: Vec<String>,
    pub context: RecordContext,
}

/// Record attributes carried into classification output so reports and the
/// delayed-OA detector can work from classification files alone.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordContext {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issn_l: Option<super::Issn>,
    #[serde(default)]
    pub issns: Vec<super::Issn>,
    #[serde(default)]
    pub journal_title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publication_date: Option<super::PartialDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document_type: Option<super::DocumentType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
    /// A publisher-hosted free copy was observed in the location snapshot.
    #[serde(default)]
    pub publisher_open: bool,
}

impl OaClassification {
    pub fn validate(&self) -> Result<(), ClassificationError> {
        if self.labels.is_empty() {
            return Err(ClassificationError::Empty);
        }
        if !self.labels.contains(&self.primary) {
            return Err(ClassificationError::PrimaryNotInLabels(self.primary));
        }
        if self.labels.contains(&OaClass::NonOa) {
            if self.labels.len() > 1 {
                return Err(ClassificationError::MixedNonOa);
            }
            if self.access_mode != AccessMode::Closed {
                return Err(ClassificationError::NonOaNotClosed);
            }
        }
        Ok(())
    }
}
