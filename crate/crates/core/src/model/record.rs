use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Doi, IdentifierError, Issn, PartialDate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentType {
    Article,
    Review,
    ProceedingsPaper,
}

impl DocumentType {
    pub fn code(&self) -> &'static str {
        match self {
            DocumentType::Article => "article",
            DocumentType::Review => "review",
            DocumentType::ProceedingsPaper => "proceedings_paper",
        }
    }
}

/// One bibliographic item to classify.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    #[serde(default)]
    pub doi: Option<Doi>,
    #[serde(default)]
    pub issns: BTreeSet<Issn>,
    #[serde(default)]
    pub journal_title: String,
    #[serde(default)]
    pub publication_title: String,
    pub publication_date: PartialDate,
    #[serde(default = "default_doc_type")]
    pub document_type: DocumentType,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution: Option<String>,
}

fn default_doc_type() -> DocumentType {
    DocumentType::Article
}

impl PublicationRecord {
    pub fn validate(&self) -> Result<(), IdentifierError> {
        let has_fallback = !self.issns.is_empty() && !self.publication_title.trim().is_empty();
        if self.doi.is_none() && !has_fallback {
            return Err(IdentifierError::Format(
                "record needs a DOI or an ISSN plus publication title".into(),
            ));
        }
        Ok(())
    }
}

/// Casefolds, strips punctuation and collapses whitespace.
pub fn normalize_title(title: &str) -> String {
    let cleaned: String = title
        .chars()
        .flat_map(char::to_lowercase)
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}
