use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IdentifierError;

/// A DOI stored lowercase without resolver prefix.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Doi(String);

const PREFIXES: &[&str] = &[
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi.org/",
    "dx.doi.org/",
    "doi:",
    "info:doi/",
];

impl Doi {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub fn normalize_doi(raw: &str) -> Result<Doi, IdentifierError> {
    let mut s = raw.trim().to_lowercase();
    loop {
        let before = s.len();
        for p in PREFIXES {
            if let Some(rest) = s.strip_prefix(p) {
                s = rest.trim_start().to_string();
            }
        }
        if s.len() == before {
            break;
        }
    }
    let Some(rest) = s.strip_prefix("10.") else {
        return Err(IdentifierError::Format(format!("DOI {raw:?} does not start with \"10.\"")));
    };
    match rest.split_once('/') {
        Some((registrant, suffix)) if !registrant.is_empty() && !suffix.trim().is_empty() => {}
        _ => {
            return Err(IdentifierError::Format(format!(
                "DOI {raw:?} lacks a registrant/suffix split"
            )))
        }
    }
    if s.chars().any(char::is_whitespace) {
        return Err(IdentifierError::Format(format!("DOI {raw:?} contains whitespace")));
    }
    Ok(Doi(s))
}

impl FromStr for Doi {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_doi(s)
    }
}

impl fmt::Display for Doi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Doi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Doi({})", self.0)
    }
}

impl Serialize for Doi {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Doi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        normalize_doi(&raw).map_err(serde::de::Error::custom)
    }
}
