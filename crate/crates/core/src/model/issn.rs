use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IdentifierError;

/// A checksum-validated ISSN in canonical `NNNN-NNNC` form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Issn(String);

/// Computes the mod-11 check character for the first seven ISSN digits.
///
/// Weights run 8 down to 2. A remainder of 0 gives check digit 0, a remainder
/// of 1 gives 10, written as `X`.
pub fn check_char(digits: &[u8; 7]) -> char {
    let sum: u32 = digits
        .iter()
        .zip((2..=8u32).rev())
        .map(|(&d, w)| u32::from(d) * w)
        .sum();
    match (11 - sum % 11) % 11 {
        10 => 'X',
        n => char::from(b'0' + n as u8),
    }
}

impl Issn {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The eight significant characters without the hyphen.
    pub fn compact(&self) -> String {
        self.0.replace('-', "")
    }
}

/// Parses and validates an ISSN, ignoring hyphens, whitespace and case.
pub fn normalize_issn(raw: &str) -> Result<Issn, IdentifierError> {
    let chars: Vec<char> = raw
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '-' && *c != '\u{2010}' && *c != '\u{2013}')
        .map(|c| c.to_ascii_uppercase())
        .collect();
    if chars.len() != 8 {
        return Err(IdentifierError::Format(format!(
            "ISSN {raw:?} must have 8 characters, found {}",
            chars.len()
        )));
    }
    let mut digits = [0u8; 7];
    for (i, c) in chars[..7].iter().enumerate() {
        digits[i] = c
            .to_digit(10)
            .ok_or_else(|| IdentifierError::Format(format!("ISSN {raw:?} has non-digit {c:?}")))?
            as u8;
    }
    let given = chars[7];
    if !(given.is_ascii_digit() || given == 'X') {
        return Err(IdentifierError::Format(format!(
            "ISSN {raw:?} has invalid check character {given:?}"
        )));
    }
    let expected = check_char(&digits);
    if given != expected {
        return Err(IdentifierError::Checksum {
            value: raw.trim().to_string(),
            expected,
            found: given,
        });
    }
    let s: String = chars.iter().collect();
    Ok(Issn(format!("{}-{}", &s[..4], &s[4..])))
}

impl FromStr for Issn {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_issn(s)
    }
}

impl fmt::Display for Issn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Issn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Issn({})", self.0)
    }
}

impl Serialize for Issn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Issn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        normalize_issn(&raw).map_err(serde::de::Error::custom)
    }
}
