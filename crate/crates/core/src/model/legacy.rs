use serde::Serialize;

use super::{GoldKind, OaClass};

/// Labels found in the wider Open Access discussion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LegacyName {
    Platinum,
    Diamond,
    Gray,
    Bronze,
    Transient,
    Guerilla,
    Black,
    RobinHood,
    Blue,
    Yellow,
    White,
    Hybrid,
    Delayed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LegacyLabel {
    pub name: LegacyName,
    pub mapping: Option<OaClass>,
    pub note: &'static str,
}

const COPYRIGHT_NOTE: &str =
    "freely accessible but infringes copyright; fails the lawfulness requirement and is never classified as Green";

/// Every legacy label with its place (if any) in the taxonomy.
pub fn legacy_lexicon() -> Vec<LegacyLabel> {
    use LegacyName::*;
    let gold = |k| Some(OaClass::Gold(k));
    vec![
        LegacyLabel {
            name: Hybrid,
            mapping: gold(GoldKind::HybridOa),
            note: "individual articles in subscription journals made immediately available after article processing charges have been paid",
        },
        LegacyLabel {
            name: Delayed,
            mapping: gold(GoldKind::DelayedOa),
            note: "moving wall: freely available after an embargo period, usually six to 24 months",
        },
        LegacyLabel {
            name: Platinum,
            mapping: gold(GoldKind::FullOa),
            note: "full OA journal with no publication fees; fee status out of scope",
        },
        LegacyLabel {
            name: Diamond,
            mapping: gold(GoldKind::FullOa),
            note: "full OA journal with no publication fees; fee status out of scope",
        },
        LegacyLabel {
            name: Gray,
            mapping: gold(GoldKind::FullOa),
            note: "full OA journal not covered by DOAJ; only detected when another full-OA registry lists it",
        },
        LegacyLabel {
            name: Bronze,
            mapping: None,
            note: "publisher-hosted access without any license for reuse; gold family with access mode gratis, no dedicated class",
        },
        LegacyLabel {
            name: Transient,
            mapping: None,
            note: "available only for a period of time; needs longitudinal observation and is not modeled",
        },
        LegacyLabel { name: Guerilla, mapping: None, note: COPYRIGHT_NOTE },
        LegacyLabel { name: Black, mapping: None, note: COPYRIGHT_NOTE },
        LegacyLabel { name: RobinHood, mapping: None, note: COPYRIGHT_NOTE },
        LegacyLabel {
            name: Blue,
            mapping: None,
            note: "publisher self-archiving policy allowing postprint deposit; actual deposits classify as Green postprint",
        },
        LegacyLabel {
            name: Yellow,
            mapping: None,
            note: "publisher self-archiving policy allowing preprint deposit; actual deposits classify as Green preprint",
        },
        LegacyLabel {
            name: White,
            mapping: None,
            note: "self-archiving not formally supported by publisher policy; a policy attribute, not an access class",
        },
    ]
}

pub fn lookup_legacy(name: LegacyName) -> LegacyLabel {
    legacy_lexicon()
        .into_iter()
        .find(|l| l.name == name)
        .expect("lexicon covers every legacy name")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn every_label_once() {
        let lex = legacy_lexicon();
        assert_eq!(lex.len(), 13);
        let names: HashSet<_> = lex.iter().map(|l| l.name).collect();
        assert_eq!(names.len(), 13);
    }

    #[test]
    fn key_mappings() {
        assert_eq!(lookup_legacy(LegacyName::Hybrid).mapping, Some(OaClass::Gold(GoldKind::HybridOa)));
        assert_eq!(lookup_legacy(LegacyName::Delayed).mapping, Some(OaClass::Gold(GoldKind::DelayedOa)));
        assert_eq!(lookup_legacy(LegacyName::Diamond).mapping, Some(OaClass::Gold(GoldKind::FullOa)));
        let black = lookup_legacy(LegacyName::Black);
        assert_eq!(black.mapping, None);
        assert!(black.note.contains("copyright"));
        for name in [LegacyName::Guerilla, LegacyName::RobinHood] {
            assert!(lookup_legacy(name).mapping.map_or(true, |c| !c.is_green()));
        }
        assert!(lookup_legacy(LegacyName::Bronze).note.contains("gratis"));
    }
}
