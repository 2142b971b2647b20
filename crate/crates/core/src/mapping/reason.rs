//! Classification of the free-text "Cluster" and "Reason" cells.

use crate::vocab::codo;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReasonParse {
    /// `From X/Y`: places in path order.
    Travel(Vec<String>),
    /// A kinship or contact word; carries the relationship property IRI.
    Relationship(String),
    Opaque(String),
}

/// Keyword → relationship property local name. Matching is on whole,
/// case-insensitive cell text after trimming.
const KINSHIP: &[(&[&str], &str)] = &[
    (&["spouse", "wife", "husband"], "hasSpouse"),
    (&["daughter"], "hasDaughter"),
    (&["son"], "hasSon"),
    (&["child"], "hasChild"),
    (&["father", "mother", "parent"], "hasParent"),
    (&["co-worker", "coworker", "colleague"], "hasCoWorker"),
    (&["roommate", "room-mate"], "hasRoommate"),
    (&["aunt", "uncle"], "hasAuntOrUncle"),
    (&["niece", "nephew"], "hasNieceOrNephew"),
];

pub fn normalize_reason_cell(text: &str) -> ReasonParse {
    let trimmed = text.trim();
    if let Some(rest) = strip_prefix_ignore_case(trimmed, "from ") {
        let places: Vec<String> = rest
            .split('/')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
            .collect();
        if !places.is_empty() {
            return ReasonParse::Travel(places);
        }
    }
    let lower = trimmed.to_lowercase();
    for (words, property) in KINSHIP {
        if words.contains(&lower.as_str()) {
            return ReasonParse::Relationship(codo(property));
        }
    }
    ReasonParse::Opaque(trimmed.to_owned())
}

fn strip_prefix_ignore_case<'a>(text: &'a str, prefix: &str) -> Option<&'a str> {
    let head = text.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix)
        .then(|| &text[prefix.len()..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn travel_path_is_split() {
        assert_eq!(
            normalize_reason_cell("From Middle East/Saudi Arabia"),
            ReasonParse::Travel(vec!["Middle East".into(), "Saudi Arabia".into()])
        );
        assert_eq!(
            normalize_reason_cell("From USA"),
            ReasonParse::Travel(vec!["USA".into()])
        );
    }

    #[test]
    fn kinship_words() {
        assert_eq!(
            normalize_reason_cell("Spouse"),
            ReasonParse::Relationship(codo("hasSpouse"))
        );
        assert_eq!(
            normalize_reason_cell(" daughter "),
            ReasonParse::Relationship(codo("hasDaughter"))
        );
        assert_eq!(
            normalize_reason_cell("Co-worker"),
            ReasonParse::Relationship(codo("hasCoWorker"))
        );
    }

    #[test]
    fn everything_else_is_opaque() {
        assert_eq!(
            normalize_reason_cell(""),
            ReasonParse::Opaque(String::new())
        );
        assert_eq!(
            normalize_reason_cell("Texas US"),
            ReasonParse::Opaque("Texas US".into())
        );
        assert_eq!(
            normalize_reason_cell("From"),
            ReasonParse::Opaque("From".into())
        );
    }
}
