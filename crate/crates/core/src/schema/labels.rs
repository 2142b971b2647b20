use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::term::Term;
use crate::vocab::rdfs;

/// Label → entities carrying it, built from `rdfs:label` triples.
#[derive(Debug, Clone, Default)]
pub struct LabelIndex {
    by_label: HashMap<String, BTreeSet<Term>>,
}

impl LabelIndex {
    pub fn build(graph: &Graph) -> Self {
        let mut by_label: HashMap<String, BTreeSet<Term>> = HashMap::new();
        for t in graph.match_pattern(None, Some(&Term::iri(rdfs::LABEL)), None) {
            if let Term::Literal(lit) = &t.object {
                by_label
                    .entry(lit.lexical().to_owned())
                    .or_default()
                    .insert(t.subject);
            }
        }
        LabelIndex { by_label }
    }

    /// The unique entity labelled `label`.
    pub fn resolve(&self, label: &str) -> Result<Term> {
        let candidates = self.by_label.get(label).filter(|c| !c.is_empty());
        match candidates {
            None => Err(Error::UnknownLabel(label.to_owned())),
            Some(c) if c.len() == 1 => Ok(c.iter().next().expect("one candidate").clone()),
            Some(c) => Err(Error::AmbiguousLabel {
                label: label.to_owned(),
                candidates: c.iter().map(ToString::to_string).collect(),
            }),
        }
    }

    /// Like [`resolve`](Self::resolve) but only among `allowed` entities.
    pub fn resolve_among(&self, label: &str, allowed: impl Fn(&Term) -> bool) -> Result<Term> {
        let candidates: Vec<&Term> = self
            .by_label
            .get(label)
            .into_iter()
            .flatten()
            .filter(|t| allowed(t))
            .collect();
        match candidates.as_slice() {
            [] => Err(Error::UnknownLabel(label.to_owned())),
            [one] => Ok((*one).clone()),
            many => Err(Error::AmbiguousLabel {
                label: label.to_owned(),
                candidates: many.iter().map(ToString::to_string).collect(),
            }),
        }
    }
}

/// Resolves a human-readable label to the entity carrying it.
pub fn resolve_by_label(label: &str, graph: &Graph) -> Result<Term> {
    LabelIndex::build(graph).resolve(label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::build_codo_vocabulary;
    use crate::term::Triple;

    #[test]
    fn table_one_labels_resolve() {
        let v = build_codo_vocabulary();
        assert_eq!(
            resolve_by_label("diagnosed on", &v.graph).unwrap(),
            Term::codo("diagnosedOn")
        );
        assert_eq!(
            resolve_by_label("has gender", &v.graph).unwrap(),
            Term::codo("hasGender")
        );
    }

    #[test]
    fn missing_label_is_unknown() {
        let v = build_codo_vocabulary();
        assert!(matches!(
            resolve_by_label("no such label", &v.graph),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn duplicate_label_is_ambiguous() {
        let mut g = Graph::new();
        for local in ["a", "b"] {
            g.insert(
                &Triple::new(
                    Term::codo(local),
                    Term::iri(rdfs::LABEL),
                    Term::string("twin"),
                )
                .unwrap(),
            )
            .unwrap();
        }
        match resolve_by_label("twin", &g) {
            Err(Error::AmbiguousLabel { candidates, .. }) => assert_eq!(candidates.len(), 2),
            other => panic!("{other:?}"),
        }
    }
}
