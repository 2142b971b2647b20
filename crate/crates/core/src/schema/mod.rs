//! Schema axioms: the structured view of a vocabulary graph consumed by the
//! reasoner and the mapper.

mod codo;
mod extract;
mod labels;

use std::collections::BTreeSet;

pub use codo::{build_codo_vocabulary, Vocabulary};
pub use extract::{extract_schema, SchemaExtraction};
pub use labels::{resolve_by_label, LabelIndex};

use crate::term::Term;

/// One conjunct of a defined class's intersection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Conjunct {
    Named(String),
    SomeValuesFrom { property: String, filler: String },
    HasValue { property: String, value: Term },
}

/// A class with necessary and sufficient membership conditions: an
/// individual satisfying every conjunct is a member.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DefinedClass {
    pub class: String,
    pub conjuncts: Vec<Conjunct>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaAxioms {
    pub classes: BTreeSet<String>,
    pub object_properties: BTreeSet<String>,
    pub data_properties: BTreeSet<String>,
    /// (sub, super)
    pub sub_class_of: BTreeSet<(String, String)>,
    /// (sub, super)
    pub sub_property_of: BTreeSet<(String, String)>,
    pub inverse_of: BTreeSet<(String, String)>,
    pub transitive: BTreeSet<String>,
    pub symmetric: BTreeSet<String>,
    /// (property, class)
    pub domains: BTreeSet<(String, String)>,
    /// (property, class or datatype)
    pub ranges: BTreeSet<(String, String)>,
    /// Sorted by class IRI.
    pub defined_classes: Vec<DefinedClass>,
}

impl SchemaAxioms {
    /// Number of logical axioms (declarations excluded).
    pub fn len(&self) -> usize {
        self.sub_class_of.len()
            + self.sub_property_of.len()
            + self.inverse_of.len()
            + self.transitive.len()
            + self.symmetric.len()
            + self.domains.len()
            + self.ranges.len()
            + self.defined_classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_property(&self, iri: &str) -> bool {
        self.object_properties.contains(iri) || self.data_properties.contains(iri)
    }

    pub fn ranges_of<'a>(&'a self, property: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.ranges
            .iter()
            .filter(move |(p, _)| p == property)
            .map(|(_, c)| c.as_str())
    }

    pub fn defined_class(&self, class: &str) -> Option<&DefinedClass> {
        self.defined_classes.iter().find(|d| d.class == class)
    }

    /// Direct super-properties of `property`.
    pub fn super_properties<'a>(&'a self, property: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.sub_property_of
            .iter()
            .filter(move |(s, _)| s == property)
            .map(|(_, q)| q.as_str())
    }
}
