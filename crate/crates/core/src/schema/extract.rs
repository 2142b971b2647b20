use std::collections::{BTreeMap, BTreeSet};

use super::{Conjunct, DefinedClass, SchemaAxioms};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::term::Term;
use crate::vocab::{owl, rdf, rdfs, OWL};

/// Axioms recovered from a graph plus the patterns that were seen but not
/// understood.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaExtraction {
    pub axioms: SchemaAxioms,
    pub warnings: Vec<String>,
}

/// OWL constructs outside the supported fragment. Their presence is
/// reported rather than silently ignored.
const UNSUPPORTED_PREDICATES: &[&str] = &[
    "unionOf",
    "complementOf",
    "oneOf",
    "allValuesFrom",
    "disjointWith",
    "propertyChainAxiom",
    "cardinality",
    "minCardinality",
    "maxCardinality",
    "qualifiedCardinality",
    "equivalentProperty",
    "sameAs",
    "differentFrom",
];

const UNSUPPORTED_TYPES: &[&str] = &[
    "FunctionalProperty",
    "InverseFunctionalProperty",
    "ReflexiveProperty",
    "IrreflexiveProperty",
    "AsymmetricProperty",
];

fn iri_pairs(
    graph: &Graph,
    predicate: &str,
    warnings: &mut Vec<String>,
) -> BTreeSet<(String, String)> {
    let mut pairs = BTreeSet::new();
    for t in graph.match_pattern(None, Some(&Term::iri(predicate)), None) {
        match (&t.subject, &t.object) {
            (Term::Iri(s), Term::Iri(o)) => {
                pairs.insert((s.clone(), o.clone()));
            }
            _ => warnings.push(format!("unrecognized axiom: {t}")),
        }
    }
    pairs
}

fn typed(graph: &Graph, class: &str) -> BTreeSet<String> {
    graph
        .match_pattern(None, Some(&Term::iri(rdf::TYPE)), Some(&Term::iri(class)))
        .filter_map(|t| t.subject.as_iri().map(str::to_owned))
        .collect()
}

fn single_object(graph: &Graph, subject: &Term, predicate: &str) -> Option<Term> {
    let mut objects = graph.match_pattern(Some(subject), Some(&Term::iri(predicate)), None);
    let first = objects.next()?;
    if objects.next().is_some() {
        return None;
    }
    Some(first.object)
}

fn read_list(graph: &Graph, head: &Term) -> Option<Vec<Term>> {
    let mut items = Vec::new();
    let mut cell = head.clone();
    let nil = Term::iri(rdf::NIL);
    let mut guard = 0;
    while cell != nil {
        items.push(single_object(graph, &cell, rdf::FIRST)?);
        cell = single_object(graph, &cell, rdf::REST)?;
        guard += 1;
        if guard > 10_000 {
            return None;
        }
    }
    Some(items)
}

fn read_conjunct(graph: &Graph, term: &Term) -> Option<Conjunct> {
    match term {
        Term::Iri(iri) => Some(Conjunct::Named(iri.clone())),
        Term::Blank(_) => {
            let property = single_object(graph, term, owl::ON_PROPERTY)?
                .as_iri()?
                .to_owned();
            if let Some(filler) = single_object(graph, term, owl::SOME_VALUES_FROM) {
                return Some(Conjunct::SomeValuesFrom {
                    property,
                    filler: filler.as_iri()?.to_owned(),
                });
            }
            let value = single_object(graph, term, owl::HAS_VALUE)?;
            value
                .is_literal()
                .then_some(Conjunct::HasValue { property, value })
        }
        Term::Literal(_) => None,
    }
}

/// Finds a cycle among non-reflexive edges, returned as a closed path.
fn find_cycle(edges: &BTreeSet<(String, String)>) -> Option<Vec<String>> {
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        if a != b {
            adjacency.entry(a).or_default().push(b);
        }
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    for &start in adjacency.keys() {
        if marks.contains_key(start) {
            continue;
        }
        // Iterative DFS with an explicit path stack.
        let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Active);
        while let Some((node, next)) = stack.last_mut() {
            let children = adjacency.get(*node).map(Vec::as_slice).unwrap_or(&[]);
            if let Some(&child) = children.get(*next) {
                *next += 1;
                match marks.get(child) {
                    Some(Mark::Active) => {
                        let pos = stack
                            .iter()
                            .position(|(n, _)| *n == child)
                            .expect("active node on stack");
                        let mut cycle: Vec<String> =
                            stack[pos..].iter().map(|(n, _)| n.to_string()).collect();
                        cycle.push(child.to_string());
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(child, Mark::Active);
                        stack.push((child, 0));
                    }
                }
            } else {
                marks.insert(*node, Mark::Done);
                stack.pop();
            }
        }
    }
    None
}

/// Reads the supported axiom patterns out of a vocabulary graph.
///
/// Recognized: `rdfs:subClassOf`, `rdfs:subPropertyOf`, `owl:inverseOf`,
/// `owl:TransitiveProperty`, `owl:SymmetricProperty`, `rdfs:domain`,
/// `rdfs:range`, and `owl:equivalentClass` to an `owl:intersectionOf` of
/// named classes, `someValuesFrom` and `hasValue` restrictions.
pub fn extract_schema(graph: &Graph) -> Result<SchemaExtraction> {
    let mut warnings = Vec::new();
    let mut axioms = SchemaAxioms {
        classes: typed(graph, owl::CLASS),
        object_properties: typed(graph, owl::OBJECT_PROPERTY),
        data_properties: typed(graph, owl::DATATYPE_PROPERTY),
        transitive: typed(graph, owl::TRANSITIVE_PROPERTY),
        symmetric: typed(graph, owl::SYMMETRIC_PROPERTY),
        ..SchemaAxioms::default()
    };
    // Characteristics imply object properties.
    let characteristic: Vec<String> = axioms
        .transitive
        .iter()
        .chain(&axioms.symmetric)
        .cloned()
        .collect();
    axioms.object_properties.extend(characteristic);

    axioms.sub_class_of = iri_pairs(graph, rdfs::SUB_CLASS_OF, &mut warnings);
    axioms.sub_property_of = iri_pairs(graph, rdfs::SUB_PROPERTY_OF, &mut warnings);
    axioms.inverse_of = iri_pairs(graph, owl::INVERSE_OF, &mut warnings);
    axioms.domains = iri_pairs(graph, rdfs::DOMAIN, &mut warnings);
    axioms.ranges = iri_pairs(graph, rdfs::RANGE, &mut warnings);
    axioms.sub_class_of.retain(|(a, b)| a != b);
    axioms.sub_property_of.retain(|(a, b)| a != b);

    if let Some(cycle) = find_cycle(&axioms.sub_class_of) {
        return Err(Error::SchemaCycle {
            relation: "subClassOf",
            cycle,
        });
    }
    if let Some(cycle) = find_cycle(&axioms.sub_property_of) {
        return Err(Error::SchemaCycle {
            relation: "subPropertyOf",
            cycle,
        });
    }

    for t in graph.match_pattern(None, Some(&Term::iri(owl::EQUIVALENT_CLASS)), None) {
        let Term::Iri(class) = &t.subject else {
            warnings.push(format!("unrecognized axiom: {t}"));
            continue;
        };
        let conjuncts = single_object(graph, &t.object, owl::INTERSECTION_OF)
            .and_then(|head| read_list(graph, &head))
            .and_then(|items| {
                items
                    .iter()
                    .map(|m| read_conjunct(graph, m))
                    .collect::<Option<Vec<_>>>()
            });
        match conjuncts {
            Some(conjuncts) if !conjuncts.is_empty() => {
                for conjunct in &conjuncts {
                    match conjunct {
                        Conjunct::SomeValuesFrom { property, .. }
                            if !axioms.object_properties.contains(property) =>
                        {
                            warnings.push(format!(
                                "someValuesFrom on non-object property <{property}> in <{class}>"
                            ))
                        }
                        Conjunct::HasValue { property, .. }
                            if !axioms.data_properties.contains(property) =>
                        {
                            warnings.push(format!(
                                "hasValue on non-data property <{property}> in <{class}>"
                            ))
                        }
                        _ => {}
                    }
                }
                axioms.defined_classes.push(DefinedClass {
                    class: class.clone(),
                    conjuncts,
                });
            }
            _ => warnings.push(format!("unrecognized class definition for <{class}>")),
        }
    }
    axioms.defined_classes.sort_by(|a, b| a.class.cmp(&b.class));

    for name in UNSUPPORTED_PREDICATES {
        let predicate = Term::iri(format!("{OWL}{name}"));
        let count = graph.match_pattern(None, Some(&predicate), None).count();
        if count > 0 {
            warnings.push(format!(
                "unsupported construct owl:{name} ({count} occurrences) ignored"
            ));
        }
    }
    for name in UNSUPPORTED_TYPES {
        let count = typed(graph, &format!("{OWL}{name}")).len();
        if count > 0 {
            warnings.push(format!(
                "unsupported characteristic owl:{name} ({count} properties) ignored"
            ));
        }
    }

    Ok(SchemaExtraction { axioms, warnings })
}
