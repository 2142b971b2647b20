//! Naive reference semantics: every rule re-applied to the whole triple set
//! until nothing changes. Deliberately shares no code with the reasoner.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use codo_core::reasoner::Rule;
use codo_core::schema::{Conjunct, SchemaAxioms};
use codo_core::vocab::rdf;
use codo_core::{Term, Triple};

pub type Set = BTreeSet<Triple>;

fn triple(s: &Term, p: &str, o: &Term) -> Triple {
    Triple {
        subject: s.clone(),
        predicate: Term::iri(p),
        object: o.clone(),
    }
}

fn iri(t: &Term) -> &str {
    t.as_iri().unwrap_or("")
}

fn related<'a>(
    pairs: &'a BTreeSet<(String, String)>,
    key: &'a str,
) -> impl Iterator<Item = &'a str> + 'a {
    pairs
        .iter()
        .filter(move |(a, _)| a == key)
        .map(|(_, b)| b.as_str())
}

/// Whether `x` satisfies every conjunct of `class` within `set`.
pub fn holds(set: &Set, axioms: &SchemaAxioms, x: &Term, class: &str) -> bool {
    let def = axioms
        .defined_classes
        .iter()
        .find(|d| d.class == class)
        .expect("defined class");
    def.conjuncts.iter().all(|c| match c {
        Conjunct::Named(c) => set.contains(&triple(x, rdf::TYPE, &Term::iri(c))),
        Conjunct::SomeValuesFrom { property, filler } => set.iter().any(|t| {
            &t.subject == x
                && iri(&t.predicate) == property
                && set.contains(&triple(&t.object, rdf::TYPE, &Term::iri(filler)))
        }),
        Conjunct::HasValue { property, value } => set.contains(&triple(x, property, value)),
    })
}

/// Everything `rule` derives in one application over `set`.
pub fn fire(rule: Rule, set: &Set, ax: &SchemaAxioms) -> Set {
    let mut out = Set::new();
    match rule {
        Rule::SubProperty => {
            for t in set {
                for q in related(&ax.sub_property_of, iri(&t.predicate)) {
                    out.insert(triple(&t.subject, q, &t.object));
                }
            }
        }
        Rule::Inverse => {
            for t in set {
                let p = iri(&t.predicate);
                for (a, b) in &ax.inverse_of {
                    if a == p {
                        out.insert(triple(&t.object, b, &t.subject));
                    }
                    if b == p {
                        out.insert(triple(&t.object, a, &t.subject));
                    }
                }
            }
        }
        Rule::Symmetric => {
            for t in set {
                if ax.symmetric.contains(iri(&t.predicate)) {
                    out.insert(triple(&t.object, iri(&t.predicate), &t.subject));
                }
            }
        }
        Rule::Transitive => {
            for a in set {
                if !ax.transitive.contains(iri(&a.predicate)) {
                    continue;
                }
                for b in set {
                    if b.predicate == a.predicate && b.subject == a.object {
                        out.insert(triple(&a.subject, iri(&a.predicate), &b.object));
                    }
                }
            }
        }
        Rule::SubClass => {
            for t in set {
                if iri(&t.predicate) == rdf::TYPE {
                    for sup in related(&ax.sub_class_of, iri(&t.object)) {
                        out.insert(triple(&t.subject, rdf::TYPE, &Term::iri(sup)));
                    }
                }
            }
        }
        Rule::DomainRange => {
            for t in set {
                for d in related(&ax.domains, iri(&t.predicate)) {
                    out.insert(triple(&t.subject, rdf::TYPE, &Term::iri(d)));
                }
                for r in related(&ax.ranges, iri(&t.predicate)) {
                    out.insert(triple(&t.object, rdf::TYPE, &Term::iri(r)));
                }
            }
        }
        Rule::DefinedClass => {
            let subjects: BTreeSet<&Term> = set.iter().map(|t| &t.subject).collect();
            for x in subjects {
                for def in &ax.defined_classes {
                    if holds(set, ax, x, &def.class) {
                        out.insert(triple(x, rdf::TYPE, &Term::iri(&def.class)));
                    }
                }
            }
        }
    }
    out.retain(|t| !t.subject.is_literal());
    out
}

pub fn naive_closure(asserted: &Set, ax: &SchemaAxioms) -> Set {
    let mut set = asserted.clone();
    loop {
        let mut new = Set::new();
        for rule in Rule::ALL {
            new.extend(
                fire(rule, &set, ax)
                    .into_iter()
                    .filter(|t| !set.contains(t)),
            );
        }
        if new.is_empty() {
            return set;
        }
        set.extend(new);
    }
}

/// Reflexive-transitive closure of the sub-property relation above `p`,
/// by breadth-first reachability.
pub fn super_closure(ax: &SchemaAxioms, p: &str) -> BTreeSet<String> {
    let mut edges: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in &ax.sub_property_of {
        edges.entry(a).or_default().push(b);
    }
    let mut seen = BTreeSet::from([p.to_owned()]);
    let mut queue = VecDeque::from([p.to_owned()]);
    while let Some(x) = queue.pop_front() {
        for &y in edges.get(x.as_str()).into_iter().flatten() {
            if seen.insert(y.to_owned()) {
                queue.push_back(y.to_owned());
            }
        }
    }
    seen
}
