//! Random schemas and instance graphs for property tests.
#![allow(dead_code)]

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

use codo_core::schema::{Conjunct, DefinedClass, SchemaAxioms};
use codo_core::vocab::rdf;
use codo_core::{Term, Triple};

use super::oracle::Set;

pub const NS: &str = "http://example.org/t#";
const PROPS: usize = 5;
const CLASSES: usize = 4;

pub fn ex(local: &str) -> String {
    format!("{NS}{local}")
}

fn prop(i: usize) -> String {
    ex(&format!("p{i}"))
}

fn class(i: usize) -> String {
    ex(&format!("c{i}"))
}

fn defined(i: usize) -> String {
    ex(&format!("d{i}"))
}

pub fn flag() -> String {
    ex("flag")
}

pub fn individual(i: usize) -> Term {
    Term::iri(ex(&format!("i{i}")))
}

fn upper_pairs(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    btree_set((0..n, 0..n), 0..=n * 2).prop_map(|s| s.into_iter().filter(|(a, b)| a < b).collect())
}

fn conjunct() -> impl Strategy<Value = Conjunct> {
    prop_oneof![
        (0..CLASSES).prop_map(|c| Conjunct::Named(class(c))),
        (0..PROPS, 0..CLASSES + 1).prop_map(|(p, f)| Conjunct::SomeValuesFrom {
            property: prop(p),
            // filler index CLASSES stands for the first defined class
            filler: if f == CLASSES { defined(0) } else { class(f) },
        }),
        any::<bool>().prop_map(|b| Conjunct::HasValue {
            property: flag(),
            value: Term::boolean(b)
        }),
    ]
}

/// Acyclic random schema over five object properties, one boolean data
/// property, four named classes and two defined classes (the second may
/// use the first as a filler).
pub fn schema() -> impl Strategy<Value = SchemaAxioms> {
    (
        upper_pairs(PROPS),
        vec((0..PROPS, 0..PROPS), 0..3),
        btree_set(0..PROPS, 0..3),
        btree_set(0..PROPS, 0..2),
        upper_pairs(CLASSES),
        vec((0..PROPS + 1, 0..CLASSES), 0..4),
        vec((0..PROPS, 0..CLASSES), 0..4),
        vec(conjunct(), 1..3),
        vec(conjunct(), 1..4),
    )
        .prop_map(|(sub_p, inv, sym, trans, sub_c, doms, rans, d0, d1)| {
            let mut ax = SchemaAxioms::default();
            ax.object_properties = (0..PROPS).map(prop).collect();
            ax.data_properties.insert(flag());
            ax.classes = (0..CLASSES).map(class).chain((0..2).map(defined)).collect();
            ax.sub_property_of = sub_p.into_iter().map(|(a, b)| (prop(a), prop(b))).collect();
            ax.inverse_of = inv.into_iter().map(|(a, b)| (prop(a), prop(b))).collect();
            ax.symmetric = sym.into_iter().map(prop).collect();
            ax.transitive = trans.into_iter().map(prop).collect();
            ax.sub_class_of = sub_c
                .into_iter()
                .map(|(a, b)| (class(a), class(b)))
                .collect();
            ax.domains = doms
                .into_iter()
                .map(|(p, c)| (if p == PROPS { flag() } else { prop(p) }, class(c)))
                .collect();
            ax.ranges = rans.into_iter().map(|(p, c)| (prop(p), class(c))).collect();
            let d0 = d0.into_iter().filter(
                |c| !matches!(c, Conjunct::SomeValuesFrom { filler, .. } if *filler == defined(0)),
            );
            ax.defined_classes = vec![
                DefinedClass {
                    class: defined(0),
                    conjuncts: d0.collect(),
                },
                DefinedClass {
                    class: defined(1),
                    conjuncts: d1,
                },
            ];
            ax.defined_classes.retain(|d| !d.conjuncts.is_empty());
            ax
        })
}

/// Up to `max_individuals` individuals linked by random object-property
/// edges, typed with random classes and carrying random flags.
pub fn instance(max_individuals: usize) -> impl Strategy<Value = Set> {
    (1..=max_individuals).prop_flat_map(|n| {
        (
            vec((0..n, 0..PROPS, 0..n), 0..=2 * n),
            vec((0..n, 0..CLASSES), 0..=n),
            vec((0..n, any::<bool>()), 0..=n),
        )
            .prop_map(|(edges, types, flags)| {
                let mut set = Set::new();
                for (s, p, o) in edges {
                    set.insert(
                        Triple::new(individual(s), Term::iri(prop(p)), individual(o)).unwrap(),
                    );
                }
                for (x, c) in types {
                    set.insert(
                        Triple::new(individual(x), Term::iri(rdf::TYPE), Term::iri(class(c)))
                            .unwrap(),
                    );
                }
                for (x, b) in flags {
                    set.insert(
                        Triple::new(individual(x), Term::iri(flag()), Term::boolean(b)).unwrap(),
                    );
                }
                set
            })
    })
}

/// Sub-property-only schema: a random DAG over `n` properties, made
/// acyclic by ranking the properties with a random permutation.
pub fn sub_property_dag(n: usize) -> impl Strategy<Value = SchemaAxioms> {
    (
        Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        btree_set((0..n, 0..n), 0..=2 * n),
    )
        .prop_map(move |(rank, edges)| {
            let mut ax = SchemaAxioms::default();
            ax.object_properties = (0..n).map(prop).collect();
            ax.sub_property_of = edges
                .into_iter()
                .filter(|(a, b)| rank[*a] < rank[*b])
                .map(|(a, b)| (prop(a), prop(b)))
                .collect();
            ax
        })
}

pub fn edges_over(n_props: usize, max_individuals: usize) -> impl Strategy<Value = Set> {
    vec((0..max_individuals, 0..n_props, 0..max_individuals), 1..40).prop_map(|edges| {
        edges
            .into_iter()
            .map(|(s, p, o)| Triple::new(individual(s), Term::iri(prop(p)), individual(o)).unwrap())
            .collect()
    })
}
