//! Random RDF graphs for serialization round trips, and isomorphism
//! checking up to blank-node renaming.
#![allow(dead_code)]

use codo_core::vocab::{rdf, xsd};
use codo_core::{Graph, Term, Triple};
use proptest::collection::vec;
use proptest::prelude::*;

use super::gen::ex;
use super::oracle::Set;

pub fn subject() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..8usize).prop_map(|i| Term::iri(ex(&format!("s{i}")))),
        1 => (0..3usize).prop_map(|i| Term::blank(format!("b{i}"))),
        1 => Just(Term::iri("http://www.isibang.ac.in/ns/codo#p000001")),
    ]
}

pub fn predicate() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0..4usize).prop_map(|i| Term::iri(ex(&format!("p{i}")))),
        Just(Term::iri(rdf::TYPE)),
    ]
}

pub fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        subject(),
        "[ -~äé\u{1F600}\n\t\"\\\\]{0,12}".prop_map(Term::string),
        any::<bool>().prop_map(Term::boolean),
        (-1000i64..1000, 0u32..100)
            .prop_map(|(i, f)| Term::literal(format!("{i}.{f}"), xsd::DECIMAL)),
        (2020u32..2022, 1u32..13, 1u32..29).prop_map(|(y, m, d)| Term::literal(
            format!("{y}-{m:02}-{d:02}T00:00:00"),
            xsd::DATE_TIME
        )),
    ]
}

pub fn graph() -> impl Strategy<Value = Graph> {
    vec((subject(), predicate(), object()), 0..60).prop_map(|ts| {
        let mut g = Graph::new();
        for (s, p, o) in ts {
            g.insert(&Triple::new(s, p, o).unwrap()).unwrap();
        }
        g
    })
}

pub fn blanks(set: &Set) -> Vec<Term> {
    let mut out: Vec<Term> = set
        .iter()
        .flat_map(|t| [t.subject.clone(), t.object.clone()])
        .filter(|t| matches!(t, Term::Blank(_)))
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Equality up to a renaming of blank nodes, by trying every bijection.
pub fn isomorphic(a: &Set, b: &Set) -> bool {
    let (ba, bb) = (blanks(a), blanks(b));
    if ba.len() != bb.len() || a.len() != b.len() {
        return false;
    }
    permutations(ba.len()).into_iter().any(|perm| {
        let rename = |t: &Term| match ba.iter().position(|x| x == t) {
            Some(i) => bb[perm[i]].clone(),
            None => t.clone(),
        };
        let mapped: Set = a
            .iter()
            .map(|t| Triple {
                subject: rename(&t.subject),
                predicate: t.predicate.clone(),
                object: rename(&t.object),
            })
            .collect();
        &mapped == b
    })
}
