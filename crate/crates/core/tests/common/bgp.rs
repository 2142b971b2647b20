//! Random basic graph patterns and the exhaustive-assignment oracle.
#![allow(dead_code)]

use std::collections::BTreeSet;

use codo_core::vocab::xsd;
use codo_core::{Graph, Term, Triple};
use proptest::collection::vec;
use proptest::prelude::*;

use super::gen::ex;

pub const VARS: [&str; 3] = ["a", "b", "c"];

pub fn entity(i: usize) -> Term {
    Term::iri(ex(&format!("e{i}")))
}

pub fn predicate(i: usize) -> Term {
    Term::iri(ex(&format!("q{i}")))
}

pub fn object(i: usize) -> Term {
    match i {
        0..=5 => entity(i),
        6 => Term::string("x"),
        7 => Term::boolean(true),
        _ => Term::literal("3", xsd::DECIMAL),
    }
}

pub fn graph() -> impl Strategy<Value = Graph> {
    vec((0..6usize, 0..3usize, 0..9usize), 0..=200).prop_map(|ts| {
        let mut g = Graph::new();
        for (s, p, o) in ts {
            g.insert(&Triple::new(entity(s), predicate(p), object(o)).unwrap())
                .unwrap();
        }
        g
    })
}

#[derive(Debug, Clone)]
pub enum Slot {
    Var(usize),
    Const(Term),
}

impl Slot {
    fn render(&self) -> String {
        match self {
            Slot::Var(v) => format!("?{}", VARS[*v]),
            Slot::Const(Term::Iri(i)) => format!("<{i}>"),
            Slot::Const(Term::Literal(l)) if l.datatype() == xsd::BOOLEAN => l.lexical().to_owned(),
            Slot::Const(Term::Literal(l)) if l.datatype() == xsd::DECIMAL => l.lexical().to_owned(),
            Slot::Const(Term::Literal(l)) => format!("\"{}\"", l.lexical()),
            Slot::Const(t) => unreachable!("{t}"),
        }
    }
}

pub fn slot(constant: impl Strategy<Value = Term>) -> impl Strategy<Value = Slot> {
    prop_oneof![3 => (0..3usize).prop_map(Slot::Var), 1 => constant.prop_map(Slot::Const)]
}

pub type Pattern = [Slot; 3];

pub fn bgp() -> impl Strategy<Value = Vec<Pattern>> {
    vec(
        (
            slot((0..6usize).prop_map(entity)),
            slot((0..3usize).prop_map(predicate)),
            slot((0..9usize).prop_map(object)),
        )
            .prop_map(|(s, p, o)| [s, p, o]),
        1..=3,
    )
}

pub fn vars_of(patterns: &[Pattern]) -> Vec<usize> {
    let mut seen = Vec::new();
    for slot in patterns.iter().flatten() {
        if let Slot::Var(v) = slot {
            if !seen.contains(v) {
                seen.push(*v);
            }
        }
    }
    seen
}

pub fn where_clause(patterns: &[Pattern]) -> String {
    let body: Vec<String> = patterns
        .iter()
        .map(|p| format!("{} {} {} .", p[0].render(), p[1].render(), p[2].render()))
        .collect();
    format!("WHERE {{ {} }}", body.join(" "))
}

/// Every assignment of the pattern variables to graph terms under which
/// all patterns hold, as rows in the order of `vars`.
pub fn brute_force(patterns: &[Pattern], vars: &[usize], g: &Graph) -> BTreeSet<Vec<Term>> {
    let universe: BTreeSet<Term> = g
        .iter()
        .flat_map(|t| [t.subject, t.predicate, t.object])
        .collect();
    let universe: Vec<Term> = universe.into_iter().collect();
    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; vars.len()];
    if !vars.is_empty() && universe.is_empty() {
        return out;
    }
    loop {
        let value = |slot: &Slot| match slot {
            Slot::Var(v) => universe[choice[vars.iter().position(|x| x == v).unwrap()]].clone(),
            Slot::Const(t) => t.clone(),
        };
        let all = patterns.iter().all(|p| {
            Triple::new(value(&p[0]), value(&p[1]), value(&p[2])).is_ok_and(|t| g.contains(&t))
        });
        if all {
            out.insert(choice.iter().map(|&i| universe[i].clone()).collect());
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < universe.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

pub fn bound(rows: &[Vec<Option<Term>>]) -> Vec<Vec<Term>> {
    rows.iter()
        .map(|r| r.iter().map(|t| t.clone().expect("bound")).collect())
        .collect()
}
