//! Forward-chaining materialization of the supported OWL fragment.
//!
//! Rules:
//! - R1 sub-property: `s p o`, `p ⊑ q` ⇒ `s q o`
//! - R2 inverse: `s p o`, `p inverseOf q` ⇒ `o q s` (both directions)
//! - R3 symmetric: `s p o` ⇒ `o p s`
//! - R4 transitive: `a p b`, `b p c` ⇒ `a p c`
//! - R5 sub-class: `x type C`, `C ⊑ D` ⇒ `x type D`
//! - R6 domain/range: `s p o` ⇒ `s type domain(p)`, `o type range(p)`
//! - R7 defined class: every conjunct of `D` holds for `x` ⇒ `x type D`
//!
//! Evaluation is semi-naive: each round only joins the triples derived in
//! the previous round against the full graph. Derived triples become
//! visible in the round after they are produced, so every recorded
//! premise predates its conclusion.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, IdTriple, TermId};
use crate::schema::{Conjunct, SchemaAxioms};
use crate::term::{Term, Triple};
use crate::vocab::rdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    SubProperty,
    Inverse,
    Symmetric,
    Transitive,
    SubClass,
    DomainRange,
    DefinedClass,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::SubProperty,
        Rule::Inverse,
        Rule::Symmetric,
        Rule::Transitive,
        Rule::SubClass,
        Rule::DomainRange,
        Rule::DefinedClass,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::SubProperty => "R1",
            Rule::Inverse => "R2",
            Rule::Symmetric => "R3",
            Rule::Transitive => "R4",
            Rule::SubClass => "R5",
            Rule::DomainRange => "R6",
            Rule::DefinedClass => "R7",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Rule::SubProperty => "sub-property",
            Rule::Inverse => "inverse",
            Rule::Symmetric => "symmetric",
            Rule::Transitive => "transitive",
            Rule::SubClass => "sub-class",
            Rule::DomainRange => "domain/range",
            Rule::DefinedClass => "defined class",
        };
        write!(f, "{} ({name})", self.id())
    }
}

/// One inference step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Triple,
    pub rule: Rule,
    pub premises: Vec<Triple>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InferenceReport {
    pub asserted_count: usize,
    pub inferred_count: usize,
    pub iterations: usize,
    /// Members of every defined class after materialization.
    pub defined_class_memberships: BTreeMap<String, BTreeSet<Term>>,
}

#[derive(Debug, Clone)]
pub struct MaterializeOptions {
    /// Round cap; defaults to `10 * max(1, axioms.len())`.
    pub max_iterations: Option<usize>,
    /// Order in which rules are applied within a round.
    pub rule_order: Vec<Rule>,
    /// Keep the first derivation of each inferred triple.
    pub record_derivations: bool,
}

impl Default for MaterializeOptions {
    fn default() -> Self {
        MaterializeOptions {
            max_iterations: None,
            rule_order: Rule::ALL.to_vec(),
            record_derivations: false,
        }
    }
}

/// First derivation of each inferred triple, keyed by interned triple.
#[derive(Debug, Clone, Default)]
pub struct DerivationLog {
    steps: HashMap<IdTriple, (Rule, Vec<IdTriple>)>,
}

enum CompiledConjunct {
    Named(TermId),
    Some { property: TermId, filler: TermId },
    Has { property: TermId, value: TermId },
}

struct CompiledDefined {
    class: TermId,
    conjuncts: Vec<CompiledConjunct>,
}

struct Compiled {
    rdf_type: TermId,
    super_properties: HashMap<TermId, Vec<TermId>>,
    inverses: HashMap<TermId, Vec<TermId>>,
    symmetric: HashSet<TermId>,
    transitive: HashSet<TermId>,
    super_classes: HashMap<TermId, Vec<TermId>>,
    domains: HashMap<TermId, Vec<TermId>>,
    ranges: HashMap<TermId, Vec<TermId>>,
    defined: Vec<CompiledDefined>,
    /// filler class → properties whose someValuesFrom uses it
    filler_properties: HashMap<TermId, Vec<TermId>>,
}

impl Compiled {
    fn new(graph: &mut Graph, axioms: &SchemaAxioms) -> Self {
        let mut id = |iri: &str| graph.intern(&Term::iri(iri));
        let mut pairs = |set: &BTreeSet<(String, String)>, both: bool| {
            let mut map: HashMap<TermId, Vec<TermId>> = HashMap::new();
            for (a, b) in set {
                let (a, b) = (id(a), id(b));
                map.entry(a).or_default().push(b);
                if both {
                    map.entry(b).or_default().push(a);
                }
            }
            for v in map.values_mut() {
                v.sort();
                v.dedup();
            }
            map
        };
        let super_properties = pairs(&axioms.sub_property_of, false);
        let inverses = pairs(&axioms.inverse_of, true);
        let super_classes = pairs(&axioms.sub_class_of, false);
        let domains = pairs(&axioms.domains, false);
        let ranges = pairs(&axioms.ranges, false);
        let symmetric = axioms
            .symmetric
            .iter()
            .map(|p| graph.intern(&Term::iri(p)))
            .collect();
        let transitive = axioms
            .transitive
            .iter()
            .map(|p| graph.intern(&Term::iri(p)))
            .collect();
        let mut filler_properties: HashMap<TermId, Vec<TermId>> = HashMap::new();
        let defined = axioms
            .defined_classes
            .iter()
            .map(|d| CompiledDefined {
                class: graph.intern(&Term::iri(&d.class)),
                conjuncts: d
                    .conjuncts
                    .iter()
                    .map(|c| match c {
                        Conjunct::Named(class) => {
                            CompiledConjunct::Named(graph.intern(&Term::iri(class)))
                        }
                        Conjunct::SomeValuesFrom { property, filler } => {
                            let property = graph.intern(&Term::iri(property));
                            let filler = graph.intern(&Term::iri(filler));
                            filler_properties.entry(filler).or_default().push(property);
                            CompiledConjunct::Some { property, filler }
                        }
                        Conjunct::HasValue { property, value } => CompiledConjunct::Has {
                            property: graph.intern(&Term::iri(property)),
                            value: graph.intern(value),
                        },
                    })
                    .collect(),
            })
            .collect();
        Compiled {
            rdf_type: graph.intern(&Term::iri(rdf::TYPE)),
            super_properties,
            inverses,
            symmetric,
            transitive,
            super_classes,
            domains,
            ranges,
            defined,
            filler_properties,
        }
    }
}

/// New triples of one round, keeping the first derivation of each.
struct RoundOutput<'a> {
    graph: &'a Graph,
    found: Vec<IdTriple>,
    seen: HashSet<IdTriple>,
    derivations: Option<&'a mut DerivationLog>,
}

impl RoundOutput<'_> {
    fn emit(&mut self, triple: IdTriple, rule: Rule, premises: &[IdTriple]) {
        if self.graph.contains_ids(triple) || !self.seen.insert(triple) {
            return;
        }
        // Literals cannot be subjects.
        if self.graph.term(triple[0]).is_literal() {
            self.seen.remove(&triple);
            return;
        }
        self.found.push(triple);
        if let Some(log) = self.derivations.as_deref_mut() {
            log.steps.insert(triple, (rule, premises.to_vec()));
        }
    }
}

fn apply_rule(
    rule: Rule,
    c: &Compiled,
    graph: &Graph,
    delta: &[IdTriple],
    out: &mut RoundOutput<'_>,
) {
    match rule {
        Rule::SubProperty => {
            for &t @ [s, p, o] in delta {
                for &q in c.super_properties.get(&p).into_iter().flatten() {
                    out.emit([s, q, o], rule, &[t]);
                }
            }
        }
        Rule::Inverse => {
            for &t @ [s, p, o] in delta {
                for &q in c.inverses.get(&p).into_iter().flatten() {
                    out.emit([o, q, s], rule, &[t]);
                }
            }
        }
        Rule::Symmetric => {
            for &t @ [s, p, o] in delta {
                if c.symmetric.contains(&p) {
                    out.emit([o, p, s], rule, &[t]);
                }
            }
        }
        Rule::Transitive => {
            for &t @ [a, p, b] in delta {
                if !c.transitive.contains(&p) {
                    continue;
                }
                for right @ [_, _, z] in graph.match_ids(Some(b), Some(p), None) {
                    out.emit([a, p, z], rule, &[t, right]);
                }
                for left @ [z, _, _] in graph.match_ids(None, Some(p), Some(a)) {
                    out.emit([z, p, b], rule, &[left, t]);
                }
            }
        }
        Rule::SubClass => {
            for &t @ [x, p, class] in delta {
                if p != c.rdf_type {
                    continue;
                }
                for &sup in c.super_classes.get(&class).into_iter().flatten() {
                    out.emit([x, c.rdf_type, sup], rule, &[t]);
                }
            }
        }
        Rule::DomainRange => {
            for &t @ [s, p, o] in delta {
                for &d in c.domains.get(&p).into_iter().flatten() {
                    out.emit([s, c.rdf_type, d], rule, &[t]);
                }
                if graph.term(o).is_literal() {
                    continue;
                }
                for &r in c.ranges.get(&p).into_iter().flatten() {
                    out.emit([o, c.rdf_type, r], rule, &[t]);
                }
            }
        }
        Rule::DefinedClass => apply_defined(c, graph, delta, out),
    }
}

/// Membership of a defined class only depends on triples whose subject is
/// the individual and on the types of its fillers, so candidates are the
/// subjects touched by the delta plus the individuals pointing at a filler
/// whose type just changed.
fn apply_defined(c: &Compiled, graph: &Graph, delta: &[IdTriple], out: &mut RoundOutput<'_>) {
    if c.defined.is_empty() {
        return;
    }
    let mut candidates: BTreeSet<TermId> = BTreeSet::new();
    for &[s, p, o] in delta {
        candidates.insert(s);
        if p == c.rdf_type {
            for &prop in c.filler_properties.get(&o).into_iter().flatten() {
                candidates.extend(
                    graph
                        .match_ids(None, Some(prop), Some(s))
                        .map(|[x, _, _]| x),
                );
            }
        }
    }
    for x in candidates {
        for def in &c.defined {
            let conclusion = [x, c.rdf_type, def.class];
            if graph.contains_ids(conclusion) {
                continue;
            }
            if let Some(premises) = satisfies(c, graph, x, def) {
                out.emit(conclusion, Rule::DefinedClass, &premises);
            }
        }
    }
}

/// Witness triples when `x` satisfies every conjunct of `def`.
fn satisfies(
    c: &Compiled,
    graph: &Graph,
    x: TermId,
    def: &CompiledDefined,
) -> Option<Vec<IdTriple>> {
    let mut premises = Vec::new();
    for conjunct in &def.conjuncts {
        match *conjunct {
            CompiledConjunct::Named(class) => {
                let t = [x, c.rdf_type, class];
                if !graph.contains_ids(t) {
                    return None;
                }
                premises.push(t);
            }
            CompiledConjunct::Some { property, filler } => {
                let witness = graph
                    .match_ids(Some(x), Some(property), None)
                    .find(|&[_, _, y]| graph.contains_ids([y, c.rdf_type, filler]))?;
                premises.push(witness);
                premises.push([witness[2], c.rdf_type, filler]);
            }
            CompiledConjunct::Has { property, value } => {
                let t = [x, property, value];
                if !graph.contains_ids(t) {
                    return None;
                }
                premises.push(t);
            }
        }
    }
    Some(premises)
}

/// Materializes the closure of `graph` under the rule catalogue.
pub fn materialize(graph: &mut Graph, axioms: &SchemaAxioms) -> Result<InferenceReport> {
    materialize_with(graph, axioms, &MaterializeOptions::default()).map(|(report, _)| report)
}

pub fn materialize_with(
    graph: &mut Graph,
    axioms: &SchemaAxioms,
    options: &MaterializeOptions,
) -> Result<(InferenceReport, DerivationLog)> {
    let asserted_count = graph.len();
    let compiled = Compiled::new(graph, axioms);
    let cap = options.max_iterations.unwrap_or(10 * axioms.len().max(1));
    let mut log = DerivationLog::default();
    let mut delta: Vec<IdTriple> = graph.iter_ids().collect();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > cap {
            return Err(Error::Divergence { iterations: cap });
        }
        let found = {
            let mut out = RoundOutput {
                graph,
                found: Vec::new(),
                seen: HashSet::new(),
                derivations: options.record_derivations.then_some(&mut log),
            };
            for &rule in &options.rule_order {
                apply_rule(rule, &compiled, graph, &delta, &mut out);
            }
            out.found
        };
        if found.is_empty() {
            break;
        }
        for &t in &found {
            graph.insert_inferred_ids(t);
        }
        delta = found;
    }

    let mut memberships = BTreeMap::new();
    for def in &compiled.defined {
        let members: BTreeSet<Term> = graph
            .match_ids(None, Some(compiled.rdf_type), Some(def.class))
            .map(|[x, _, _]| graph.term(x).clone())
            .collect();
        memberships.insert(
            graph
                .term(def.class)
                .as_iri()
                .unwrap_or_default()
                .to_owned(),
            members,
        );
    }
    let report = InferenceReport {
        asserted_count,
        inferred_count: graph.len() - asserted_count,
        iterations,
        defined_class_memberships: memberships,
    };
    Ok((report, log))
}

/// Whether `triple` holds in the closure of `graph`.
pub fn is_entailed(graph: &Graph, axioms: &SchemaAxioms, triple: &Triple) -> Result<bool> {
    if graph.contains(triple) {
        return Ok(true);
    }
    let mut closure = graph.clone();
    materialize(&mut closure, axioms)?;
    Ok(closure.contains(triple))
}

/// Derivation chain grounding `triple` in asserted triples, premises before
/// conclusions. Asserted triples have an empty chain.
pub fn explain(graph: &Graph, axioms: &SchemaAxioms, triple: &Triple) -> Result<Vec<Derivation>> {
    if graph.contains(triple)
        && !graph
            .ids_of(triple)
            .is_some_and(|ids| graph.is_inferred_ids(ids))
    {
        return Ok(Vec::new());
    }
    // Re-derive from the asserted part so every step is recorded.
    let mut closure = Graph::new();
    for (t, origin) in graph.iter_with_origin() {
        if origin == crate::graph::Origin::Asserted {
            closure.insert(&t)?;
        }
    }
    let options = MaterializeOptions {
        record_derivations: true,
        ..MaterializeOptions::default()
    };
    let (_, log) = materialize_with(&mut closure, axioms, &options)?;
    let target = closure
        .ids_of(triple)
        .filter(|ids| closure.contains_ids(*ids))
        .ok_or_else(|| Error::NotEntailed(triple.to_string()))?;

    let mut chain = Vec::new();
    let mut done: HashSet<IdTriple> = HashSet::new();
    // Post-order walk: (triple, premises expanded?)
    let mut stack = vec![(target, false)];
    while let Some((t, expanded)) = stack.pop() {
        let Some((rule, premises)) = log.steps.get(&t) else {
            continue;
        };
        if done.contains(&t) {
            continue;
        }
        if expanded {
            done.insert(t);
            chain.push(Derivation {
                conclusion: closure.resolve_ids(t),
                rule: *rule,
                premises: premises.iter().map(|&p| closure.resolve_ids(p)).collect(),
            });
        } else {
            stack.push((t, true));
            for &p in premises.iter().rev() {
                if !done.contains(&p) {
                    stack.push((p, false));
                }
            }
        }
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::build_codo_vocabulary;
    use crate::vocab::codo;

    fn rel(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(Term::codo(s), Term::codo(p), Term::codo(o)).unwrap()
    }

    #[test]
    fn daughter_lifts_to_child_and_close_relationship() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        g.insert(&rel("p000001", "hasDaughter", "p000007")).unwrap();
        materialize(&mut g, &vocab.axioms).unwrap();
        assert!(g.contains(&rel("p000001", "hasChild", "p000007")));
        assert!(g.contains(&rel("p000001", "hasCloseRelationship", "p000007")));
        assert!(g.contains(&rel("p000007", "hasParent", "p000001")));
    }

    #[test]
    fn no_schema_relevant_triples_infers_nothing() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        g.insert(
            &Triple::new(
                Term::iri("http://x/a"),
                Term::iri("http://x/b"),
                Term::iri("http://x/c"),
            )
            .unwrap(),
        )
        .unwrap();
        let report = materialize(&mut g, &vocab.axioms).unwrap();
        assert_eq!(report.inferred_count, 0);
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn rematerializing_adds_nothing() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        g.insert(&rel("p000001", "hasDaughter", "p000007")).unwrap();
        materialize(&mut g, &vocab.axioms).unwrap();
        let again = materialize(&mut g, &vocab.axioms).unwrap();
        assert_eq!(again.inferred_count, 0);
    }

    #[test]
    fn transitive_chain_closes() {
        let mut axioms = SchemaAxioms::default();
        axioms.transitive.insert(codo("locatedIn"));
        let mut g = Graph::new();
        for (a, b) in [("a", "b"), ("b", "c"), ("c", "d")] {
            g.insert(&rel(a, "locatedIn", b)).unwrap();
        }
        materialize(&mut g, &axioms).unwrap();
        assert!(g.contains(&rel("a", "locatedIn", "d")));
        assert_eq!(g.len(), 6);
    }

    #[test]
    fn divergence_guard_trips_on_tiny_cap() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        g.insert(&rel("p000001", "hasDaughter", "p000007")).unwrap();
        let options = MaterializeOptions {
            max_iterations: Some(1),
            ..MaterializeOptions::default()
        };
        assert!(matches!(
            materialize_with(&mut g, &vocab.axioms, &options),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn inferred_triples_are_flagged() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        let asserted = rel("p000001", "hasDaughter", "p000007");
        g.insert(&asserted).unwrap();
        materialize(&mut g, &vocab.axioms).unwrap();
        assert_eq!(g.origin(&asserted), Some(crate::graph::Origin::Asserted));
        assert_eq!(
            g.origin(&rel("p000001", "hasChild", "p000007")),
            Some(crate::graph::Origin::Inferred)
        );
        assert_eq!(g.asserted_len(), 1);
    }

    #[test]
    fn explain_single_step() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        let asserted = rel("p000001", "hasDaughter", "p000007");
        g.insert(&asserted).unwrap();
        let chain = explain(&g, &vocab.axioms, &rel("p000001", "hasChild", "p000007")).unwrap();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0].rule, Rule::SubProperty);
        assert_eq!(chain[0].premises, vec![asserted.clone()]);
        assert!(explain(&g, &vocab.axioms, &asserted).unwrap().is_empty());
    }

    #[test]
    fn explain_unentailed_fails() {
        let vocab = build_codo_vocabulary();
        let g = Graph::new();
        let err = explain(&g, &vocab.axioms, &rel("a", "hasChild", "b")).unwrap_err();
        assert!(matches!(err, Error::NotEntailed(_)));
    }

    #[test]
    fn entailment_check() {
        let vocab = build_codo_vocabulary();
        let mut g = Graph::new();
        let asserted = rel("p000001", "hasDaughter", "p000007");
        g.insert(&asserted).unwrap();
        assert!(is_entailed(
            &g,
            &vocab.axioms,
            &rel("p000001", "hasCloseRelationship", "p000007")
        )
        .unwrap());
        assert!(is_entailed(&g, &vocab.axioms, &asserted).unwrap());
        assert!(!is_entailed(&g, &vocab.axioms, &rel("p000007", "hasChild", "p000001")).unwrap());
    }
}
