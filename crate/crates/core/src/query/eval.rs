//! Query evaluation: index-backed nested-loop join over the basic graph
//! pattern, then filtering, grouping, ordering and slicing.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use chrono::{DateTime, FixedOffset};

use super::ast::{CompareOp, Expr, PatternTerm, Projection, QueryAst};
use super::results::{compare_rows, compare_terms, SolutionTable};
use crate::error::Result;
use crate::graph::{Graph, TermId};
use crate::term::{LiteralValue, Term};
use crate::vocab::xsd;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinOrder {
    /// Most-bound pattern first.
    Greedy,
    /// Patterns in the order written.
    AsWritten,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalDiagnostics {
    /// Rows rejected because a filter raised a type error.
    pub filter_errors: usize,
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Const(TermId),
    Var(usize),
}

type Binding = Vec<Option<TermId>>;

struct Plan<'a> {
    patterns: Vec<[Slot; 3]>,
    /// Filters checked once the pattern at the same index has been matched.
    filters_at: Vec<Vec<&'a Expr>>,
    /// Filters that can be checked before any pattern.
    initial_filters: Vec<&'a Expr>,
}

struct Evaluator<'a> {
    graph: &'a Graph,
    vars: Vec<String>,
    index: HashMap<String, usize>,
    diagnostics: EvalDiagnostics,
}

/// Result of evaluating an expression. Booleans produced by operators are
/// kept apart from terms.
#[derive(Debug, Clone, Copy)]
enum Val<'a> {
    Term(&'a Term),
    Bool(bool),
}

/// Type error marker; the enclosing filter rejects the row.
#[derive(Debug)]
struct TypeError;

type Eval<T> = std::result::Result<T, TypeError>;

#[derive(Debug, PartialEq, PartialOrd)]
enum Comparable<'a> {
    Number(f64),
    DateTime(DateTime<FixedOffset>),
    Boolean(bool),
    String(&'a str),
}

fn comparable<'a>(v: Val<'a>) -> Option<Comparable<'a>> {
    match v {
        Val::Bool(b) => Some(Comparable::Boolean(b)),
        Val::Term(Term::Literal(l)) => match l.value()? {
            LiteralValue::Number(n) => Some(Comparable::Number(n)),
            LiteralValue::DateTime(d) => Some(Comparable::DateTime(d)),
            LiteralValue::Boolean(b) => Some(Comparable::Boolean(b)),
            LiteralValue::String(s) => Some(Comparable::String(s)),
        },
        Val::Term(_) => None,
    }
}

fn same_kind(a: &Comparable<'_>, b: &Comparable<'_>) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

fn compare(op: CompareOp, a: Val<'_>, b: Val<'_>) -> Eval<bool> {
    if matches!(op, CompareOp::Eq | CompareOp::Ne) {
        let equal = match (a, b) {
            (Val::Term(x @ (Term::Iri(_) | Term::Blank(_))), Val::Term(y))
            | (Val::Term(y), Val::Term(x @ (Term::Iri(_) | Term::Blank(_)))) => x == y,
            _ => match (comparable(a), comparable(b)) {
                (Some(x), Some(y)) if same_kind(&x, &y) => x == y,
                _ => match (a, b) {
                    // Identical literals of an unsupported datatype.
                    (Val::Term(x), Val::Term(y)) if x == y => true,
                    _ => return Err(TypeError),
                },
            },
        };
        return Ok(if op == CompareOp::Eq { equal } else { !equal });
    }
    let (Some(x), Some(y)) = (comparable(a), comparable(b)) else {
        return Err(TypeError);
    };
    if !same_kind(&x, &y) {
        return Err(TypeError);
    }
    let ord = x.partial_cmp(&y).ok_or(TypeError)?;
    Ok(match op {
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
        CompareOp::Eq | CompareOp::Ne => unreachable!("handled above"),
    })
}

/// Effective boolean value.
fn ebv(v: Val<'_>) -> Eval<bool> {
    match comparable(v) {
        Some(Comparable::Boolean(b)) => Ok(b),
        Some(Comparable::Number(n)) => Ok(n != 0.0 && !n.is_nan()),
        Some(Comparable::String(s)) => Ok(!s.is_empty()),
        _ => Err(TypeError),
    }
}

fn eval<'a>(e: &'a Expr, lookup: &dyn Fn(&str) -> Option<&'a Term>) -> Eval<Val<'a>> {
    match e {
        Expr::Var(v) => lookup(v).map(Val::Term).ok_or(TypeError),
        Expr::Const(t) => Ok(Val::Term(t)),
        Expr::Compare(op, a, b) => Ok(Val::Bool(compare(*op, eval(a, lookup)?, eval(b, lookup)?)?)),
        Expr::Not(a) => Ok(Val::Bool(!ebv(eval(a, lookup)?)?)),
        // Three-valued logic: an error is absorbed by a decisive operand.
        Expr::And(a, b) => {
            let x = eval(a, lookup).and_then(ebv);
            let y = eval(b, lookup).and_then(ebv);
            match (x, y) {
                (Ok(false), _) | (_, Ok(false)) => Ok(Val::Bool(false)),
                (Ok(true), Ok(true)) => Ok(Val::Bool(true)),
                _ => Err(TypeError),
            }
        }
        Expr::Or(a, b) => {
            let x = eval(a, lookup).and_then(ebv);
            let y = eval(b, lookup).and_then(ebv);
            match (x, y) {
                (Ok(true), _) | (_, Ok(true)) => Ok(Val::Bool(true)),
                (Ok(false), Ok(false)) => Ok(Val::Bool(false)),
                _ => Err(TypeError),
            }
        }
    }
}

fn val_term(v: Val<'_>) -> Term {
    match v {
        Val::Term(t) => t.clone(),
        Val::Bool(b) => Term::boolean(b),
    }
}

impl<'a> Evaluator<'a> {
    fn new(graph: &'a Graph, ast: &QueryAst) -> Self {
        let mut vars = Vec::new();
        let mut index = HashMap::new();
        for p in &ast.patterns {
            for v in p.positions().into_iter().filter_map(PatternTerm::var) {
                if !index.contains_key(v) {
                    index.insert(v.to_owned(), vars.len());
                    vars.push(v.to_owned());
                }
            }
        }
        Evaluator {
            graph,
            vars,
            index,
            diagnostics: EvalDiagnostics::default(),
        }
    }

    /// Compiles and orders the patterns. `None` when a constant does not
    /// occur in the graph, so nothing can match.
    fn plan<'q>(&self, ast: &'q QueryAst, order: JoinOrder) -> Option<Plan<'q>> {
        let mut compiled = Vec::with_capacity(ast.patterns.len());
        for p in &ast.patterns {
            let mut slots = [Slot::Var(0); 3];
            for (slot, pos) in slots.iter_mut().zip(p.positions()) {
                *slot = match pos {
                    PatternTerm::Var(v) => Slot::Var(self.index[v]),
                    PatternTerm::Term(t) => Slot::Const(self.graph.lookup(t)?),
                };
            }
            compiled.push(slots);
        }
        let ordered = match order {
            JoinOrder::AsWritten => compiled,
            JoinOrder::Greedy => {
                let mut bound = vec![false; self.vars.len()];
                let mut remaining = compiled;
                let mut ordered = Vec::with_capacity(remaining.len());
                while !remaining.is_empty() {
                    let score = |slots: &[Slot; 3]| {
                        slots
                            .iter()
                            .filter(|s| {
                                matches!(s, Slot::Const(_))
                                    || matches!(s, Slot::Var(v) if bound[*v])
                            })
                            .count()
                    };
                    // Highest score wins; ties keep the written order.
                    let best = (0..remaining.len())
                        .rev()
                        .max_by_key(|&i| score(&remaining[i]))
                        .expect("non-empty");
                    let slots = remaining.remove(best);
                    for s in slots {
                        if let Slot::Var(v) = s {
                            bound[v] = true;
                        }
                    }
                    ordered.push(slots);
                }
                ordered
            }
        };

        // Attach each filter to the first depth where its variables are bound.
        let mut filters_at = vec![Vec::new(); ordered.len()];
        let mut initial_filters = Vec::new();
        let mut bound_at: HashMap<usize, usize> = HashMap::new();
        for (depth, slots) in ordered.iter().enumerate() {
            for s in slots {
                if let Slot::Var(v) = s {
                    bound_at.entry(*v).or_insert(depth);
                }
            }
        }
        for f in &ast.filters {
            let mut names = BTreeSet::new();
            f.vars(&mut names);
            let depth = names
                .iter()
                .map(|n| self.index.get(n).and_then(|i| bound_at.get(i)).copied())
                .try_fold(None::<usize>, |acc, d| {
                    d.map(|d| Some(acc.map_or(d, |a: usize| a.max(d))))
                });
            match depth {
                Some(Some(d)) => filters_at[d].push(f),
                // Only constants.
                Some(None) if ordered.is_empty() => initial_filters.push(f),
                Some(None) => filters_at[0].push(f),
                // An unbound variable: evaluated last, where it errors.
                None if ordered.is_empty() => initial_filters.push(f),
                None => filters_at[ordered.len() - 1].push(f),
            }
        }
        Some(Plan {
            patterns: ordered,
            filters_at,
            initial_filters,
        })
    }

    fn passes(&mut self, filters: &[&Expr], binding: &Binding) -> bool {
        let graph = self.graph;
        let index = &self.index;
        let lookup = |name: &str| {
            index
                .get(name)
                .and_then(|&i| binding[i])
                .map(|id| graph.term(id))
        };
        for f in filters {
            match eval(f, &lookup).and_then(ebv) {
                Ok(true) => {}
                Ok(false) => return false,
                Err(TypeError) => {
                    self.diagnostics.filter_errors += 1;
                    return false;
                }
            }
        }
        true
    }

    fn join(
        &mut self,
        plan: &Plan<'_>,
        depth: usize,
        binding: &mut Binding,
        out: &mut Vec<Binding>,
    ) {
        if depth == plan.patterns.len() {
            out.push(binding.clone());
            return;
        }
        let slots = plan.patterns[depth];
        let resolve = |s: Slot, b: &Binding| match s {
            Slot::Const(id) => Some(id),
            Slot::Var(v) => b[v],
        };
        let [s, p, o] = slots.map(|s| resolve(s, binding));
        let matches: Vec<[TermId; 3]> = self.graph.match_ids(s, p, o).collect();
        for triple in matches {
            let mut newly = [usize::MAX; 3];
            let mut ok = true;
            for (k, (slot, value)) in slots.iter().zip(triple).enumerate() {
                if let Slot::Var(v) = *slot {
                    match binding[v] {
                        None => {
                            binding[v] = Some(value);
                            newly[k] = v;
                        }
                        // Repeated variable within one pattern.
                        Some(existing) if existing != value => ok = false,
                        Some(_) => {}
                    }
                }
            }
            if ok && self.passes(&plan.filters_at[depth], binding) {
                self.join(plan, depth + 1, binding, out);
            }
            for v in newly.into_iter().filter(|&v| v != usize::MAX) {
                binding[v] = None;
            }
        }
    }
}

pub fn evaluate(ast: &QueryAst, graph: &Graph) -> Result<SolutionTable> {
    evaluate_with(ast, graph, JoinOrder::Greedy).map(|(table, _)| table)
}

/// Evaluates `ast` and reports how many rows failed a filter by type error.
pub fn evaluate_with(
    ast: &QueryAst,
    graph: &Graph,
    order: JoinOrder,
) -> Result<(SolutionTable, EvalDiagnostics)> {
    let mut ev = Evaluator::new(graph, ast);
    let mut solutions = Vec::new();
    if let Some(plan) = ev.plan(ast, order) {
        let mut binding = vec![None; ev.vars.len()];
        if ev.passes(&plan.initial_filters, &binding) {
            ev.join(&plan, 0, &mut binding, &mut solutions);
        }
    }

    // Wide rows: every variable available to ORDER BY.
    let (names, wide): (Vec<String>, Vec<Vec<Option<Term>>>) = if ast.is_aggregate() {
        aggregate(ast, &ev, &solutions)
    } else {
        let rows = solutions
            .iter()
            .map(|b| {
                b.iter()
                    .map(|id| id.map(|id| graph.term(id).clone()))
                    .collect()
            })
            .collect();
        (ev.vars.clone(), rows)
    };

    let header = ast.header();
    let column = |name: &str| names.iter().position(|n| n == name);
    let projection: Vec<Option<usize>> = header.iter().map(|h| column(h)).collect();
    let mut keyed: Vec<(Vec<Option<Term>>, Vec<Option<Term>>)> = wide
        .iter()
        .map(|row| {
            let lookup = |name: &str| column(name).and_then(|i| row[i].as_ref());
            let keys = ast
                .order_by
                .iter()
                .map(|k| eval(&k.expr, &lookup).ok().map(val_term))
                .collect::<Vec<_>>();
            let projected = projection
                .iter()
                .map(|i| i.and_then(|i| row[i].clone()))
                .collect::<Vec<_>>();
            (keys, projected)
        })
        .collect();
    keyed.sort_by(|(ka, ra), (kb, rb)| {
        ka.iter()
            .zip(kb)
            .zip(&ast.order_by)
            .map(|((a, b), key)| {
                let o = compare_terms(a.as_ref(), b.as_ref());
                if key.descending {
                    o.reverse()
                } else {
                    o
                }
            })
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
            .then_with(|| compare_rows(ra, rb))
    });
    let mut rows: Vec<Vec<Option<Term>>> = keyed.into_iter().map(|(_, r)| r).collect();
    if ast.distinct {
        let mut seen = HashSet::new();
        rows.retain(|r| seen.insert(r.clone()));
    }
    let offset = ast.offset.unwrap_or(0).min(rows.len());
    rows.drain(..offset);
    if let Some(limit) = ast.limit {
        rows.truncate(limit);
    }
    Ok((SolutionTable { vars: header, rows }, ev.diagnostics))
}

/// Groups solutions and computes the `COUNT` projections. Without
/// `GROUP BY` all solutions form one group, so an aggregate query always
/// yields one row.
fn aggregate(
    ast: &QueryAst,
    ev: &Evaluator<'_>,
    solutions: &[Binding],
) -> (Vec<String>, Vec<Vec<Option<Term>>>) {
    let key_slots: Vec<usize> = ast.group_by.iter().map(|v| ev.index[v]).collect();
    let mut groups: Vec<(Vec<Option<TermId>>, Vec<&Binding>)> = Vec::new();
    let mut position: HashMap<Vec<Option<TermId>>, usize> = HashMap::new();
    for b in solutions {
        let key: Vec<Option<TermId>> = key_slots.iter().map(|&i| b[i]).collect();
        let at = *position.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[at].1.push(b);
    }
    if groups.is_empty() && ast.group_by.is_empty() {
        groups.push((Vec::new(), Vec::new()));
    }
    let counts: Vec<&Projection> = ast
        .projection
        .iter()
        .filter(|p| matches!(p, Projection::Count { .. }))
        .collect();
    let mut names = ast.group_by.clone();
    names.extend(counts.iter().map(|p| p.name().to_owned()));
    let rows = groups
        .iter()
        .map(|(key, members)| {
            let mut row: Vec<Option<Term>> = key
                .iter()
                .map(|id| id.map(|id| ev.graph.term(id).clone()))
                .collect();
            for p in &counts {
                let Projection::Count { var, distinct, .. } = p else {
                    unreachable!()
                };
                let n = match (var, distinct) {
                    (None, false) => members.len(),
                    (None, true) => members.iter().collect::<HashSet<_>>().len(),
                    (Some(v), false) => members.iter().filter(|b| b[ev.index[v]].is_some()).count(),
                    (Some(v), true) => members
                        .iter()
                        .filter_map(|b| b[ev.index[v]])
                        .collect::<HashSet<_>>()
                        .len(),
                };
                row.push(Some(Term::literal(n.to_string(), xsd::INTEGER)));
            }
            row
        })
        .collect();
    (names, rows)
}
