//! Triply-indexed in-memory triple store.
//!
//! Terms are interned to [`TermId`]s; each triple is stored in three
//! orderings (SPO, POS, OSP) so any pattern with bound positions maps to a
//! range scan over one index.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::ops::Bound;

use crate::error::Result;
use crate::term::{PrefixMap, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    const MIN: TermId = TermId(0);
    const MAX: TermId = TermId(u32::MAX);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned triple in subject, predicate, object order.
pub type IdTriple = [TermId; 3];

#[derive(Debug, Clone, Default)]
struct Dictionary {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
}

impl Dictionary {
    fn intern(&mut self, term: &Term) -> TermId {
        if let Some(id) = self.ids.get(term) {
            return *id;
        }
        let id = TermId(u32::try_from(self.terms.len()).expect("term dictionary overflow"));
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }
}

/// Which of the three orderings to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

pub const ALL_INDEXES: [IndexOrder; 3] = [IndexOrder::Spo, IndexOrder::Pos, IndexOrder::Osp];

/// Whether a triple was asserted or derived by the reasoner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Asserted,
    Inferred,
}

#[derive(Debug, Clone)]
pub struct Graph {
    dict: Dictionary,
    spo: BTreeSet<(TermId, TermId, TermId)>,
    pos: BTreeSet<(TermId, TermId, TermId)>,
    osp: BTreeSet<(TermId, TermId, TermId)>,
    inferred: HashSet<IdTriple>,
    prefixes: PrefixMap,
}

impl Default for Graph {
    fn default() -> Self {
        Graph::new()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph {
            dict: Dictionary::default(),
            spo: BTreeSet::new(),
            pos: BTreeSet::new(),
            osp: BTreeSet::new(),
            inferred: HashSet::new(),
            prefixes: PrefixMap::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    /// Resolves prefixed-name / IRI / literal text against this graph's prefixes.
    pub fn resolve(&self, text: &str) -> Result<Term> {
        self.prefixes.resolve(text)
    }

    pub fn intern(&mut self, term: &Term) -> TermId {
        self.dict.intern(term)
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.dict.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.dict.terms[id.index()]
    }

    /// Inserts an asserted triple. Returns whether it was new.
    pub fn insert(&mut self, triple: &Triple) -> Result<bool> {
        triple.validate()?;
        let ids = self.intern_triple(triple);
        let added = self.insert_ids(ids);
        // An asserted copy of an inferred triple becomes asserted.
        self.inferred.remove(&ids);
        Ok(added)
    }

    /// Inserts a triple flagged as inferred. An already present triple keeps
    /// its existing flag.
    pub fn insert_inferred(&mut self, triple: &Triple) -> Result<bool> {
        triple.validate()?;
        let ids = self.intern_triple(triple);
        Ok(self.insert_inferred_ids(ids))
    }

    pub(crate) fn insert_inferred_ids(&mut self, ids: IdTriple) -> bool {
        let added = self.insert_ids(ids);
        if added {
            self.inferred.insert(ids);
        }
        added
    }

    fn insert_ids(&mut self, [s, p, o]: IdTriple) -> bool {
        if !self.spo.insert((s, p, o)) {
            return false;
        }
        self.pos.insert((p, o, s));
        self.osp.insert((o, s, p));
        true
    }

    /// Inserts every triple, returning how many were new.
    pub fn extend<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) -> Result<usize> {
        let mut added = 0;
        for t in triples {
            if self.insert(t)? {
                added += 1;
            }
        }
        Ok(added)
    }

    fn intern_triple(&mut self, t: &Triple) -> IdTriple {
        [
            self.intern(&t.subject),
            self.intern(&t.predicate),
            self.intern(&t.object),
        ]
    }

    pub fn ids_of(&self, t: &Triple) -> Option<IdTriple> {
        Some([
            self.lookup(&t.subject)?,
            self.lookup(&t.predicate)?,
            self.lookup(&t.object)?,
        ])
    }

    pub fn resolve_ids(&self, [s, p, o]: IdTriple) -> Triple {
        Triple {
            subject: self.term(s).clone(),
            predicate: self.term(p).clone(),
            object: self.term(o).clone(),
        }
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.ids_of(t).is_some_and(|ids| self.contains_ids(ids))
    }

    pub fn contains_ids(&self, [s, p, o]: IdTriple) -> bool {
        self.spo.contains(&(s, p, o))
    }

    pub fn origin(&self, t: &Triple) -> Option<Origin> {
        let ids = self.ids_of(t)?;
        self.contains_ids(ids).then(|| {
            if self.inferred.contains(&ids) {
                Origin::Inferred
            } else {
                Origin::Asserted
            }
        })
    }

    pub fn is_inferred_ids(&self, ids: IdTriple) -> bool {
        self.inferred.contains(&ids)
    }

    pub fn inferred_len(&self) -> usize {
        self.inferred.len()
    }

    pub fn asserted_len(&self) -> usize {
        self.len() - self.inferred.len()
    }

    /// Matches a pattern over interned ids, picking the index whose key
    /// prefix covers the bound positions.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> Box<dyn Iterator<Item = IdTriple> + '_> {
        let order = match (s, p, o) {
            (Some(_), None, Some(_)) => IndexOrder::Osp,
            (Some(_), _, _) => IndexOrder::Spo,
            (None, Some(_), _) => IndexOrder::Pos,
            (None, None, Some(_)) => IndexOrder::Osp,
            (None, None, None) => IndexOrder::Spo,
        };
        self.match_ids_with(order, s, p, o)
    }

    /// Matches using a specific index. Positions not covered by the index's
    /// bound prefix are filtered after the range scan.
    pub fn match_ids_with(
        &self,
        order: IndexOrder,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> Box<dyn Iterator<Item = IdTriple> + '_> {
        let (index, key, unpermute): (_, _, fn((TermId, TermId, TermId)) -> IdTriple) = match order
        {
            IndexOrder::Spo => (&self.spo, [s, p, o], |(s, p, o)| [s, p, o]),
            IndexOrder::Pos => (&self.pos, [p, o, s], |(p, o, s)| [s, p, o]),
            IndexOrder::Osp => (&self.osp, [o, s, p], |(o, s, p)| [s, p, o]),
        };
        let lower = (
            key[0].unwrap_or(TermId::MIN),
            key[1].filter(|_| key[0].is_some()).unwrap_or(TermId::MIN),
            key[2]
                .filter(|_| key[0].is_some() && key[1].is_some())
                .unwrap_or(TermId::MIN),
        );
        let upper = (
            key[0].unwrap_or(TermId::MAX),
            key[1].filter(|_| key[0].is_some()).unwrap_or(TermId::MAX),
            key[2]
                .filter(|_| key[0].is_some() && key[1].is_some())
                .unwrap_or(TermId::MAX),
        );
        let range = index.range((Bound::Included(lower), Bound::Included(upper)));
        Box::new(
            range
                .map(move |&k| unpermute(k))
                .filter(move |[ts, tp, to]| {
                    s.is_none_or(|x| x == *ts)
                        && p.is_none_or(|x| x == *tp)
                        && o.is_none_or(|x| x == *to)
                }),
        )
    }

    /// Matches a pattern; `None` positions are wildcards.
    pub fn match_pattern<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = Triple> + 'a> {
        let ids = (bind(self, s), bind(self, p), bind(self, o));
        match ids {
            (Some(s), Some(p), Some(o)) => Box::new(
                self.match_ids(s, p, o)
                    .map(move |ids| self.resolve_ids(ids)),
            ),
            // A bound term absent from the dictionary matches nothing.
            _ => Box::new(std::iter::empty()),
        }
    }

    pub fn iter_ids(&self) -> impl Iterator<Item = IdTriple> + '_ {
        self.spo.iter().map(|&(s, p, o)| [s, p, o])
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.iter_ids().map(|ids| self.resolve_ids(ids))
    }

    pub fn iter_with_origin(&self) -> impl Iterator<Item = (Triple, Origin)> + '_ {
        self.iter_ids().map(|ids| {
            let origin = if self.inferred.contains(&ids) {
                Origin::Inferred
            } else {
                Origin::Asserted
            };
            (self.resolve_ids(ids), origin)
        })
    }

    /// Triples sorted by canonical term order.
    pub fn sorted_triples(&self) -> Vec<Triple> {
        let mut triples: Vec<Triple> = self.iter().collect();
        triples.sort();
        triples
    }

    /// Objects of `subject predicate ?o`.
    pub fn objects<'a>(
        &'a self,
        subject: &Term,
        predicate: &str,
    ) -> impl Iterator<Item = Triple> + 'a {
        self.match_pattern(Some(subject), Some(&Term::iri(predicate)), None)
    }
}

/// `Some(None)` for a wildcard, `Some(Some(id))` for a known term, `None`
/// for a term the graph has never seen.
fn bind(graph: &Graph, term: Option<&Term>) -> Option<Option<TermId>> {
    match term {
        None => Some(None),
        Some(t) => graph.lookup(t).map(Some),
    }
}

/// Set equality over triples; provenance flags and prefixes are ignored.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains(&t))
    }
}

impl Eq for Graph {}
