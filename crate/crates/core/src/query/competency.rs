//! The eight competency questions the vocabulary is designed to answer.

use std::collections::{BTreeSet, VecDeque};

use super::{evaluate, parse_query, SolutionTable};
use crate::error::Result;
use crate::graph::Graph;
use crate::schema::SchemaAxioms;
use crate::term::Term;
use crate::vocab::{codo, CODO};

/// Close contacts of diagnosed patients who have not been tested.
pub const URGENT_TEST_QUERY: &str = "PREFIX owl: <http://www.w3.org/2002/07/owl#>
PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>
PREFIX codo: <http://www.isibang.ac.in/ns/codo#>
PREFIX schema: <https://schema.org/>

SELECT ?p ?r
WHERE {
  ?p rdf:type schema:Patient.
  ?p codo:hasDiagnosis ?d.
  ?d rdf:type codo:COVID-19Diagnosis.
  ?p codo:hasCloseRelationship ?r.
  ?r codo:hadCovidTest false.
}
";

/// The parameters of the parameterized questions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetencyParams {
    /// City or state individual for question I.
    pub place: Term,
    /// Inclusive cut-off date for question I, as an xsd:dateTime lexical form.
    pub until: String,
    /// Patient whose travel history question III asks for.
    pub patient: Term,
}

impl Default for CompetencyParams {
    fn default() -> Self {
        CompetencyParams {
            place: Term::codo("Bangalore-Urban"),
            until: "2020-07-01T00:00:00".into(),
            patient: Term::codo("p000001"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetencyQuestion {
    pub id: &'static str,
    pub question: String,
    pub query: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetencyAnswer {
    pub id: &'static str,
    pub question: String,
    pub query: String,
    pub table: SolutionTable,
}

const FAMILY: [&str; 5] = [
    "hasChild",
    "hasDaughter",
    "hasParent",
    "hasSon",
    "hasSpouse",
];

fn iri_text(term: &Term) -> String {
    match term.as_iri() {
        Some(i) => format!("<{i}>"),
        None => term.to_string(),
    }
}

/// Strict sub-properties of `top`, by breadth-first search over the axioms.
pub fn sub_properties_of(axioms: &SchemaAxioms, top: &str) -> BTreeSet<String> {
    let mut found = BTreeSet::new();
    let mut queue = VecDeque::from([top.to_owned()]);
    while let Some(p) = queue.pop_front() {
        for (sub, _) in axioms.sub_property_of.iter().filter(|(_, sup)| *sup == p) {
            if found.insert(sub.clone()) {
                queue.push_back(sub.clone());
            }
        }
    }
    found
}

fn relationship_query(properties: &BTreeSet<String>) -> String {
    let alternatives: Vec<String> = properties
        .iter()
        .map(|p| match p.strip_prefix(CODO) {
            Some(local) => format!("?rel = codo:{local}"),
            None => format!("?rel = <{p}>"),
        })
        .collect();
    format!(
        "PREFIX codo: <{CODO}>
SELECT ?p1 ?rel ?p2 WHERE {{
  ?p1 a codo:Patient .
  ?p1 ?rel ?p2 .
  FILTER({})
}}
ORDER BY ?p1 ?p2 ?rel
",
        alternatives.join("\n      || ")
    )
}

/// Builds the question texts and queries for `params`.
pub fn competency_questions(
    axioms: &SchemaAxioms,
    params: &CompetencyParams,
) -> Vec<CompetencyQuestion> {
    let relationships = sub_properties_of(axioms, &codo("hasRelationship"));
    let family: BTreeSet<String> = FAMILY
        .iter()
        .map(|p| codo(p))
        .filter(|p| relationships.contains(p))
        .collect();
    let place = iri_text(&params.place);
    let patient = iri_text(&params.patient);
    vec![
        CompetencyQuestion {
            id: "I",
            question: format!(
                "How many people recovered from COVID-19 in {place} until {}?",
                params.until
            ),
            query: format!(
                "PREFIX codo: <{CODO}>
PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>
SELECT (COUNT(DISTINCT ?p) AS ?recovered) WHERE {{
  ?p codo:status codo:Recovered .
  ?p ?where {place} .
  ?p codo:diagnosedOn ?date .
  FILTER((?where = codo:city || ?where = codo:state) && ?date <= \"{}\"^^xsd:dateTime)
}}
",
                params.until
            ),
        },
        CompetencyQuestion {
            id: "II",
            question: "How many people died of COVID-19 per country?".into(),
            query: format!(
                "PREFIX codo: <{CODO}>
SELECT ?country (COUNT(DISTINCT ?p) AS ?deceased) WHERE {{
  ?p codo:status codo:Deceased .
  ?p codo:nationality ?country .
}}
GROUP BY ?country
ORDER BY DESC(?deceased)
"
            ),
        },
        CompetencyQuestion {
            id: "III",
            question: format!("Where has {patient} travelled from?"),
            query: format!(
                "PREFIX codo: <{CODO}>
SELECT ?place WHERE {{
  {patient} codo:travelledFrom ?place .
}}
"
            ),
        },
        CompetencyQuestion {
            id: "IV",
            question: "Which patients are related to whom, and how?".into(),
            query: relationship_query(&relationships),
        },
        CompetencyQuestion {
            id: "V",
            question: "Which patients have family relationships, and of which kind?".into(),
            query: relationship_query(&family),
        },
        CompetencyQuestion {
            id: "VI",
            question:
                "What are the primary reasons of infection for the maximum number of patients?"
                    .into(),
            query: format!(
                "PREFIX codo: <{CODO}>
SELECT ?reason (COUNT(DISTINCT ?p) AS ?patients) WHERE {{
  ?p codo:suspectedReasonOfInfection ?reason .
}}
GROUP BY ?reason
ORDER BY DESC(?patients)
"
            ),
        },
        CompetencyQuestion {
            id: "VII",
            question: "What are the most prevalent symptoms of severe COVID-19?".into(),
            query: format!(
                "PREFIX codo: <{CODO}>
SELECT ?symptom (COUNT(DISTINCT ?p) AS ?patients) WHERE {{
  ?p codo:hasDiagnosis ?d .
  ?d codo:hasDisease ?disease .
  ?disease a codo:SevereCovid19 .
  ?p codo:hasSymptom ?symptom .
}}
GROUP BY ?symptom
ORDER BY DESC(?patients)
"
            ),
        },
        CompetencyQuestion {
            id: "VIII",
            question:
                "Who has a close relation diagnosed with COVID-19 and has not yet been tested?"
                    .into(),
            query: URGENT_TEST_QUERY.to_owned(),
        },
    ]
}

/// Runs every competency question against a materialized graph.
pub fn competency_suite(
    graph: &Graph,
    axioms: &SchemaAxioms,
    params: &CompetencyParams,
) -> Result<Vec<CompetencyAnswer>> {
    competency_questions(axioms, params)
        .into_iter()
        .map(|q| {
            let table = evaluate(&parse_query(&q.query)?, graph)?;
            Ok(CompetencyAnswer {
                id: q.id,
                question: q.question,
                query: q.query,
                table,
            })
        })
        .collect()
}
