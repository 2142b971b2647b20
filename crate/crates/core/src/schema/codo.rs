//! The CODO vocabulary: class tree, property tree, labels and defined
//! classes, built from declarative tables into both a graph and the
//! equivalent [`SchemaAxioms`].

use super::{Conjunct, DefinedClass, SchemaAxioms};
use crate::graph::Graph;
use crate::term::{Term, Triple};
use crate::vocab::{self, owl, rdf, rdfs, FOAF, SCHEMA};

pub const ONTOLOGY_IRI: &str = "http://www.isibang.ac.in/ns/codo";

/// Class IRI, direct superclasses, label.
const CLASSES: &[(&str, &[&str], Option<&str>)] = &[
    ("foaf:Person", &[], None),
    ("foaf:Organization", &[], None),
    ("schema:Patient", &[], None),
    ("schema:Place", &[], None),
    ("schema:GenderType", &[], None),
    (
        "codo:Patient",
        &["foaf:Person", "schema:Patient"],
        Some("Patient"),
    ),
    (
        "codo:CovidDedicatedFacility",
        &["foaf:Organization"],
        Some("COVID-19 dedicated facility"),
    ),
    (
        "codo:CovidCareCentre",
        &["codo:CovidDedicatedFacility"],
        Some("Covid care centre"),
    ),
    (
        "codo:DedicatedCovidHealthCentre",
        &["codo:CovidDedicatedFacility"],
        Some("Dedicated covid health centre"),
    ),
    (
        "codo:DedicatedCovidHospital",
        &["codo:CovidDedicatedFacility"],
        Some("Dedicated covid hospital"),
    ),
    ("codo:Disease", &[], Some("Disease")),
    (
        "codo:MildOrVeryMildCovid19",
        &["codo:Disease"],
        Some("Mild or very mild COVID-19"),
    ),
    (
        "codo:ModerateCovid19",
        &["codo:Disease"],
        Some("Moderate COVID-19"),
    ),
    (
        "codo:SevereCovid19",
        &["codo:Disease"],
        Some("Severe COVID-19"),
    ),
    ("codo:Diagnosis", &[], Some("Diagnosis")),
    (
        "codo:COVID-19Diagnosis",
        &["codo:Diagnosis"],
        Some("COVID-19 diagnosis"),
    ),
    ("codo:Symptom", &[], Some("Symptom")),
    ("codo:City", &["schema:Place"], Some("City")),
    ("codo:State", &["schema:Place"], Some("State")),
    ("codo:Country", &["schema:Place"], Some("Country")),
    ("codo:StatusValue", &[], Some("Status value")),
    (
        "codo:DiagnosedWithCovid",
        &[],
        Some("Diagnosed with COVID-19"),
    ),
    (
        "codo:UrgentlyNeedsCovidTest",
        &[],
        Some("Urgently needs COVID-19 test"),
    ),
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Object,
    Data,
}

#[derive(Clone, Copy)]
struct Traits {
    symmetric: bool,
    transitive: bool,
}

const SYMMETRIC: Traits = Traits {
    symmetric: true,
    transitive: false,
};
const PLAIN: Traits = Traits {
    symmetric: false,
    transitive: false,
};

struct PropertyDef {
    iri: &'static str,
    kind: Kind,
    label: &'static str,
    parents: &'static [&'static str],
    domain: Option<&'static str>,
    range: Option<&'static str>,
    traits: Traits,
}

const fn object(
    iri: &'static str,
    label: &'static str,
    parents: &'static [&'static str],
    domain: Option<&'static str>,
    range: Option<&'static str>,
    traits: Traits,
) -> PropertyDef {
    PropertyDef {
        iri,
        kind: Kind::Object,
        label,
        parents,
        domain,
        range,
        traits,
    }
}

const fn data(iri: &'static str, label: &'static str, range: &'static str) -> PropertyDef {
    PropertyDef {
        iri,
        kind: Kind::Data,
        label,
        parents: &[],
        domain: None,
        range: Some(range),
        traits: PLAIN,
    }
}

const PERSON: Option<&str> = Some("foaf:Person");

const PROPERTIES: &[PropertyDef] = &[
    // Relationship tree. Close relationships are the ones where people
    // typically live or work together.
    object(
        "codo:hasRelationship",
        "has relationship",
        &[],
        PERSON,
        PERSON,
        SYMMETRIC,
    ),
    object(
        "codo:hasCloseRelationship",
        "has close relationship",
        &["codo:hasRelationship"],
        None,
        None,
        PLAIN,
    ),
    object(
        "codo:hasChild",
        "has child",
        &["codo:hasCloseRelationship"],
        None,
        None,
        PLAIN,
    ),
    object(
        "codo:hasDaughter",
        "has daughter",
        &["codo:hasChild"],
        None,
        None,
        PLAIN,
    ),
    object(
        "codo:hasSon",
        "has son",
        &["codo:hasChild"],
        None,
        None,
        PLAIN,
    ),
    object(
        "codo:hasParent",
        "has parent",
        &["codo:hasCloseRelationship"],
        None,
        None,
        PLAIN,
    ),
    object(
        "codo:hasSpouse",
        "has spouse",
        &["codo:hasCloseRelationship"],
        None,
        None,
        SYMMETRIC,
    ),
    object(
        "codo:hasCoWorker",
        "has co-worker",
        &["codo:hasCloseRelationship"],
        None,
        None,
        SYMMETRIC,
    ),
    object(
        "codo:hasRoommate",
        "has roommate",
        &["codo:hasCloseRelationship"],
        None,
        None,
        SYMMETRIC,
    ),
    object(
        "codo:hasAuntOrUncle",
        "has aunt or uncle",
        &["codo:hasRelationship"],
        None,
        None,
        PLAIN,
    ),
    object(
        "codo:hasNieceOrNephew",
        "has niece or nephew",
        &["codo:hasRelationship"],
        None,
        None,
        PLAIN,
    ),
    // Case facts.
    object(
        "codo:hasGender",
        "has gender",
        &[],
        None,
        Some("schema:GenderType"),
        PLAIN,
    ),
    object("codo:city", "city", &[], None, Some("codo:City"), PLAIN),
    object("codo:state", "state", &[], None, Some("codo:State"), PLAIN),
    object(
        "codo:travelledFrom",
        "travelled from",
        &[],
        None,
        Some("schema:Place"),
        PLAIN,
    ),
    object(
        "codo:status",
        "status",
        &[],
        None,
        Some("codo:StatusValue"),
        PLAIN,
    ),
    object(
        "codo:hasDiagnosis",
        "has diagnosis",
        &[],
        Some("codo:Patient"),
        Some("codo:Diagnosis"),
        PLAIN,
    ),
    object(
        "codo:hasDisease",
        "has disease",
        &[],
        Some("codo:Diagnosis"),
        Some("codo:Disease"),
        PLAIN,
    ),
    object(
        "codo:hasSymptom",
        "has symptom",
        &[],
        None,
        Some("codo:Symptom"),
        PLAIN,
    ),
    data("codo:diagnosedOn", "diagnosed on", "xsd:dateTime"),
    data("codo:age", "age", "xsd:decimal"),
    data("codo:hadCovidTest", "had covid test", "xsd:boolean"),
    data(
        "codo:hasCausedSecondaryInfections",
        "has caused any secondary infections",
        "xsd:boolean",
    ),
    data(
        "codo:secondaryInfectionCount",
        "secondary infection count",
        "xsd:decimal",
    ),
    data("codo:nationality", "nationality", "xsd:string"),
    data(
        "codo:suspectedReasonOfInfection",
        "suspected reason of infection",
        "xsd:string",
    ),
];

const INVERSES: &[(&str, &str)] = &[
    ("codo:hasChild", "codo:hasParent"),
    ("codo:hasNieceOrNephew", "codo:hasAuntOrUncle"),
];

/// Named individuals shipped with the vocabulary: IRI, class, label.
const INDIVIDUALS: &[(&str, &str, &str)] = &[
    ("codo:Recovered", "codo:StatusValue", "Recovered"),
    ("codo:Deceased", "codo:StatusValue", "Deceased"),
    ("codo:Hospitalized", "codo:StatusValue", "Hospitalized"),
    ("schema:Male", "schema:GenderType", "Male"),
    ("schema:Female", "schema:GenderType", "Female"),
    ("codo:Fever", "codo:Symptom", "fever"),
    ("codo:Cough", "codo:Symptom", "cough"),
    ("codo:SoreThroat", "codo:Symptom", "sore throat"),
    ("codo:Breathlessness", "codo:Symptom", "breathlessness"),
    ("codo:Fatigue", "codo:Symptom", "fatigue"),
    ("codo:LossOfSmell", "codo:Symptom", "loss of smell"),
];

/// The constructed vocabulary graph together with its structured axioms.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub graph: Graph,
    pub axioms: SchemaAxioms,
}

fn expand(name: &str) -> String {
    let (prefix, local) = name.split_once(':').expect("prefixed vocabulary name");
    let ns = match prefix {
        "codo" => vocab::CODO,
        "foaf" => FOAF,
        "schema" => SCHEMA,
        "xsd" => vocab::XSD,
        other => panic!("unexpected prefix {other}"),
    };
    format!("{ns}{local}")
}

fn defined_classes() -> Vec<DefinedClass> {
    let person = Conjunct::Named(expand("foaf:Person"));
    let mut defs = vec![
        DefinedClass {
            class: expand("codo:DiagnosedWithCovid"),
            conjuncts: vec![
                person.clone(),
                Conjunct::SomeValuesFrom {
                    property: expand("codo:hasDiagnosis"),
                    filler: expand("codo:COVID-19Diagnosis"),
                },
            ],
        },
        DefinedClass {
            class: expand("codo:UrgentlyNeedsCovidTest"),
            conjuncts: vec![
                person,
                Conjunct::SomeValuesFrom {
                    property: expand("codo:hasCloseRelationship"),
                    filler: expand("codo:DiagnosedWithCovid"),
                },
                Conjunct::HasValue {
                    property: expand("codo:hadCovidTest"),
                    value: Term::boolean(false),
                },
            ],
        },
    ];
    defs.sort_by(|a, b| a.class.cmp(&b.class));
    defs
}

struct Builder {
    graph: Graph,
    blank_counter: usize,
}

impl Builder {
    fn add(&mut self, s: Term, p: &str, o: Term) {
        let triple = Triple::new(s, Term::iri(p), o).expect("vocabulary triples are well formed");
        self.graph
            .insert(&triple)
            .expect("vocabulary triples are well formed");
    }

    fn fresh(&mut self, hint: &str) -> Term {
        self.blank_counter += 1;
        Term::blank(format!("{hint}{}", self.blank_counter))
    }

    fn defined_class(&mut self, def: &DefinedClass) {
        let class = Term::iri(&def.class);
        let expr = self.fresh("def");
        self.add(class, owl::EQUIVALENT_CLASS, expr.clone());
        self.add(expr.clone(), rdf::TYPE, Term::iri(owl::CLASS));
        let members: Vec<Term> = def.conjuncts.iter().map(|c| self.conjunct(c)).collect();
        let list = self.list(&members);
        self.add(expr, owl::INTERSECTION_OF, list);
    }

    fn conjunct(&mut self, conjunct: &Conjunct) -> Term {
        match conjunct {
            Conjunct::Named(c) => Term::iri(c),
            Conjunct::SomeValuesFrom { property, filler } => {
                let r = self.fresh("restriction");
                self.add(r.clone(), rdf::TYPE, Term::iri(owl::RESTRICTION));
                self.add(r.clone(), owl::ON_PROPERTY, Term::iri(property));
                self.add(r.clone(), owl::SOME_VALUES_FROM, Term::iri(filler));
                r
            }
            Conjunct::HasValue { property, value } => {
                let r = self.fresh("restriction");
                self.add(r.clone(), rdf::TYPE, Term::iri(owl::RESTRICTION));
                self.add(r.clone(), owl::ON_PROPERTY, Term::iri(property));
                self.add(r.clone(), owl::HAS_VALUE, value.clone());
                r
            }
        }
    }

    fn list(&mut self, items: &[Term]) -> Term {
        let Some((first, rest)) = items.split_first() else {
            return Term::iri(rdf::NIL);
        };
        let cell = self.fresh("list");
        self.add(cell.clone(), rdf::FIRST, first.clone());
        let tail = self.list(rest);
        self.add(cell.clone(), rdf::REST, tail);
        cell
    }
}

/// Builds the CODO vocabulary graph and its axioms.
pub fn build_codo_vocabulary() -> Vocabulary {
    let mut b = Builder {
        graph: Graph::new(),
        blank_counter: 0,
    };
    let mut axioms = SchemaAxioms::default();

    let ontology = Term::iri(ONTOLOGY_IRI);
    b.add(ontology.clone(), rdf::TYPE, Term::iri(owl::ONTOLOGY));
    b.add(
        ontology,
        rdfs::LABEL,
        Term::string("COVID-19 Ontology for cases and patient information"),
    );

    for (class, parents, label) in CLASSES {
        let iri = expand(class);
        b.add(Term::iri(&iri), rdf::TYPE, Term::iri(owl::CLASS));
        if let Some(label) = label {
            b.add(Term::iri(&iri), rdfs::LABEL, Term::string(*label));
        }
        for parent in *parents {
            let parent = expand(parent);
            b.add(Term::iri(&iri), rdfs::SUB_CLASS_OF, Term::iri(&parent));
            axioms.sub_class_of.insert((iri.clone(), parent));
        }
        axioms.classes.insert(iri);
    }

    for prop in PROPERTIES {
        let iri = expand(prop.iri);
        let subject = Term::iri(&iri);
        match prop.kind {
            Kind::Object => {
                b.add(subject.clone(), rdf::TYPE, Term::iri(owl::OBJECT_PROPERTY));
                axioms.object_properties.insert(iri.clone());
            }
            Kind::Data => {
                b.add(
                    subject.clone(),
                    rdf::TYPE,
                    Term::iri(owl::DATATYPE_PROPERTY),
                );
                axioms.data_properties.insert(iri.clone());
            }
        }
        b.add(subject.clone(), rdfs::LABEL, Term::string(prop.label));
        for parent in prop.parents {
            let parent = expand(parent);
            b.add(subject.clone(), rdfs::SUB_PROPERTY_OF, Term::iri(&parent));
            axioms.sub_property_of.insert((iri.clone(), parent));
        }
        if let Some(domain) = prop.domain {
            let domain = expand(domain);
            b.add(subject.clone(), rdfs::DOMAIN, Term::iri(&domain));
            axioms.domains.insert((iri.clone(), domain));
        }
        if let Some(range) = prop.range {
            let range = expand(range);
            b.add(subject.clone(), rdfs::RANGE, Term::iri(&range));
            axioms.ranges.insert((iri.clone(), range));
        }
        if prop.traits.symmetric {
            b.add(
                subject.clone(),
                rdf::TYPE,
                Term::iri(owl::SYMMETRIC_PROPERTY),
            );
            axioms.symmetric.insert(iri.clone());
        }
        if prop.traits.transitive {
            b.add(
                subject.clone(),
                rdf::TYPE,
                Term::iri(owl::TRANSITIVE_PROPERTY),
            );
            axioms.transitive.insert(iri.clone());
        }
    }

    for (p, q) in INVERSES {
        let (p, q) = (expand(p), expand(q));
        b.add(Term::iri(&p), owl::INVERSE_OF, Term::iri(&q));
        axioms.inverse_of.insert((p, q));
    }

    for (individual, class, label) in INDIVIDUALS {
        let iri = Term::iri(expand(individual));
        b.add(iri.clone(), rdf::TYPE, Term::iri(owl::NAMED_INDIVIDUAL));
        b.add(iri.clone(), rdf::TYPE, Term::iri(expand(class)));
        b.add(iri, rdfs::LABEL, Term::string(*label));
    }

    axioms.defined_classes = defined_classes();
    for def in axioms.defined_classes.clone() {
        b.defined_class(&def);
    }

    Vocabulary {
        graph: b.graph,
        axioms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::extract_schema;

    fn c(local: &str) -> String {
        vocab::codo(local)
    }

    #[test]
    fn daughter_chain_is_in_property_tree() {
        let v = build_codo_vocabulary();
        assert!(v
            .axioms
            .sub_property_of
            .contains(&(c("hasDaughter"), c("hasChild"))));
        assert!(v
            .axioms
            .sub_property_of
            .contains(&(c("hasChild"), c("hasCloseRelationship"))));
    }

    #[test]
    fn care_centre_is_a_dedicated_facility() {
        let v = build_codo_vocabulary();
        assert!(v
            .axioms
            .sub_class_of
            .contains(&(c("CovidCareCentre"), c("CovidDedicatedFacility"))));
    }

    #[test]
    fn urgently_needs_test_has_three_conjuncts() {
        let v = build_codo_vocabulary();
        let def = v
            .axioms
            .defined_class(&c("UrgentlyNeedsCovidTest"))
            .unwrap();
        assert_eq!(def.conjuncts.len(), 3);
        assert!(def.conjuncts.contains(&Conjunct::HasValue {
            property: c("hadCovidTest"),
            value: Term::boolean(false)
        }));
    }

    #[test]
    fn build_and_extract_agree() {
        let v = build_codo_vocabulary();
        let extracted = extract_schema(&v.graph).unwrap();
        assert!(extracted.warnings.is_empty(), "{:?}", extracted.warnings);
        assert_eq!(extracted.axioms, v.axioms);
    }

    #[test]
    fn every_axiom_iri_is_declared() {
        let v = build_codo_vocabulary();
        let a = &v.axioms;
        let is_class = |iri: &str| a.classes.contains(iri);
        let is_datatype = |iri: &str| iri.starts_with(vocab::XSD);
        for (s, o) in &a.sub_class_of {
            assert!(is_class(s) && is_class(o), "{s} {o}");
        }
        for (s, o) in a.sub_property_of.iter().chain(&a.inverse_of) {
            assert!(a.is_property(s) && a.is_property(o), "{s} {o}");
        }
        for (p, cl) in &a.domains {
            assert!(a.is_property(p) && is_class(cl));
        }
        for (p, r) in &a.ranges {
            assert!(
                a.is_property(p) && (is_class(r) || is_datatype(r)),
                "{p} {r}"
            );
        }
        for d in &a.defined_classes {
            assert!(is_class(&d.class));
            for conj in &d.conjuncts {
                match conj {
                    Conjunct::Named(cl) => assert!(is_class(cl)),
                    Conjunct::SomeValuesFrom { property, filler } => {
                        assert!(a.object_properties.contains(property) && is_class(filler))
                    }
                    Conjunct::HasValue { property, .. } => {
                        assert!(a.data_properties.contains(property))
                    }
                }
            }
        }
    }

    #[test]
    fn relationship_path_to_top_has_length_three() {
        let v = build_codo_vocabulary();
        let mut path = vec![c("hasDaughter")];
        loop {
            let up = v
                .axioms
                .super_properties(path.last().unwrap())
                .next()
                .map(str::to_owned);
            match up {
                Some(up) => path.push(up),
                None => break,
            }
        }
        assert_eq!(
            path,
            vec![
                c("hasDaughter"),
                c("hasChild"),
                c("hasCloseRelationship"),
                c("hasRelationship")
            ]
        );
        assert_eq!(path.len() - 1, 3);
    }

    #[test]
    fn table_one_labels_are_present() {
        let v = build_codo_vocabulary();
        for label in [
            "diagnosed on",
            "has gender",
            "has caused any secondary infections",
            "travelled from",
            "city",
            "state",
        ] {
            assert!(
                v.graph
                    .match_pattern(
                        None,
                        Some(&Term::iri(rdfs::LABEL)),
                        Some(&Term::string(label))
                    )
                    .next()
                    .is_some(),
                "missing label {label}"
            );
        }
    }
}
