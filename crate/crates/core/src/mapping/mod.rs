//! Spreadsheet-to-graph transformation rules.

mod apply;
mod reason;
mod rule;
mod table;

pub use apply::{
    apply_mapping, coerce, fnv1a64, link_relationships, make_individual_iri, value_local_name,
    IngestConfig, IngestReport, LinkReport, Mapper, Naming, SkipEntry,
};
pub use reason::{normalize_reason_cell, ReasonParse};
pub use rule::{
    column_index, column_letters, parse_mapping_rule, CellRef, Coercion, FactSpec, LabelPart,
    MappingRule, NameRef, RowRef, SubjectSpec, HASH_ENCODE,
};
pub use table::{CaseTable, CASE_SHEET_HEADER};
