use std::io::Read;

use crate::error::Result;

/// Header names of the Karnataka case sheet, columns A–M.
pub const CASE_SHEET_HEADER: [&str; 13] = [
    "Case",
    "Diagnosed On",
    "Age",
    "Gender",
    "City",
    "State",
    "Cluster",
    "Reason",
    "Nationality",
    "Status",
    "P",
    "C",
    "Relationships",
];

/// A spreadsheet of string cells. Columns are addressed positionally
/// (A, B, …); rows are padded to a common width.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CaseTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

fn is_case_sheet_header(cells: &[String]) -> bool {
    !cells.is_empty()
        && cells.len() <= CASE_SHEET_HEADER.len()
        && cells
            .iter()
            .zip(CASE_SHEET_HEADER)
            .all(|(c, h)| c.trim().eq_ignore_ascii_case(h))
}

impl CaseTable {
    pub fn new(header: Option<Vec<String>>, rows: Vec<Vec<String>>) -> Self {
        let mut table = CaseTable { header, rows };
        table.pad();
        table
    }

    /// Reads comma-separated, double-quoted CSV. The first record is a header
    /// when it matches the case-sheet column names.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut rows = Vec::new();
        for record in csv.records() {
            rows.push(record?.iter().map(str::to_owned).collect::<Vec<_>>());
        }
        let header = match rows.first() {
            Some(first) if is_case_sheet_header(first) => Some(rows.remove(0)),
            _ => None,
        };
        Ok(CaseTable::new(header, rows))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_csv(text.as_bytes())
    }

    fn pad(&mut self) {
        let width = self.width();
        for row in &mut self.rows {
            row.resize(width, String::new());
        }
    }

    pub fn width(&self) -> usize {
        self.rows
            .iter()
            .map(Vec::len)
            .chain(self.header.as_ref().map(Vec::len))
            .max()
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Cell at a zero-based row and column; out of range reads as empty.
    pub fn cell(&self, row: usize, column: usize) -> &str {
        self.rows
            .get(row)
            .and_then(|r| r.get(column))
            .map_or("", String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_detected_and_rows_padded() {
        let t = CaseTable::from_csv_str("Case,Diagnosed On,Age\n1,2020-03-09T,41\n2\n").unwrap();
        assert_eq!(t.header.as_ref().map(Vec::len), Some(3));
        assert_eq!(t.len(), 2);
        assert_eq!(t.rows[1], vec!["2", "", ""]);
        assert_eq!(t.cell(5, 5), "");
    }

    #[test]
    fn data_first_row_is_not_a_header() {
        let t = CaseTable::from_csv_str("1,\"a, b\",41\n").unwrap();
        assert!(t.header.is_none());
        assert_eq!(t.rows[0][1], "a, b");
    }

    #[test]
    fn empty_input() {
        assert!(CaseTable::from_csv_str("").unwrap().is_empty());
    }
}
