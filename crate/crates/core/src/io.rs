//! CSV tables with shortest round-trip float formatting.

use std::path::Path;

/// Shortest decimal string that parses back to exactly `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// A header plus rows of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    header: String,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &str) -> Self {
        Self { header: header.to_string(), rows: Vec::new() }
    }

    pub fn header(&self) -> &str {
        &self.header
    }

    /// Panics if the cell count differs from the header's column count.
    pub fn push(&mut self, cells: Vec<String>) {
        let cols = self.header.split(',').count();
        assert_eq!(cells.len(), cols, "CSV row has {} cells for header '{}'", cells.len(), self.header);
        self.rows.push(cells);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn extend(&mut self, other: CsvTable) {
        assert_eq!(self.header, other.header, "CSV header mismatch");
        self.rows.extend(other.rows);
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let written = w
            .write_record(self.header.split(','))
            .and_then(|()| self.rows.iter().try_for_each(|r| w.write_record(r)))
            .and_then(|()| w.flush().map_err(csv::Error::from));
        written.expect("writing CSV to memory");
        let bytes = w.into_inner().expect("flushed CSV buffer");
        String::from_utf8(bytes).expect("CSV cells are UTF-8")
    }

    /// Parses CSV text with a header line.
    pub fn parse(text: &str) -> Result<Self, csv::Error> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
        let mut table = Self::new(&header);
        for rec in r.records() {
            table.push(rec?.iter().map(str::to_string).collect());
        }
        Ok(table)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv_string())
    }
}

/// Re-emits every cell, normalizing those that parse as floats.
pub fn reformat_numeric(table: &CsvTable) -> CsvTable {
    let mut out = CsvTable::new(table.header());
    for row in table.rows() {
        out.push(row.iter().map(|c| c.parse::<f64>().map(fmt_f64).unwrap_or_else(|_| c.clone())).collect());
    }
    out
}
