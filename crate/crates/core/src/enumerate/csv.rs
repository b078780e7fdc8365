//! Reading count tables back from CSV.

use crate::geometry::Bound;

use super::EnumerateError;

/// A parsed count table: the `B` column plus every other numeric column.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub bounds: Vec<Bound>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Parses a table whose first column is `B`.
pub fn parse_csv(text: &str) -> Result<CsvTable, EnumerateError> {
    let bad = |msg: String| EnumerateError::InvalidArgument(format!("counts CSV: {msg}"));
    let mut reader = ::csv::ReaderBuilder::new()
        .trim(::csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.get(0) != Some("B") {
        return Err(bad("first column must be B".into()));
    }
    let mut bounds = Vec::new();
    let mut columns: Vec<(String, Vec<f64>)> = headers.iter().skip(1).map(|h| (h.to_string(), Vec::new())).collect();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let b: Bound = row[0].parse().map_err(|e| bad(format!("row {}: {e}", line + 1)))?;
        bounds.push(b);
        for (i, (_, col)) in columns.iter_mut().enumerate() {
            let v: f64 = row[i + 1]
                .parse()
                .map_err(|_| bad(format!("row {}: bad number {:?}", line + 1, &row[i + 1])))?;
            col.push(v);
        }
    }
    Ok(CsvTable { bounds, columns })
}
