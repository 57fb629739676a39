use super::RawTable;
use crate::error::{Error, Result};

/// Comma-separated text with a header row. Empty cells and `?` are missing.
pub(super) fn parse(text: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().all(|n| n.is_empty()) {
        return Err(Error::parse(1, "empty header"));
    }
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        let cells = rec
            .iter()
            .map(|c| (!c.is_empty() && c != "?").then(|| c.to_string()))
            .collect();
        records.push((line, cells));
    }
    Ok(RawTable {
        names,
        declared: None,
        records,
    })
}
