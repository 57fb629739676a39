//! ARFF subset: `@relation`, numeric and nominal `@attribute`s, dense
//! `@data` rows, `?` for missing values and `%` comments.

use super::{AttributeKind, RawTable};
use crate::error::{Error, Result};

pub(super) fn parse(text: &str) -> Result<RawTable> {
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut records = Vec::new();
    let mut in_data = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(Error::parse(line_no, "sparse rows are not supported"));
            }
            let cells = split_fields(line, line_no)?;
            if cells.len() != names.len() {
                return Err(Error::parse(
                    line_no,
                    format!("expected {} values, found {}", names.len(), cells.len()),
                ));
            }
            records.push((line_no, cells.into_iter().map(missing_to_none).collect()));
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            continue;
        } else if lower.starts_with("@attribute") {
            let rest = line["@attribute".len()..].trim_start();
            let (name, decl) = take_name(rest, line_no)?;
            kinds.push(parse_type(decl.trim(), line_no)?);
            names.push(name);
        } else if lower.starts_with("@data") {
            if names.is_empty() {
                return Err(Error::parse(line_no, "@data before any @attribute"));
            }
            in_data = true;
        } else {
            return Err(Error::parse(line_no, format!("unexpected header line '{line}'")));
        }
    }
    if !in_data {
        return Err(Error::parse(text.lines().count().max(1), "missing @data section"));
    }
    Ok(RawTable {
        names,
        declared: Some(kinds),
        records,
    })
}

fn missing_to_none(cell: String) -> Option<String> {
    (cell != "?").then_some(cell)
}

fn take_name(rest: &str, line: usize) -> Result<(String, &str)> {
    let mut chars = rest.char_indices();
    match chars.next() {
        Some((_, q @ ('\'' | '"'))) => {
            let end = rest[1..]
                .find(q)
                .ok_or_else(|| Error::parse(line, "unterminated quoted attribute name"))?;
            Ok((rest[1..=end].to_string(), &rest[end + 2..]))
        }
        Some(_) => {
            let end = rest
                .find(|c: char| c.is_whitespace() || c == '{')
                .ok_or_else(|| Error::parse(line, "attribute without type"))?;
            Ok((rest[..end].to_string(), &rest[end..]))
        }
        None => Err(Error::parse(line, "attribute without name")),
    }
}

fn parse_type(decl: &str, line: usize) -> Result<AttributeKind> {
    if let Some(body) = decl.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| Error::parse(line, "unterminated nominal value list"))?;
        let values = split_fields(body, line)?;
        if values.is_empty() || values.iter().any(|v| v.is_empty()) {
            return Err(Error::parse(line, "empty nominal value"));
        }
        return Ok(AttributeKind::Nominal { values });
    }
    match decl.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(AttributeKind::Numeric),
        other => Err(Error::parse(line, format!("unsupported attribute type '{other}'"))),
    }
}

/// Splits a comma-separated list, honouring single and double quotes.
fn split_fields(line: &str, line_no: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut quoted_field = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match quote {
            Some(q) if c == '\\' => {
                if let Some(n) = chars.next() {
                    cur.push(n);
                } else {
                    return Err(Error::parse(line_no, format!("dangling escape in {q}-quoted value")));
                }
            }
            Some(q) if c == q => quote = None,
            Some(_) => cur.push(c),
            None if c == '\'' || c == '"' => {
                quote = Some(c);
                quoted_field = true;
            }
            None if c == ',' => {
                out.push(finish(&mut cur, &mut quoted_field));
            }
            None => cur.push(c),
        }
    }
    if quote.is_some() {
        return Err(Error::parse(line_no, "unterminated quote"));
    }
    out.push(finish(&mut cur, &mut quoted_field));
    Ok(out)
}

fn finish(cur: &mut String, quoted: &mut bool) -> String {
    let v = if *quoted { cur.clone() } else { cur.trim().to_string() };
    cur.clear();
    *quoted = false;
    v
}
