//! Line-oriented reading shared by the edge, label and attribute formats.

use std::io::BufRead;

use crate::error::{Error, Result};

/// Yields `(line_number, fields)` for every non-blank, non-comment line.
/// Fields are split on tabs or runs of ASCII whitespace; line numbers are
/// 1-based.
pub(crate) fn for_each_record<R, F>(reader: R, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(usize, &[&str]) -> Result<()>,
{
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::parse(line_no, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_ascii_whitespace().collect();
        f(line_no, &fields)?;
    }
    Ok(())
}

pub(crate) fn parse_u64(line: usize, field: &str, what: &str) -> Result<u64> {
    field
        .parse::<u64>()
        .map_err(|_| Error::parse(line, format!("invalid {what} {field:?}")))
}
