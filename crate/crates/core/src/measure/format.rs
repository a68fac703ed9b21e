//! `capacity-v1` text format.
//!
//! ```text
//! capacity-v1
//! To,Re,Au
//! To<TAB>0.705
//! ...
//! To+Re<TAB>0.973
//! ```
//!
//! One line per proper nonempty subset; `mu(empty)` and `mu(all)` are implicit.

use std::fmt::Write as _;
use std::path::Path;

use super::{Capacity, CriterionSet, MAX_DENSE_CRITERIA};
use crate::error::{DataError, ParseError};

pub const CAPACITY_MAGIC: &str = "capacity-v1";

/// Serializes a capacity. Subsets are listed by size, then by mask; values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_capacity(mu: &Capacity) -> String {
    let criteria = mu.criteria();
    let mut out = String::new();
    out.push_str(CAPACITY_MAGIC);
    out.push('\n');
    out.push_str(&criteria.names().join(","));
    out.push('\n');
    let full = criteria.full_mask();
    let mut masks: Vec<usize> = (1..full).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let _ = writeln!(out, "{}\t{}", criteria.subset_label(mask), mu.value(mask));
    }
    out
}

pub fn parse_capacity(text: &str) -> Result<Capacity, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == CAPACITY_MAGIC => {}
        Some((n, l)) => {
            return Err(ParseError::new(
                n,
                format!("expected header {CAPACITY_MAGIC:?}, found {l:?}"),
            ))
        }
        None => return Err(ParseError::new(1, "empty capacity file")),
    }
    let (names_line, names) = lines
        .next()
        .ok_or_else(|| ParseError::new(2, "missing criterion names"))?;
    let criteria = CriterionSet::new(names.split(','))
        .map_err(|e| ParseError::new(names_line, e.to_string()))?;
    if criteria.len() > MAX_DENSE_CRITERIA {
        return Err(ParseError::new(
            names_line,
            format!("more than {MAX_DENSE_CRITERIA} criteria"),
        ));
    }

    let full = criteria.full_mask();
    let mut values: Vec<Option<f64>> = vec![None; full + 1];
    let mut last_line = names_line;
    for (n, line) in lines {
        last_line = n;
        let (subset, value) = line
            .split_once('\t')
            .ok_or_else(|| ParseError::new(n, "expected `subset<TAB>value`"))?;
        let mut mask = 0usize;
        for name in subset.split('+') {
            let i = criteria
                .index_of(name)
                .ok_or_else(|| ParseError::new(n, format!("unknown criterion {name:?}")))?;
            if mask & (1 << i) != 0 {
                return Err(ParseError::new(n, format!("criterion {name:?} repeated")));
            }
            mask |= 1 << i;
        }
        if mask == full {
            return Err(ParseError::new(n, "the full set is implicit (mu = 1)"));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| ParseError::new(n, format!("invalid value {value:?}")))?;
        if !value.is_finite() {
            return Err(ParseError::new(n, "value is not finite"));
        }
        if values[mask].replace(value).is_some() {
            return Err(ParseError::new(
                n,
                format!("duplicate subset {}", criteria.subset_label(mask)),
            ));
        }
    }
    if let Some(mask) = (1..full).find(|&m| values[m].is_none()) {
        return Err(ParseError::new(
            last_line + 1,
            format!("missing subset {}", criteria.subset_label(mask)),
        ));
    }
    let mut dense: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    dense[full] = 1.0;
    Capacity::from_dense(criteria, dense).map_err(|e| ParseError::new(last_line, e.to_string()))
}

pub fn read_capacity(path: impl AsRef<Path>) -> Result<Capacity, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_capacity(&text)?)
}
