//! Feature TSV: header `qid<TAB>docid<TAB><crit1>...<critN>`, one row per document.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, JudgedDataset};
use crate::aggregate::CriterionVector;
use crate::error::{DataError, ParseError};
use crate::eval::Judgments;
use crate::measure::CriterionSet;

pub fn parse_features(text: &str) -> Result<JudgedDataset, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::new(1, "missing header"))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() < 3 || fields[0] != "qid" || fields[1] != "docid" {
        return Err(ParseError::new(
            1,
            "header must be `qid<TAB>docid<TAB>` followed by at least one criterion",
        ));
    }
    let criteria = CriterionSet::new(fields[2..].iter().copied())
        .map_err(|e| ParseError::new(1, e.to_string()))?;
    let n = criteria.len();

    let mut vectors = Vec::new();
    let mut seen = HashSet::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != n + 2 {
            return Err(ParseError::new(
                line,
                format!("expected {} fields, found {}", n + 2, fields.len()),
            ));
        }
        let (qid, docid) = (fields[0], fields[1]);
        if qid.is_empty() || docid.is_empty() {
            return Err(ParseError::new(line, "empty query or document id"));
        }
        let scores = fields[2..]
            .iter()
            .map(|s| match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(ParseError::new(line, format!("invalid score {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !seen.insert((qid.to_string(), docid.to_string())) {
            return Err(ParseError::new(
                line,
                format!("duplicate document ({qid}, {docid})"),
            ));
        }
        vectors.push(CriterionVector::new(qid, docid, scores));
    }
    JudgedDataset::new(criteria, vectors, Judgments::new())
        .map_err(|e| ParseError::new(0, e.to_string()))
}

pub fn read_features(path: impl AsRef<Path>) -> Result<JudgedDataset, DataError> {
    Ok(parse_features(&read_text(path.as_ref())?)?)
}

/// Serializes the vectors (not the judgments); scores use the shortest
/// round-trip representation.
pub fn write_features(dataset: &JudgedDataset) -> String {
    let mut out = String::from("qid\tdocid");
    for name in dataset.criteria().names() {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for v in dataset.vectors() {
        let _ = write!(out, "{}\t{}", v.query_id, v.doc_id);
        for s in &v.scores {
            let _ = write!(out, "\t{s}");
        }
        out.push('\n');
    }
    out
}
