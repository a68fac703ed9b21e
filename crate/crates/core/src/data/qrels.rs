//! TREC qrels: `qid 0 docid grade`, whitespace separated.

use std::fmt::Write as _;
use std::path::Path;

use super::read_text;
use crate::error::{DataError, ParseError};
use crate::eval::Judgments;

pub fn parse_qrels(text: &str) -> Result<Judgments, ParseError> {
    let mut judgments = Judgments::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [qid, _, docid, grade] = fields[..] else {
            return Err(ParseError::new(
                n,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        };
        let grade: u32 = grade
            .parse()
            .map_err(|_| ParseError::new(n, format!("invalid grade {grade:?}")))?;
        if !judgments.insert(qid, docid, grade) {
            return Err(ParseError::new(
                n,
                format!("duplicate judgment ({qid}, {docid})"),
            ));
        }
    }
    Ok(judgments)
}

pub fn read_qrels(path: impl AsRef<Path>) -> Result<Judgments, DataError> {
    Ok(parse_qrels(&read_text(path.as_ref())?)?)
}

pub fn write_qrels(judgments: &Judgments) -> String {
    let mut out = String::new();
    for (q, d, g) in judgments.iter() {
        let _ = writeln!(out, "{q} 0 {d} {g}");
    }
    out
}
