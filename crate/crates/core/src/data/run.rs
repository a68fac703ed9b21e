//! TREC run files: `qid Q0 docid rank score tag`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::read_text;
use crate::aggregate::{RankedEntry, RankedList};
use crate::error::{DataError, ParseError};

/// Scores are written with this many decimal places.
pub const RUN_SCORE_DECIMALS: usize = 6;

pub fn write_run(rankings: &[RankedList], tag: &str) -> Result<String, DataError> {
    if tag.is_empty() || tag.chars().any(char::is_whitespace) {
        return Err(DataError::InvalidParameter(format!(
            "run tag {tag:?} must be non-empty without whitespace"
        )));
    }
    let mut out = String::new();
    for list in rankings {
        for e in &list.entries {
            let _ = writeln!(
                out,
                "{} Q0 {} {} {:.prec$} {tag}",
                list.query_id,
                e.doc_id,
                e.rank,
                e.score,
                prec = RUN_SCORE_DECIMALS
            );
        }
    }
    Ok(out)
}

/// Parses a run; queries keep the order of their first line, entries keep
/// file order and must be ranked 1, 2, 3, ... within each query.
pub fn parse_run(text: &str) -> Result<Vec<RankedList>, ParseError> {
    let mut lists: Vec<RankedList> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [qid, _, docid, rank, score, _tag] = fields[..] else {
            return Err(ParseError::new(
                n,
                format!("expected 6 fields, found {}", fields.len()),
            ));
        };
        let rank: usize = rank
            .parse()
            .map_err(|_| ParseError::new(n, format!("invalid rank {rank:?}")))?;
        let score: f64 = match score.parse::<f64>() {
            Ok(s) if s.is_finite() => s,
            _ => return Err(ParseError::new(n, format!("invalid score {score:?}"))),
        };
        let slot = *index.entry(qid.to_string()).or_insert_with(|| {
            lists.push(RankedList {
                query_id: qid.to_string(),
                entries: Vec::new(),
            });
            lists.len() - 1
        });
        let list = &mut lists[slot];
        let expected = list.entries.len() + 1;
        if rank != expected {
            return Err(ParseError::new(
                n,
                format!("rank {rank} for query {qid} where {expected} was expected"),
            ));
        }
        list.entries.push(RankedEntry {
            doc_id: docid.to_string(),
            score,
            rank,
        });
    }
    Ok(lists)
}

pub fn read_run(path: impl AsRef<Path>) -> Result<Vec<RankedList>, DataError> {
    Ok(parse_run(&read_text(path.as_ref())?)?)
}
