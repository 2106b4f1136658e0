use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ast::ContractDef;
use super::lexer::Token;

/// Source, logical, and comment line counts over one contract's span.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounts {
    pub sloc: u64,
    pub lloc: u64,
    pub cloc: u64,
}

/// Counts lines inside `contract.span`.
///
/// `sloc` is the span length including blank and comment lines. `lloc`
/// counts lines holding at least one non-comment token, and `cloc` lines
/// touched by a comment, so a line mixing code and a trailing comment
/// counts toward both.
pub fn line_accounting(contract: &ContractDef, tokens: &[Token]) -> LineCounts {
    let span = contract.span;
    let mut code = BTreeSet::new();
    let mut comment = BTreeSet::new();
    for tok in tokens {
        if tok.span.end_line < span.start || tok.span.start_line > span.end {
            continue;
        }
        let lines = tok.span.start_line.max(span.start)..=tok.span.end_line.min(span.end);
        if tok.kind.is_comment() {
            comment.extend(lines);
        } else {
            code.extend(lines);
        }
    }
    LineCounts { sloc: u64::from(span.len()), lloc: code.len() as u64, cloc: comment.len() as u64 }
}
