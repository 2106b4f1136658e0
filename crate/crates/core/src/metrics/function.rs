use serde::{Deserialize, Serialize};

use crate::frontend::{FunctionDef, Statement, StmtKind};

/// Per-function complexity counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionMetrics {
    /// McCabe complexity: 1 + branch and loop points + ternaries.
    pub mccc: u64,
    /// `mccc` plus every `&&` and `||`.
    pub mccc_strict: u64,
    pub nl: u64,
    pub nle: u64,
    pub numpar: u64,
    pub nos: u64,
    pub noi: u64,
}

pub fn function_metrics(func: &FunctionDef) -> FunctionMetrics {
    let numpar = func.params.len() as u64;
    let Some(body) = &func.body else {
        return FunctionMetrics { mccc: 1, mccc_strict: 1, nl: 0, nle: 0, numpar, nos: 0, noi: 0 };
    };

    let mut decisions = 0u64;
    let mut logical_ops = 0u64;
    let mut nos = 0u64;
    let mut noi = 0u64;
    for stmt in &body.statements {
        stmt.walk(&mut |s: &Statement| {
            if matches!(s.kind, StmtKind::If | StmtKind::For | StmtKind::While | StmtKind::DoWhile) {
                decisions += 1;
            }
            decisions += u64::from(s.ternaries);
            logical_ops += u64::from(s.condition_ops);
            if !matches!(s.kind, StmtKind::Block | StmtKind::UncheckedBlock) {
                nos += 1;
            }
            noi += s.calls.iter().filter(|c| !c.is_builtin_guard).count() as u64;
        });
    }

    let mccc = 1 + decisions;
    FunctionMetrics {
        mccc,
        mccc_strict: mccc + logical_ops,
        nl: max_depth(&body.statements, 0, Nesting::AllControl),
        nle: max_depth(&body.statements, 0, Nesting::IfOnly),
        numpar,
        nos,
        noi,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Nesting {
    AllControl,
    IfOnly,
}

fn max_depth(stmts: &[Statement], level: u64, mode: Nesting) -> u64 {
    stmts.iter().map(|s| stmt_depth(s, level, mode)).max().unwrap_or(level)
}

/// Deepest nesting reached by `stmt` when it sits inside `level` control structures.
fn stmt_depth(stmt: &Statement, level: u64, mode: Nesting) -> u64 {
    match stmt.kind {
        StmtKind::If => {
            let own = level + 1;
            let then = stmt.children.first().map_or(own, |s| stmt_depth(s, own, mode));
            let other = match stmt.else_branch() {
                // `else if` continues the chain at this `if`'s level.
                Some(e) if e.kind == StmtKind::If => stmt_depth(e, level, mode),
                Some(e) => stmt_depth(e, own, mode),
                None => own,
            };
            then.max(other)
        }
        StmtKind::For | StmtKind::While | StmtKind::DoWhile => {
            let own = if mode == Nesting::AllControl { level + 1 } else { level };
            max_depth(&stmt.children, own, mode).max(own)
        }
        StmtKind::Block | StmtKind::UncheckedBlock => max_depth(&stmt.children, level, mode),
        _ => level,
    }
}
