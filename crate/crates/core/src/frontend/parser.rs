//! Recursive-descent parser over the token stream.
//!
//! Only the structure the metrics need is modelled. Expressions are not
//! turned into trees; each statement instead records the facts read off
//! its own tokens (logical operators, ternaries, call sites). Constructs
//! outside the subset are brace-matched and kept as opaque statements.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::lexer::{tokenize, LexError, Token, TokenKind};

/// A recoverable problem found while parsing one file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub path: String,
    pub line: u32,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path, self.line, self.message)
    }
}

#[derive(Debug, Clone)]
pub struct ParseOutput {
    pub unit: SourceUnit,
    pub diagnostics: Vec<Diagnostic>,
}

/// Tokens, syntax tree, and diagnostics for one source file.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub unit: SourceUnit,
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Tokenizes and parses `source`, recording its physical line count.
pub fn parse_source(source: &str, path: &str) -> Result<ParsedFile, LexError> {
    let tokens = tokenize(source)?;
    let ParseOutput { mut unit, diagnostics } = parse_file(&tokens, path);
    unit.total_lines = count_lines(source);
    Ok(ParsedFile { unit, tokens, diagnostics })
}

fn count_lines(source: &str) -> u32 {
    let mut lines = 0;
    let mut chars = source.chars().peekable();
    let mut open = false;
    while let Some(c) = chars.next() {
        match c {
            '\r' if chars.peek() == Some(&'\n') => {}
            '\n' | '\r' => {
                lines += 1;
                open = false;
            }
            _ => open = true,
        }
    }
    lines + u32::from(open)
}

/// Builds a [`SourceUnit`] from `tokens`. A contract that fails to parse is
/// dropped with a diagnostic and parsing resumes at the next top-level
/// contract, interface, or library.
pub fn parse_file(tokens: &[Token], path: &str) -> ParseOutput {
    let toks: Vec<&Token> = tokens.iter().filter(|t| !t.kind.is_comment()).collect();
    let mut p = Parser { toks, pos: 0, last_line: 1 };
    let mut unit = SourceUnit {
        path: path.to_string(),
        pragma: None,
        imports: Vec::new(),
        contracts: Vec::new(),
        total_lines: tokens.last().map_or(0, |t| t.span.end_line),
    };
    let mut diagnostics = Vec::new();
    let mut diag = |line: u32, message: String| diagnostics.push(Diagnostic { path: path.to_string(), line, message });
    let mut file_types = BTreeSet::new();

    while let Some(tok) = p.peek() {
        if tok.kind == TokenKind::PragmaDirective {
            if unit.pragma.is_none() {
                unit.pragma = pragma_version(&tok.text);
            }
            p.bump();
        } else if p.at_contract_start() {
            let start = p.pos;
            match p.parse_contract(&mut file_types) {
                Ok(contract) => {
                    if unit.contracts.iter().any(|c| c.name == contract.name) {
                        diag(contract.span.start, format!("duplicate contract `{}`; keeping the first definition", contract.name));
                    } else {
                        unit.contracts.push(contract);
                    }
                }
                Err(failure) => {
                    diag(failure.line, failure.message);
                    p.pos = start + 1;
                    while p.peek().is_some() && !p.at_contract_start() {
                        p.pos += 1;
                    }
                }
            }
        } else if tok.is("import") {
            let line = tok.span.start_line;
            let mut text = Vec::new();
            p.bump();
            while let Some(t) = p.bump() {
                if t.is(";") {
                    break;
                }
                text.push(t);
            }
            if text.is_empty() {
                diag(line, "empty import directive".into());
            }
            unit.imports.push(join_tokens(&text));
        } else if tok.is("}") {
            diag(tok.span.start_line, "unexpected `}` at file level".into());
            p.bump();
        } else {
            if matches!(tok.text.as_str(), "struct" | "enum" | "type") {
                if let Some(name) = p.nth(1).filter(|t| t.kind == TokenKind::Identifier) {
                    file_types.insert(name.text.clone());
                }
            }
            p.skip_item();
        }
    }

    for contract in &mut unit.contracts {
        contract.filter_type_refs(&file_types);
    }
    ParseOutput { unit, diagnostics }
}

fn pragma_version(text: &str) -> Option<String> {
    let rest = text.strip_prefix("pragma")?.trim_start();
    let rest = rest.strip_prefix("solidity")?;
    Some(rest.trim_end_matches(';').trim().to_string())
}

impl ContractDef {
    fn filter_type_refs(&mut self, local_types: &BTreeSet<String>) {
        let keep = |refs: &mut Vec<String>| refs.retain(|r| !local_types.contains(r));
        for var in &mut self.state_vars {
            keep(&mut var.type_refs);
        }
        for func in &mut self.functions {
            for param in func.params.iter_mut().chain(func.returns.iter_mut()) {
                keep(&mut param.type_refs);
            }
        }
    }
}

struct ParseFailure {
    line: u32,
    message: String,
}

type PResult<T> = Result<T, ParseFailure>;

#[derive(Default)]
struct ExprFacts {
    condition_ops: u32,
    ternaries: u32,
    calls: Vec<CallSite>,
}

struct Parser<'t> {
    toks: Vec<&'t Token>,
    pos: usize,
    /// End line of the most recently consumed token.
    last_line: u32,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos).copied()
    }

    fn nth(&self, k: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + k).copied()
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.peek()?;
        self.pos += 1;
        self.last_line = t.span.end_line;
        Some(t)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn line(&self) -> u32 {
        self.peek().map_or(self.last_line, |t| t.span.start_line)
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseFailure { line: self.line(), message: message.into() })
    }

    fn at_contract_start(&self) -> bool {
        let Some(t) = self.peek() else { return false };
        t.kind == TokenKind::Keyword
            && (matches!(t.text.as_str(), "contract" | "interface" | "library")
                || (t.text == "abstract" && self.nth(1).is_some_and(|n| n.is("contract"))))
    }

    fn expect(&mut self, text: &str, context: &str) -> PResult<&'t Token> {
        match self.peek() {
            Some(t) if t.is(text) => Ok(self.bump().unwrap()),
            Some(t) => self.fail(format!("{context}: expected `{text}`, found `{}`", t.text)),
            None => self.fail(format!("{context}: expected `{text}`, found end of file")),
        }
    }

    fn identifier(&mut self, context: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                self.bump();
                Ok(t.text.clone())
            }
            Some(t) => self.fail(format!("{context}: expected identifier, found `{}`", t.text)),
            None => self.fail(format!("{context}: expected identifier, found end of file")),
        }
    }

    /// `Ident ( . Ident )*`
    fn path(&mut self, context: &str) -> PResult<String> {
        let mut path = self.identifier(context)?;
        while self.at(".") && self.nth(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump();
            path.push('.');
            path.push_str(&self.bump().unwrap().text);
        }
        Ok(path)
    }

    /// Consumes a bracketed group starting at the opening token and returns
    /// the tokens strictly inside it.
    fn group(&mut self, open: &str, close: &str, context: &str) -> PResult<Vec<&'t Token>> {
        let start_line = self.line();
        self.expect(open, context)?;
        let mut depth = 1usize;
        let mut inner = Vec::new();
        loop {
            let Some(t) = self.bump() else {
                return Err(ParseFailure {
                    line: start_line,
                    message: format!("{context}: unbalanced `{open}` never closed"),
                });
            };
            if t.is(open) {
                depth += 1;
            } else if t.is(close) {
                depth -= 1;
                if depth == 0 {
                    return Ok(inner);
                }
            }
            inner.push(t);
        }
    }

    /// Skips one file-level item: through `;` or a brace-delimited body.
    fn skip_item(&mut self) {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if depth == 0 && self.at_contract_start() {
                return;
            }
            match t.text.as_str() {
                "(" | "[" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => {
                    self.bump();
                    return;
                }
                "{" if depth == 0 => {
                    if self.group("{", "}", "declaration").is_err() {
                        self.pos = self.toks.len();
                    }
                    return;
                }
                "}" if depth == 0 => return,
                _ => {}
            }
            self.bump();
        }
    }

    fn parse_contract(&mut self, file_types: &mut BTreeSet<String>) -> PResult<ContractDef> {
        let start = self.line();
        let is_abstract = self.eat("abstract");
        let kind = match self.bump().map(|t| t.text.as_str()) {
            Some("contract") => ContractKind::Contract,
            Some("interface") => ContractKind::Interface,
            _ => ContractKind::Library,
        };
        let name = self.identifier("malformed contract header")?;
        let header = format!("malformed header of contract `{name}`");
        let mut base_names = Vec::new();
        if self.eat("is") {
            loop {
                base_names.push(self.path(&header)?);
                if self.at("(") {
                    self.group("(", ")", &header)?;
                }
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect("{", &header)?;

        let mut contract = ContractDef {
            name,
            kind,
            is_abstract,
            base_names,
            state_vars: Vec::new(),
            functions: Vec::new(),
            events: Vec::new(),
            structs: Vec::new(),
            enums: Vec::new(),
            span: LineSpan::new(start, start),
        };
        let unclosed = |p: &Self, name: &str| -> PResult<ContractDef> {
            Err(ParseFailure { line: start, message: format!("unbalanced braces: contract `{name}` is never closed (stopped at line {})", p.line()) })
        };

        loop {
            let Some(tok) = self.peek() else {
                return unclosed(self, &contract.name);
            };
            if self.at_contract_start() {
                return unclosed(self, &contract.name);
            }
            match tok.text.as_str() {
                "}" if tok.kind == TokenKind::Punctuation => {
                    self.bump();
                    break;
                }
                "function" | "constructor" | "fallback" | "receive" | "modifier" if tok.kind == TokenKind::Keyword => {
                    let func = self.parse_function(&contract.name)?;
                    contract.functions.push(func);
                }
                "event" if tok.kind == TokenKind::Keyword => {
                    self.bump();
                    let event = self.identifier("event declaration")?;
                    contract.events.push(event);
                    self.skip_member()?;
                }
                "struct" | "enum" if tok.kind == TokenKind::Keyword => {
                    self.bump();
                    let type_name = self.identifier("type declaration")?;
                    file_types.insert(type_name.clone());
                    if tok.text == "struct" {
                        contract.structs.push(type_name);
                    } else {
                        contract.enums.push(type_name);
                    }
                    self.group("{", "}", "type declaration body")?;
                }
                "type" if self.nth(2).is_some_and(|t| t.is("is")) => {
                    if let Some(t) = self.nth(1) {
                        file_types.insert(t.text.clone());
                    }
                    self.skip_member()?;
                }
                "using" => self.skip_member()?,
                "error" if self.nth(1).is_some_and(|t| t.kind == TokenKind::Identifier) && self.nth(2).is_some_and(|t| t.is("(")) => {
                    self.skip_member()?
                }
                _ => {
                    if let Some(var) = self.parse_state_var()? {
                        contract.state_vars.push(var);
                    }
                }
            }
        }
        contract.span.end = self.last_line;
        Ok(contract)
    }

    /// Skips a member through its terminating `;`.
    fn skip_member(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            let Some(t) = self.peek() else { return self.fail("expected `;` before end of file") };
            if self.at_contract_start() || (depth == 0 && t.is("}")) {
                return self.fail(format!("expected `;`, found `{}`", t.text));
            }
            self.bump();
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                ";" if depth == 0 => return Ok(()),
                _ => {}
            }
        }
    }

    fn parse_state_var(&mut self) -> PResult<Option<StateVarDecl>> {
        let start = self.line();
        let mut depth = 0usize;
        let mut toks = Vec::new();
        loop {
            let Some(t) = self.peek() else { return self.fail("expected `;` before end of file") };
            if self.at_contract_start() {
                return self.fail(format!("expected `;`, found `{}`", t.text));
            }
            if depth == 0 {
                if t.is(";") {
                    self.bump();
                    break;
                }
                if t.is("}") {
                    return self.fail("expected `;` before `}`");
                }
                if t.is("{") {
                    // Unknown member with a body.
                    self.group("{", "}", "declaration")?;
                    return Ok(None);
                }
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                _ => {}
            }
            toks.push(t);
            self.bump();
        }

        let split = top_level_position(&toks, "=").unwrap_or(toks.len());
        let (decl, init) = toks.split_at(split);
        let mut kept: Vec<&Token> = Vec::new();
        let mut i = 0;
        while i < decl.len() {
            let t = decl[i];
            let attribute = t.kind == TokenKind::Keyword
                && matches!(t.text.as_str(), "public" | "private" | "internal" | "constant" | "immutable" | "transient" | "override");
            if attribute {
                if t.text == "override" && decl.get(i + 1).is_some_and(|n| n.is("(")) {
                    i = matching_close(decl, i + 1) + 1;
                } else {
                    i += 1;
                }
                continue;
            }
            kept.push(t);
            i += 1;
        }
        let Some(name_at) = kept.iter().rposition(|t| t.kind == TokenKind::Identifier) else {
            return Ok(None);
        };
        if name_at == 0 {
            return Ok(None);
        }
        let ty = &kept[..name_at];
        let mut facts = ExprFacts::default();
        scan_expr(init, &mut facts);
        Ok(Some(StateVarDecl {
            name: kept[name_at].text.clone(),
            type_text: join_tokens(ty),
            type_refs: type_refs(ty),
            new_targets: facts.calls.into_iter().filter(|c| c.is_new_expression).map(|c| c.callee).collect(),
            span: LineSpan::new(start, self.last_line),
        }))
    }

    fn parse_function(&mut self, contract_name: &str) -> PResult<FunctionDef> {
        let start = self.line();
        let keyword = self.bump().unwrap();
        let (kind, name) = match keyword.text.as_str() {
            "function" => match self.peek() {
                Some(t) if t.kind == TokenKind::Identifier || t.is("receive") || t.is("fallback") => {
                    self.bump();
                    if t.text == contract_name {
                        (FunctionKind::Constructor, None)
                    } else {
                        (FunctionKind::Function, Some(t.text.clone()))
                    }
                }
                _ => (FunctionKind::Fallback, None),
            },
            "constructor" => (FunctionKind::Constructor, None),
            "fallback" => (FunctionKind::Fallback, None),
            "receive" => (FunctionKind::Receive, None),
            _ => (FunctionKind::ModifierDef, Some(self.identifier("modifier declaration")?)),
        };
        let context = match &name {
            Some(n) => format!("function `{n}`"),
            None => format!("{kind:?} of `{contract_name}`").to_lowercase(),
        };
        let params = if self.at("(") { self.param_list(&context)? } else { Vec::new() };
        let mut returns = Vec::new();
        loop {
            let Some(t) = self.peek() else { return self.fail(format!("{context}: unexpected end of file in header")) };
            if self.at_contract_start() || t.is("}") {
                return self.fail(format!("{context}: unexpected `{}` in header", t.text));
            }
            if t.is("{") || t.is(";") {
                break;
            }
            if t.is("returns") {
                self.bump();
                returns = self.param_list(&context)?;
            } else if t.is("(") {
                self.group("(", ")", &context)?;
            } else {
                self.bump();
            }
        }
        let body = if self.eat(";") { None } else { Some(self.parse_block(&context)?) };
        Ok(FunctionDef { name, kind, params, returns, body, span: LineSpan::new(start, self.last_line) })
    }

    fn param_list(&mut self, context: &str) -> PResult<Vec<Param>> {
        let inner = self.group("(", ")", context)?;
        let mut params = Vec::new();
        let mut depth = 0usize;
        let mut current: Vec<&Token> = Vec::new();
        for t in inner {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                "," if depth == 0 => {
                    params.extend(param_from(&current));
                    current.clear();
                    continue;
                }
                _ => {}
            }
            current.push(t);
        }
        params.extend(param_from(&current));
        Ok(params)
    }

    fn parse_block(&mut self, context: &str) -> PResult<Block> {
        let start = self.line();
        self.expect("{", context)?;
        let mut statements = Vec::new();
        loop {
            match self.peek() {
                None => {
                    return Err(ParseFailure { line: start, message: format!("{context}: unbalanced braces, block never closed") })
                }
                Some(_) if self.at_contract_start() => {
                    return Err(ParseFailure { line: start, message: format!("{context}: unbalanced braces, block never closed") })
                }
                Some(t) if t.is("}") => {
                    self.bump();
                    break;
                }
                Some(_) => statements.push(self.parse_statement(context)?),
            }
        }
        Ok(Block { statements, span: LineSpan::new(start, self.last_line) })
    }

    fn parse_statement(&mut self, context: &str) -> PResult<Statement> {
        let start = self.line();
        let first = self.peek().expect("caller checked for a token");
        let mut facts = ExprFacts::default();
        let mut children = Vec::new();

        let kind = match first.text.as_str() {
            "{" if first.kind == TokenKind::Punctuation => {
                let block = self.parse_block(context)?;
                children = block.statements;
                StmtKind::Block
            }
            "unchecked" if self.nth(1).is_some_and(|t| t.is("{")) => {
                self.bump();
                children = self.parse_block(context)?.statements;
                StmtKind::UncheckedBlock
            }
            "if" if first.kind == TokenKind::Keyword => {
                self.bump();
                let cond = self.group("(", ")", context)?;
                scan_expr(&cond, &mut facts);
                children.push(self.parse_substatement(context)?);
                if self.eat("else") {
                    children.push(self.parse_substatement(context)?);
                }
                StmtKind::If
            }
            "for" | "while" if first.kind == TokenKind::Keyword => {
                self.bump();
                let header = self.group("(", ")", context)?;
                scan_expr(&header, &mut facts);
                children.push(self.parse_substatement(context)?);
                if first.text == "for" {
                    StmtKind::For
                } else {
                    StmtKind::While
                }
            }
            "do" if first.kind == TokenKind::Keyword => {
                self.bump();
                children.push(self.parse_substatement(context)?);
                self.expect("while", context)?;
                let cond = self.group("(", ")", context)?;
                scan_expr(&cond, &mut facts);
                self.eat(";");
                StmtKind::DoWhile
            }
            "assembly" if first.kind == TokenKind::Keyword => {
                self.bump();
                while !self.at("{") {
                    if self.peek().is_none() {
                        return self.fail(format!("{context}: assembly block without body"));
                    }
                    if self.at("(") {
                        self.group("(", ")", context)?;
                    } else {
                        self.bump();
                    }
                }
                self.group("{", "}", context)?;
                StmtKind::AssemblyOpaque
            }
            "try" if first.kind == TokenKind::Keyword => {
                self.bump();
                self.skip_to_body(context)?;
                while self.eat("catch") {
                    self.skip_to_body(context)?;
                }
                StmtKind::AssemblyOpaque
            }
            _ => {
                let toks = self.simple_statement(context)?;
                classify_simple(&toks, &mut facts)
            }
        };
        Ok(Statement {
            kind,
            children,
            condition_ops: facts.condition_ops,
            ternaries: facts.ternaries,
            calls: facts.calls,
            span: LineSpan::new(start, self.last_line),
        })
    }

    fn parse_substatement(&mut self, context: &str) -> PResult<Statement> {
        if self.peek().is_none() {
            return self.fail(format!("{context}: expected statement, found end of file"));
        }
        self.parse_statement(context)
    }

    /// Skips header tokens up to a `{ ... }` body and the body itself.
    fn skip_to_body(&mut self, context: &str) -> PResult<()> {
        while !self.at("{") {
            if self.peek().is_none() || self.at_contract_start() || self.at("}") {
                return self.fail(format!("{context}: expected block"));
            }
            if self.at("(") {
                self.group("(", ")", context)?;
            } else {
                self.bump();
            }
        }
        self.group("{", "}", context).map(|_| ())
    }

    /// Tokens of a `;`-terminated statement (terminator excluded). A missing
    /// `;` before the enclosing `}` is tolerated.
    fn simple_statement(&mut self, context: &str) -> PResult<Vec<&'t Token>> {
        let mut depth = 0usize;
        let mut toks = Vec::new();
        loop {
            let Some(t) = self.peek() else {
                return self.fail(format!("{context}: unexpected end of file in statement"));
            };
            if self.at_contract_start() {
                return self.fail(format!("{context}: unbalanced braces before `{}`", t.text));
            }
            if depth == 0 {
                if t.is(";") {
                    self.bump();
                    break;
                }
                if t.is("}") {
                    if toks.is_empty() {
                        return self.fail(format!("{context}: unexpected `}}`"));
                    }
                    break;
                }
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.saturating_sub(1),
                _ => {}
            }
            toks.push(t);
            self.bump();
        }
        Ok(toks)
    }
}

fn classify_simple(toks: &[&Token], facts: &mut ExprFacts) -> StmtKind {
    let Some(first) = toks.first() else {
        return StmtKind::Expression;
    };
    let second = toks.get(1);
    match first.text.as_str() {
        "return" if first.kind == TokenKind::Keyword => {
            scan_expr(&toks[1..], facts);
            StmtKind::Return
        }
        "emit" if first.kind == TokenKind::Keyword => {
            let mut i = 1;
            while i < toks.len() && (toks[i].kind == TokenKind::Identifier || toks[i].is(".")) {
                i += 1;
            }
            scan_expr(&toks[i..], facts);
            StmtKind::Emit
        }
        "break" if first.kind == TokenKind::Keyword => StmtKind::Break,
        "continue" if first.kind == TokenKind::Keyword => StmtKind::Continue,
        "throw" if first.kind == TokenKind::Keyword => StmtKind::RequireLike,
        "require" | "assert" | "revert"
            if first.kind == TokenKind::Identifier
                && second.is_some_and(|t| t.is("(") || (first.text == "revert" && t.kind == TokenKind::Identifier)) =>
        {
            scan_expr(toks, facts);
            StmtKind::RequireLike
        }
        _ => {
            scan_expr(toks, facts);
            if is_declaration(toks) {
                StmtKind::VariableDeclaration
            } else {
                StmtKind::Expression
            }
        }
    }
}

/// Heuristic: does this statement declare a local variable?
fn is_declaration(toks: &[&Token]) -> bool {
    let first = toks[0];
    if first.is("(") {
        // `(uint a, , Foo b) = ...` versus the tuple assignment `(a, b) = ...`.
        let close = matching_close(toks, 0);
        let mut depth = 0usize;
        let mut run = 0usize;
        let mut last_ident = false;
        for t in &toks[1..close.min(toks.len())] {
            match t.text.as_str() {
                "(" | "[" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                "," if depth == 0 => {
                    if run >= 2 && last_ident {
                        return true;
                    }
                    run = 0;
                    continue;
                }
                _ => {}
            }
            run += 1;
            last_ident = t.kind == TokenKind::Identifier;
        }
        return run >= 2 && last_ident;
    }
    let mut i = 0;
    if first.is("mapping") {
        return true;
    }
    if first.kind == TokenKind::Keyword && super::lexer::is_elementary_type(&first.text) {
        // `uint(x)` is a conversion, `address payable a` a declaration.
        return !toks.get(1).is_some_and(|t| t.is("("));
    }
    if first.is("function") {
        return true;
    }
    if first.kind != TokenKind::Identifier {
        return false;
    }
    i += 1;
    while i + 1 < toks.len() && toks[i].is(".") && toks[i + 1].kind == TokenKind::Identifier {
        i += 2;
    }
    // Array type suffixes: `Foo[]`, `Foo[3]`.
    while i < toks.len() && toks[i].is("[") {
        let close = matching_close(toks, i);
        let inside = &toks[i + 1..close.min(toks.len())];
        if inside.len() > 1 || inside.first().is_some_and(|t| t.kind != TokenKind::Literal) {
            return false;
        }
        i = close + 1;
    }
    toks.get(i).is_some_and(|t| {
        t.kind == TokenKind::Identifier || matches!(t.text.as_str(), "memory" | "storage" | "calldata")
    })
}

fn matching_close(toks: &[&Token], open_at: usize) -> usize {
    let (open, close) = match toks[open_at].text.as_str() {
        "(" => ("(", ")"),
        "[" => ("[", "]"),
        _ => ("{", "}"),
    };
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(open_at) {
        if t.is(open) {
            depth += 1;
        } else if t.is(close) {
            depth -= 1;
            if depth == 0 {
                return i;
            }
        }
    }
    toks.len()
}

fn top_level_position(toks: &[&Token], text: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth = depth.saturating_sub(1),
            _ if depth == 0 && t.is(text) => return Some(i),
            _ => {}
        }
    }
    None
}

/// Records logical operators, ternaries, and call sites found in `toks`.
fn scan_expr(toks: &[&Token], facts: &mut ExprFacts) {
    let is_path_segment = |t: &Token| t.kind == TokenKind::Identifier || t.is("this") || t.is("super");
    let mut i = 0;
    while i < toks.len() {
        let t = toks[i];
        if t.kind == TokenKind::Literal {
            i += 1;
            continue;
        }
        match t.text.as_str() {
            "&&" | "||" => facts.condition_ops += 1,
            "?" => facts.ternaries += 1,
            "new" if t.kind == TokenKind::Keyword => {
                let mut j = i + 1;
                if toks.get(j).is_some_and(|n| n.kind == TokenKind::Identifier) {
                    let mut path = toks[j].text.clone();
                    j += 1;
                    while j + 1 < toks.len() && toks[j].is(".") && toks[j + 1].kind == TokenKind::Identifier {
                        path.push('.');
                        path.push_str(&toks[j + 1].text);
                        j += 2;
                    }
                    facts.calls.push(CallSite::new(path, true));
                }
                i = j;
                continue;
            }
            "(" if i > 0 => {
                let mut end = i;
                if toks[end - 1].is("}") {
                    // Call options: `target.call{value: v}(...)`.
                    let mut depth = 0usize;
                    let mut k = end - 1;
                    loop {
                        if toks[k].is("}") {
                            depth += 1;
                        } else if toks[k].is("{") {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                    }
                    end = k;
                }
                if end > 0 && toks[end - 1].kind == TokenKind::Identifier {
                    let mut start = end - 1;
                    while start >= 2 && toks[start - 1].is(".") && is_path_segment(toks[start - 2]) {
                        start -= 2;
                    }
                    let preceded_by = start.checked_sub(1).map(|k| toks[k]);
                    if preceded_by.is_some_and(|p| p.is("new")) {
                        // already recorded as a new-expression
                    } else if preceded_by.is_some_and(|p| p.kind == TokenKind::Identifier && p.text == "revert") {
                        facts.calls.push(CallSite::new("revert", false));
                    } else {
                        let path: String = toks[start..end].iter().map(|t| t.text.as_str()).collect();
                        facts.calls.push(CallSite::new(path, false));
                    }
                }
            }
            _ => {}
        }
        i += 1;
    }
}

fn param_from(toks: &[&Token]) -> Option<Param> {
    if toks.is_empty() {
        return None;
    }
    let last = toks[toks.len() - 1];
    let (name, ty) = if toks.len() >= 2 && last.kind == TokenKind::Identifier {
        (Some(last.text.clone()), &toks[..toks.len() - 1])
    } else {
        (None, toks)
    };
    Some(Param { name, type_text: join_tokens(ty), type_refs: type_refs(ty) })
}

/// Roots of user-defined type paths mentioned in a type (`A.B` yields `A`).
fn type_refs(toks: &[&Token]) -> Vec<String> {
    let mut refs: Vec<String> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        if t.kind == TokenKind::Identifier && !(i > 0 && toks[i - 1].is(".")) && !refs.contains(&t.text) {
            refs.push(t.text.clone());
        }
    }
    refs
}

/// Joins tokens with a space only between adjacent word-like tokens.
pub(crate) fn join_tokens(toks: &[&Token]) -> String {
    let wordy = |t: &Token| matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword | TokenKind::Literal);
    let mut out = String::new();
    for (i, t) in toks.iter().enumerate() {
        if i > 0 && wordy(toks[i - 1]) && wordy(t) {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> ParseOutput {
        let tokens = tokenize(src).unwrap();
        parse_file(&tokens, "t.sol")
    }

    fn body(src: &str) -> Vec<Statement> {
        let out = parse(&format!("contract A {{ function f() public {{ {src} }} }}"));
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        out.unit.contracts[0].functions[0].body.clone().unwrap().statements
    }

    #[test]
    fn empty_contract() {
        let out = parse("contract A {}");
        assert!(out.diagnostics.is_empty());
        let c = &out.unit.contracts[0];
        assert_eq!(c.name, "A");
        assert!(c.functions.is_empty() && c.state_vars.is_empty());
        assert_eq!(c.span, LineSpan::new(1, 1));
    }

    #[test]
    fn base_names_keep_order() {
        let out = parse("contract A is B, C {}");
        assert_eq!(out.unit.contracts[0].base_names, ["B", "C"]);
        let out = parse("contract T is ERC20(\"n\", \"s\"), Ownable {}");
        assert_eq!(out.unit.contracts[0].base_names, ["ERC20", "Ownable"]);
    }

    #[test]
    fn if_with_expression_statement() {
        let out = parse("contract A { function f() public { if (true) { x = 1; } } }");
        let c = &out.unit.contracts[0];
        assert_eq!(c.functions.len(), 1);
        let stmts = &c.functions[0].body.as_ref().unwrap().statements;
        assert_eq!(stmts.len(), 1);
        assert_eq!(stmts[0].kind, StmtKind::If);
        let then = &stmts[0].children[0];
        assert_eq!(then.kind, StmtKind::Block);
        assert_eq!(then.children.len(), 1);
        assert_eq!(then.children[0].kind, StmtKind::Expression);
    }

    #[test]
    fn recovery_keeps_well_formed_contract() {
        let out = parse("contract Bad { function f() public { if (x) { }\ncontract Good { uint x; }");
        assert_eq!(out.unit.contracts.len(), 1);
        assert_eq!(out.unit.contracts[0].name, "Good");
        assert_eq!(out.diagnostics.len(), 1);
        assert!(out.diagnostics[0].to_string().starts_with("t.sol:1: "));

        let out = parse("contract { }\ncontract Good {}");
        assert_eq!(out.unit.contracts.len(), 1);
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn duplicate_contract_names_are_reported() {
        let out = parse("contract A {} contract A { uint x; }");
        assert_eq!(out.unit.contracts.len(), 1);
        assert!(out.unit.contracts[0].state_vars.is_empty());
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn function_kinds_and_params() {
        let out = parse(
            "contract A {
                constructor(uint a) {}
                fallback() external {}
                receive() external payable {}
                function A() public {}
                function () external {}
                modifier only(address who) { _; }
                function g(uint a, Foo memory b) external returns (uint, Bar c);
            }",
        );
        let kinds: Vec<FunctionKind> = out.unit.contracts[0].functions.iter().map(|f| f.kind).collect();
        use FunctionKind::*;
        assert_eq!(kinds, [Constructor, Fallback, Receive, Constructor, Fallback, ModifierDef, Function]);
        let g = &out.unit.contracts[0].functions[6];
        assert!(g.body.is_none());
        assert_eq!(g.params.len(), 2);
        assert_eq!(g.params[1].name.as_deref(), Some("b"));
        assert_eq!(g.params[1].type_refs, ["Foo"]);
        assert_eq!(g.returns.len(), 2);
        assert_eq!(g.returns[0].name, None);
        assert_eq!(g.returns[1].type_refs, ["Bar"]);
    }

    #[test]
    fn state_vars_and_declarations() {
        let out = parse(
            "contract A {
                struct S { uint a; }
                enum E { X, Y }
                event Ev(uint indexed a);
                error Oops(uint);
                using SafeMath for uint256;
                mapping(address => uint) public balances;
                IERC20 private immutable token;
                S internal s;
                Child c = new Child();
                uint constant MAX = 10;
            }",
        );
        let c = &out.unit.contracts[0];
        let names: Vec<&str> = c.state_vars.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["balances", "token", "s", "c", "MAX"]);
        assert_eq!(c.structs, ["S"]);
        assert_eq!(c.enums, ["E"]);
        assert_eq!(c.events, ["Ev"]);
        assert_eq!(c.state_vars[1].type_refs, ["IERC20"]);
        assert!(c.state_vars[2].type_refs.is_empty(), "local struct is not a coupling");
        assert_eq!(c.state_vars[3].new_targets, ["Child"]);
    }

    #[test]
    fn statement_kinds() {
        let stmts = body(
            "uint a = 1; (uint b, , bool ok) = g(); (a, b) = (b, a); Foo memory m; a[i] = 2;
             require(a > 0, \"x\"); revert Err(1); emit Ev(a); return; break; continue;
             unchecked { a++; } assembly { mstore(0, 1) } try t.f() returns (uint v) { a = v; } catch { }
             for (uint i = 0; i < n; i++) {} while (a > 0) a--; do { a++; } while (a < 3);
             uint(a); Foo[] storage arr = list;",
        );
        use StmtKind::*;
        let kinds: Vec<StmtKind> = stmts.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            [
                VariableDeclaration, VariableDeclaration, Expression, VariableDeclaration, Expression,
                RequireLike, RequireLike, Emit, Return, Break, Continue, UncheckedBlock, AssemblyOpaque,
                AssemblyOpaque, For, While, DoWhile, Expression, VariableDeclaration,
            ]
        );
    }

    #[test]
    fn call_sites_and_operators() {
        let stmts = body(
            "require(token.transfer(to, v) && ok || x); emit Ev(f(1)); (bool s, ) = to.call{value: v}(\"\");
             Foo f = new Foo(1); x = c ? a : b; super.init(); revert Err(g());",
        );
        let calls: Vec<Vec<(String, bool, bool)>> = stmts
            .iter()
            .map(|s| s.calls.iter().map(|c| (c.callee.clone(), c.is_builtin_guard, c.is_new_expression)).collect())
            .collect();
        assert_eq!(calls[0], [("require".into(), true, false), ("token.transfer".into(), false, false)]);
        assert_eq!(stmts[0].condition_ops, 2);
        assert_eq!(calls[1], [("f".into(), false, false)]);
        assert_eq!(calls[2], [("to.call".into(), false, false)]);
        assert_eq!(calls[3], [("Foo".into(), false, true)]);
        assert_eq!(stmts[4].ternaries, 1);
        assert_eq!(calls[5], [("super.init".into(), false, false)]);
        assert_eq!(calls[6], [("revert".into(), true, false), ("g".into(), false, false)]);
    }

    #[test]
    fn else_if_chain_shape() {
        let stmts = body("if (a) { x(); } else if (b) { y(); } else { z(); }");
        assert_eq!(stmts.len(), 1);
        let else_branch = stmts[0].else_branch().unwrap();
        assert_eq!(else_branch.kind, StmtKind::If);
        assert_eq!(else_branch.else_branch().unwrap().kind, StmtKind::Block);
    }

    #[test]
    fn pragma_and_imports() {
        let out = parse("pragma solidity ^0.8.0;\nimport \"./A.sol\";\nimport {B} from \"./B.sol\";\ncontract C {}");
        assert_eq!(out.unit.pragma.as_deref(), Some("^0.8.0"));
        assert_eq!(out.unit.imports.len(), 2);
        assert_eq!(out.unit.contracts.len(), 1);
    }

    #[test]
    fn file_level_types_are_not_couplings() {
        let out = parse("struct P { uint a; } contract A { P p; function f(P memory q, Other o) public {} }");
        let c = &out.unit.contracts[0];
        assert!(c.state_vars[0].type_refs.is_empty());
        assert_eq!(c.functions[0].params[0].type_refs, Vec::<String>::new());
        assert_eq!(c.functions[0].params[1].type_refs, ["Other"]);
    }

    #[test]
    fn counts_physical_lines() {
        assert_eq!(count_lines(""), 0);
        assert_eq!(count_lines("a"), 1);
        assert_eq!(count_lines("a\n"), 1);
        assert_eq!(count_lines("a\r\nb\rc"), 3);
    }
}
