//! Tokenizer for the supported Solidity subset.
//!
//! Comments stay in the token stream so line accounting can see them.
//! Spans are 1-based and inclusive on both ends; columns count Unicode
//! scalar values, not bytes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Punctuation,
    Literal,
    LineComment,
    BlockComment,
    PragmaDirective,
}

impl TokenKind {
    pub fn is_comment(self) -> bool {
        matches!(self, TokenKind::LineComment | TokenKind::BlockComment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && !self.kind.is_comment() && self.kind != TokenKind::Literal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct LexError {
    pub line: u32,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "abstract", "anonymous", "as", "assembly", "break", "calldata", "catch", "constant",
    "constructor", "continue", "contract", "delete", "do", "else", "emit", "enum", "event",
    "external", "fallback", "false", "for", "function", "if", "immutable", "import", "indexed",
    "interface", "internal", "is", "library", "mapping", "memory", "modifier", "new", "override",
    "payable", "private", "public", "pure", "receive", "return", "returns", "storage", "struct",
    "this", "super", "throw", "true", "try", "type", "unchecked", "using", "view", "virtual",
    "while", "transient",
];

/// Elementary type names, including the sized `uintN`/`intN`/`bytesN` families.
pub fn is_elementary_type(word: &str) -> bool {
    fn sized(word: &str, prefix: &str, allow_x: bool) -> bool {
        word.strip_prefix(prefix).is_some_and(|rest| {
            rest.bytes().all(|b| b.is_ascii_digit() || (allow_x && b == b'x'))
        })
    }
    matches!(word, "address" | "bool" | "string" | "byte" | "var")
        || sized(word, "uint", false)
        || sized(word, "int", false)
        || sized(word, "bytes", false)
        || sized(word, "ufixed", true)
        || sized(word, "fixed", true)
}

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word) || is_elementary_type(word)
}

const PUNCTUATION: &[&str] = &[
    ">>>=", ">>>", "<<=", ">>=", "&&", "||", "==", "!=", "<=", ">=", "=>", "->", "++", "--", "+=",
    "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<", ">>", "**", ":=",
];

struct Cursor<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, chars: src.char_indices().collect(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|&(_, c)| c)
    }

    fn byte_offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(b, _)| b)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        match c {
            '\n' => {
                self.line += 1;
                self.col = 1;
            }
            // CRLF breaks once, on the LF; a lone CR is a break of its own.
            '\r' if self.peek() == Some('\n') => self.col += 1,
            '\r' => {
                self.line += 1;
                self.col = 1;
            }
            _ => self.col += 1,
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.byte_offset()..].starts_with(s)
    }
}

struct Mark {
    byte: usize,
    line: u32,
    col: u32,
}

/// Splits `source` into tokens, keeping comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();
    // Position just past the previous character, used for inclusive end columns.
    let mut last_line = 1;
    let mut last_col = 0;

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let start = Mark { byte: cur.byte_offset(), line: cur.line, col: cur.col };
        let kind = if cur.starts_with("//") {
            while let Some(c) = cur.peek() {
                if c == '\n' || c == '\r' {
                    break;
                }
                (last_line, last_col) = (cur.line, cur.col);
                cur.bump();
            }
            TokenKind::LineComment
        } else if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    (last_line, last_col) = (cur.line, cur.col);
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(LexError { line: start.line, message: "unterminated block comment".into() });
                }
            }
            TokenKind::BlockComment
        } else if c == '"' || c == '\'' {
            lex_string(&mut cur, start.line, &mut last_line, &mut last_col)?;
            TokenKind::Literal
        } else if c.is_ascii_digit() || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur, &mut last_line, &mut last_col);
            TokenKind::Literal
        } else if is_ident_start(c) {
            while cur.peek().is_some_and(is_ident_continue) {
                (last_line, last_col) = (cur.line, cur.col);
                cur.bump();
            }
            let word = &source[start.byte..cur.byte_offset()];
            if word == "pragma" {
                loop {
                    match cur.peek() {
                        None => {
                            return Err(LexError { line: start.line, message: "unterminated pragma directive".into() })
                        }
                        Some(';') => {
                            (last_line, last_col) = (cur.line, cur.col);
                            cur.bump();
                            break;
                        }
                        Some(_) => {
                            cur.bump();
                        }
                    }
                }
                TokenKind::PragmaDirective
            } else if matches!(word, "hex" | "unicode") && matches!(cur.peek(), Some('"' | '\'')) {
                lex_string(&mut cur, start.line, &mut last_line, &mut last_col)?;
                TokenKind::Literal
            } else if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else {
            let len = PUNCTUATION.iter().find(|p| cur.starts_with(p)).map_or(1, |p| p.len());
            for _ in 0..len {
                (last_line, last_col) = (cur.line, cur.col);
                cur.bump();
            }
            TokenKind::Punctuation
        };
        tokens.push(Token {
            kind,
            text: source[start.byte..cur.byte_offset()].to_string(),
            span: Span { start_line: start.line, start_col: start.col, end_line: last_line, end_col: last_col },
        });
    }
    Ok(tokens)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

fn lex_string(cur: &mut Cursor<'_>, line: u32, last_line: &mut u32, last_col: &mut u32) -> Result<(), LexError> {
    let quote = cur.bump().expect("caller checked a quote is present");
    loop {
        match cur.peek() {
            None | Some('\n') | Some('\r') => {
                return Err(LexError { line, message: "unterminated string literal".into() });
            }
            Some('\\') => {
                cur.bump();
                if matches!(cur.peek(), None | Some('\n') | Some('\r')) {
                    return Err(LexError { line, message: "unterminated string literal".into() });
                }
                cur.bump();
            }
            Some(c) => {
                (*last_line, *last_col) = (cur.line, cur.col);
                cur.bump();
                if c == quote {
                    return Ok(());
                }
            }
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>, last_line: &mut u32, last_col: &mut u32) {
    let hex = cur.starts_with("0x") || cur.starts_with("0X");
    let mut prev = '\0';
    while let Some(c) = cur.peek() {
        let take = c.is_ascii_alphanumeric()
            || c == '_'
            || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
            || (c == '-' && !hex && matches!(prev, 'e' | 'E'));
        if !take {
            break;
        }
        prev = c;
        (*last_line, *last_col) = (cur.line, cur.col);
        cur.bump();
    }
}
