//! Solidity tokenizer, parser, and per-contract line accounting.

mod ast;
mod lexer;
mod lines;
mod parser;

pub use ast::*;
pub use lexer::{is_elementary_type, tokenize, LexError, Span, Token, TokenKind};
pub use lines::{line_accounting, LineCounts};
pub use parser::{parse_file, parse_source, Diagnostic, ParseOutput, ParsedFile};
