//! Scene definition files.
//!
//! A scene file is a sequence of `[section]` headers and `key = value`
//! lines; `#` starts a comment. Field values are infix expressions over
//! `t` and `x1 … xn`:
//!
//! ```text
//! [scene]
//! name = S1
//! dim = 2
//! time = (-1, 5)
//! domain = (-2, 2) x (-2, 3)
//!
//! [interface]
//! phi = x2 - 0.2*t
//!
//! [fields]
//! v_plus = (0, 0.6)
//! v_minus = (0, 1.0)
//!
//! [densities]
//! rho_plus = 2
//! rho_minus = 1
//! ```
//!
//! Operators are `+ - * / ^` and unary minus, with
//! `^` > unary `-` > `* /` > `+ -`; `^` is right-associative, the others
//! are left-associative. Functions: `sin cos exp log sqrt abs min max` and
//! `norm(x)`, the Euclidean norm of the position.

mod compile;
mod document;
mod expr;
mod lexer;
mod parser;

pub use compile::{compile, compile_str, compile_validated};
pub use document::{parse, SceneDocument, ToleranceOverrides};
pub use expr::{BinOp, EvalError, Expr, ExprKind, Func, Jet, MAX_DUAL};
pub use parser::{parse_expr, parse_value, Value};

use thiserror::Error;

/// Byte range in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn shifted(self, offset: usize) -> Span {
        Span::new(self.start + offset, self.end + offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Semantic,
    Eval,
}

impl ParseErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::Semantic => "SemanticError",
            ParseErrorKind::Eval => "EvalError",
        }
    }
}

/// Diagnostic with a source location. `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}: {message} at line {line}, column {column}{}", kind.name(), expected_suffix(expected))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub span: Span,
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, message: impl Into<String>, span: Span) -> Self {
        Self { kind, message: message.into(), span, line: 0, column: 0, expected: Vec::new() }
    }

    pub(crate) fn syntax(message: impl Into<String>, span: Span) -> Self {
        Self::new(ParseErrorKind::Syntax, message, span)
    }

    pub(crate) fn semantic(message: impl Into<String>, span: Span) -> Self {
        Self::new(ParseErrorKind::Semantic, message, span)
    }

    pub(crate) fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Fills `line`/`column` from the span start.
    pub(crate) fn locate(mut self, source: &str) -> Self {
        let (line, column) = line_col(source, self.span.start);
        self.line = line;
        self.column = column;
        self
    }
}

pub(crate) fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in source.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}
