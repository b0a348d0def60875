//! The rule language: a line-oriented text format declaring structures,
//! domains, hidden sets, size requirements and constraints.

pub mod ast;
pub mod check;
pub mod ir;
pub mod lexer;
pub mod parser;
pub mod print;

use std::fmt;

pub use ast::Rule;
pub use check::{check_source, compile, static_check};
pub use print::serialize_rule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    Syntax,
    UnknownIdent,
    UnboundVar,
    TypeMismatch,
    EmptyDomain,
    Duplicate,
    Arity,
    Unmaskable,
    Unsatisfiable,
    ShapeOnElement,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "E001",
            Code::UnknownIdent => "E002",
            Code::UnboundVar => "E003",
            Code::TypeMismatch => "E004",
            Code::EmptyDomain => "E005",
            Code::Duplicate => "E006",
            Code::Arity => "E007",
            Code::Unmaskable => "W101",
            Code::Unsatisfiable => "E102",
            Code::ShapeOnElement => "E103",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, line: usize, col: usize, message: String) -> Self {
        Diagnostic {
            code,
            severity: Severity::Error,
            line,
            col,
            message,
        }
    }

    pub fn warning(code: Code, line: usize, col: usize, message: String) -> Self {
        Diagnostic {
            code,
            severity: Severity::Warning,
            line,
            col,
            message,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{sev}[{}] {}:{}: {}",
            self.code.as_str(),
            self.line,
            self.col,
            self.message
        )
    }
}

/// Parses rule text and checks names, scopes and types.
pub fn parse_rule(text: &str) -> Result<Rule, Diagnostic> {
    let (rule, spans) = parser::parse(text)?;
    check::compile_with_spans(&rule, &spans)?;
    Ok(rule)
}
