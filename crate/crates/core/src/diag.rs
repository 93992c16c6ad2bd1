//! Diagnostics and the error-code catalogue.

use std::fmt;

use crate::ast::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Syntax error.
    E001,
    /// Unknown class, layout, field, method, or variable.
    E100,
    /// Duplicate top-level name.
    E101,
    /// Type mismatch.
    E200,
    /// `null` in a position with no expected type.
    E201,
    /// Ill-formed type or bound.
    E210,
    /// Field repeated across a layout's clusters.
    E220,
    /// Class field missing from a layout.
    E221,
    /// Malformed class header or out-of-scope pool argument.
    E230,
    /// Null dereference.
    R001,
    /// Call depth exceeded.
    R002,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E100 => "E100",
            Code::E101 => "E101",
            Code::E200 => "E200",
            Code::E201 => "E201",
            Code::E210 => "E210",
            Code::E220 => "E220",
            Code::E221 => "E221",
            Code::E230 => "E230",
            Code::R001 => "R001",
            Code::R002 => "R002",
        }
    }

    pub fn parse(text: &str) -> Option<Code> {
        ALL_CODES.iter().copied().find(|c| c.as_str() == text)
    }
}

const ALL_CODES: &[Code] = &[
    Code::E001,
    Code::E100,
    Code::E101,
    Code::E200,
    Code::E201,
    Code::E210,
    Code::E220,
    Code::E221,
    Code::E230,
    Code::R001,
    Code::R002,
];

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn new(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { code, message: message.into(), span }
    }

    /// `FILE:LINE:COL: error[CODE]: MESSAGE`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}:{}:{}: error[{}]: {}",
            file, self.span.line, self.span.column, self.code, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error[{}]: {}", self.span, self.code, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// Orders diagnostics by source position; ties keep their emission order.
pub fn sort_by_position(diags: &mut [Diagnostic]) {
    diags.sort_by_key(|d| d.span);
}
