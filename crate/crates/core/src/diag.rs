//! Compiler diagnostics shared by every stage.

use std::fmt;

use crate::source::{Loc, SourceMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// One compiler message. `code` is a stable identifier such as `E-RECURSION`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub loc: Loc,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &'static str, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            loc,
            message: message.into(),
        }
    }

    pub fn warning(code: &'static str, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            loc,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: error[CODE]: message`
    pub fn render(&self, sources: &SourceMap) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            sources.name(self.loc.file),
            self.loc.line,
            self.loc.col,
            self.severity,
            self.code,
            self.message
        )
    }
}

/// Stable order: by file, line, column, then severity and code.
pub fn sort(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.loc, a.severity, a.code, &a.message).cmp(&(b.loc, b.severity, b.code, &b.message))
    });
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

/// Diagnostic codes. Kept in one place so fixtures and tools can refer to them.
pub mod codes {
    pub const LEX: &str = "E-LEX";
    pub const PARSE: &str = "E-PARSE";
    pub const CHECK_POSITION: &str = "E-CHECK-POSITION";
    pub const MODULE_NAME: &str = "E-MODULE-NAME";
    pub const INCLUDE: &str = "E-INCLUDE";
    pub const INTERFACE: &str = "E-INTERFACE";

    pub const UNDEFINED: &str = "E-UNDEFINED";
    pub const DUPLICATE: &str = "E-DUPLICATE";
    pub const TYPE: &str = "E-TYPE";
    pub const NOT_CONST: &str = "E-NOT-CONST";
    pub const CONST_DIV_ZERO: &str = "E-CONST-DIV-ZERO";
    pub const RANGE: &str = "E-RANGE";
    pub const ARRAY_LEN: &str = "E-ARRAY-LEN";
    pub const PORT_ASSIGN: &str = "E-PORT-ASSIGN";
    pub const PORT_VALUE: &str = "E-PORT-VALUE";
    pub const PORT_NESTED: &str = "E-PORT-NESTED";
    pub const PORT_SIZE: &str = "E-PORT-SIZE";
    pub const NOT_ASSIGNABLE: &str = "E-NOT-ASSIGNABLE";
    pub const ARGS: &str = "E-ARGS";
    pub const CALL_RESULT: &str = "E-CALL-RESULT";
    pub const RETURN: &str = "E-RETURN";
    pub const CONTRACT_VAR: &str = "E-CONTRACT-VAR";
    pub const CONTRACT_RESULT: &str = "E-CONTRACT-RESULT";
    pub const CHECK_TARGET: &str = "E-CHECK-TARGET";
    pub const EXTERNAL_TYPE: &str = "E-EXTERNAL-TYPE";
    pub const DUP_LABEL: &str = "E-DUP-LABEL";
    pub const BAD_RANGE: &str = "E-BAD-RANGE";
    pub const SELECT_TARGET: &str = "E-SELECT-TARGET";
    pub const NEXT_OUTSIDE: &str = "E-NEXT-OUTSIDE";
    pub const IMPORT_SELECTOR: &str = "E-IMPORT-SELECTOR";
    pub const IMPORT_POSITION: &str = "E-IMPORT-POSITION";
    pub const UNKNOWN_MODULE: &str = "E-UNKNOWN-MODULE";
    pub const NOT_EXPORTED: &str = "E-NOT-EXPORTED";
    pub const DUP_EXPORT: &str = "E-DUP-EXPORT";
    pub const RECURSION: &str = "E-RECURSION";
    pub const LOOP_COUNT: &str = "E-LOOP-COUNT";
    pub const NEXT_IN_LOOP: &str = "E-NEXT-IN-LOOP";

    pub const W_SHADOW: &str = "W-SHADOW";
    pub const W_CONST: &str = "W-CONST";
}
