//! Toolchain for the hO language: front end, semantic analysis, C code
//! generation and a deterministic interpreter for the cyclic-executive runtime.

pub mod diag;
pub mod lexer;
pub mod source;
pub mod syntax;
pub mod sema;
pub mod runtime;
pub mod codegen;
pub mod driver;
