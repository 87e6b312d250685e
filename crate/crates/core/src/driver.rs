//! Compilation pipeline shared by the command-line driver and the tests:
//! read, expand INCLUDEs, load interface files for imported modules that
//! are not part of the unit, then analyze.

use std::path::{Path, PathBuf};

use crate::codegen::parse_interface;
use crate::diag::{self, codes, Diagnostic};
use crate::lexer::{tokenize, Token, TokenKind};
use crate::sema::{analyze_unit, external_imports, Analysis, Mode, ModuleSignature};
use crate::source::{FileId, Loc, SourceMap};
use crate::syntax::{ast::Unit, parse_source, resolve_includes, FrontError};

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Extra directories searched for INCLUDE files and interface files,
    /// after the directory of the including file.
    pub include_dirs: Vec<PathBuf>,
    /// Declarations only, as for interface generation.
    pub restricted: bool,
}

/// Everything produced for one compilation unit. Stages after a failing one
/// are `None`.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub sources: SourceMap,
    pub main: FileId,
    /// Tokens of the main file.
    pub tokens: Option<Vec<Token>>,
    /// The unit after INCLUDE expansion.
    pub unit: Option<Unit>,
    /// Main file followed by included files, in first-inclusion order.
    pub files: Vec<FileId>,
    /// Signatures loaded from interface files.
    pub interfaces: Vec<ModuleSignature>,
    pub analysis: Option<Analysis>,
    /// Sorted diagnostics of every stage that ran.
    pub diagnostics: Vec<Diagnostic>,
}

impl Compilation {
    pub fn has_errors(&self) -> bool {
        diag::has_errors(&self.diagnostics)
    }

    /// The analysis, when every stage succeeded without errors.
    pub fn program(&self) -> Option<&crate::sema::tast::Program> {
        match &self.analysis {
            Some(a) if !self.has_errors() => Some(&a.program),
            _ => None,
        }
    }

    pub fn render_diagnostics(&self) -> String {
        self.diagnostics
            .iter()
            .map(|d| d.render(&self.sources) + "\n")
            .collect()
    }
}

pub fn compile_file(path: &Path, opts: &Options) -> std::io::Result<Compilation> {
    let text = std::fs::read_to_string(path)?;
    Ok(compile_source(path, &text, opts))
}

/// Compiles `text` as if read from `path`; INCLUDE and interface lookups
/// start in the directory of `path`.
pub fn compile_source(path: &Path, text: &str, opts: &Options) -> Compilation {
    let mut sources = SourceMap::new();
    let main = sources.add(path, text);
    let mut c = Compilation {
        sources,
        main,
        tokens: None,
        unit: None,
        files: vec![main],
        interfaces: Vec::new(),
        analysis: None,
        diagnostics: Vec::new(),
    };
    let fail = |c: &mut Compilation, e: FrontError| c.diagnostics.push(e.to_diagnostic());
    match tokenize(text, main) {
        Ok(t) => c.tokens = Some(t),
        Err(e) => {
            fail(&mut c, e.into());
            return c;
        }
    }
    let unit = match parse_source(text, main) {
        Ok(u) => u,
        Err(e) => {
            fail(&mut c, e);
            return c;
        }
    };
    let resolved = match resolve_includes(unit, main, &mut c.sources, &opts.include_dirs) {
        Ok(r) => r,
        Err(e) => {
            fail(&mut c, e);
            return c;
        }
    };
    c.files = resolved.files;
    let unit = resolved.unit;
    let dirs = search_dirs(path, &opts.include_dirs);
    for name in external_imports(&unit) {
        let Some(file) = dirs.iter().map(|d| d.join(format!("{name}.hi"))).find(|p| p.is_file()) else {
            // Reported by analysis as an unknown module.
            continue;
        };
        let loc = Loc::new(main, 1, 1);
        let loaded = std::fs::read_to_string(&file)
            .map_err(|e| e.to_string())
            .and_then(|t| parse_interface(&t).map_err(|e| e.to_string()));
        match loaded {
            Ok(sigs) => c.interfaces.extend(sigs.into_iter().filter(|s| s.name == name)),
            Err(e) => c.diagnostics.push(Diagnostic::error(
                codes::INTERFACE,
                loc,
                format!("interface file `{}`: {e}", file.display()),
            )),
        }
    }
    if c.has_errors() {
        c.unit = Some(unit);
        return c;
    }
    let mode = if opts.restricted { Mode::Restricted } else { Mode::Full };
    let analysis = analyze_unit(&unit, &c.interfaces, mode);
    c.diagnostics.extend(analysis.diagnostics.iter().cloned());
    diag::sort(&mut c.diagnostics);
    c.unit = Some(unit);
    c.analysis = Some(analysis);
    c
}

fn search_dirs(main: &Path, extra: &[PathBuf]) -> Vec<PathBuf> {
    let own = main.parent().map(Path::to_path_buf).unwrap_or_default();
    let own = if own.as_os_str().is_empty() { PathBuf::from(".") } else { own };
    std::iter::once(own).chain(extra.iter().cloned()).collect()
}

/// One token per line: `line:col kind text`.
pub fn dump_tokens(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| {
            let kind = match t.kind {
                TokenKind::Keyword(_) => "keyword",
                TokenKind::Ident => "ident",
                TokenKind::Int => "int",
                TokenKind::Str => "string",
                TokenKind::Punct(_) => "punct",
                TokenKind::Eof => "eof",
            };
            format!("{}:{} {kind} {}\n", t.loc.line, t.loc.col, t.text)
        })
        .collect()
}
