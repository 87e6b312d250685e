//! INCLUDE expansion. Each file is included at most once (by canonical path);
//! the including unit's own file counts as already included.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::ast::{Toplevel, Unit};
use super::{parse_source, FrontError};
use crate::source::{FileId, Loc, SourceMap};

#[derive(Debug, Clone)]
pub struct Resolved {
    pub unit: Unit,
    /// The main file followed by every included file, in first-inclusion order.
    pub files: Vec<FileId>,
}

/// Replaces each INCLUDE in `unit` (parsed from `main`) with the toplevels of
/// the named file. Search order: the including file's directory, then
/// `search_paths` in order.
pub fn resolve_includes(
    unit: Unit,
    main: FileId,
    sources: &mut SourceMap,
    search_paths: &[PathBuf],
) -> Result<Resolved, FrontError> {
    let mut r = Resolver {
        sources,
        search_paths,
        seen: HashSet::new(),
        files: vec![main],
    };
    let main_path = r.sources.path(main).to_path_buf();
    r.seen.insert(canonical(&main_path));
    let mut out = Vec::new();
    r.expand(unit, main, &mut out)?;
    Ok(Resolved {
        unit: Unit { toplevels: out },
        files: r.files,
    })
}

struct Resolver<'a> {
    sources: &'a mut SourceMap,
    search_paths: &'a [PathBuf],
    seen: HashSet<PathBuf>,
    files: Vec<FileId>,
}

impl Resolver<'_> {
    fn expand(&mut self, unit: Unit, from: FileId, out: &mut Vec<Toplevel>) -> Result<(), FrontError> {
        for top in unit.toplevels {
            let Toplevel::Include(inc) = top else {
                out.push(top);
                continue;
            };
            let path = self.find(&inc.path, from, inc.loc)?;
            if !self.seen.insert(canonical(&path)) {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| FrontError::Include {
                loc: inc.loc,
                message: format!("cannot read `{}`: {e}", path.display()),
            })?;
            let id = self.sources.add(path, text);
            self.files.push(id);
            let text = self.sources.get(id).text.clone();
            let included = parse_source(&text, id)?;
            self.expand(included, id, out)?;
        }
        Ok(())
    }

    fn find(&self, name: &str, from: FileId, loc: Loc) -> Result<PathBuf, FrontError> {
        let mut dirs: Vec<PathBuf> = Vec::new();
        let own_dir = self
            .sources
            .path(from)
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        dirs.push(own_dir);
        dirs.extend(self.search_paths.iter().cloned());
        for dir in &dirs {
            let candidate = dir.join(name);
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
        let searched: Vec<String> = dirs
            .iter()
            .map(|d| {
                if d.as_os_str().is_empty() {
                    ".".to_string()
                } else {
                    d.display().to_string()
                }
            })
            .collect();
        Err(FrontError::Include {
            loc,
            message: format!(
                "include file \"{name}\" not found (searched: {})",
                searched.join(", ")
            ),
        })
    }
}

fn canonical(p: &Path) -> PathBuf {
    std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf())
}
