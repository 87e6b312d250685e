//! Small text outputs: make dependencies, flow diagrams and error maps.

use std::collections::{BTreeSet, HashMap};

use crate::sema::tast::{CheckKindTag, Program};
use crate::sema::FlowEdge;
use crate::source::SourceMap;

/// `target: main.ho inc.ho ...`, dependencies in first-inclusion order.
pub fn emit_deps(target: &str, files: &[String]) -> String {
    let mut line = format!("{target}:");
    for f in files {
        line.push(' ');
        line.push_str(f);
    }
    line.push('\n');
    line
}

/// A `digraph` with one node per module instance and one edge per flow edge,
/// both sorted by name.
pub fn emit_flow_dot(program: &Program, edges: &BTreeSet<FlowEdge>) -> String {
    let mut nodes: BTreeSet<String> = program
        .instances()
        .map(|(m, k)| program.modules[m].instance_name(k))
        .collect();
    for e in edges {
        nodes.insert(e.from.clone());
        nodes.insert(e.to.clone());
    }
    let mut out = String::from("digraph flow {\n");
    for n in &nodes {
        out += &format!("    {n};\n");
    }
    for e in edges {
        out += &format!("    {} -> {} [label=\"{}\"];\n", e.from, e.to, e.port);
    }
    out.push_str("}\n");
    out
}

/// `<check-id> <kind> <file> <line> <col>` per check site.
pub fn emit_error_map(program: &Program, sources: &SourceMap) -> String {
    program
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {} {} {} {}\n",
                c.id,
                c.kind.as_str(),
                sources.name(c.loc.file),
                c.loc.line,
                c.loc.col
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapEntry {
    pub kind: CheckKindTag,
    pub file: String,
    pub line: u32,
    pub col: u32,
}

/// Reads an error map back, keyed by check id.
pub fn parse_error_map(text: &str) -> Result<HashMap<u32, MapEntry>, String> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let w: Vec<&str> = line.split_whitespace().collect();
        let bad = || format!("line {}: malformed entry `{line}`", i + 1);
        let [id, kind, file, l, c] = w[..] else {
            return Err(bad());
        };
        out.insert(
            id.parse().map_err(|_| bad())?,
            MapEntry {
                kind: CheckKindTag::parse(kind).ok_or_else(bad)?,
                file: file.to_string(),
                line: l.parse().map_err(|_| bad())?,
                col: c.parse().map_err(|_| bad())?,
            },
        );
    }
    Ok(out)
}
