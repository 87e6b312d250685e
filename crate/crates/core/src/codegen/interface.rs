//! Interface files (`.hi`): the exported surface of each module, one
//! declaration per line.
//!
//! ```text
//! module spw 2
//! var rx port
//! var stats RECORD sent: u32; lost: u32 END
//! state idle 0
//! ```

use thiserror::Error;

use crate::lexer::tokenize;
use crate::sema::consteval::builtin_type;
use crate::sema::types::Type;
use crate::sema::ModuleSignature;
use crate::syntax::ast::{ExprKind, TypeExpr};
use crate::syntax::parse_type;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct InterfaceError {
    pub line: u32,
    pub message: String,
}

pub fn emit_interface(signatures: &[ModuleSignature]) -> String {
    let mut out = String::new();
    for s in signatures {
        out += &format!("module {} {}\n", s.name, s.instance_count());
        for (name, ty) in &s.exports {
            out += &format!("var {name} {ty}\n");
        }
        for (name, v) in &s.states {
            out += &format!("state {name} {v}\n");
        }
    }
    out
}

pub fn parse_interface(text: &str) -> Result<Vec<ModuleSignature>, InterfaceError> {
    let mut out: Vec<ModuleSignature> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i as u32 + 1;
        let err = |message: String| InterfaceError { line, message };
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content.split_once(' ').unwrap_or((content, ""));
        let rest = rest.trim();
        if key == "module" {
            let mut words = rest.split_whitespace();
            let (Some(name), Some(count), None) = (words.next(), words.next(), words.next()) else {
                return Err(err("expected `module <name> <instance-count>`".into()));
            };
            let multi = match count {
                "1" => false,
                "2" => true,
                _ => return Err(err(format!("instance count must be 1 or 2, found `{count}`"))),
            };
            out.push(ModuleSignature {
                name: name.to_string(),
                multi,
                module_id: None,
                exports: Vec::new(),
                states: Vec::new(),
            });
            continue;
        }
        let Some(sig) = out.last_mut() else {
            return Err(err(format!("`{key}` before any `module` line")));
        };
        let (name, value) = rest
            .split_once(' ')
            .ok_or_else(|| err(format!("expected `{key} <name> <value>`")))?;
        match key {
            "var" => {
                let ty = parse_type_text(value.trim()).map_err(err)?;
                sig.exports.push((name.to_string(), ty));
            }
            "state" => {
                let v = value
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad state value `{value}`")))?;
                sig.states.push((name.to_string(), v));
            }
            _ => return Err(err(format!("unknown declaration `{key}`"))),
        }
    }
    Ok(out)
}

/// Parses the surface syntax produced by `Type`'s `Display`. Only builtin
/// type names and literal array lengths can appear.
pub fn parse_type_text(text: &str) -> Result<Type, String> {
    let toks = tokenize(text, 0).map_err(|e| e.to_string())?;
    let te = parse_type(&toks).map_err(|e| e.to_string())?;
    resolve(&te)
}

fn resolve(t: &TypeExpr) -> Result<Type, String> {
    match t {
        TypeExpr::Named(id) => builtin_type(&id.name).ok_or_else(|| format!("unknown type `{}`", id.name)),
        TypeExpr::Record(fields, _) => {
            let mut out = Vec::new();
            for f in fields {
                let ty = resolve(&f.ty)?;
                out.extend(f.names.iter().map(|n| (n.name.clone(), ty.clone())));
            }
            Ok(Type::Record(out))
        }
        TypeExpr::Pointer { volatile, to, .. } => Ok(Type::Pointer {
            volatile: *volatile,
            to: Box::new(resolve(to)?),
        }),
        TypeExpr::Array { len, elem, .. } => match len.kind {
            ExprKind::Number(n) if (1..=u32::MAX as u64).contains(&n) => Ok(Type::Array {
                len: n as u32,
                elem: Box::new(resolve(elem)?),
            }),
            _ => Err("array length must be a positive literal".into()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sema::types::IntKind;

    fn sig(name: &str, multi: bool, exports: Vec<(&str, Type)>) -> ModuleSignature {
        ModuleSignature {
            name: name.into(),
            multi,
            module_id: None,
            exports: exports.into_iter().map(|(n, t)| (n.to_string(), t)).collect(),
            states: vec![],
        }
    }

    #[test]
    fn skeleton_lines() {
        let s = sig("name", false, vec![("exported", Type::U32), ("listener", Type::Port)]);
        assert_eq!(emit_interface(&[s]), "module name 1\nvar exported u32\nvar listener port\n");
    }

    #[test]
    fn multi_instance_and_empty() {
        assert_eq!(emit_interface(&[sig("spw", true, vec![])]), "module spw 2\n");
    }

    #[test]
    fn round_trip_of_every_type_shape() {
        let rec = Type::Record(vec![("x".into(), Type::S32), ("ok".into(), Type::Bool)]);
        let mut s = sig(
            "m",
            true,
            vec![
                ("a", Type::Int(IntKind::S8)),
                ("r", rec.clone()),
                (
                    "p",
                    Type::Pointer {
                        volatile: true,
                        to: Box::new(Type::Array {
                            len: 4,
                            elem: Box::new(rec),
                        }),
                    },
                ),
                ("q", Type::Port),
            ],
        );
        s.states = vec![("idle".into(), 0), ("busy".into(), 1)];
        let text = emit_interface(std::slice::from_ref(&s));
        assert_eq!(parse_interface(&text).unwrap(), vec![s]);
    }

    #[test]
    fn errors_name_the_line() {
        assert_eq!(parse_interface("var x u32").unwrap_err().line, 1);
        assert_eq!(parse_interface("module m 1\nvar x flub").unwrap_err().line, 2);
        assert_eq!(parse_interface("module m 3").unwrap_err().line, 1);
    }
}
