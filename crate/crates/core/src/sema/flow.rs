//! Message-flow graph: which instance sends into which instance's port.
//!
//! Edges come from SEND and CLONE destinations that name a module port
//! directly. Sends through VAR parameters or toplevel procedures are not
//! traced.

use std::collections::BTreeSet;

use super::tast::*;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowEdge {
    pub from: String,
    pub to: String,
    pub port: String,
}

pub fn message_flow(program: &Program) -> BTreeSet<FlowEdge> {
    let mut edges = BTreeSet::new();
    for p in &program.procs {
        let m = match p.kind {
            ProcKind::ModuleBody(m) | ProcKind::ModuleProc(m) => m,
            ProcKind::Toplevel | ProcKind::Contract => continue,
        };
        let module = &program.modules[m];
        let mut dsts = Vec::new();
        collect_block(&p.body, &mut dsts);
        for k in 0..module.instance_count() {
            for dst in &dsts {
                if let Some(edge) = resolve(program, m, k, dst) {
                    edges.insert(edge);
                }
            }
        }
    }
    edges
}

fn resolve(program: &Program, m: usize, k: u32, dst: &Place) -> Option<FlowEdge> {
    let Place::ModuleVar { module, offset } = dst else {
        return None;
    };
    let from_mod = &program.modules[m];
    let from = from_mod.instance_name(k);
    let (name, multi, vars) = match module {
        ModSel::Own => (&from_mod.name, from_mod.multi, &from_mod.vars),
        ModSel::Other {
            module: ModRef::Local(i),
            ..
        } => {
            let t = &program.modules[*i];
            (&t.name, t.multi, &t.vars)
        }
        ModSel::Other {
            module: ModRef::External(i),
            ..
        } => {
            let t = &program.externals[*i];
            (&t.name, t.multi, &t.vars)
        }
    };
    let instance = match module {
        ModSel::Own => k,
        ModSel::Other { instance, .. } => match instance {
            InstanceSel::Fixed(n) => *n,
            InstanceSel::Corresponding => k,
        },
    };
    let port = vars.iter().find(|v| v.offset == *offset)?.name.clone();
    Some(FlowEdge {
        from,
        to: instance_name(name, multi, instance),
        port,
    })
}

fn collect_block<'a>(b: &'a TBlock, out: &mut Vec<&'a Place>) {
    for s in &b.stmts {
        collect_stmt(s, out);
    }
}

fn collect_stmt<'a>(s: &'a TStmt, out: &mut Vec<&'a Place>) {
    match &s.kind {
        TStmtKind::Send { dst, .. } | TStmtKind::Clone { dst, .. } => out.push(dst),
        TStmtKind::Assign { value, .. } => collect_expr(value, out),
        TStmtKind::Call(c) => collect_args(&c.args, out),
        TStmtKind::If { arms, otherwise } => {
            for (c, b) in arms {
                collect_expr(c, out);
                collect_block(b, out);
            }
            if let Some(b) = otherwise {
                collect_block(b, out);
            }
        }
        TStmtKind::Loop { guard, body, .. } => {
            if let Some(g) = guard {
                collect_expr(g, out);
            }
            collect_block(body, out);
        }
        TStmtKind::Case {
            scrutinee,
            clauses,
            otherwise,
        } => {
            collect_expr(scrutinee, out);
            for c in clauses {
                collect_block(&c.body, out);
            }
            if let Some(b) = otherwise {
                collect_block(b, out);
            }
        }
        TStmtKind::Select { clauses, .. } => {
            for c in clauses {
                collect_block(&c.body, out);
            }
        }
        TStmtKind::Return(Some(e)) | TStmtKind::Log { value: Some(e), .. } => collect_expr(e, out),
        TStmtKind::New { size: e, .. } | TStmtKind::Extend { delta: e, .. } => collect_expr(e, out),
        TStmtKind::Return(None)
        | TStmtKind::Log { value: None, .. }
        | TStmtKind::Next { .. }
        | TStmtKind::Dispose { .. } => {}
    }
}

fn collect_args<'a>(args: &'a [TArg], out: &mut Vec<&'a Place>) {
    for a in args {
        if let TArg::Value(e) = a {
            collect_expr(e, out);
        }
    }
}

fn collect_expr<'a>(e: &'a TExpr, out: &mut Vec<&'a Place>) {
    match &e.kind {
        TExprKind::Send { dst, .. } => out.push(dst),
        TExprKind::Unary(_, a) | TExprKind::Narrow { value: a, .. } => collect_expr(a, out),
        TExprKind::Binary { lhs, rhs, .. } | TExprKind::Min(lhs, rhs) | TExprKind::Max(lhs, rhs) => {
            collect_expr(lhs, out);
            collect_expr(rhs, out);
        }
        TExprKind::Call(c) => collect_args(&c.args, out),
        _ => {}
    }
}
