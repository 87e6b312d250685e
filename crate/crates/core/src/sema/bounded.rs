//! Termination guarantees: no recursion, constant loop counts, no NEXT
//! leaving a loop. Together they give every module body a static step bound.
//!
//! Steps are counted as: one per statement executed, one per call entry and
//! one per contract assert evaluated. The interpreter counts the same events.

use std::collections::{BTreeMap, HashMap};

use super::tast::*;
use crate::diag::{codes, Diagnostic};
use crate::source::Loc;

/// Calls made directly by a procedure's body, in order of appearance.
pub fn callees(p: &Proc) -> Vec<(ProcId, Loc)> {
    let mut out = Vec::new();
    walk_block(&p.body, &mut |ev| {
        if let Event::Call(id, loc) = ev {
            out.push((id, loc));
        }
    });
    out
}

pub fn check_bounded_execution(program: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for p in &program.procs {
        walk_block(&p.body, &mut |ev| match ev {
            Event::BadCount(loc) => diags.push(Diagnostic::error(
                codes::LOOP_COUNT,
                loc,
                "REPEAT count must be a compile-time constant between 0 and 4294967295",
            )),
            Event::NextInLoop(loc) => diags.push(Diagnostic::error(
                codes::NEXT_IN_LOOP,
                loc,
                "NEXT may not leave a loop",
            )),
            Event::Call(..) => {}
        });
    }
    for cycle in call_cycles(program) {
        let names: Vec<String> = cycle.iter().map(|&id| qualified_name(program, id)).collect();
        let first = program.proc(cycle[0]);
        let mut path = names.join(" -> ");
        path.push_str(" -> ");
        path.push_str(&names[0]);
        diags.push(Diagnostic::error(
            codes::RECURSION,
            first.loc,
            format!("recursive call cycle [{}]: {path}", names.join(", ")),
        ));
    }
    diags
}

pub fn qualified_name(program: &Program, id: ProcId) -> String {
    let p = program.proc(id);
    match p.kind {
        ProcKind::ModuleProc(m) => format!("{}.{}", program.modules[m].name, p.name),
        _ => p.name.clone(),
    }
}

/// Every call cycle, one per strongly connected component, each listed from
/// its lowest procedure id along call order.
pub fn call_cycles(program: &Program) -> Vec<Vec<ProcId>> {
    let graph: Vec<Vec<ProcId>> = program
        .procs
        .iter()
        .map(|p| {
            let mut c: Vec<ProcId> = callees(p).into_iter().map(|(id, _)| id).collect();
            c.dedup();
            c
        })
        .collect();
    let sccs = tarjan(&graph);
    let mut cycles = Vec::new();
    for scc in sccs {
        let start = *scc.iter().min().expect("scc is never empty");
        let self_loop = graph[start.0 as usize].contains(&start);
        if scc.len() == 1 && !self_loop {
            continue;
        }
        // Follow edges inside the component back to the start.
        let mut path = vec![start];
        let mut visited = vec![start];
        if !self_loop && !find_path(&graph, &scc, start, start, &mut path, &mut visited) {
            path = scc.clone();
        }
        cycles.push(path);
    }
    cycles.sort();
    cycles
}

fn find_path(
    graph: &[Vec<ProcId>],
    scc: &[ProcId],
    at: ProcId,
    goal: ProcId,
    path: &mut Vec<ProcId>,
    visited: &mut Vec<ProcId>,
) -> bool {
    for &next in &graph[at.0 as usize] {
        if next == goal {
            return true;
        }
        if scc.contains(&next) && !visited.contains(&next) {
            visited.push(next);
            path.push(next);
            if find_path(graph, scc, next, goal, path, visited) {
                return true;
            }
            path.pop();
        }
    }
    false
}

fn tarjan(graph: &[Vec<ProcId>]) -> Vec<Vec<ProcId>> {
    struct State<'g> {
        graph: &'g [Vec<ProcId>],
        index: Vec<Option<u32>>,
        low: Vec<u32>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: u32,
        out: Vec<Vec<ProcId>>,
    }
    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.graph[v] {
            let w = w.0 as usize;
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("stack holds the component");
                s.on_stack[w] = false;
                comp.push(ProcId(w as u32));
                if w == v {
                    break;
                }
            }
            comp.sort();
            s.out.push(comp);
        }
    }
    let n = graph.len();
    let mut s = State {
        graph,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

enum Event {
    Call(ProcId, Loc),
    BadCount(Loc),
    NextInLoop(Loc),
}

fn walk_block(b: &TBlock, f: &mut dyn FnMut(Event)) {
    for a in b.entry.iter().chain(&b.exit) {
        walk_args(&a.args, f);
        f(Event::Call(a.contract, a.loc));
    }
    for s in &b.stmts {
        walk_stmt(s, f);
    }
}

fn walk_stmt(s: &TStmt, f: &mut dyn FnMut(Event)) {
    match &s.kind {
        TStmtKind::Assign { place, value, .. } => {
            walk_place(place, f);
            walk_expr(value, f);
        }
        TStmtKind::Call(c) => walk_call(c, f),
        TStmtKind::If { arms, otherwise } => {
            for (c, b) in arms {
                walk_expr(c, f);
                walk_block(b, f);
            }
            if let Some(b) = otherwise {
                walk_block(b, f);
            }
        }
        TStmtKind::Loop {
            guard, count, body, ..
        } => {
            if let LoopCount::Invalid(loc) = count {
                f(Event::BadCount(*loc));
            }
            if let Some(g) = guard {
                walk_expr(g, f);
            }
            walk_block(body, f);
        }
        TStmtKind::Case {
            scrutinee,
            clauses,
            otherwise,
        } => {
            walk_expr(scrutinee, f);
            for c in clauses {
                walk_block(&c.body, f);
            }
            if let Some(b) = otherwise {
                walk_block(b, f);
            }
        }
        TStmtKind::Select { target, clauses, .. } => {
            walk_place(target, f);
            for c in clauses {
                walk_block(&c.body, f);
            }
        }
        TStmtKind::Next { in_loop, .. } => {
            if *in_loop {
                f(Event::NextInLoop(s.loc));
            }
        }
        TStmtKind::Return(v) | TStmtKind::Log { value: v, .. } => {
            if let Some(v) = v {
                walk_expr(v, f);
            }
        }
        TStmtKind::New { port, size: e, .. } | TStmtKind::Extend { port, delta: e, .. } => {
            walk_place(port, f);
            walk_expr(e, f);
        }
        TStmtKind::Dispose { port } => walk_place(port, f),
        TStmtKind::Clone { src, dst, .. } | TStmtKind::Send { src, dst } => {
            walk_place(src, f);
            walk_place(dst, f);
        }
    }
}

fn walk_call(c: &TCall, f: &mut dyn FnMut(Event)) {
    walk_args(&c.args, f);
    f(Event::Call(c.proc, c.loc));
}

fn walk_args(args: &[TArg], f: &mut dyn FnMut(Event)) {
    for a in args {
        match a {
            TArg::Value(e) => walk_expr(e, f),
            TArg::Ref(p) => walk_place(p, f),
        }
    }
}

fn walk_place(p: &Place, f: &mut dyn FnMut(Event)) {
    match p {
        Place::ModuleVar { .. } | Place::Local { .. } | Place::RefParam { .. } => {}
        Place::Field { base, .. } => walk_place(base, f),
        Place::Index { base, index, .. } => {
            walk_place(base, f);
            walk_expr(index, f);
        }
        Place::Deref { pointer } => walk_expr(pointer, f),
        Place::Data { port, .. } => walk_place(port, f),
    }
}

fn walk_expr(e: &TExpr, f: &mut dyn FnMut(Event)) {
    match &e.kind {
        TExprKind::Int(_) | TExprKind::Bool(_) | TExprKind::ModuleId | TExprKind::Instance => {}
        TExprKind::Load(p) | TExprKind::AddrOf(p) | TExprKind::Pending(p) => walk_place(p, f),
        TExprKind::Count { port, .. } => walk_place(port, f),
        TExprKind::Unary(_, a) | TExprKind::Narrow { value: a, .. } => walk_expr(a, f),
        TExprKind::Binary { lhs, rhs, .. } | TExprKind::Min(lhs, rhs) | TExprKind::Max(lhs, rhs) => {
            walk_expr(lhs, f);
            walk_expr(rhs, f);
        }
        TExprKind::Call(c) => walk_call(c, f),
        TExprKind::Send { src, dst } => {
            walk_place(src, f);
            walk_place(dst, f);
        }
    }
}

/// Static upper bound on the steps one execution of `id` takes, including
/// its call entry. Only meaningful for programs without E-RECURSION or
/// E-LOOP-COUNT errors.
pub fn step_bound(program: &Program, id: ProcId) -> u64 {
    let mut b = Bounder {
        program,
        memo: HashMap::new(),
    };
    b.call(id)
}

/// Bounds for every module body, keyed by module name.
pub fn module_step_bounds(program: &Program) -> BTreeMap<String, u64> {
    program
        .modules
        .iter()
        .map(|m| (m.name.clone(), step_bound(program, m.body)))
        .collect()
}

struct Bounder<'p> {
    program: &'p Program,
    memo: HashMap<ProcId, u64>,
}

impl Bounder<'_> {
    fn call(&mut self, id: ProcId) -> u64 {
        if let Some(&v) = self.memo.get(&id) {
            return v;
        }
        // Marks the procedure while its body is measured; a cycle saturates.
        self.memo.insert(id, u64::MAX);
        let body = &self.program.proc(id).body;
        let v = 1u64.saturating_add(self.block(body));
        self.memo.insert(id, v);
        v
    }

    fn block(&mut self, b: &TBlock) -> u64 {
        let mut total = 0u64;
        for a in b.entry.iter().chain(&b.exit) {
            total = total
                .saturating_add(1)
                .saturating_add(self.args(&a.args))
                .saturating_add(self.call(a.contract));
        }
        for s in &b.stmts {
            total = total.saturating_add(self.stmt(s));
        }
        total
    }

    fn stmt(&mut self, s: &TStmt) -> u64 {
        let inner = match &s.kind {
            TStmtKind::Assign { place, value, .. } => self.place(place).saturating_add(self.expr(value)),
            TStmtKind::Call(c) => self.args(&c.args).saturating_add(self.call(c.proc)),
            TStmtKind::If { arms, otherwise } => {
                let conds: u64 = arms.iter().map(|(c, _)| self.expr(c)).fold(0, u64::saturating_add);
                let mut worst = otherwise.as_ref().map_or(0, |b| self.block(b));
                for (_, b) in arms {
                    worst = worst.max(self.block(b));
                }
                conds.saturating_add(worst)
            }
            TStmtKind::Loop {
                guard, count, body, ..
            } => {
                let n = match count {
                    LoopCount::Const(n) => *n as u64,
                    LoopCount::Invalid(_) => u64::MAX,
                };
                let g = guard.as_ref().map_or(0, |g| self.expr(g));
                n.saturating_mul(g.saturating_add(self.block(body)))
            }
            TStmtKind::Case {
                scrutinee,
                clauses,
                otherwise,
            } => {
                let mut worst = otherwise.as_ref().map_or(0, |b| self.block(b));
                for c in clauses {
                    worst = worst.max(self.block(&c.body));
                }
                self.expr(scrutinee).saturating_add(worst)
            }
            TStmtKind::Select { target, clauses, .. } => {
                let mut worst = 0;
                for c in clauses {
                    worst = worst.max(self.block(&c.body));
                }
                self.place(target).saturating_add(worst)
            }
            TStmtKind::Next { target, .. } => self.place(target),
            TStmtKind::Return(v) | TStmtKind::Log { value: v, .. } => v.as_ref().map_or(0, |v| self.expr(v)),
            TStmtKind::New { port, size: e, .. } | TStmtKind::Extend { port, delta: e, .. } => {
                self.place(port).saturating_add(self.expr(e))
            }
            TStmtKind::Dispose { port } => self.place(port),
            TStmtKind::Clone { src, dst, .. } | TStmtKind::Send { src, dst } => {
                self.place(src).saturating_add(self.place(dst))
            }
        };
        1u64.saturating_add(inner)
    }

    fn args(&mut self, args: &[TArg]) -> u64 {
        args.iter()
            .map(|a| match a {
                TArg::Value(e) => self.expr(e),
                TArg::Ref(p) => self.place(p),
            })
            .fold(0, u64::saturating_add)
    }

    fn place(&mut self, p: &Place) -> u64 {
        match p {
            Place::ModuleVar { .. } | Place::Local { .. } | Place::RefParam { .. } => 0,
            Place::Field { base, .. } | Place::Data { port: base, .. } => self.place(base),
            Place::Index { base, index, .. } => self.place(base).saturating_add(self.expr(index)),
            Place::Deref { pointer } => self.expr(pointer),
        }
    }

    fn expr(&mut self, e: &TExpr) -> u64 {
        match &e.kind {
            TExprKind::Int(_) | TExprKind::Bool(_) | TExprKind::ModuleId | TExprKind::Instance => 0,
            TExprKind::Load(p) | TExprKind::AddrOf(p) | TExprKind::Pending(p) => self.place(p),
            TExprKind::Count { port, .. } => self.place(port),
            TExprKind::Unary(_, a) | TExprKind::Narrow { value: a, .. } => self.expr(a),
            TExprKind::Binary { lhs, rhs, .. } | TExprKind::Min(lhs, rhs) | TExprKind::Max(lhs, rhs) => {
                self.expr(lhs).saturating_add(self.expr(rhs))
            }
            TExprKind::Call(c) => self.args(&c.args).saturating_add(self.call(c.proc)),
            TExprKind::Send { src, dst } => self.place(src).saturating_add(self.place(dst)),
        }
    }
}
