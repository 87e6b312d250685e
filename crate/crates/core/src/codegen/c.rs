//! C99 (GNU dialect) emission against `ho_runtime.h`.
//!
//! Each module instance becomes one body function taking the base address
//! of its data block. Procedures reachable from the body are emitted as
//! nested functions taking their frame address, so no global state is
//! introduced and a failed check can leave the whole body with a jump to
//! `ho_abort`. All storage is accessed through runtime load/store calls on
//! virtual addresses, which keeps `ADR` values identical to the interpreter.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::sema::bounded::callees;
use crate::sema::tast::*;
use crate::sema::types::{IntKind, Type};
use crate::source::{Loc, SourceMap};
use crate::syntax::ast::{BinaryOp, UnaryOp};

pub const FLAGS: &str = "-fno-strict-aliasing -fwrapv -std=gnu99";
pub const RUNTIME_HEADER: &str = "ho_runtime.h";

/// Emits one translation unit. `unit` names the registration function
/// `ho_register_<unit>`.
pub fn emit_c(program: &Program, sources: &SourceMap, unit: &str) -> String {
    let mut e = Emitter {
        program,
        files: sources.iter().map(|(id, _)| c_string(&sources.name(id))).collect(),
        out: String::new(),
        indent: 0,
        tmp: 0,
        module: 0,
        instance: 0,
        exits: Vec::new(),
        in_body: false,
    };
    e.unit(unit);
    e.out
}

/// C identifier fragment: alphanumerics kept, everything else `_`.
pub fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn c_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if c.is_ascii_graphic() || c == ' ' => out.push(c),
            c => {
                let mut buf = [0u8; 4];
                for b in c.encode_utf8(&mut buf).bytes() {
                    let _ = write!(out, "\\{b:03o}");
                }
            }
        }
    }
    out.push('"');
    out
}

fn width(ty: &Type) -> u32 {
    match ty {
        Type::Int(k) => k.bytes(),
        Type::Bool => 1,
        Type::Pointer { .. } | Type::Port => 4,
        Type::Array { .. } | Type::Record(_) => ty.storage_size(),
    }
}

fn lit(v: i64) -> String {
    if v == i64::MIN {
        "INT64_MIN".into()
    } else {
        format!("INT64_C({v})")
    }
}

/// One entry of the exit-assert stack: the asserts of an open block, or the
/// boundary of a SELECT clause that NEXT unwinds to.
enum Open<'p> {
    Block(&'p [TAssert]),
    Select(u32),
}

struct Emitter<'p> {
    program: &'p Program,
    files: Vec<String>,
    out: String,
    indent: usize,
    tmp: u32,
    module: usize,
    instance: u32,
    exits: Vec<Open<'p>>,
    /// Emitting the module body itself rather than a procedure.
    in_body: bool,
}

impl<'p> Emitter<'p> {
    fn line(&mut self, s: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn fresh(&mut self) -> String {
        self.tmp += 1;
        format!("ho_t{}", self.tmp)
    }

    fn file(&self, loc: Loc) -> &str {
        self.files.get(loc.file as usize).map(String::as_str).unwrap_or("\"\"")
    }

    /// `id, kind, file, line` arguments for a check site.
    fn site(&self, check: CheckId, kind: &str) -> String {
        let loc = self.program.check(check).loc;
        format!("{}, {kind}, {}, {}", check.0, self.file(loc), loc.line)
    }

    fn site_no_kind(&self, check: CheckId) -> String {
        let loc = self.program.check(check).loc;
        format!("{}, {}, {}", check.0, self.file(loc), loc.line)
    }

    fn module_name(&self) -> &'p str {
        &self.program.modules[self.module].name
    }

    fn mangle(&self, name: &str) -> String {
        format!(
            "ho_{}_{}_{}",
            sanitize(self.module_name()),
            self.instance,
            sanitize(name)
        )
    }

    fn proc_name(&self, id: ProcId) -> String {
        let p = self.program.proc(id);
        match p.kind {
            ProcKind::ModuleBody(_) => self.mangle("body"),
            // Contracts and procedures share one namespace in the source.
            _ => self.mangle(&p.name),
        }
    }

    // ---- unit ----

    fn unit(&mut self, unit: &str) {
        self.line(&format!("/* Generated by hoc. Compile with: {FLAGS} */"));
        self.line(&format!("#include \"{RUNTIME_HEADER}\""));
        for (m, k) in self.program.instances().collect::<Vec<_>>() {
            self.module = m;
            self.instance = k;
            self.out.push('\n');
            self.body_function();
        }
        self.out.push('\n');
        self.line(&format!("void ho_register_{}(void)", sanitize(unit)));
        self.line("{");
        self.indent += 1;
        for (m, k) in self.program.instances().collect::<Vec<_>>() {
            self.module = m;
            self.instance = k;
            let info = &self.program.modules[m];
            let name = c_string(&info.name);
            self.line(&format!(
                "ho_add_instance({name}, {k}, {}, {}, {});",
                info.first_id + k,
                info.data_size,
                self.mangle("body")
            ));
            for v in info.vars.iter().filter(|v| v.exported) {
                self.line(&format!(
                    "ho_export({name}, {k}, {}, {});",
                    c_string(&v.name),
                    v.offset
                ));
            }
        }
        self.indent -= 1;
        self.line("}");
    }

    /// Procedures the body calls, directly or through other procedures or
    /// contracts, in id order.
    fn reachable(&self, root: ProcId) -> Vec<ProcId> {
        let mut seen = BTreeSet::new();
        let mut work = vec![root];
        while let Some(id) = work.pop() {
            for (c, _) in callees(self.program.proc(id)) {
                if seen.insert(c) {
                    work.push(c);
                }
            }
        }
        seen.remove(&root);
        seen.into_iter().collect()
    }

    fn body_function(&mut self) {
        let info = &self.program.modules[self.module];
        let body = self.program.proc(info.body);
        let procs = self.reachable(info.body);
        self.line(&format!("void {}(ho_addr ho_base)", self.mangle("body")));
        self.line("{");
        self.indent += 1;
        self.line("__label__ ho_abort;");
        self.line(&format!(
            "const int64_t ho_module_id = {};",
            info.first_id + self.instance
        ));
        self.line(&format!("const int64_t ho_instance = {};", self.instance));
        self.line("(void)ho_base;");
        self.line("(void)ho_module_id;");
        self.line("(void)ho_instance;");
        for &id in &procs {
            self.line(&format!("auto int64_t {}(ho_addr ho_frame);", self.proc_name(id)));
        }
        for &id in &procs {
            self.procedure(id);
        }
        self.line(&format!("ho_addr ho_frame = ho_push({});", body.frame_size));
        self.in_body = true;
        self.block(&body.body);
        self.in_body = false;
        self.line("ho_pop(ho_frame);");
        self.line("return;");
        self.indent -= 1;
        self.line("ho_abort: __attribute__((unused));");
        self.indent += 1;
        self.line(";");
        self.indent -= 1;
        self.line("}");
    }

    fn procedure(&mut self, id: ProcId) {
        let p = self.program.proc(id);
        self.line(&format!("int64_t {}(ho_addr ho_frame)", self.proc_name(id)));
        self.line("{");
        self.indent += 1;
        self.line("(void)ho_frame;");
        self.block(&p.body);
        self.line("return 0;");
        self.indent -= 1;
        self.line("}");
    }

    // ---- statements ----

    fn asserts(&mut self, asserts: &'p [TAssert]) {
        for a in asserts {
            let call = self.call(a.contract, &a.args);
            let site = self.site_no_kind(a.check);
            self.line(&format!("HO_ASSERT({call} != 0, {site});"));
        }
    }

    fn block(&mut self, b: &'p TBlock) {
        self.line("{");
        self.indent += 1;
        self.asserts(&b.entry);
        self.exits.push(Open::Block(&b.exit));
        for s in &b.stmts {
            self.stmt(s);
        }
        self.exits.pop();
        self.asserts(&b.exit);
        self.indent -= 1;
        self.line("}");
    }

    /// Exit asserts of every open block up to `select`, or all of them.
    fn unwind(&mut self, select: Option<u32>) {
        let mut pending = Vec::new();
        for open in self.exits.iter().rev() {
            match open {
                Open::Block(asserts) => pending.push(*asserts),
                Open::Select(id) if Some(*id) == select => break,
                Open::Select(_) => {}
            }
        }
        for asserts in pending {
            self.asserts(asserts);
        }
    }

    fn stmt(&mut self, s: &'p TStmt) {
        match &s.kind {
            TStmtKind::Assign { place, ty, value } => {
                let a = self.place(place);
                if ty.is_aggregate() {
                    let src = self.aggregate_source(value);
                    self.line(&format!(
                        "{{ ho_addr ho_d = {a}; ho_addr ho_s = {src}; ho_copy(ho_d, ho_s, {}); }}",
                        ty.storage_size()
                    ));
                } else {
                    let v = self.expr(value);
                    self.line(&format!(
                        "{{ ho_addr ho_d = {a}; int64_t ho_v = {v}; ho_store(ho_d, {}, ho_v); }}",
                        width(ty)
                    ));
                }
            }
            TStmtKind::Call(c) => {
                let call = self.call(c.proc, &c.args);
                self.line(&format!("(void){call};"));
            }
            TStmtKind::If { arms, otherwise } => {
                for (i, (cond, body)) in arms.iter().enumerate() {
                    let c = self.expr(cond);
                    let kw = if i == 0 { "if" } else { "else if" };
                    self.line(&format!("{kw} ({c} != 0)"));
                    self.block(body);
                }
                if let Some(b) = otherwise {
                    self.line("else");
                    self.block(b);
                }
            }
            TStmtKind::Loop {
                guard, count, body, ..
            } => {
                let n = match count {
                    LoopCount::Const(n) => *n,
                    LoopCount::Invalid(_) => unreachable!("rejected by analysis"),
                };
                let i = self.fresh();
                self.line(&format!("for (uint32_t {i} = 0; {i} < {n}u; {i}++)"));
                self.line("{");
                self.indent += 1;
                if let Some(g) = guard {
                    let g = self.expr(g);
                    self.line(&format!("if ({g} == 0)"));
                    self.line("    break;");
                }
                self.block(body);
                self.indent -= 1;
                self.line("}");
            }
            TStmtKind::Case {
                scrutinee,
                clauses,
                otherwise,
            } => {
                let v = self.fresh();
                let e = self.expr(scrutinee);
                self.line("{");
                self.indent += 1;
                self.line(&format!("int64_t {v} = {e};"));
                self.clauses(&v, clauses);
                if let Some(b) = otherwise {
                    if clauses.is_empty() {
                        self.block(b);
                    } else {
                        self.line("else");
                        self.block(b);
                    }
                }
                self.indent -= 1;
                self.line("}");
            }
            TStmtKind::Select {
                id,
                target,
                target_kind,
                snapshot,
                clauses,
            } => {
                let a = self.place(target);
                let v = self.fresh();
                let (w, sg) = (target_kind.bytes(), target_kind.signed() as u8);
                self.line("{");
                self.indent += 1;
                self.line(&format!("int64_t {v} = ho_load({a}, {w}, {sg});"));
                self.line(&format!("ho_store(ho_frame + {snapshot}u, {w}, {v});"));
                self.line(&format!("switch ({})", self.switch_key(clauses, &v)));
                self.line("{");
                for (i, c) in clauses.iter().enumerate() {
                    self.line(&format!("case {}:", i + 1));
                    self.indent += 1;
                    self.exits.push(Open::Select(*id));
                    self.block(&c.body);
                    self.exits.pop();
                    self.line("break;");
                    self.indent -= 1;
                }
                self.line("default:");
                self.line("    break;");
                self.line("}");
                self.indent -= 1;
                self.line(&format!("ho_sel{id}_end:"));
                self.line("    ;");
                self.line("}");
            }
            TStmtKind::Next {
                select,
                target,
                target_kind,
                value,
                ..
            } => {
                let a = self.place(target);
                self.line("{");
                self.indent += 1;
                self.line(&format!("ho_store({a}, {}, {});", target_kind.bytes(), lit(*value)));
                self.unwind(Some(*select));
                self.line(&format!("goto ho_sel{select}_end;"));
                self.indent -= 1;
                self.line("}");
            }
            TStmtKind::Return(v) => {
                self.line("{");
                self.indent += 1;
                let rv = v.as_ref().map(|e| self.expr(e));
                if let Some(rv) = &rv {
                    self.line(&format!("int64_t ho_rv = {rv};"));
                }
                self.unwind(None);
                if self.in_body {
                    self.line("ho_pop(ho_frame);");
                    self.line("return;");
                } else if rv.is_some() {
                    self.line("return ho_rv;");
                } else {
                    self.line("return 0;");
                }
                self.indent -= 1;
                self.line("}");
            }
            TStmtKind::Log { text, value } => {
                let m = c_string(self.module_name());
                let t = c_string(text);
                match value {
                    Some(e) => {
                        let v = self.expr(e);
                        self.line(&format!("ho_log({m}, ho_instance, {t}, 1, {v});"));
                    }
                    None => self.line(&format!("ho_log({m}, ho_instance, {t}, 0, 0);")),
                }
            }
            TStmtKind::New { port, size, site } => {
                let p = self.place(port);
                let n = self.expr(size);
                let site = self.site_no_kind(*site);
                self.line(&format!(
                    "{{ ho_addr ho_p = {p}; int64_t ho_n = {n}; HO_PORT_OP(ho_new(ho_p, ho_n), {site}); }}"
                ));
            }
            TStmtKind::Dispose { port } => {
                let p = self.place(port);
                self.line(&format!("ho_dispose({p});"));
            }
            TStmtKind::Clone { src, dst, site } => {
                let s = self.place(src);
                let d = self.place(dst);
                let site = self.site_no_kind(*site);
                self.line(&format!(
                    "{{ ho_addr ho_s = {s}; ho_addr ho_d = {d}; HO_PORT_OP(ho_clone(ho_s, ho_d), {site}); }}"
                ));
            }
            TStmtKind::Extend { port, delta, site } => {
                let p = self.place(port);
                let n = self.expr(delta);
                let site = self.site_no_kind(*site);
                self.line(&format!(
                    "{{ ho_addr ho_p = {p}; int64_t ho_n = {n}; HO_PORT_OP(ho_extend(ho_p, ho_n, HO_CHECKS), {site}); }}"
                ));
            }
            TStmtKind::Send { src, dst } => {
                let e = self.send(src, dst);
                self.line(&format!("(void){e};"));
            }
        }
    }

    /// CASE clauses as an `if` chain; the first matching clause runs.
    fn clauses(&mut self, v: &str, clauses: &'p [TClause]) {
        for (i, c) in clauses.iter().enumerate() {
            let kw = if i == 0 { "if" } else { "else if" };
            self.line(&format!("{kw} ({})", Self::label_test(v, &c.labels)));
            self.block(&c.body);
        }
    }

    fn label_test(v: &str, labels: &[(i64, i64)]) -> String {
        let parts: Vec<_> = labels
            .iter()
            .map(|&(lo, hi)| {
                if lo == hi {
                    format!("{v} == {}", lit(lo))
                } else {
                    format!("({v} >= {} && {v} <= {})", lit(lo), lit(hi))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" || ")
        }
    }

    /// Clause number (1-based) of the first clause matching `v`, 0 for none.
    fn switch_key(&self, clauses: &[TClause], v: &str) -> String {
        let mut key = String::from("0");
        for (i, c) in clauses.iter().enumerate().rev() {
            key = format!("({}) ? {} : {key}", Self::label_test(v, &c.labels), i + 1);
        }
        key
    }

    // ---- places ----

    fn module_base(&self, sel: &ModSel, offset: u32) -> String {
        match sel {
            ModSel::Own => format!("(ho_base + {offset}u)"),
            ModSel::Other { module, instance } => {
                let k = match instance {
                    InstanceSel::Fixed(k) => k.to_string(),
                    InstanceSel::Corresponding => "(uint32_t)ho_instance".into(),
                };
                match module {
                    ModRef::Local(i) => {
                        let first = self.program.modules[*i].first_id;
                        format!("(ho_instance_base({first}u + {k}) + {offset}u)")
                    }
                    ModRef::External(i) => {
                        let ext = &self.program.externals[*i];
                        let var = ext
                            .vars
                            .iter()
                            .find(|v| v.offset == offset)
                            .map(|v| v.name.as_str())
                            .unwrap_or("");
                        format!(
                            "ho_lookup({}, {k}, {})",
                            c_string(&ext.name),
                            c_string(var)
                        )
                    }
                }
            }
        }
    }

    /// C expression of type `ho_addr` for a place.
    fn place(&mut self, p: &'p Place) -> String {
        match p {
            Place::ModuleVar { module, offset } => self.module_base(module, *offset),
            Place::Local { offset } => format!("(ho_frame + {offset}u)"),
            Place::RefParam { offset } => format!("((ho_addr)ho_load(ho_frame + {offset}u, 4, 0))"),
            Place::Field { base, offset } => {
                let b = self.place(base);
                format!("({b} + {offset}u)")
            }
            Place::Index {
                base,
                index,
                len,
                elem_size,
                check,
            } => {
                let b = self.place(base);
                let i = self.expr(index);
                let (tb, ti) = (self.fresh(), self.fresh());
                let guard = match check {
                    Some(c) => format!(
                        " HO_GUARD({ti} < 0 || {ti} >= {len}, {});",
                        self.site(*c, "HO_FAULT_ARRAY_BOUNDS")
                    ),
                    None => String::new(),
                };
                format!(
                    "({{ ho_addr {tb} = {b}; int64_t {ti} = {i};{guard} (ho_addr)({tb} + (uint32_t){ti} * {elem_size}u); }})"
                )
            }
            Place::Deref { pointer } => {
                let v = self.expr(pointer);
                let t = self.fresh();
                let file = self.file(pointer.loc).to_string();
                format!(
                    "({{ ho_addr {t} = (ho_addr){v}; HO_MMIO_GUARD({t}, {file}, {}); {t}; }})",
                    pointer.loc.line
                )
            }
            Place::Data { port, check } => {
                let p = self.place(port);
                let t = self.fresh();
                let guard = match check {
                    Some(c) => format!(
                        " HO_GUARD({t} == 0, {});",
                        self.site(*c, "HO_FAULT_EMPTY_PORT")
                    ),
                    None => String::new(),
                };
                format!("({{ ho_addr {t} = ho_data({p});{guard} {t} != 0 ? {t} : HO_DUMMY_BASE; }})")
            }
        }
    }

    fn aggregate_source(&mut self, e: &'p TExpr) -> String {
        let TExprKind::Load(p) = &e.kind else {
            unreachable!("aggregate values are loads")
        };
        self.place(p)
    }

    // ---- expressions ----

    fn load(&mut self, p: &'p Place, ty: &Type) -> String {
        let a = self.place(p);
        match ty {
            Type::Int(k) => format!("ho_load({a}, {}, {})", k.bytes(), k.signed() as u8),
            Type::Bool => format!("(int64_t)(ho_load({a}, 1, 0) != 0)"),
            _ => format!("ho_load({a}, 4, 0)"),
        }
    }

    fn send(&mut self, src: &'p Place, dst: &'p Place) -> String {
        let s = self.place(src);
        let d = self.place(dst);
        let (ts, td) = (self.fresh(), self.fresh());
        format!("({{ ho_addr {ts} = {s}; ho_addr {td} = {d}; (int64_t)ho_send({ts}, {td}); }})")
    }

    fn call(&mut self, id: ProcId, args: &'p [TArg]) -> String {
        let p = self.program.proc(id);
        let mut pre = String::new();
        let mut post = String::new();
        for (param, a) in p.params.iter().zip(args) {
            let t = self.fresh();
            let at = format!("ho_f + {}u", param.offset);
            match a {
                TArg::Value(e) if e.ty.is_aggregate() => {
                    let src = self.aggregate_source(e);
                    let _ = write!(pre, "ho_addr {t} = {src}; ");
                    let _ = write!(post, "ho_copy({at}, {t}, {}); ", e.ty.storage_size());
                }
                TArg::Value(e) => {
                    let v = self.expr(e);
                    let _ = write!(pre, "int64_t {t} = {v}; ");
                    let _ = write!(post, "ho_store({at}, {}, {t}); ", width(&param.ty));
                }
                TArg::Ref(place) => {
                    let a = self.place(place);
                    let _ = write!(pre, "ho_addr {t} = {a}; ");
                    let _ = write!(post, "ho_store({at}, 4, {t}); ");
                }
            }
        }
        let r = self.fresh();
        format!(
            "({{ {pre}ho_addr ho_f = ho_push({}u); {post}int64_t {r} = {}(ho_f); ho_pop(ho_f); {r}; }})",
            p.frame_size,
            self.proc_name(id)
        )
    }

    fn expr(&mut self, e: &'p TExpr) -> String {
        match &e.kind {
            TExprKind::Int(v) => lit(*v),
            TExprKind::Bool(b) => lit(*b as i64),
            TExprKind::ModuleId => "ho_module_id".into(),
            TExprKind::Instance => "ho_instance".into(),
            TExprKind::Load(p) => self.load(p, &e.ty),
            TExprKind::AddrOf(p) => {
                let a = self.place(p);
                format!("(int64_t){a}")
            }
            TExprKind::Unary(op, a) => {
                let v = self.expr(a);
                let k = e.ty.int_kind().unwrap_or(IntKind::S32);
                match op {
                    UnaryOp::Plus => v,
                    UnaryOp::Neg => format!("(-{v})"),
                    UnaryOp::Not => format!("(int64_t)({v} == 0)"),
                    UnaryOp::BitNot => format!("ho_wrap(~{v}, {}, {})", k.bits(), k.signed() as u8),
                }
            }
            TExprKind::Binary {
                op: op @ (BinaryOp::And | BinaryOp::Or),
                lhs,
                rhs,
                ..
            } => {
                let a = self.expr(lhs);
                let b = self.expr(rhs);
                let c = if *op == BinaryOp::And { "&&" } else { "||" };
                format!("(int64_t)(({a} != 0) {c} ({b} != 0))")
            }
            TExprKind::Binary { op, lhs, rhs, check } => {
                let a = self.expr(lhs);
                let b = self.expr(rhs);
                let k = e
                    .ty
                    .int_kind()
                    .or_else(|| lhs.ty.int_kind())
                    .unwrap_or(IntKind::S32);
                self.binary(*op, a, b, k, *check)
            }
            TExprKind::Narrow { value, to, check } => {
                let v = self.expr(value);
                let t = self.fresh();
                let (bits, sg) = (to.bits(), to.signed() as u8);
                let site = self.site(*check, "HO_FAULT_NARROWING");
                format!(
                    "({{ int64_t {t} = {v}; HO_GUARD(!ho_fits({t}, {bits}, {sg}), {site}); ho_wrap({t}, {bits}, {sg}); }})"
                )
            }
            TExprKind::Call(c) => self.call(c.proc, &c.args),
            TExprKind::Send { src, dst } => self.send(src, dst),
            TExprKind::Count { port, check } => {
                let p = self.place(port);
                let t = self.fresh();
                let site = self.site(*check, "HO_FAULT_EMPTY_PORT");
                format!("({{ int64_t {t} = ho_count({p}); HO_GUARD({t} < 0, {site}); {t} < 0 ? 0 : {t}; }})")
            }
            TExprKind::Pending(p) => {
                let a = self.place(p);
                format!("(int64_t)ho_pending({a})")
            }
            TExprKind::Min(a, b) | TExprKind::Max(a, b) => {
                let x = self.expr(a);
                let y = self.expr(b);
                let (ta, tb) = (self.fresh(), self.fresh());
                let cmp = if matches!(e.kind, TExprKind::Min(..)) { "<=" } else { ">=" };
                format!("({{ int64_t {ta} = {x}; int64_t {tb} = {y}; {ta} {cmp} {tb} ? {ta} : {tb}; }})")
            }
        }
    }

    fn binary(&mut self, op: BinaryOp, a: String, b: String, k: IntKind, check: Option<CheckId>) -> String {
        use BinaryOp::*;
        let (bits, sg) = (k.bits(), k.signed() as u8);
        let simple = |c: &str| format!("({a} {c} {b})");
        let cmp = |c: &str| format!("(int64_t)({a} {c} {b})");
        match op {
            Add => simple("+"),
            Sub => simple("-"),
            Mul => simple("*"),
            BitAnd => format!("ho_wrap({a} & {b}, {bits}, {sg})"),
            BitOr => format!("ho_wrap({a} | {b}, {bits}, {sg})"),
            BitXor => format!("ho_wrap({a} ^ {b}, {bits}, {sg})"),
            Eq => cmp("=="),
            Ne => cmp("!="),
            Lt => cmp("<"),
            Le => cmp("<="),
            Gt => cmp(">"),
            Ge => cmp(">="),
            Div | IntDiv | Mod | Shl | Shr => {
                let (ta, tb) = (self.fresh(), self.fresh());
                let (f, fail, kind) = match op {
                    Div | IntDiv => ("ho_div", format!("{tb} == 0"), "HO_FAULT_DIV_ZERO"),
                    Mod => ("ho_mod", format!("{tb} == 0"), "HO_FAULT_DIV_ZERO"),
                    Shl => ("ho_shl", format!("{tb} < 0 || {tb} > 31"), "HO_FAULT_SHIFT_RANGE"),
                    _ => ("ho_shr", format!("{tb} < 0 || {tb} > 31"), "HO_FAULT_SHIFT_RANGE"),
                };
                let guard = match check {
                    Some(c) => format!(" HO_GUARD({fail}, {});", self.site(c, kind)),
                    None => String::new(),
                };
                format!("({{ int64_t {ta} = {a}; int64_t {tb} = {b};{guard} {f}({ta}, {tb}); }})")
            }
            And | Or => unreachable!("short-circuit operators are handled by the caller"),
        }
    }
}
