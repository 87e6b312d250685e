//! Statement and block checking.

use std::collections::HashMap;

use super::analyze::{Analyzer, Binding, BlockRole, SelectCx, VarPlace};
use super::expr::Builtin;
use super::tast::*;
use super::types::{IntKind, Type};
use crate::diag::codes;
use crate::source::Loc;
use crate::syntax::ast::{self, Assert, BinaryOp, StmtKind};

impl Analyzer<'_> {
    pub(super) fn block(&mut self, b: &ast::Block, role: BlockRole) -> TBlock {
        self.cx.scopes.push(HashMap::new());
        let mut out = TBlock::default();
        for check in &b.checks {
            for a in &check.asserts {
                let Some(t) = self.assert(a, check) else {
                    continue;
                };
                if check.kind.at_entry() {
                    out.entry.push(t.clone());
                }
                if check.kind.at_exit() {
                    out.exit.push(t);
                }
            }
        }
        let module_body = role == BlockRole::Body && matches!(self.cx.kind, Some(ProcKind::ModuleBody(_)));
        let mut leading = true;
        for s in &b.stmts {
            let is_import = matches!(s.kind, StmtKind::Import(_));
            if is_import && !(module_body && leading) {
                self.error(
                    codes::IMPORT_POSITION,
                    s.loc,
                    "IMPORT is only allowed at the start of a module body",
                );
            }
            leading &= is_import;
            if let StmtKind::Local(decls) = &s.kind {
                // One store per declared name.
                for d in decls {
                    if let Some(t) = self.local(d) {
                        out.stmts.push(t);
                    }
                }
                continue;
            }
            if let Some(t) = self.stmt(s) {
                out.stmts.push(t);
            }
        }
        self.cx.scopes.pop();
        out
    }

    fn assert(&mut self, a: &Assert, check: &ast::Check) -> Option<TAssert> {
        let name = a.name();
        let Some(Binding::Contract(id)) = self.lookup(&name.name) else {
            self.error(
                codes::CHECK_TARGET,
                name.loc,
                format!("`{}` is not a contract", name.name),
            );
            return None;
        };
        let params = self.procs[id.0 as usize].params.clone();
        let args = match a {
            Assert::Name(_) if params.is_empty() => Vec::new(),
            Assert::Name(_) => {
                self.error(
                    codes::ARGS,
                    name.loc,
                    format!("contract `{}` takes {} argument(s)", name.name, params.len()),
                );
                return None;
            }
            Assert::Call(c) => {
                if c.args.len() != params.len() {
                    self.error(
                        codes::ARGS,
                        c.loc,
                        format!(
                            "contract `{}` takes {} argument(s), {} given",
                            name.name,
                            params.len(),
                            c.args.len()
                        ),
                    );
                    return None;
                }
                self.bind_args(&params, &c.args)?
            }
        };
        let site = self.site(CheckKindTag::Contract, check.loc);
        Some(TAssert {
            kind: check.kind,
            contract: id,
            args,
            check: site,
            loc: a.loc(),
        })
    }

    fn stmt(&mut self, s: &ast::Stmt) -> Option<TStmt> {
        let loc = s.loc;
        let kind = match &s.kind {
            StmtKind::Assign { target, value } => {
                let (place, ty) = match self.designator(target)? {
                    super::expr::Desig::Place(p, t) => (p, t),
                    super::expr::Desig::Value(_) => {
                        self.error(codes::NOT_ASSIGNABLE, target.loc, "left side is not assignable");
                        return None;
                    }
                };
                if ty == Type::Port {
                    self.error(codes::PORT_ASSIGN, loc, "ports cannot be assigned; use SEND or CLONE");
                    return None;
                }
                let v = self.expr(value)?;
                let value = self.coerce(v, &ty, value.loc)?;
                TStmtKind::Assign { place, ty, value }
            }
            StmtKind::Call(c) => return self.call_stmt(c, loc),
            StmtKind::If { arms, otherwise } => {
                let mut tarms = Vec::new();
                for (cond, body) in arms {
                    let c = self.bool_expr(cond);
                    let b = self.block(body, BlockRole::Nested);
                    tarms.push((c?, b));
                }
                let otherwise = otherwise.as_ref().map(|b| self.block(b, BlockRole::Nested));
                TStmtKind::If {
                    arms: tarms,
                    otherwise,
                }
            }
            StmtKind::Loop { guard, count, body } => {
                let guard = match guard {
                    Some(g) => Some(self.bool_expr(g)?),
                    None => None,
                };
                let count = match self.fold_int(count, IntKind::U32) {
                    Ok(n) => LoopCount::Const(n as u32),
                    Err(_) => LoopCount::Invalid(count.loc),
                };
                let counter = self.alloc_slot("", &Type::U32, SlotKind::Hidden);
                self.cx.loop_depth += 1;
                let body = self.block(body, BlockRole::Nested);
                self.cx.loop_depth -= 1;
                TStmtKind::Loop {
                    guard,
                    count,
                    counter,
                    body,
                }
            }
            StmtKind::Return(value) => self.return_stmt(value.as_ref(), loc)?,
            StmtKind::Local(_) => unreachable!("handled by block"),
            StmtKind::External(decls) => {
                for d in decls {
                    self.external(d);
                }
                return None;
            }
            StmtKind::State(ids) => {
                for (i, id) in ids.iter().enumerate() {
                    self.bind(id, Binding::Const(super::types::ConstValue::Int(i as i64, IntKind::S32)));
                }
                return None;
            }
            StmtKind::Import(_) => return None,
            StmtKind::Select { target, clauses } => self.select(target, clauses, loc)?,
            StmtKind::Next(value) => {
                let Some(sel) = self.cx.selects.last().cloned() else {
                    self.error(codes::NEXT_OUTSIDE, loc, "NEXT outside of a SELECT clause");
                    return None;
                };
                let v = match self.fold_int(value, sel.kind) {
                    Ok(v) => v,
                    Err(d) => {
                        self.report(d);
                        return None;
                    }
                };
                TStmtKind::Next {
                    select: sel.id,
                    target: sel.target,
                    target_kind: sel.kind,
                    value: v,
                    in_loop: self.cx.loop_depth > sel.loop_depth,
                }
            }
            StmtKind::Case {
                scrutinee,
                clauses,
                otherwise,
            } => {
                let scrutinee = self.int_expr(scrutinee)?;
                let clauses = self.clauses(clauses, None)?;
                let otherwise = otherwise.as_ref().map(|b| self.block(b, BlockRole::Nested));
                TStmtKind::Case {
                    scrutinee,
                    clauses,
                    otherwise,
                }
            }
            StmtKind::Log { text, value } => {
                let value = match value {
                    Some(v) => {
                        let t = self.expr(v)?;
                        if !(t.ty.is_int() || t.ty == Type::Bool) {
                            self.error(codes::TYPE, v.loc, format!("LOG needs a number, found {}", t.ty));
                            return None;
                        }
                        Some(t)
                    }
                    None => None,
                };
                TStmtKind::Log {
                    text: text.clone(),
                    value,
                }
            }
        };
        Some(TStmt { kind, loc })
    }

    fn return_stmt(&mut self, value: Option<&ast::Expr>, loc: Loc) -> Option<TStmtKind> {
        if self.cx.is_contract {
            let Some(v) = value else {
                self.error(codes::CONTRACT_RESULT, loc, "a contract must return a boolean");
                return None;
            };
            let t = self.expr(v)?;
            if t.ty != Type::Bool {
                self.error(
                    codes::CONTRACT_RESULT,
                    v.loc,
                    format!("a contract must return a boolean, found {}", t.ty),
                );
                return None;
            }
            return Some(TStmtKind::Return(Some(t)));
        }
        match (self.cx.ret.clone(), value) {
            (Some(ty), Some(v)) => {
                let t = self.expr(v)?;
                Some(TStmtKind::Return(Some(self.coerce(t, &ty, v.loc)?)))
            }
            (None, None) => Some(TStmtKind::Return(None)),
            (Some(ty), None) => {
                self.error(codes::RETURN, loc, format!("RETURN needs a value of type {ty}"));
                None
            }
            (None, Some(v)) => {
                self.error(codes::RETURN, v.loc, "RETURN with a value outside a function");
                None
            }
        }
    }

    fn local(&mut self, d: &ast::LocalDecl) -> Option<TStmt> {
        let init = self.expr(&d.init)?;
        let (ty, value) = match &d.ty {
            Some(t) => {
                let ty = match self.resolve_type(t) {
                    Ok(ty) => ty,
                    Err(e) => {
                        self.report(e);
                        return None;
                    }
                };
                let v = self.coerce(init, &ty, d.init.loc)?;
                (ty, v)
            }
            None => {
                if init.ty.is_aggregate() && !matches!(init.kind, TExprKind::Load(_)) {
                    self.error(codes::TYPE, d.init.loc, "aggregate values must come from a variable");
                    return None;
                }
                (init.ty.clone(), init)
            }
        };
        let innermost_has = self
            .cx
            .scopes
            .last()
            .is_some_and(|s| s.contains_key(&d.name.name));
        if !innermost_has && matches!(self.lookup(&d.name.name), Some(Binding::Var { .. })) {
            self.warn(
                codes::W_SHADOW,
                d.name.loc,
                format!("local `{}` shadows a variable of an outer scope", d.name.name),
            );
        }
        let offset = self.alloc_slot(&d.name.name, &ty, SlotKind::Local);
        self.bind(
            &d.name,
            Binding::Var {
                place: VarPlace::Local(offset),
                ty: ty.clone(),
            },
        );
        Some(TStmt {
            kind: TStmtKind::Assign {
                place: Place::Local { offset },
                ty,
                value,
            },
            loc: d.name.loc,
        })
    }

    fn external(&mut self, d: &ast::ExternalDecl) {
        let ty = match self.resolve_type(&d.ty) {
            Ok(t) => t,
            Err(e) => return self.report(e),
        };
        if !matches!(ty, Type::Pointer { .. }) {
            self.error(
                codes::EXTERNAL_TYPE,
                d.ty.loc(),
                format!("EXTERNAL variables must have a pointer type, found {ty}"),
            );
            return;
        }
        match self.fold_int(&d.address, IntKind::U32) {
            Ok(address) => self.bind(&d.name, Binding::External { address, ty }),
            Err(e) => self.report(e),
        }
    }

    fn select(&mut self, target: &ast::Designator, clauses: &[ast::Clause], loc: Loc) -> Option<TStmtKind> {
        let (place, kind) = match self.designator(target)? {
            super::expr::Desig::Place(p, Type::Int(k)) if k.bits() == 32 => (p, k),
            super::expr::Desig::Place(_, t) => {
                self.error(
                    codes::SELECT_TARGET,
                    target.loc,
                    format!("SELECT needs a 32-bit integer variable, found {t}"),
                );
                return None;
            }
            super::expr::Desig::Value(_) => {
                self.error(codes::SELECT_TARGET, target.loc, "SELECT needs an assignable variable");
                return None;
            }
        };
        let id = self.next_select;
        self.next_select += 1;
        let snapshot = self.alloc_slot("", &Type::Int(kind), SlotKind::Hidden);
        self.cx.selects.push(SelectCx {
            id,
            target: place.clone(),
            kind,
            loop_depth: self.cx.loop_depth,
        });
        let clauses = self.clauses(clauses, Some(kind));
        self.cx.selects.pop();
        let _ = loc;
        Some(TStmtKind::Select {
            id,
            target: place,
            target_kind: kind,
            snapshot,
            clauses: clauses?,
        })
    }

    fn clauses(&mut self, clauses: &[ast::Clause], kind: Option<IntKind>) -> Option<Vec<TClause>> {
        let mut seen: Vec<(i64, i64)> = Vec::new();
        let mut out = Vec::new();
        let mut ok = true;
        for c in clauses {
            let mut labels = Vec::new();
            for l in &c.labels {
                let fold = |a: &Self, e: &ast::Expr| match kind {
                    Some(k) => a.fold_int(e, k),
                    None => a.fold_int(e, IntKind::U32).or_else(|_| a.fold_int(e, IntKind::S32)),
                };
                let lo = fold(self, &l.lo);
                let hi = match &l.hi {
                    Some(h) => fold(self, h),
                    None => lo.clone(),
                };
                let (lo, hi) = match (lo, hi) {
                    (Ok(lo), Ok(hi)) => (lo, hi),
                    (Err(e), _) | (_, Err(e)) => {
                        self.report(e);
                        ok = false;
                        continue;
                    }
                };
                if lo > hi {
                    self.error(codes::BAD_RANGE, l.lo.loc, format!("empty label range {lo}..{hi}"));
                    ok = false;
                    continue;
                }
                if let Some(&(a, b)) = seen.iter().find(|&&(a, b)| lo <= b && a <= hi) {
                    let what = if a == b { format!("{a}") } else { format!("{a}..{b}") };
                    self.error(
                        codes::DUP_LABEL,
                        l.lo.loc,
                        format!("label overlaps the earlier label {what}"),
                    );
                    ok = false;
                    continue;
                }
                seen.push((lo, hi));
                labels.push((lo, hi));
            }
            let body = self.block(&c.body, BlockRole::Nested);
            out.push(TClause { labels, body });
        }
        ok.then_some(out)
    }

    fn call_stmt(&mut self, c: &ast::Call, loc: Loc) -> Option<TStmt> {
        match self.lookup(&c.name.name) {
            Some(Binding::Proc(id)) => {
                let call = self.user_call(id, c)?;
                return Some(TStmt {
                    kind: TStmtKind::Call(call),
                    loc,
                });
            }
            Some(Binding::Contract(_)) => {
                self.error(
                    codes::TYPE,
                    loc,
                    format!("contract `{}` can only be used in REQUIRE, PROVIDE or INVARIANT", c.name.name),
                );
                return None;
            }
            Some(_) => {
                self.error(codes::TYPE, loc, format!("`{}` is not a procedure", c.name.name));
                return None;
            }
            None => {}
        }
        let Some(b) = Builtin::lookup(&c.name.name) else {
            self.error(codes::UNDEFINED, c.name.loc, format!("undefined procedure `{}`", c.name.name));
            return None;
        };
        if b.is_function() && b != Builtin::Send {
            self.error(
                codes::CALL_RESULT,
                loc,
                format!("the result of `{}` must be used", c.name.name),
            );
            return None;
        }
        if c.args.len() != b.arity() {
            self.error(
                codes::ARGS,
                c.loc,
                format!("`{}` takes {} argument(s), {} given", c.name.name, b.arity(), c.args.len()),
            );
            return None;
        }
        let kind = match b {
            Builtin::Inc | Builtin::Dec => {
                let (place, ty) = self.place(&c.args[0])?;
                let Type::Int(k) = ty else {
                    self.error(codes::TYPE, c.args[0].loc, format!("{} needs an integer variable", c.name.name));
                    return None;
                };
                let op = if b == Builtin::Inc { BinaryOp::Add } else { BinaryOp::Sub };
                let sum = TExpr {
                    kind: TExprKind::Binary {
                        op,
                        lhs: Box::new(TExpr {
                            kind: TExprKind::Load(place.clone()),
                            ty: ty.clone(),
                            loc,
                        }),
                        rhs: Box::new(TExpr::int(1, k, loc)),
                        check: None,
                    },
                    ty: ty.clone(),
                    loc,
                };
                let value = self.coerce(sum, &ty, loc)?;
                TStmtKind::Assign { place, ty, value }
            }
            Builtin::New => {
                let port = self.port_place(&c.args[0]);
                let size = self.int_expr(&c.args[1]);
                let site = self.site(CheckKindTag::PortOp, loc);
                TStmtKind::New {
                    port: port?,
                    size: size?,
                    site,
                }
            }
            Builtin::Dispose => TStmtKind::Dispose {
                port: self.port_place(&c.args[0])?,
            },
            Builtin::Clone => {
                let src = self.port_place(&c.args[0]);
                let dst = self.port_place(&c.args[1]);
                let site = self.site(CheckKindTag::PortOp, loc);
                TStmtKind::Clone {
                    src: src?,
                    dst: dst?,
                    site,
                }
            }
            Builtin::Extend => {
                let port = self.port_place(&c.args[0]);
                let delta = self.int_expr(&c.args[1]);
                let site = self.site(CheckKindTag::PortOp, loc);
                TStmtKind::Extend {
                    port: port?,
                    delta: delta?,
                    site,
                }
            }
            Builtin::Send => {
                let src = self.port_place(&c.args[0]);
                let dst = self.port_place(&c.args[1]);
                TStmtKind::Send { src: src?, dst: dst? }
            }
            _ => unreachable!("functions rejected above"),
        };
        Some(TStmt { kind, loc })
    }
}
