//! Expression and designator checking.

use super::analyze::{Analyzer, Binding};
use super::consteval::{self, is_instance, is_module_id};
use super::ops::{self, Range};
use super::tast::*;
use super::types::{ConstValue, IntKind, Type, BLOCK_SIZE};
use crate::diag::codes;
use crate::source::Loc;
use crate::syntax::ast::{self, BinaryOp, DesignatorRoot, Expr, ExprKind, Selector, UnaryOp};

/// A resolved designator: storage, or a plain value.
#[derive(Debug, Clone)]
pub(super) enum Desig {
    Place(Place, Type),
    Value(TExpr),
}

/// Builtin procedures and functions, matched in upper or lower case after
/// user-defined names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Builtin {
    Clone,
    Dec,
    Inc,
    Dispose,
    Extend,
    New,
    Send,
    Adr,
    Count,
    Data,
    Max,
    Min,
    Pending,
}

impl Builtin {
    pub(super) fn lookup(name: &str) -> Option<Builtin> {
        let upper = if name.bytes().all(|b| !b.is_ascii_uppercase()) {
            name.to_ascii_uppercase()
        } else {
            name.to_string()
        };
        Some(match upper.as_str() {
            "CLONE" => Builtin::Clone,
            "DEC" => Builtin::Dec,
            "INC" => Builtin::Inc,
            "DISPOSE" => Builtin::Dispose,
            "EXTEND" => Builtin::Extend,
            "NEW" => Builtin::New,
            "SEND" => Builtin::Send,
            "ADR" => Builtin::Adr,
            "COUNT" => Builtin::Count,
            "DATA" => Builtin::Data,
            "MAX" => Builtin::Max,
            "MIN" => Builtin::Min,
            "PENDING" => Builtin::Pending,
            _ => return None,
        })
    }

    pub(super) fn is_function(self) -> bool {
        matches!(
            self,
            Builtin::Send | Builtin::Adr | Builtin::Count | Builtin::Data | Builtin::Max | Builtin::Min | Builtin::Pending
        )
    }

    pub(super) fn arity(self) -> usize {
        match self {
            Builtin::Dec | Builtin::Inc | Builtin::Dispose | Builtin::Adr | Builtin::Count | Builtin::Data | Builtin::Pending => 1,
            _ => 2,
        }
    }
}

/// Conservative value range of an integer expression.
pub fn range_of(e: &TExpr) -> Range {
    let kind = e.ty.int_kind().unwrap_or(IntKind::U32);
    match &e.kind {
        TExprKind::Int(v) => Range::exact(*v),
        TExprKind::Bool(_) => Range::new(0, 1),
        TExprKind::Instance => Range::new(0, 1),
        TExprKind::Unary(op, a) => Range::unary(*op, range_of(a), kind),
        TExprKind::Binary { op, lhs, rhs, .. } => match op {
            BinaryOp::And | BinaryOp::Or => Range::new(0, 1),
            op if op.is_comparison() => Range::new(0, 1),
            op => Range::binary(*op, range_of(lhs), range_of(rhs), kind),
        },
        TExprKind::Narrow { to, .. } => Range::of_kind(*to),
        TExprKind::Count { .. } => Range::new(0, BLOCK_SIZE as i128),
        TExprKind::Min(a, b) => {
            let (a, b) = (range_of(a), range_of(b));
            Range::new(a.lo.min(b.lo), a.hi.min(b.hi))
        }
        TExprKind::Max(a, b) => {
            let (a, b) = (range_of(a), range_of(b));
            Range::new(a.lo.max(b.lo), a.hi.max(b.hi))
        }
        _ => Range::of_kind(kind),
    }
}

impl Analyzer<'_> {
    pub(super) fn expr(&mut self, e: &Expr) -> Option<TExpr> {
        let loc = e.loc;
        match &e.kind {
            ExprKind::Number(v) => Some(TExpr::int(*v as i64, IntKind::of_literal(*v), loc)),
            ExprKind::Bool(b) => Some(bool_expr(*b, loc)),
            ExprKind::SizeOf(t) => {
                let ty = match self.resolve_type(t) {
                    Ok(ty) => ty,
                    Err(d) => {
                        self.report(d);
                        return None;
                    }
                };
                match ty.size() {
                    Some(n) => Some(TExpr::int(n as i64, IntKind::U32, loc)),
                    None => {
                        self.error(codes::PORT_SIZE, loc, "SIZE is not defined for ports");
                        None
                    }
                }
            }
            ExprKind::Unary(op, a) => self.unary(*op, a, loc),
            ExprKind::Binary(op, a, b) => self.binary(*op, a, b, loc),
            ExprKind::Designator(d) => match self.designator(d)? {
                Desig::Value(v) => Some(v),
                Desig::Place(_, Type::Port) => {
                    self.error(codes::PORT_VALUE, loc, "a port cannot be used as a value");
                    None
                }
                Desig::Place(place, ty) => Some(TExpr {
                    kind: TExprKind::Load(place),
                    ty,
                    loc,
                }),
            },
        }
    }

    pub(super) fn int_expr(&mut self, e: &Expr) -> Option<TExpr> {
        let t = self.expr(e)?;
        if t.ty.is_int() {
            Some(t)
        } else {
            self.error(codes::TYPE, e.loc, format!("expected an integer, found {}", t.ty));
            None
        }
    }

    pub(super) fn bool_expr(&mut self, e: &Expr) -> Option<TExpr> {
        let t = self.expr(e)?;
        if t.ty == Type::Bool {
            Some(t)
        } else {
            self.error(codes::TYPE, e.loc, format!("expected a boolean, found {}", t.ty));
            None
        }
    }

    fn unary(&mut self, op: UnaryOp, a: &Expr, loc: Loc) -> Option<TExpr> {
        let mark = self.const_warnings.len();
        if op == UnaryOp::Not {
            let a = self.bool_expr(a)?;
            if let Some(b) = a.const_bool() {
                self.const_warnings.truncate(mark);
                self.const_warnings.push(loc);
                return Some(bool_expr(!b, loc));
            }
            return Some(TExpr {
                kind: TExprKind::Unary(op, Box::new(a)),
                ty: Type::Bool,
                loc,
            });
        }
        let a = self.int_expr(a)?;
        let kind = a.ty.int_kind()?;
        if let Some(v) = a.const_int() {
            return Some(TExpr::int(ops::eval_unary(op, v, kind), kind, loc));
        }
        Some(TExpr {
            kind: TExprKind::Unary(op, Box::new(a)),
            ty: Type::Int(kind),
            loc,
        })
    }

    fn binary(&mut self, op: BinaryOp, a: &Expr, b: &Expr, loc: Loc) -> Option<TExpr> {
        let mark = self.const_warnings.len();
        if matches!(op, BinaryOp::And | BinaryOp::Or) {
            let l = self.bool_expr(a);
            let r = self.bool_expr(b);
            let (l, r) = (l?, r?);
            let short = if op == BinaryOp::And { Some(false) } else { Some(true) };
            let folded = match (l.const_bool(), r.const_bool()) {
                (Some(x), _) if Some(x) == short => Some(x),
                (Some(x), Some(y)) => Some(if op == BinaryOp::And { x && y } else { x || y }),
                _ => None,
            };
            if let Some(v) = folded {
                self.const_warnings.truncate(mark);
                self.const_warnings.push(loc);
                return Some(bool_expr(v, loc));
            }
            return Some(TExpr {
                kind: TExprKind::Binary {
                    op,
                    lhs: Box::new(l),
                    rhs: Box::new(r),
                    check: None,
                },
                ty: Type::Bool,
                loc,
            });
        }

        let l = self.expr(a);
        let r = self.expr(b);
        let (l, r) = (l?, r?);

        if op.is_comparison() {
            let ok = match (&l.ty, &r.ty) {
                (Type::Int(_), Type::Int(_)) => true,
                (Type::Bool, Type::Bool) | (Type::Pointer { .. }, Type::Pointer { .. }) => {
                    matches!(op, BinaryOp::Eq | BinaryOp::Ne) && l.ty.assignable_to(&r.ty)
                }
                _ => false,
            };
            if !ok {
                self.error(
                    codes::TYPE,
                    loc,
                    format!("cannot compare {} with {} using `{}`", l.ty, r.ty, op.symbol()),
                );
                return None;
            }
            let lc = const_of(&l);
            let rc = const_of(&r);
            if let (Some(x), Some(y)) = (lc, rc) {
                if let Ok(ConstValue::Bool(v)) = consteval::fold_binary(op, x, y, loc) {
                    self.const_warnings.truncate(mark);
                    self.const_warnings.push(loc);
                    return Some(bool_expr(v, loc));
                }
            }
            return Some(TExpr {
                kind: TExprKind::Binary {
                    op,
                    lhs: Box::new(l),
                    rhs: Box::new(r),
                    check: None,
                },
                ty: Type::Bool,
                loc,
            });
        }

        let (Some(ka), Some(kb)) = (l.ty.int_kind(), r.ty.int_kind()) else {
            self.error(
                codes::TYPE,
                loc,
                format!("`{}` needs integer operands, found {} and {}", op.symbol(), l.ty, r.ty),
            );
            return None;
        };
        let kind = ops::binary_kind(op, ka, kb);
        if let (Some(x), Some(y)) = (l.const_int(), r.const_int()) {
            return match consteval::fold_binary(op, ConstValue::Int(x, ka), ConstValue::Int(y, kb), loc) {
                Ok(ConstValue::Int(v, k)) => Some(TExpr::int(v, k, loc)),
                Ok(ConstValue::Bool(_)) => None,
                Err(e) => {
                    self.report(super::analyze::const_diag(e));
                    None
                }
            };
        }
        let check = match op {
            BinaryOp::Div | BinaryOp::IntDiv | BinaryOp::Mod => {
                let rr = range_of(&r);
                if rr.lo > 0 || rr.hi < 0 {
                    None
                } else {
                    Some(self.site(CheckKindTag::DivZero, loc))
                }
            }
            BinaryOp::Shl | BinaryOp::Shr => {
                let rr = range_of(&r);
                if rr.lo >= 0 && rr.hi < 32 {
                    None
                } else {
                    Some(self.site(CheckKindTag::ShiftRange, loc))
                }
            }
            _ => None,
        };
        Some(TExpr {
            kind: TExprKind::Binary {
                op,
                lhs: Box::new(l),
                rhs: Box::new(r),
                check,
            },
            ty: Type::Int(kind),
            loc,
        })
    }

    /// Converts `e` for storage into a location of type `to`, inserting a
    /// range check when the value may not fit.
    pub(super) fn coerce(&mut self, e: TExpr, to: &Type, loc: Loc) -> Option<TExpr> {
        if *to == Type::Port || e.ty == Type::Port {
            self.error(codes::PORT_ASSIGN, loc, "ports cannot be copied; use SEND or CLONE");
            return None;
        }
        if !e.ty.assignable_to(to) {
            self.error(codes::TYPE, loc, format!("expected {to}, found {}", e.ty));
            return None;
        }
        if e.ty.is_aggregate() && !matches!(e.kind, TExprKind::Load(_)) {
            self.error(codes::TYPE, loc, "aggregate values must come from a variable");
            return None;
        }
        let Type::Int(kind) = to else {
            return Some(e);
        };
        let r = range_of(&e);
        if r.fits(*kind) {
            return Some(e);
        }
        if let Some(v) = e.const_int() {
            self.error(codes::RANGE, loc, format!("constant {v} does not fit in {}", kind.name()));
            return None;
        }
        let check = self.site(CheckKindTag::Narrowing, loc);
        Some(TExpr {
            kind: TExprKind::Narrow {
                value: Box::new(e),
                to: *kind,
                check,
            },
            ty: Type::Int(*kind),
            loc,
        })
    }

    // ---- designators ----

    pub(super) fn designator(&mut self, d: &ast::Designator) -> Option<Desig> {
        let mut selectors = d.selectors.iter().peekable();
        let mut cur = match &d.root {
            DesignatorRoot::Name(id) => match self.lookup(&id.name) {
                Some(Binding::Var { place, ty }) => Desig::Place(place.place(), ty),
                Some(Binding::Const(v)) => Desig::Value(const_expr(v, id.loc)),
                Some(Binding::External { address, ty }) => Desig::Value(TExpr {
                    kind: TExprKind::Int(address),
                    ty,
                    loc: id.loc,
                }),
                Some(Binding::Import { module, instance }) => {
                    let Some(Selector::Field(field)) = selectors.next() else {
                        self.error(
                            codes::TYPE,
                            id.loc,
                            format!("module `{}` must be followed by `.variable`", id.name),
                        );
                        return None;
                    };
                    let (mname, slot) = match module {
                        ModRef::Local(i) => (&self.modules[i].name, self.modules[i].var(&field.name)),
                        ModRef::External(i) => (
                            &self.externals[i].name,
                            self.externals[i].vars.iter().find(|v| v.name == field.name),
                        ),
                    };
                    let mname = mname.clone();
                    match slot {
                        Some(v) if v.exported => Desig::Place(
                            Place::ModuleVar {
                                module: ModSel::Other { module, instance },
                                offset: v.offset,
                            },
                            v.ty.clone(),
                        ),
                        Some(_) => {
                            self.error(
                                codes::NOT_EXPORTED,
                                field.loc,
                                format!("`{}` is not exported by module `{mname}`", field.name),
                            );
                            return None;
                        }
                        None => {
                            self.error(
                                codes::UNDEFINED,
                                field.loc,
                                format!("module `{mname}` has no variable `{}`", field.name),
                            );
                            return None;
                        }
                    }
                }
                Some(Binding::Type(_)) => {
                    self.error(codes::TYPE, id.loc, format!("type `{}` used as a value", id.name));
                    return None;
                }
                Some(Binding::Proc(_)) | Some(Binding::Contract(_)) => {
                    self.error(codes::ARGS, id.loc, format!("`{}` must be called with arguments", id.name));
                    return None;
                }
                None if is_module_id(&id.name) => Desig::Value(match self.cx.module_id {
                    Some(v) => TExpr::int(v as i64, IntKind::U32, id.loc),
                    None => TExpr {
                        kind: TExprKind::ModuleId,
                        ty: Type::U32,
                        loc: id.loc,
                    },
                }),
                None if is_instance(&id.name) => Desig::Value(match self.cx.instance {
                    Some(v) => TExpr::int(v as i64, IntKind::U32, id.loc),
                    None => TExpr {
                        kind: TExprKind::Instance,
                        ty: Type::U32,
                        loc: id.loc,
                    },
                }),
                None => {
                    if !self.poisoned.contains(&id.name) {
                        self.error(codes::UNDEFINED, id.loc, format!("undefined name `{}`", id.name));
                    }
                    return None;
                }
            },
            DesignatorRoot::Call(c) => self.call_value(c)?,
        };
        for sel in selectors {
            cur = match (sel, cur) {
                (Selector::Field(f), Desig::Place(base, ty)) => match ty.field(&f.name) {
                    Some((offset, fty)) => Desig::Place(
                        Place::Field {
                            base: Box::new(base),
                            offset,
                        },
                        fty.clone(),
                    ),
                    None => {
                        self.error(codes::UNDEFINED, f.loc, format!("{ty} has no field `{}`", f.name));
                        return None;
                    }
                },
                (Selector::Field(f), Desig::Value(v)) => {
                    self.error(codes::TYPE, f.loc, format!("{} has no fields", v.ty));
                    return None;
                }
                (Selector::Index(ix), Desig::Place(base, Type::Array { len, elem })) => {
                    let index = self.int_expr(ix)?;
                    let check = match index.const_int() {
                        Some(k) if (0..len as i64).contains(&k) => None,
                        Some(k) => {
                            self.error(codes::RANGE, ix.loc, format!("index {k} is outside 0..{}", len - 1));
                            return None;
                        }
                        None => {
                            let r = range_of(&index);
                            if r.lo >= 0 && r.hi < len as i128 {
                                None
                            } else {
                                Some(self.site(CheckKindTag::ArrayBounds, ix.loc))
                            }
                        }
                    };
                    Desig::Place(
                        Place::Index {
                            base: Box::new(base),
                            index: Box::new(index),
                            len,
                            elem_size: elem.storage_size(),
                            check,
                        },
                        *elem,
                    )
                }
                (Selector::Index(ix), other) => {
                    let ty = match other {
                        Desig::Place(_, t) => t,
                        Desig::Value(v) => v.ty,
                    };
                    self.error(codes::TYPE, ix.loc, format!("{ty} is not an array"));
                    return None;
                }
                (Selector::Deref(loc), cur) => {
                    let ptr = match cur {
                        Desig::Place(p, ty) => TExpr {
                            kind: TExprKind::Load(p),
                            ty,
                            loc: *loc,
                        },
                        Desig::Value(v) => v,
                    };
                    let Type::Pointer { to, .. } = ptr.ty.clone() else {
                        self.error(codes::TYPE, *loc, format!("{} is not a pointer", ptr.ty));
                        return None;
                    };
                    Desig::Place(
                        Place::Deref {
                            pointer: Box::new(ptr),
                        },
                        *to,
                    )
                }
            };
        }
        Some(cur)
    }

    /// A designator that must denote storage.
    pub(super) fn place(&mut self, e: &Expr) -> Option<(Place, Type)> {
        let ExprKind::Designator(d) = &e.kind else {
            self.error(codes::NOT_ASSIGNABLE, e.loc, "expected a variable");
            return None;
        };
        match self.designator(d)? {
            Desig::Place(p, t) => Some((p, t)),
            Desig::Value(_) => {
                self.error(codes::NOT_ASSIGNABLE, e.loc, "expected a variable");
                None
            }
        }
    }

    pub(super) fn port_place(&mut self, e: &Expr) -> Option<Place> {
        let (p, t) = self.place(e)?;
        if t == Type::Port {
            Some(p)
        } else {
            self.error(codes::TYPE, e.loc, format!("expected a port, found {t}"));
            None
        }
    }

    fn arity_ok(&mut self, c: &ast::Call, n: usize) -> bool {
        if c.args.len() == n {
            return true;
        }
        self.error(
            codes::ARGS,
            c.loc,
            format!("`{}` takes {n} argument(s), {} given", c.name.name, c.args.len()),
        );
        false
    }

    /// A call in expression position.
    fn call_value(&mut self, c: &ast::Call) -> Option<Desig> {
        let loc = c.loc;
        match self.lookup(&c.name.name) {
            Some(Binding::Proc(id)) => {
                let call = self.user_call(id, c)?;
                let Some(ret) = self.procs[id.0 as usize].ret.clone() else {
                    self.error(
                        codes::CALL_RESULT,
                        loc,
                        format!("procedure `{}` does not return a value", c.name.name),
                    );
                    return None;
                };
                return Some(Desig::Value(TExpr {
                    kind: TExprKind::Call(call),
                    ty: ret,
                    loc,
                }));
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
        if !b.is_function() {
            self.error(
                codes::CALL_RESULT,
                loc,
                format!("`{}` does not return a value", c.name.name),
            );
            return None;
        }
        if !self.arity_ok(c, b.arity()) {
            return None;
        }
        let value = |kind, ty| {
            Some(Desig::Value(TExpr { kind, ty, loc }))
        };
        match b {
            Builtin::Send => {
                let src = self.port_place(&c.args[0]);
                let dst = self.port_place(&c.args[1]);
                value(TExprKind::Send { src: src?, dst: dst? }, Type::Bool)
            }
            Builtin::Pending => {
                let p = self.port_place(&c.args[0])?;
                value(TExprKind::Pending(p), Type::Bool)
            }
            Builtin::Count => {
                let port = self.port_place(&c.args[0])?;
                let check = self.site(CheckKindTag::EmptyPort, loc);
                value(TExprKind::Count { port, check }, Type::S32)
            }
            Builtin::Data => {
                let port = self.port_place(&c.args[0])?;
                let check = Some(self.site(CheckKindTag::EmptyPort, loc));
                Some(Desig::Place(
                    Place::Data {
                        port: Box::new(port),
                        check,
                    },
                    Type::block_data(),
                ))
            }
            Builtin::Adr => {
                let (p, t) = self.place(&c.args[0])?;
                if t == Type::Port {
                    self.error(codes::PORT_NESTED, c.args[0].loc, "cannot take the address of a port");
                    return None;
                }
                value(TExprKind::AddrOf(p), Type::pointer_to(t))
            }
            Builtin::Min | Builtin::Max => {
                let a = self.int_expr(&c.args[0]);
                let b2 = self.int_expr(&c.args[1]);
                let (a, b2) = (a?, b2?);
                if let (Some(x), Some(y)) = (a.const_int(), b2.const_int()) {
                    let v = if b == Builtin::Min { x.min(y) } else { x.max(y) };
                    return Some(Desig::Value(TExpr::int(v, IntKind::S32, loc)));
                }
                let kind = if b == Builtin::Min {
                    TExprKind::Min(Box::new(a), Box::new(b2))
                } else {
                    TExprKind::Max(Box::new(a), Box::new(b2))
                };
                value(kind, Type::S32)
            }
            _ => unreachable!("procedures rejected above"),
        }
    }

    pub(super) fn user_call(&mut self, id: ProcId, c: &ast::Call) -> Option<TCall> {
        let params = self.procs[id.0 as usize].params.clone();
        if !self.arity_ok(c, params.len()) {
            return None;
        }
        let args = self.bind_args(&params, &c.args)?;
        Some(TCall {
            proc: id,
            args,
            loc: c.loc,
        })
    }

    pub(super) fn bind_args(&mut self, params: &[ParamInfo], args: &[Expr]) -> Option<Vec<TArg>> {
        let mut out = Vec::new();
        let mut ok = true;
        for (p, a) in params.iter().zip(args) {
            let arg = if p.by_ref {
                self.place(a).and_then(|(place, ty)| {
                    if ty == p.ty {
                        Some(TArg::Ref(place))
                    } else {
                        self.error(
                            codes::TYPE,
                            a.loc,
                            format!("VAR parameter `{}` needs {}, found {ty}", p.name, p.ty),
                        );
                        None
                    }
                })
            } else {
                self.expr(a)
                    .and_then(|e| self.coerce(e, &p.ty, a.loc))
                    .map(TArg::Value)
            };
            match arg {
                Some(arg) => out.push(arg),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }
}

fn bool_expr(b: bool, loc: Loc) -> TExpr {
    TExpr {
        kind: TExprKind::Bool(b),
        ty: Type::Bool,
        loc,
    }
}

pub(super) fn const_expr(v: ConstValue, loc: Loc) -> TExpr {
    match v {
        ConstValue::Int(x, k) => TExpr::int(x, k, loc),
        ConstValue::Bool(b) => bool_expr(b, loc),
    }
}

fn const_of(e: &TExpr) -> Option<ConstValue> {
    match (&e.kind, &e.ty) {
        (TExprKind::Int(v), Type::Int(k)) => Some(ConstValue::Int(*v, *k)),
        (TExprKind::Bool(b), _) => Some(ConstValue::Bool(*b)),
        _ => None,
    }
}
