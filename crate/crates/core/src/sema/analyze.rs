//! Semantic analysis: name resolution, typing, layout and the checks that
//! make a program acceptable. Expressions and statements live in the
//! sibling `expr` and `stmt` modules.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::consteval::{self, ConstEnv, ConstError};
use super::signature::ModuleSignature;
use super::tast::*;
use super::types::{ConstValue, IntKind, Type};
use crate::diag::{self, codes, Diagnostic};
use crate::source::Loc;
use crate::syntax::ast::{self, StmtKind, Toplevel, TypeExpr, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Check everything.
    Full,
    /// Declarations only: enough to produce module signatures.
    Restricted,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub program: Program,
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn has_errors(&self) -> bool {
        diag::has_errors(&self.diagnostics)
    }
}

/// Names of modules imported somewhere in `unit` but not defined in it.
/// Their signatures must come from interface files.
pub fn external_imports(unit: &Unit) -> BTreeSet<String> {
    let defined: BTreeSet<&str> = unit
        .toplevels
        .iter()
        .filter_map(|t| match t {
            Toplevel::Module(m) => Some(m.name.name.as_str()),
            _ => None,
        })
        .collect();
    let mut out = BTreeSet::new();
    for t in &unit.toplevels {
        if let Toplevel::Module(m) = t {
            for s in &m.body.stmts {
                if let StmtKind::Import(imports) = &s.kind {
                    for import in imports {
                        if !defined.contains(import.module.name.as_str()) {
                            out.insert(import.module.name.clone());
                        }
                    }
                }
            }
        }
    }
    out
}

/// Analyzes a merged compilation unit. `known` supplies signatures of
/// modules defined elsewhere. Diagnostics are sorted.
pub fn analyze_unit(unit: &Unit, known: &[ModuleSignature], mode: Mode) -> Analysis {
    let mut a = Analyzer::new(known);
    a.declare(unit);
    if mode == Mode::Full {
        a.check_bodies(unit);
    }
    a.flush_const_warnings();
    let mut diagnostics = std::mem::take(&mut a.diags);
    if mode == Mode::Full && !diag::has_errors(&diagnostics) {
        let program = a.program();
        diagnostics.extend(super::bounded::check_bounded_execution(&program));
        diag::sort(&mut diagnostics);
        return Analysis {
            program,
            diagnostics,
        };
    }
    diag::sort(&mut diagnostics);
    Analysis {
        program: a.program(),
        diagnostics,
    }
}

#[derive(Debug, Clone)]
pub(super) enum Binding {
    Var { place: VarPlace, ty: Type },
    Const(ConstValue),
    Type(Type),
    Proc(ProcId),
    Contract(ProcId),
    Import { module: ModRef, instance: InstanceSel },
    External { address: i64, ty: Type },
}

#[derive(Debug, Clone, Copy)]
pub(super) enum VarPlace {
    Own(u32),
    Local(u32),
    Ref(u32),
}

impl VarPlace {
    pub(super) fn place(self) -> Place {
        match self {
            VarPlace::Own(offset) => Place::ModuleVar {
                module: ModSel::Own,
                offset,
            },
            VarPlace::Local(offset) => Place::Local { offset },
            VarPlace::Ref(offset) => Place::RefParam { offset },
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct SelectCx {
    pub id: u32,
    pub target: Place,
    pub kind: IntKind,
    pub loop_depth: u32,
}

/// Per-procedure state while checking a body.
#[derive(Debug, Default)]
pub(super) struct ProcCx {
    pub kind: Option<ProcKind>,
    pub ret: Option<Type>,
    pub is_contract: bool,
    /// Innermost last. The first layer is the module layer, if any.
    pub scopes: Vec<HashMap<String, Binding>>,
    pub slots: Vec<SlotInfo>,
    pub frame_size: u32,
    pub loop_depth: u32,
    pub selects: Vec<SelectCx>,
    pub module_id: Option<u32>,
    pub instance: Option<u32>,
}

pub(super) struct Analyzer<'k> {
    pub known: &'k [ModuleSignature],
    pub diags: Vec<Diagnostic>,
    pub globals: HashMap<String, Binding>,
    pub modules: Vec<ModuleInfo>,
    pub module_names: HashMap<String, ModRef>,
    pub externals: Vec<ExternalModule>,
    pub procs: Vec<Proc>,
    pub checks: Vec<CheckSite>,
    pub next_select: u32,
    pub cx: ProcCx,
    /// Locations of constant boolean expressions awaiting a W-CONST warning.
    pub const_warnings: Vec<Loc>,
    /// Module-layer bindings per module, built before bodies are checked.
    pub module_scopes: Vec<HashMap<String, Binding>>,
    /// Names whose declaration was rejected; later uses stay silent.
    pub poisoned: HashSet<String>,
}

/// Code of a diagnostic that is dropped on report: the cause was already
/// reported at the declaration.
pub(super) const SUPPRESSED: &str = "-";

impl<'k> Analyzer<'k> {
    fn new(known: &'k [ModuleSignature]) -> Self {
        let mut globals = HashMap::new();
        for k in IntKind::ALL {
            globals.insert(k.name().to_string(), Binding::Type(Type::Int(k)));
        }
        globals.insert("boolean".into(), Binding::Type(Type::Bool));
        globals.insert("port".into(), Binding::Type(Type::Port));
        Analyzer {
            known,
            diags: Vec::new(),
            globals,
            modules: Vec::new(),
            module_names: HashMap::new(),
            externals: Vec::new(),
            procs: Vec::new(),
            checks: Vec::new(),
            next_select: 0,
            cx: ProcCx::default(),
            const_warnings: Vec::new(),
            module_scopes: Vec::new(),
            poisoned: HashSet::new(),
        }
    }

    fn program(&mut self) -> Program {
        Program {
            modules: std::mem::take(&mut self.modules),
            externals: std::mem::take(&mut self.externals),
            procs: std::mem::take(&mut self.procs),
            checks: std::mem::take(&mut self.checks),
        }
    }

    pub(super) fn error(&mut self, code: &'static str, loc: Loc, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, loc, message));
    }

    pub(super) fn warn(&mut self, code: &'static str, loc: Loc, message: impl Into<String>) {
        self.diags.push(Diagnostic::warning(code, loc, message));
    }

    pub(super) fn report(&mut self, d: Diagnostic) {
        if d.code != SUPPRESSED {
            self.diags.push(d);
        }
    }

    fn flush_const_warnings(&mut self) {
        for loc in std::mem::take(&mut self.const_warnings) {
            self.warn(codes::W_CONST, loc, "expression has a constant result");
        }
    }

    pub(super) fn site(&mut self, kind: CheckKindTag, loc: Loc) -> CheckId {
        let id = CheckId(self.checks.len() as u32 + 1);
        self.checks.push(CheckSite { id, kind, loc });
        id
    }

    // ---- names ----

    pub(super) fn lookup(&self, name: &str) -> Option<Binding> {
        self.cx
            .scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .or_else(|| self.globals.get(name))
            .cloned()
    }

    /// Binds `name` in the innermost scope (or globally outside procedures).
    pub(super) fn bind(&mut self, id: &ast::Ident, b: Binding) {
        let scope = match self.cx.scopes.last_mut() {
            Some(s) => s,
            None => &mut self.globals,
        };
        if scope.contains_key(&id.name) {
            self.diags.push(Diagnostic::error(
                codes::DUPLICATE,
                id.loc,
                format!("`{}` is already defined in this scope", id.name),
            ));
            return;
        }
        scope.insert(id.name.clone(), b);
    }

    pub(super) fn alloc_slot(&mut self, name: &str, ty: &Type, kind: SlotKind) -> u32 {
        let (size, align) = match kind {
            SlotKind::RefParam => (4, 4),
            _ => (ty.storage_size(), ty.align()),
        };
        let offset = align_up(self.cx.frame_size, align);
        self.cx.frame_size = offset + size;
        self.cx.slots.push(SlotInfo {
            name: name.to_string(),
            ty: ty.clone(),
            offset,
            kind,
        });
        offset
    }

    // ---- types and constants ----

    pub(super) fn resolve_type(&self, t: &TypeExpr) -> Result<Type, Diagnostic> {
        match t {
            TypeExpr::Named(id) => match self.lookup(&id.name) {
                Some(Binding::Type(ty)) => Ok(ty),
                Some(_) => Err(Diagnostic::error(
                    codes::TYPE,
                    id.loc,
                    format!("`{}` is not a type", id.name),
                )),
                None => Err(Diagnostic::error(
                    if self.poisoned.contains(&id.name) { SUPPRESSED } else { codes::UNDEFINED },
                    id.loc,
                    format!("undefined type `{}`", id.name),
                )),
            },
            TypeExpr::Record(fields, loc) => {
                let mut out: Vec<(String, Type)> = Vec::new();
                for f in fields {
                    let ty = self.resolve_type(&f.ty)?;
                    if ty.contains_port() {
                        return Err(nested_port(f.ty.loc()));
                    }
                    for n in &f.names {
                        if out.iter().any(|(m, _)| *m == n.name) {
                            return Err(Diagnostic::error(
                                codes::DUPLICATE,
                                n.loc,
                                format!("duplicate field `{}`", n.name),
                            ));
                        }
                        out.push((n.name.clone(), ty.clone()));
                    }
                }
                check_size(Type::Record(out), *loc)
            }
            TypeExpr::Pointer { volatile, to, loc } => {
                let to = self.resolve_type(to)?;
                if to.contains_port() {
                    return Err(nested_port(*loc));
                }
                Ok(Type::Pointer {
                    volatile: *volatile,
                    to: Box::new(to),
                })
            }
            TypeExpr::Array { len, elem, loc } => {
                let elem_ty = self.resolve_type(elem)?;
                if elem_ty.contains_port() {
                    return Err(nested_port(elem.loc()));
                }
                let n = match self.fold(len) {
                    Ok(ConstValue::Int(n, _)) => n,
                    Ok(ConstValue::Bool(_)) => {
                        return Err(Diagnostic::error(codes::ARRAY_LEN, len.loc, "array length must be an integer"))
                    }
                    Err(e) if e.code == codes::NOT_CONST => {
                        return Err(Diagnostic::error(
                            codes::ARRAY_LEN,
                            len.loc,
                            format!("array length must be a compile-time constant: {}", e.message),
                        ))
                    }
                    Err(e) => return Err(e),
                };
                if n < 1 || n > u32::MAX as i64 {
                    return Err(Diagnostic::error(
                        codes::ARRAY_LEN,
                        len.loc,
                        format!("array length {n} must be at least 1"),
                    ));
                }
                check_size(
                    Type::Array {
                        len: n as u32,
                        elem: Box::new(elem_ty),
                    },
                    *loc,
                )
            }
        }
    }

    pub(super) fn fold(&self, e: &ast::Expr) -> Result<ConstValue, Diagnostic> {
        consteval::fold_constant(e, &Env(self)).map_err(const_diag)
    }

    pub(super) fn fold_int(&self, e: &ast::Expr, kind: IntKind) -> Result<i64, Diagnostic> {
        consteval::fold_int(e, &Env(self), kind).map_err(const_diag)
    }

    // ---- declarations ----

    fn declare(&mut self, unit: &Unit) {
        let mut next_id = 0u32;
        for top in &unit.toplevels {
            match top {
                Toplevel::Types(defs, _) => {
                    for d in defs {
                        match self.resolve_type(&d.ty) {
                            Ok(t) => self.bind(&d.name, Binding::Type(t)),
                            Err(e) => {
                                self.poisoned.insert(d.name.name.clone());
                                self.report(e)
                            }
                        }
                    }
                }
                Toplevel::Consts(defs, _) => {
                    for d in defs {
                        match self.fold(&d.value) {
                            Ok(v) => self.bind(&d.name, Binding::Const(v)),
                            Err(e) => {
                                self.poisoned.insert(d.name.name.clone());
                                self.report(e)
                            }
                        }
                    }
                }
                Toplevel::Procedure(p) => {
                    let id = self.declare_proc(p, ProcKind::Toplevel);
                    self.bind(&p.name, Binding::Proc(id));
                }
                Toplevel::Contract(c) => {
                    let id = self.declare_contract(c);
                    self.bind(&c.name, Binding::Contract(id));
                }
                Toplevel::Module(m) => {
                    self.declare_module(m, next_id);
                    next_id += if m.multi { 2 } else { 1 };
                }
                Toplevel::Include(_) => {}
            }
        }
        for sig in self.known {
            if self.module_names.contains_key(&sig.name) {
                continue;
            }
            let idx = self.externals.len();
            self.externals.push(sig.as_external());
            self.module_names.insert(sig.name.clone(), ModRef::External(idx));
        }
    }

    fn declare_module(&mut self, m: &ast::Module, first_id: u32) {
        let index = self.modules.len();
        if self.module_names.contains_key(&m.name.name) {
            self.error(codes::DUPLICATE, m.name.loc, format!("module `{}` is already defined", m.name.name));
        } else {
            self.module_names.insert(m.name.name.clone(), ModRef::Local(index));
        }
        let mut vars: Vec<VarSlot> = Vec::new();
        let mut size = 0u32;
        for decl in &m.vars {
            let ty = match self.resolve_type(&decl.ty) {
                Ok(t) => t,
                Err(e) => {
                    self.report(e);
                    self.poisoned.extend(decl.names.iter().map(|(n, _)| n.name.clone()));
                    continue;
                }
            };
            for (name, exported) in &decl.names {
                if let Some(prev) = vars.iter().find(|v| v.name == name.name) {
                    let code = if prev.exported && *exported {
                        codes::DUP_EXPORT
                    } else {
                        codes::DUPLICATE
                    };
                    self.error(code, name.loc, format!("variable `{}` is already declared", name.name));
                    continue;
                }
                let offset = align_up(size, ty.align());
                size = offset + ty.storage_size();
                vars.push(VarSlot {
                    name: name.name.clone(),
                    ty: ty.clone(),
                    offset,
                    exported: *exported,
                });
            }
        }
        let mut states = Vec::new();
        for s in &m.body.stmts {
            if let StmtKind::State(ids) = &s.kind {
                states.extend(ids.iter().enumerate().map(|(i, id)| (id.name.clone(), i as i64)));
            }
        }
        let mut scope: HashMap<String, Binding> = vars
            .iter()
            .map(|v| {
                (
                    v.name.clone(),
                    Binding::Var {
                        place: VarPlace::Own(v.offset),
                        ty: v.ty.clone(),
                    },
                )
            })
            .collect();
        let mut procs = Vec::new();
        for p in &m.procedures {
            let id = self.declare_proc(p, ProcKind::ModuleProc(index));
            if scope.contains_key(&p.name.name) {
                self.error(codes::DUPLICATE, p.name.loc, format!("`{}` is already defined in this module", p.name.name));
            } else {
                scope.insert(p.name.name.clone(), Binding::Proc(id));
            }
            procs.push(id);
        }
        let body = self.push_proc(Proc {
            name: m.name.name.clone(),
            kind: ProcKind::ModuleBody(index),
            params: Vec::new(),
            ret: None,
            slots: Vec::new(),
            frame_size: 0,
            body: TBlock::default(),
            loc: m.loc,
        });
        self.module_scopes.push(scope);
        self.modules.push(ModuleInfo {
            name: m.name.name.clone(),
            multi: m.multi,
            first_id,
            vars,
            data_size: size,
            body,
            procs,
            imports: Vec::new(),
            states,
            loc: m.loc,
        });
    }

    fn push_proc(&mut self, p: Proc) -> ProcId {
        self.procs.push(p);
        ProcId(self.procs.len() as u32 - 1)
    }

    fn declare_params(&mut self, params: &[ast::Param], contract: bool) -> Vec<ParamInfo> {
        let mut out: Vec<ParamInfo> = Vec::new();
        let mut offset = 0u32;
        for p in params {
            if contract && p.by_ref {
                self.error(codes::CONTRACT_VAR, p.names[0].loc, "contracts may not use VAR parameters");
            }
            let ty = match self.resolve_type(&p.ty) {
                Ok(t) => t,
                Err(e) => {
                    self.report(e);
                    continue;
                }
            };
            if ty == Type::Port && !p.by_ref {
                self.error(codes::PORT_VALUE, p.ty.loc(), "ports can only be passed as VAR parameters");
            }
            for n in &p.names {
                if out.iter().any(|q| q.name == n.name) {
                    self.error(codes::DUPLICATE, n.loc, format!("duplicate parameter `{}`", n.name));
                    continue;
                }
                let (size, align) = if p.by_ref {
                    (4, 4)
                } else {
                    (ty.storage_size(), ty.align())
                };
                let at = align_up(offset, align);
                offset = at + size;
                out.push(ParamInfo {
                    name: n.name.clone(),
                    ty: ty.clone(),
                    by_ref: p.by_ref,
                    offset: at,
                });
            }
        }
        out
    }

    fn declare_proc(&mut self, p: &ast::Procedure, kind: ProcKind) -> ProcId {
        let params = self.declare_params(&p.params, false);
        let ret = p.ret.as_ref().and_then(|t| match self.resolve_type(t) {
            Ok(Type::Port) => {
                self.error(codes::PORT_VALUE, t.loc(), "a procedure cannot return a port");
                None
            }
            Ok(ty) if !ty.is_scalar() => {
                self.error(codes::TYPE, t.loc(), format!("result type {ty} must be a scalar type"));
                None
            }
            Ok(ty) => Some(ty),
            Err(e) => {
                self.report(e);
                None
            }
        });
        self.push_proc(Proc {
            name: p.name.name.clone(),
            kind,
            params,
            ret,
            slots: Vec::new(),
            frame_size: 0,
            body: TBlock::default(),
            loc: p.loc,
        })
    }

    fn declare_contract(&mut self, c: &ast::Contract) -> ProcId {
        let params = match &c.params {
            Some(ps) => self.declare_params(ps, true),
            None => Vec::new(),
        };
        self.push_proc(Proc {
            name: c.name.name.clone(),
            kind: ProcKind::Contract,
            params,
            ret: Some(Type::Bool),
            slots: Vec::new(),
            frame_size: 0,
            body: TBlock::default(),
            loc: c.loc,
        })
    }

    // ---- bodies ----

    fn check_bodies(&mut self, unit: &Unit) {
        // Procedure ids were assigned in declaration order; walk in the same order.
        let mut next = 0usize;
        let mut module_index = 0usize;
        for top in &unit.toplevels {
            match top {
                Toplevel::Procedure(p) => {
                    self.check_proc(ProcId(next as u32), &p.body, None);
                    next += 1;
                }
                Toplevel::Contract(c) => {
                    self.check_proc(ProcId(next as u32), &c.body, None);
                    next += 1;
                }
                Toplevel::Module(m) => {
                    self.resolve_imports(module_index, m);
                    for p in &m.procedures {
                        self.check_proc(ProcId(next as u32), &p.body, Some(module_index));
                        next += 1;
                    }
                    self.check_proc(ProcId(next as u32), &m.body, Some(module_index));
                    next += 1;
                    module_index += 1;
                }
                _ => {}
            }
        }
    }

    /// Imports must lead the module body; they are visible to the module's
    /// procedures as well.
    fn resolve_imports(&mut self, index: usize, m: &ast::Module) {
        let importer_multi = m.multi;
        let mut imports = Vec::new();
        for s in &m.body.stmts {
            // Misplaced imports are reported by the body check but still bound.
            let StmtKind::Import(items) = &s.kind else {
                continue;
            };
            for import in items {
                let Some(&target) = self.module_names.get(&import.module.name) else {
                    self.error(
                        codes::UNKNOWN_MODULE,
                        import.module.loc,
                        format!("unknown module `{}`", import.module.name),
                    );
                    self.poisoned.insert(import.alias.name.clone());
                        continue;
                };
                let target_multi = match target {
                    ModRef::Local(i) => self.modules[i].multi,
                    ModRef::External(i) => self.externals[i].multi,
                };
                let count = if target_multi { 2 } else { 1 };
                let instance = match &import.selector {
                    None if target_multi => {
                        self.error(
                            codes::IMPORT_SELECTOR,
                            import.module.loc,
                            format!("`{}` has two instances; select one with [k] or [*]", import.module.name),
                        );
                        self.poisoned.insert(import.alias.name.clone());
                        continue;
                    }
                    None => InstanceSel::Fixed(0),
                    Some(ast::ImportSelector::Corresponding) => {
                        if !(importer_multi && target_multi) {
                            self.error(
                                codes::IMPORT_SELECTOR,
                                import.module.loc,
                                "[*] requires both modules to have multiple instances",
                            );
                            self.poisoned.insert(import.alias.name.clone());
                        continue;
                        }
                        InstanceSel::Corresponding
                    }
                    Some(ast::ImportSelector::Fixed(e)) => match self.fold(e) {
                        Ok(ConstValue::Int(k, _)) if (0..count).contains(&k) => InstanceSel::Fixed(k as u32),
                        Ok(_) => {
                            self.error(
                                codes::IMPORT_SELECTOR,
                                e.loc,
                                format!("`{}` has no instance {}", import.module.name, crate::syntax::print_expr(e)),
                            );
                            self.poisoned.insert(import.alias.name.clone());
                        continue;
                        }
                        Err(d) => {
                            self.report(d);
                            self.poisoned.insert(import.alias.name.clone());
                        continue;
                        }
                    },
                };
                let scope = &mut self.module_scopes[index];
                if scope.contains_key(&import.alias.name) {
                    self.diags.push(Diagnostic::error(
                        codes::DUPLICATE,
                        import.alias.loc,
                        format!("`{}` is already defined in this module", import.alias.name),
                    ));
                    continue;
                }
                scope.insert(
                    import.alias.name.clone(),
                    Binding::Import {
                        module: target,
                        instance,
                    },
                );
                imports.push(ImportInfo {
                    alias: import.alias.name.clone(),
                    module: target,
                    instance,
                    loc: import.alias.loc,
                });
            }
        }
        self.modules[index].imports = imports;
    }

    fn check_proc(&mut self, id: ProcId, body: &ast::Block, module: Option<usize>) {
        let proc = &self.procs[id.0 as usize];
        let kind = proc.kind;
        let mut cx = ProcCx {
            kind: Some(kind),
            ret: proc.ret.clone(),
            is_contract: kind == ProcKind::Contract,
            ..ProcCx::default()
        };
        if let Some(mi) = module {
            let m = &self.modules[mi];
            if !m.multi {
                cx.module_id = Some(m.first_id);
                cx.instance = Some(0);
            }
            cx.scopes.push(self.module_scopes[mi].clone());
        }
        let mut params = HashMap::new();
        for p in &proc.params {
            let place = if p.by_ref {
                VarPlace::Ref(p.offset)
            } else {
                VarPlace::Local(p.offset)
            };
            params.insert(
                p.name.clone(),
                Binding::Var {
                    place,
                    ty: p.ty.clone(),
                },
            );
            cx.slots.push(SlotInfo {
                name: p.name.clone(),
                ty: p.ty.clone(),
                offset: p.offset,
                kind: if p.by_ref { SlotKind::RefParam } else { SlotKind::Param },
            });
        }
        cx.frame_size = proc
            .params
            .iter()
            .map(|p| p.offset + if p.by_ref { 4 } else { p.ty.storage_size() })
            .max()
            .unwrap_or(0);
        cx.scopes.push(params);
        self.cx = cx;
        let tbody = self.block(body, BlockRole::Body);
        let cx = std::mem::take(&mut self.cx);
        let proc = &mut self.procs[id.0 as usize];
        proc.body = tbody;
        proc.slots = cx.slots;
        proc.frame_size = align_up(cx.frame_size, 8);
    }
}

/// Where a block sits; module bodies admit leading IMPORTs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum BlockRole {
    Body,
    Nested,
}

pub(super) fn align_up(v: u32, align: u32) -> u32 {
    v.div_ceil(align.max(1)) * align.max(1)
}

fn nested_port(loc: Loc) -> Diagnostic {
    Diagnostic::error(
        codes::PORT_NESTED,
        loc,
        "ports may only be module variables or VAR parameters",
    )
}

fn check_size(t: Type, loc: Loc) -> Result<Type, Diagnostic> {
    let total: u64 = match &t {
        Type::Array { len, elem } => *len as u64 * elem.storage_size() as u64,
        Type::Record(fields) => fields.iter().map(|(_, f)| f.storage_size() as u64).sum(),
        _ => 0,
    };
    if total > u32::MAX as u64 / 2 {
        return Err(Diagnostic::error(codes::RANGE, loc, "type is too large"));
    }
    Ok(t)
}

pub(super) fn const_diag(e: ConstError) -> Diagnostic {
    Diagnostic::error(e.code, e.loc, e.message)
}

struct Env<'a, 'k>(&'a Analyzer<'k>);

impl ConstEnv for Env<'_, '_> {
    fn constant(&self, name: &str) -> Option<ConstValue> {
        match self.0.lookup(name) {
            Some(Binding::Const(v)) => Some(v),
            _ => None,
        }
    }

    fn size_of(&self, ty: &TypeExpr) -> Result<u32, ConstError> {
        let t = self
            .0
            .resolve_type(ty)
            .map_err(|d| ConstError::new(d.code, d.loc, d.message))?;
        t.size()
            .ok_or_else(|| ConstError::new(codes::PORT_SIZE, ty.loc(), "SIZE is not defined for ports"))
    }

    fn module_id(&self) -> Option<u32> {
        self.0.cx.module_id
    }

    fn instance(&self) -> Option<u32> {
        self.0.cx.instance
    }
}
