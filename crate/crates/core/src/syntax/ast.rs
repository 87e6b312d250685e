//! Syntax tree for hO compilation units.

use crate::source::Loc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub loc: Loc,
}

impl Ident {
    pub fn new(name: impl Into<String>, loc: Loc) -> Self {
        Ident {
            name: name.into(),
            loc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Unit {
    pub toplevels: Vec<Toplevel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Toplevel {
    Types(Vec<TypeDef>, Loc),
    Consts(Vec<ConstDef>, Loc),
    Module(Module),
    Procedure(Procedure),
    Contract(Contract),
    Include(Include),
}

impl Toplevel {
    pub fn loc(&self) -> Loc {
        match self {
            Toplevel::Types(_, loc) | Toplevel::Consts(_, loc) => *loc,
            Toplevel::Module(m) => m.loc,
            Toplevel::Procedure(p) => p.loc,
            Toplevel::Contract(c) => c.loc,
            Toplevel::Include(i) => i.loc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: Ident,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstDef {
    pub name: Ident,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Include {
    pub path: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub name: Ident,
    /// `MODULE name*;` declares a module with two instances.
    pub multi: bool,
    pub vars: Vec<VarDecl>,
    pub procedures: Vec<Procedure>,
    pub body: Block,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    /// Names with their export mark.
    pub names: Vec<(Ident, bool)>,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub by_ref: bool,
    pub names: Vec<Ident>,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Procedure {
    pub name: Ident,
    pub params: Vec<Param>,
    pub ret: Option<TypeExpr>,
    pub body: Block,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub name: Ident,
    /// `None` when written without a parameter list.
    pub params: Option<Vec<Param>>,
    pub body: Block,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeExpr {
    Named(Ident),
    Record(Vec<Field>, Loc),
    Pointer {
        volatile: bool,
        to: Box<TypeExpr>,
        loc: Loc,
    },
    Array {
        len: Expr,
        elem: Box<TypeExpr>,
        loc: Loc,
    },
}

impl TypeExpr {
    pub fn loc(&self) -> Loc {
        match self {
            TypeExpr::Named(id) => id.loc,
            TypeExpr::Record(_, loc) => *loc,
            TypeExpr::Pointer { loc, .. } | TypeExpr::Array { loc, .. } => *loc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub names: Vec<Ident>,
    pub ty: TypeExpr,
}

/// A statement sequence: leading checks followed by statements.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Block {
    pub checks: Vec<Check>,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Require,
    Provide,
    Invariant,
}

impl CheckKind {
    pub fn at_entry(self) -> bool {
        matches!(self, CheckKind::Require | CheckKind::Invariant)
    }

    pub fn at_exit(self) -> bool {
        matches!(self, CheckKind::Provide | CheckKind::Invariant)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            CheckKind::Require => "REQUIRE",
            CheckKind::Provide => "PROVIDE",
            CheckKind::Invariant => "INVARIANT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub kind: CheckKind,
    pub asserts: Vec<Assert>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Assert {
    Call(Call),
    Name(Ident),
}

impl Assert {
    pub fn loc(&self) -> Loc {
        match self {
            Assert::Call(c) => c.loc,
            Assert::Name(id) => id.loc,
        }
    }

    pub fn name(&self) -> &Ident {
        match self {
            Assert::Call(c) => &c.name,
            Assert::Name(id) => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    If {
        arms: Vec<(Expr, Block)>,
        otherwise: Option<Block>,
    },
    Loop {
        guard: Option<Expr>,
        count: Expr,
        body: Block,
    },
    Return(Option<Expr>),
    Call(Call),
    Local(Vec<LocalDecl>),
    External(Vec<ExternalDecl>),
    State(Vec<Ident>),
    Import(Vec<ImportSpec>),
    Select {
        target: Designator,
        clauses: Vec<Clause>,
    },
    Log {
        text: String,
        value: Option<Expr>,
    },
    Next(Expr),
    Case {
        scrutinee: Expr,
        clauses: Vec<Clause>,
        otherwise: Option<Block>,
    },
    Assign {
        target: Designator,
        value: Expr,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecl {
    pub name: Ident,
    pub init: Expr,
    pub ty: Option<TypeExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalDecl {
    pub name: Ident,
    pub address: Expr,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImportSelector {
    /// `[*]`: the instance matching the importer's own instance.
    Corresponding,
    Fixed(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportSpec {
    /// `IMPORT alias := module[sel]`; for a plain `IMPORT m` alias and module coincide.
    pub alias: Ident,
    pub module: Ident,
    pub selector: Option<ImportSelector>,
    /// True when written with `:=`.
    pub renamed: bool,
}

/// A labelled clause of CASE or SELECT.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub labels: Vec<Label>,
    pub body: Block,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub lo: Expr,
    pub hi: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Call {
    pub name: Ident,
    pub args: Vec<Expr>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DesignatorRoot {
    Name(Ident),
    Call(Call),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    Field(Ident),
    Index(Expr),
    Deref(Loc),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Designator {
    pub root: DesignatorRoot,
    pub selectors: Vec<Selector>,
    pub loc: Loc,
}

impl Designator {
    /// The designator is a bare call `f(args)` with no selectors.
    pub fn as_call(&self) -> Option<&Call> {
        match (&self.root, self.selectors.is_empty()) {
            (DesignatorRoot::Call(c), true) => Some(c),
            _ => None,
        }
    }

    pub fn as_name(&self) -> Option<&Ident> {
        match (&self.root, self.selectors.is_empty()) {
            (DesignatorRoot::Name(id), true) => Some(id),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Plus,
    Neg,
    BitNot,
    Not,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Plus => "+",
            UnaryOp::Neg => "-",
            UnaryOp::BitNot => "~",
            UnaryOp::Not => "NOT",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    // multiplicative
    Mul,
    Div,
    IntDiv,
    Mod,
    And,
    BitAnd,
    // shift
    Shl,
    Shr,
    // additive
    Add,
    Sub,
    Or,
    BitOr,
    BitXor,
    // comparison
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

/// Binding strength of the binary operator levels, higher binds tighter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Precedence {
    Comparison,
    Additive,
    Shift,
    Multiplicative,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::IntDiv => "DIV",
            BinaryOp::Mod => "MOD",
            BinaryOp::And => "AND",
            BinaryOp::BitAnd => "/\\",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Or => "OR",
            BinaryOp::BitOr => "\\/",
            BinaryOp::BitXor => "><",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "#",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }

    pub fn precedence(self) -> Precedence {
        use BinaryOp::*;
        match self {
            Mul | Div | IntDiv | Mod | And | BitAnd => Precedence::Multiplicative,
            Shl | Shr => Precedence::Shift,
            Add | Sub | Or | BitOr | BitXor => Precedence::Additive,
            Eq | Ne | Lt | Le | Gt | Ge => Precedence::Comparison,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == Precedence::Comparison
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Number(u64),
    Bool(bool),
    Designator(Designator),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    SizeOf(Box<TypeExpr>),
}

impl Expr {
    pub fn new(kind: ExprKind, loc: Loc) -> Self {
        Expr { kind, loc }
    }
}

/// Resets every location in a tree, for structural comparison.
pub trait ClearLocs {
    fn clear_locs(&mut self);
}

impl<T: ClearLocs> ClearLocs for Vec<T> {
    fn clear_locs(&mut self) {
        self.iter_mut().for_each(ClearLocs::clear_locs);
    }
}

impl<T: ClearLocs> ClearLocs for Option<T> {
    fn clear_locs(&mut self) {
        if let Some(x) = self {
            x.clear_locs();
        }
    }
}

impl<T: ClearLocs> ClearLocs for Box<T> {
    fn clear_locs(&mut self) {
        (**self).clear_locs();
    }
}

impl ClearLocs for Loc {
    fn clear_locs(&mut self) {
        *self = Loc::default();
    }
}

impl ClearLocs for Ident {
    fn clear_locs(&mut self) {
        self.loc.clear_locs();
    }
}

impl ClearLocs for Unit {
    fn clear_locs(&mut self) {
        self.toplevels.clear_locs();
    }
}

impl ClearLocs for Toplevel {
    fn clear_locs(&mut self) {
        match self {
            Toplevel::Types(defs, loc) => {
                loc.clear_locs();
                for d in defs {
                    d.name.clear_locs();
                    d.ty.clear_locs();
                }
            }
            Toplevel::Consts(defs, loc) => {
                loc.clear_locs();
                for d in defs {
                    d.name.clear_locs();
                    d.value.clear_locs();
                }
            }
            Toplevel::Module(m) => {
                m.name.clear_locs();
                m.loc.clear_locs();
                for v in &mut m.vars {
                    for (id, _) in &mut v.names {
                        id.clear_locs();
                    }
                    v.ty.clear_locs();
                }
                m.procedures.clear_locs();
                m.body.clear_locs();
            }
            Toplevel::Procedure(p) => p.clear_locs(),
            Toplevel::Contract(c) => {
                c.name.clear_locs();
                c.loc.clear_locs();
                c.params.clear_locs();
                c.body.clear_locs();
            }
            Toplevel::Include(i) => i.loc.clear_locs(),
        }
    }
}

impl ClearLocs for Procedure {
    fn clear_locs(&mut self) {
        self.name.clear_locs();
        self.loc.clear_locs();
        self.params.clear_locs();
        self.ret.clear_locs();
        self.body.clear_locs();
    }
}

impl ClearLocs for Param {
    fn clear_locs(&mut self) {
        self.names.clear_locs();
        self.ty.clear_locs();
    }
}

impl ClearLocs for TypeExpr {
    fn clear_locs(&mut self) {
        match self {
            TypeExpr::Named(id) => id.clear_locs(),
            TypeExpr::Record(fields, loc) => {
                loc.clear_locs();
                for f in fields {
                    f.names.clear_locs();
                    f.ty.clear_locs();
                }
            }
            TypeExpr::Pointer { to, loc, .. } => {
                to.clear_locs();
                loc.clear_locs();
            }
            TypeExpr::Array { len, elem, loc } => {
                len.clear_locs();
                elem.clear_locs();
                loc.clear_locs();
            }
        }
    }
}

impl ClearLocs for Block {
    fn clear_locs(&mut self) {
        for c in &mut self.checks {
            c.loc.clear_locs();
            for a in &mut c.asserts {
                match a {
                    Assert::Call(call) => call.clear_locs(),
                    Assert::Name(id) => id.clear_locs(),
                }
            }
        }
        self.stmts.clear_locs();
    }
}

impl ClearLocs for Stmt {
    fn clear_locs(&mut self) {
        self.loc.clear_locs();
        match &mut self.kind {
            StmtKind::If { arms, otherwise } => {
                for (c, b) in arms {
                    c.clear_locs();
                    b.clear_locs();
                }
                otherwise.clear_locs();
            }
            StmtKind::Loop { guard, count, body } => {
                guard.clear_locs();
                count.clear_locs();
                body.clear_locs();
            }
            StmtKind::Return(e) => e.clear_locs(),
            StmtKind::Call(c) => c.clear_locs(),
            StmtKind::Local(decls) => {
                for d in decls {
                    d.name.clear_locs();
                    d.init.clear_locs();
                    d.ty.clear_locs();
                }
            }
            StmtKind::External(decls) => {
                for d in decls {
                    d.name.clear_locs();
                    d.address.clear_locs();
                    d.ty.clear_locs();
                }
            }
            StmtKind::State(ids) => ids.clear_locs(),
            StmtKind::Import(imports) => {
                for s in imports {
                    s.alias.clear_locs();
                    s.module.clear_locs();
                    if let Some(ImportSelector::Fixed(e)) = &mut s.selector {
                        e.clear_locs();
                    }
                }
            }
            StmtKind::Select { target, clauses } => {
                target.clear_locs();
                clauses.clear_locs();
            }
            StmtKind::Log { value, .. } => value.clear_locs(),
            StmtKind::Next(e) => e.clear_locs(),
            StmtKind::Case {
                scrutinee,
                clauses,
                otherwise,
            } => {
                scrutinee.clear_locs();
                clauses.clear_locs();
                otherwise.clear_locs();
            }
            StmtKind::Assign { target, value } => {
                target.clear_locs();
                value.clear_locs();
            }
        }
    }
}

impl ClearLocs for Clause {
    fn clear_locs(&mut self) {
        self.loc.clear_locs();
        for l in &mut self.labels {
            l.lo.clear_locs();
            l.hi.clear_locs();
        }
        self.body.clear_locs();
    }
}

impl ClearLocs for Call {
    fn clear_locs(&mut self) {
        self.name.clear_locs();
        self.args.clear_locs();
        self.loc.clear_locs();
    }
}

impl ClearLocs for Designator {
    fn clear_locs(&mut self) {
        self.loc.clear_locs();
        match &mut self.root {
            DesignatorRoot::Name(id) => id.clear_locs(),
            DesignatorRoot::Call(c) => c.clear_locs(),
        }
        for s in &mut self.selectors {
            match s {
                Selector::Field(id) => id.clear_locs(),
                Selector::Index(e) => e.clear_locs(),
                Selector::Deref(loc) => loc.clear_locs(),
            }
        }
    }
}

impl ClearLocs for Expr {
    fn clear_locs(&mut self) {
        self.loc.clear_locs();
        match &mut self.kind {
            ExprKind::Number(_) | ExprKind::Bool(_) => {}
            ExprKind::Designator(d) => d.clear_locs(),
            ExprKind::Unary(_, e) => e.clear_locs(),
            ExprKind::Binary(_, a, b) => {
                a.clear_locs();
                b.clear_locs();
            }
            ExprKind::SizeOf(t) => t.clear_locs(),
        }
    }
}

/// Structural equality that ignores source locations.
pub fn same_structure<T: ClearLocs + Clone + PartialEq>(a: &T, b: &T) -> bool {
    let mut a = a.clone();
    let mut b = b.clone();
    a.clear_locs();
    b.clear_locs();
    a == b
}
