//! Typed program: the output of analysis, consumed by the interpreter and
//! the C backend. All storage is addressed as base + offset.

use std::fmt;

use super::types::{IntKind, Type};
use crate::source::Loc;
use crate::syntax::ast::{BinaryOp, CheckKind, UnaryOp};

/// Dense id of a procedure, contract or module body in [`Program::procs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcId(pub u32);

/// Id of a dynamic check site. Ids start at 1 and are unique per program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CheckId(pub u32);

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckKindTag {
    EmptyPort,
    DivZero,
    ShiftRange,
    ArrayBounds,
    Contract,
    Narrowing,
    /// NEW, CLONE and EXTEND: the fault kind depends on what went wrong.
    PortOp,
}

impl CheckKindTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKindTag::EmptyPort => "empty-port",
            CheckKindTag::DivZero => "div-zero",
            CheckKindTag::ShiftRange => "shift-range",
            CheckKindTag::ArrayBounds => "array-bounds",
            CheckKindTag::Contract => "contract",
            CheckKindTag::Narrowing => "narrowing",
            CheckKindTag::PortOp => "port-op",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use CheckKindTag::*;
        [EmptyPort, DivZero, ShiftRange, ArrayBounds, Contract, Narrowing, PortOp]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckSite {
    pub id: CheckId,
    pub kind: CheckKindTag,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub modules: Vec<ModuleInfo>,
    /// Modules known only from interface files.
    pub externals: Vec<ExternalModule>,
    pub procs: Vec<Proc>,
    pub checks: Vec<CheckSite>,
}

impl Program {
    pub fn proc(&self, id: ProcId) -> &Proc {
        &self.procs[id.0 as usize]
    }

    pub fn check(&self, id: CheckId) -> &CheckSite {
        &self.checks[id.0 as usize - 1]
    }

    /// Module instances in schedule order.
    pub fn instances(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.modules
            .iter()
            .enumerate()
            .flat_map(|(i, m)| (0..m.instance_count()).map(move |k| (i, k)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleInfo {
    pub name: String,
    pub multi: bool,
    /// Module id of instance 0; instance 1 has `first_id + 1`.
    pub first_id: u32,
    pub vars: Vec<VarSlot>,
    pub data_size: u32,
    pub body: ProcId,
    pub procs: Vec<ProcId>,
    pub imports: Vec<ImportInfo>,
    /// STATE constants declared directly in the module body.
    pub states: Vec<(String, i64)>,
    pub loc: Loc,
}

impl ModuleInfo {
    pub fn instance_count(&self) -> u32 {
        if self.multi {
            2
        } else {
            1
        }
    }

    /// Display name of one instance: `spw0`, `spw1`, or the plain name.
    pub fn instance_name(&self, instance: u32) -> String {
        instance_name(&self.name, self.multi, instance)
    }

    pub fn var(&self, name: &str) -> Option<&VarSlot> {
        self.vars.iter().find(|v| v.name == name)
    }
}

pub fn instance_name(name: &str, multi: bool, instance: u32) -> String {
    if multi {
        format!("{name}{instance}")
    } else {
        name.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalModule {
    pub name: String,
    pub multi: bool,
    pub vars: Vec<VarSlot>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSlot {
    pub name: String,
    pub ty: Type,
    pub offset: u32,
    pub exported: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModRef {
    Local(usize),
    External(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceSel {
    Fixed(u32),
    /// Same instance number as the running module.
    Corresponding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportInfo {
    pub alias: String,
    pub module: ModRef,
    pub instance: InstanceSel,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcKind {
    Toplevel,
    ModuleProc(usize),
    Contract,
    ModuleBody(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proc {
    pub name: String,
    pub kind: ProcKind,
    pub params: Vec<ParamInfo>,
    pub ret: Option<Type>,
    /// Frame slots: parameters first, then locals and hidden slots.
    pub slots: Vec<SlotInfo>,
    pub frame_size: u32,
    pub body: TBlock,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamInfo {
    pub name: String,
    pub ty: Type,
    pub by_ref: bool,
    /// Frame offset; for VAR parameters the slot holds the referenced address.
    pub offset: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotInfo {
    pub name: String,
    pub ty: Type,
    pub offset: u32,
    pub kind: SlotKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    Param,
    RefParam,
    Local,
    /// Loop counters and SELECT snapshots.
    Hidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TBlock {
    /// REQUIRE and INVARIANT asserts, in source order.
    pub entry: Vec<TAssert>,
    /// PROVIDE and INVARIANT asserts, in source order.
    pub exit: Vec<TAssert>,
    pub stmts: Vec<TStmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TAssert {
    pub kind: CheckKind,
    pub contract: ProcId,
    pub args: Vec<TArg>,
    pub check: CheckId,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TStmt {
    pub kind: TStmtKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoopCount {
    Const(u32),
    /// Not a compile-time constant in range; reported by the bounded-execution pass.
    Invalid(Loc),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TStmtKind {
    /// Scalar store, or a block copy when `value` is a load of an aggregate.
    /// `ty` is the type of the target location.
    Assign { place: Place, ty: Type, value: TExpr },
    Call(TCall),
    If {
        arms: Vec<(TExpr, TBlock)>,
        otherwise: Option<TBlock>,
    },
    Loop {
        guard: Option<TExpr>,
        count: LoopCount,
        /// Frame offset of the hidden iteration counter.
        counter: u32,
        body: TBlock,
    },
    Case {
        scrutinee: TExpr,
        clauses: Vec<TClause>,
        otherwise: Option<TBlock>,
    },
    Select {
        id: u32,
        target: Place,
        target_kind: IntKind,
        /// Frame offset of the discriminant snapshot.
        snapshot: u32,
        clauses: Vec<TClause>,
    },
    Next {
        select: u32,
        target: Place,
        target_kind: IntKind,
        value: i64,
        /// The NEXT sits inside a loop within its SELECT clause.
        in_loop: bool,
    },
    Return(Option<TExpr>),
    Log { text: String, value: Option<TExpr> },
    New { port: Place, size: TExpr, site: CheckId },
    Dispose { port: Place },
    Clone { src: Place, dst: Place, site: CheckId },
    Extend { port: Place, delta: TExpr, site: CheckId },
    Send { src: Place, dst: Place },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TClause {
    /// Inclusive label ranges.
    pub labels: Vec<(i64, i64)>,
    pub body: TBlock,
}

impl TClause {
    pub fn matches(&self, v: i64) -> bool {
        self.labels.iter().any(|&(lo, hi)| lo <= v && v <= hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TCall {
    pub proc: ProcId,
    pub args: Vec<TArg>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TArg {
    /// Scalar value, or a load of an aggregate to copy into the callee frame.
    Value(TExpr),
    Ref(Place),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModSel {
    Own,
    Other { module: ModRef, instance: InstanceSel },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    ModuleVar { module: ModSel, offset: u32 },
    Local { offset: u32 },
    /// The frame slot holds the address of the referenced storage.
    RefParam { offset: u32 },
    Field { base: Box<Place>, offset: u32 },
    Index {
        base: Box<Place>,
        index: Box<TExpr>,
        len: u32,
        elem_size: u32,
        check: Option<CheckId>,
    },
    Deref { pointer: Box<TExpr> },
    /// Payload of the message held by a port.
    Data { port: Box<Place>, check: Option<CheckId> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Type,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TExprKind {
    Int(i64),
    Bool(bool),
    ModuleId,
    Instance,
    Load(Place),
    AddrOf(Place),
    Unary(UnaryOp, Box<TExpr>),
    Binary {
        op: BinaryOp,
        lhs: Box<TExpr>,
        rhs: Box<TExpr>,
        check: Option<CheckId>,
    },
    /// Range check before storing into a narrower integer type.
    Narrow {
        value: Box<TExpr>,
        to: IntKind,
        check: CheckId,
    },
    Call(TCall),
    Send { src: Place, dst: Place },
    Count { port: Place, check: CheckId },
    Pending(Place),
    Min(Box<TExpr>, Box<TExpr>),
    Max(Box<TExpr>, Box<TExpr>),
}

impl TExpr {
    pub fn int(v: i64, kind: IntKind, loc: Loc) -> Self {
        TExpr {
            kind: TExprKind::Int(v),
            ty: Type::Int(kind),
            loc,
        }
    }

    pub fn const_int(&self) -> Option<i64> {
        match self.kind {
            TExprKind::Int(v) => Some(v),
            _ => None,
        }
    }

    pub fn const_bool(&self) -> Option<bool> {
        match self.kind {
            TExprKind::Bool(b) => Some(b),
            _ => None,
        }
    }
}
