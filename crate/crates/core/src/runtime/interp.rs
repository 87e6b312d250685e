//! Tree-walking interpreter over the typed program, driven by a cyclic
//! executive: every module instance body runs to completion, in module-id
//! order, once per cycle.

use thiserror::Error;

use super::config::{Config, ConfigError};
use super::memory::{Memory, Mmio, MmioTrap, MmioWrite, DATA_BASE, DUMMY_BASE};
use super::pool::{BlockId, BlockPool};
use crate::sema::ops::{self, ArithFault, UNCHECKED_RESULT};
use crate::sema::tast::*;
use crate::sema::types::{IntKind, Type, BLOCK_SIZE};
use crate::source::{Loc, SourceMap};
use crate::syntax::ast::BinaryOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultKind {
    EmptyPort,
    DivZero,
    ShiftRange,
    ArrayBounds,
    ContractFail,
    PoolExhausted,
    NewOnFullPort,
    ExtendRange,
    Narrowing,
    MmioTrap,
}

impl FaultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FaultKind::EmptyPort => "empty-port",
            FaultKind::DivZero => "div-zero",
            FaultKind::ShiftRange => "shift-range",
            FaultKind::ArrayBounds => "array-bounds",
            FaultKind::ContractFail => "contract-fail",
            FaultKind::PoolExhausted => "pool-exhausted",
            FaultKind::NewOnFullPort => "new-on-full-port",
            FaultKind::ExtendRange => "extend-range",
            FaultKind::Narrowing => "narrowing",
            FaultKind::MmioTrap => "mmio-trap",
        }
    }

    /// Only pool exhaustion stops the run.
    pub fn is_fatal(self) -> bool {
        self == FaultKind::PoolExhausted
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub kind: FaultKind,
    /// Check-site id; 0 for external memory traps.
    pub check: u32,
    pub module: String,
    pub instance: u32,
    pub file: String,
    pub loc: Loc,
    pub cycle: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Log {
        module: String,
        instance: u32,
        text: String,
        value: Option<i64>,
    },
    Fault(Fault),
}

impl Event {
    /// One transcript line, without the newline.
    pub fn line(&self) -> String {
        match self {
            Event::Log {
                module,
                instance,
                text,
                value,
            } => match value {
                Some(v) => format!("LOG {module} {instance} \"{text}\" {v}"),
                None => format!("LOG {module} {instance} \"{text}\""),
            },
            Event::Fault(f) => format!(
                "FAULT {} {} {} {} {}:{}",
                f.kind.as_str(),
                f.check,
                f.module,
                f.instance,
                f.file,
                f.loc.line
            ),
        }
    }
}

pub fn render_transcript(events: &[Event]) -> String {
    events.iter().map(|e| e.line() + "\n").collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("module `{0}` is only known from an interface file and cannot be run")]
    External(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("ownership audit failed in cycle {cycle}: {message}")]
    Audit { cycle: u64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub cycles: u64,
    /// A fatal fault stopped the run.
    pub halted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ctx {
    frame: u32,
    module: usize,
    instance: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Normal,
    Return(Option<i64>),
    Next(u32),
}

#[derive(Debug)]
enum Stop {
    Fault(Fault),
    Audit(String),
}

type R<T> = Result<T, Stop>;

enum ArgVal {
    Scalar(i64),
    Bytes(Vec<u8>),
    Addr(u32),
}

/// A loaded program ready to run.
pub struct Image<'p> {
    program: &'p Program,
    files: Vec<String>,
    config: Config,
    mem: Memory,
    /// `[module][instance]` data block addresses.
    bases: Vec<Vec<u32>>,
    schedule: Vec<(usize, u32)>,
    port_slots: Vec<u32>,
    transcript: Vec<Event>,
    cycle: u64,
    steps: u64,
    max_steps: Vec<u64>,
    loc: Loc,
    halted: bool,
}

impl<'p> Image<'p> {
    pub fn load(program: &'p Program, sources: &SourceMap, config: Config) -> Result<Self, LoadError> {
        config.validate()?;
        if let Some(e) = program.externals.first() {
            return Err(LoadError::External(e.name.clone()));
        }
        let mut bases = Vec::new();
        let mut next = DATA_BASE;
        let mut port_slots = Vec::new();
        for m in &program.modules {
            let mut per = Vec::new();
            for _ in 0..m.instance_count() {
                per.push(next);
                for v in m.vars.iter().filter(|v| v.ty == Type::Port) {
                    port_slots.push(next + v.offset);
                }
                next += m.data_size.next_multiple_of(8);
            }
            bases.push(per);
        }
        let schedule: Vec<_> = program.instances().collect();
        let mem = Memory::new(
            next - DATA_BASE,
            BlockPool::new(config.pool),
            Mmio::new(&config.mmio, config.strict_mmio),
        );
        Ok(Image {
            program,
            files: sources.iter().map(|(id, _)| sources.name(id).to_string()).collect(),
            max_steps: vec![0; schedule.len()],
            config,
            mem,
            bases,
            schedule,
            port_slots,
            transcript: Vec::new(),
            cycle: 0,
            steps: 0,
            loc: Loc::default(),
            halted: false,
        })
    }

    pub fn schedule(&self) -> Vec<String> {
        self.schedule
            .iter()
            .map(|&(m, k)| self.program.modules[m].instance_name(k))
            .collect()
    }

    pub fn transcript(&self) -> &[Event] {
        &self.transcript
    }

    pub fn render_transcript(&self) -> String {
        render_transcript(&self.transcript)
    }

    pub fn faults(&self) -> impl Iterator<Item = &Fault> {
        self.transcript.iter().filter_map(|e| match e {
            Event::Fault(f) => Some(f),
            Event::Log { .. } => None,
        })
    }

    pub fn pool(&self) -> &BlockPool {
        &self.mem.pool
    }

    pub fn mmio_writes(&self) -> &[MmioWrite] {
        &self.mem.mmio.writes
    }

    pub fn cycles_run(&self) -> u64 {
        self.cycle
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    /// Largest step count of any single body execution, per schedule entry.
    pub fn max_steps(&self) -> Vec<(String, u64)> {
        self.schedule().into_iter().zip(self.max_steps.iter().copied()).collect()
    }

    fn var_addr(&self, module: &str, instance: u32, var: &str) -> Option<(u32, &Type)> {
        let (i, m) = self.program.modules.iter().enumerate().find(|(_, m)| m.name == module)?;
        let slot = m.var(var)?;
        Some((self.bases[i].get(instance as usize)? + slot.offset, &slot.ty))
    }

    /// Current value of a scalar module variable.
    pub fn read_var(&mut self, module: &str, instance: u32, var: &str) -> Option<i64> {
        let (addr, ty) = self.var_addr(module, instance, var)?;
        let ty = ty.clone();
        self.load_scalar(addr, &ty).ok()
    }

    /// Block held by a port variable.
    pub fn port(&mut self, module: &str, instance: u32, var: &str) -> Option<BlockId> {
        let (addr, _) = self.var_addr(module, instance, var)?;
        BlockId::from_handle(self.mem.read_uint(addr, 4).ok()? as u32)
    }

    /// Runs `n` cycles, or fewer when a fatal fault halts the image.
    pub fn run_cycles(&mut self, n: u64) -> Result<RunOutcome, RuntimeError> {
        let mut done = 0;
        while done < n && !self.halted {
            self.mem.mmio.cycle = self.cycle;
            for (slot, &(m, k)) in self.schedule.clone().iter().enumerate() {
                self.steps = 0;
                self.mem.stack.clear();
                let ctx = Ctx {
                    frame: 0,
                    module: m,
                    instance: k,
                };
                let body = self.program.modules[m].body;
                let r = self.call(body, &[], ctx);
                self.max_steps[slot] = self.max_steps[slot].max(self.steps);
                match r {
                    Ok(_) => {}
                    Err(Stop::Fault(f)) => {
                        let fatal = f.kind.is_fatal();
                        self.transcript.push(Event::Fault(f));
                        if fatal {
                            self.halted = true;
                            break;
                        }
                    }
                    Err(Stop::Audit(message)) => {
                        return Err(RuntimeError::Audit {
                            cycle: self.cycle,
                            message,
                        })
                    }
                }
            }
            self.cycle += 1;
            done += 1;
        }
        Ok(RunOutcome {
            cycles: done,
            halted: self.halted,
        })
    }

    /// Pool bookkeeping plus port ownership: every allocated block is held by
    /// exactly one port and every full port holds an allocated block.
    pub fn audit(&mut self) -> Result<(), String> {
        self.mem.pool.audit()?;
        let mut owners = vec![0u32; self.mem.pool.capacity() as usize];
        for &slot in &self.port_slots.clone() {
            let h = self.mem.read_uint(slot, 4).map_err(|t| format!("port slot unreadable: {t:?}"))? as u32;
            if let Some(id) = BlockId::from_handle(h) {
                let Some(n) = owners.get_mut(id.0 as usize) else {
                    return Err(format!("port at {slot:#x} holds bad handle {h}"));
                };
                if !self.mem.pool.is_allocated(id) {
                    return Err(format!("port at {slot:#x} holds free block {}", id.0));
                }
                *n += 1;
            }
        }
        for (i, &n) in owners.iter().enumerate() {
            let allocated = self.mem.pool.is_allocated(BlockId(i as u32));
            if n > 1 {
                return Err(format!("block {i} is held by {n} ports"));
            }
            if allocated && n == 0 {
                return Err(format!("block {i} is allocated but held by no port"));
            }
        }
        Ok(())
    }

    // ---- faults and steps ----

    fn step(&mut self) -> R<()> {
        self.steps += 1;
        if self.config.audit {
            self.audit().map_err(Stop::Audit)?;
        }
        Ok(())
    }

    fn fault_at(&self, ctx: Ctx, kind: FaultKind, check: u32, loc: Loc) -> Stop {
        let m = &self.program.modules[ctx.module];
        Stop::Fault(Fault {
            kind,
            check,
            module: m.name.clone(),
            instance: ctx.instance,
            file: self.files.get(loc.file as usize).cloned().unwrap_or_default(),
            loc,
            cycle: self.cycle,
        })
    }

    fn fault(&self, ctx: Ctx, kind: FaultKind, check: CheckId) -> Stop {
        let loc = self.program.check(check).loc;
        self.fault_at(ctx, kind, check.0, loc)
    }

    fn checks(&self) -> bool {
        !self.config.ndebug
    }

    fn trap(&self, ctx: Ctx) -> impl Fn(MmioTrap) -> Stop + '_ {
        move |_| self.fault_at(ctx, FaultKind::MmioTrap, 0, self.loc)
    }

    // ---- memory ----

    fn load_scalar(&mut self, addr: u32, ty: &Type) -> Result<i64, MmioTrap> {
        Ok(match ty {
            Type::Int(k) => {
                let raw = self.mem.read_uint(addr, k.bytes())?;
                k.wrap(raw as i64)
            }
            Type::Bool => (self.mem.read_uint(addr, 1)? != 0) as i64,
            Type::Pointer { .. } | Type::Port => self.mem.read_uint(addr, 4)? as i64,
            Type::Array { .. } | Type::Record(_) => unreachable!("aggregates are copied, not loaded"),
        })
    }

    fn store(&mut self, addr: u32, ty: &Type, v: i64) -> Result<(), MmioTrap> {
        let width = match ty {
            Type::Int(k) => k.bytes(),
            Type::Bool => 1,
            Type::Pointer { .. } | Type::Port => 4,
            Type::Array { .. } | Type::Record(_) => unreachable!("aggregates are copied, not stored"),
        };
        self.mem.write_uint(addr, width, v as u64)
    }

    fn ld(&mut self, ctx: Ctx, addr: u32, ty: &Type) -> R<i64> {
        self.load_scalar(addr, ty).map_err(|_| self.fault_at(ctx, FaultKind::MmioTrap, 0, self.loc))
    }

    fn st(&mut self, ctx: Ctx, addr: u32, ty: &Type, v: i64) -> R<()> {
        self.store(addr, ty, v).map_err(|_| self.fault_at(ctx, FaultKind::MmioTrap, 0, self.loc))
    }

    fn handle(&mut self, ctx: Ctx, port: &Place) -> R<(u32, Option<BlockId>)> {
        let a = self.addr(port, ctx)?;
        let h = self.ld(ctx, a, &Type::Port)? as u32;
        Ok((a, BlockId::from_handle(h)))
    }

    fn module_base(&self, sel: &ModSel, ctx: Ctx) -> u32 {
        match sel {
            ModSel::Own => self.bases[ctx.module][ctx.instance as usize],
            ModSel::Other { module, instance } => {
                let ModRef::Local(i) = module else {
                    unreachable!("images with external modules are rejected at load")
                };
                let k = match instance {
                    InstanceSel::Fixed(k) => *k,
                    InstanceSel::Corresponding => ctx.instance,
                };
                self.bases[*i][k as usize]
            }
        }
    }

    fn addr(&mut self, p: &Place, ctx: Ctx) -> R<u32> {
        Ok(match p {
            Place::ModuleVar { module, offset } => self.module_base(module, ctx) + offset,
            Place::Local { offset } => ctx.frame + offset,
            Place::RefParam { offset } => self.ld(ctx, ctx.frame + offset, &Type::U32)? as u32,
            Place::Field { base, offset } => self.addr(base, ctx)?.wrapping_add(*offset),
            Place::Index {
                base,
                index,
                len,
                elem_size,
                check,
            } => {
                let b = self.addr(base, ctx)?;
                let i = self.eval(index, ctx)?;
                if let Some(c) = check {
                    if self.checks() && !(0..*len as i64).contains(&i) {
                        return Err(self.fault(ctx, FaultKind::ArrayBounds, *c));
                    }
                }
                b.wrapping_add((i as u32).wrapping_mul(*elem_size))
            }
            Place::Deref { pointer } => self.eval(pointer, ctx)? as u32,
            Place::Data { port, check } => match self.handle(ctx, port)?.1 {
                Some(id) => Memory::block_address(id),
                None => match check {
                    Some(c) if self.checks() => return Err(self.fault(ctx, FaultKind::EmptyPort, *c)),
                    _ => DUMMY_BASE,
                },
            },
        })
    }

    // ---- expressions ----

    fn eval(&mut self, e: &TExpr, ctx: Ctx) -> R<i64> {
        Ok(match &e.kind {
            TExprKind::Int(v) => *v,
            TExprKind::Bool(b) => *b as i64,
            TExprKind::ModuleId => (self.program.modules[ctx.module].first_id + ctx.instance) as i64,
            TExprKind::Instance => ctx.instance as i64,
            TExprKind::Load(p) => {
                let a = self.addr(p, ctx)?;
                self.ld(ctx, a, &e.ty)?
            }
            TExprKind::AddrOf(p) => self.addr(p, ctx)? as i64,
            TExprKind::Unary(op, a) => {
                let v = self.eval(a, ctx)?;
                ops::eval_unary(*op, v, e.ty.int_kind().unwrap_or(IntKind::S32))
            }
            TExprKind::Binary {
                op: BinaryOp::And,
                lhs,
                rhs,
                ..
            } => (self.eval(lhs, ctx)? != 0 && self.eval(rhs, ctx)? != 0) as i64,
            TExprKind::Binary {
                op: BinaryOp::Or, lhs, rhs, ..
            } => (self.eval(lhs, ctx)? != 0 || self.eval(rhs, ctx)? != 0) as i64,
            TExprKind::Binary { op, lhs, rhs, check } => {
                let a = self.eval(lhs, ctx)?;
                let b = self.eval(rhs, ctx)?;
                let kind = e
                    .ty
                    .int_kind()
                    .or_else(|| lhs.ty.int_kind())
                    .unwrap_or(IntKind::S32);
                match ops::eval_binary(*op, a, b, kind) {
                    Ok(v) => v,
                    Err(f) => match check {
                        Some(c) if self.checks() => {
                            let kind = match f {
                                ArithFault::DivZero => FaultKind::DivZero,
                                ArithFault::ShiftRange => FaultKind::ShiftRange,
                            };
                            return Err(self.fault(ctx, kind, *c));
                        }
                        _ => UNCHECKED_RESULT,
                    },
                }
            }
            TExprKind::Narrow { value, to, check } => {
                let v = self.eval(value, ctx)?;
                if to.contains(v) {
                    v
                } else if self.checks() {
                    return Err(self.fault(ctx, FaultKind::Narrowing, *check));
                } else {
                    to.wrap(v)
                }
            }
            TExprKind::Call(c) => self.call(c.proc, &c.args, ctx)?.unwrap_or(0),
            TExprKind::Send { src, dst } => self.send(src, dst, ctx)? as i64,
            TExprKind::Count { port, check } => match self.handle(ctx, port)?.1 {
                Some(id) => self.mem.pool.block(id).used as i64,
                None if self.checks() => return Err(self.fault(ctx, FaultKind::EmptyPort, *check)),
                None => 0,
            },
            TExprKind::Pending(p) => self.handle(ctx, p)?.1.is_some() as i64,
            TExprKind::Min(a, b) => self.eval(a, ctx)?.min(self.eval(b, ctx)?),
            TExprKind::Max(a, b) => self.eval(a, ctx)?.max(self.eval(b, ctx)?),
        })
    }

    fn aggregate_source(&mut self, e: &TExpr, ctx: Ctx) -> R<Vec<u8>> {
        let TExprKind::Load(p) = &e.kind else {
            unreachable!("aggregate values are loads")
        };
        let a = self.addr(p, ctx)?;
        let size = e.ty.storage_size();
        self.mem.read_bytes(a, size).map_err(self.trap(ctx))
    }

    fn call(&mut self, id: ProcId, args: &[TArg], ctx: Ctx) -> R<Option<i64>> {
        let program = self.program;
        let p = program.proc(id);
        let mut vals = Vec::with_capacity(args.len());
        for a in args {
            vals.push(match a {
                TArg::Value(e) if e.ty.is_aggregate() => ArgVal::Bytes(self.aggregate_source(e, ctx)?),
                TArg::Value(e) => ArgVal::Scalar(self.eval(e, ctx)?),
                TArg::Ref(place) => ArgVal::Addr(self.addr(place, ctx)?),
            });
        }
        self.step()?;
        let frame = self.mem.push_frame(p.frame_size);
        for (param, v) in p.params.iter().zip(vals) {
            let at = frame + param.offset;
            match v {
                ArgVal::Scalar(v) => self.st(ctx, at, &param.ty, v)?,
                ArgVal::Bytes(b) => self.mem.write_bytes(at, &b).map_err(self.trap(ctx))?,
                ArgVal::Addr(a) => self.st(ctx, at, &Type::U32, a as i64)?,
            }
        }
        let inner = Ctx { frame, ..ctx };
        let flow = self.block(&p.body, inner)?;
        self.mem.pop_frame(frame);
        Ok(match flow {
            Flow::Return(v) => v,
            Flow::Normal | Flow::Next(_) => None,
        })
    }

    fn assert(&mut self, a: &TAssert, ctx: Ctx) -> R<()> {
        if !self.checks() {
            return Ok(());
        }
        self.step()?;
        match self.call(a.contract, &a.args, ctx)? {
            Some(v) if v != 0 => Ok(()),
            _ => Err(self.fault(ctx, FaultKind::ContractFail, a.check)),
        }
    }

    // ---- statements ----

    fn block(&mut self, b: &TBlock, ctx: Ctx) -> R<Flow> {
        for a in &b.entry {
            self.assert(a, ctx)?;
        }
        let mut flow = Flow::Normal;
        for s in &b.stmts {
            flow = self.stmt(s, ctx)?;
            if flow != Flow::Normal {
                break;
            }
        }
        for a in &b.exit {
            self.assert(a, ctx)?;
        }
        Ok(flow)
    }

    fn clauses(&mut self, clauses: &[TClause], v: i64, ctx: Ctx) -> R<Option<Flow>> {
        match clauses.iter().find(|c| c.matches(v)) {
            Some(c) => self.block(&c.body, ctx).map(Some),
            None => Ok(None),
        }
    }

    fn stmt(&mut self, s: &TStmt, ctx: Ctx) -> R<Flow> {
        self.loc = s.loc;
        self.step()?;
        match &s.kind {
            TStmtKind::Assign { place, ty, value } => {
                let a = self.addr(place, ctx)?;
                if ty.is_aggregate() {
                    let bytes = self.aggregate_source(value, ctx)?;
                    self.mem.write_bytes(a, &bytes).map_err(self.trap(ctx))?;
                } else {
                    let v = self.eval(value, ctx)?;
                    self.st(ctx, a, ty, v)?;
                }
            }
            TStmtKind::Call(c) => {
                self.call(c.proc, &c.args, ctx)?;
            }
            TStmtKind::If { arms, otherwise } => {
                for (cond, body) in arms {
                    if self.eval(cond, ctx)? != 0 {
                        return self.block(body, ctx);
                    }
                }
                if let Some(b) = otherwise {
                    return self.block(b, ctx);
                }
            }
            TStmtKind::Loop {
                guard,
                count,
                counter,
                body,
            } => {
                let n = match count {
                    LoopCount::Const(n) => *n,
                    LoopCount::Invalid(_) => unreachable!("rejected by analysis"),
                };
                for i in 0..n {
                    self.st(ctx, ctx.frame + counter, &Type::U32, i as i64)?;
                    if let Some(g) = guard {
                        if self.eval(g, ctx)? == 0 {
                            break;
                        }
                    }
                    let flow = self.block(body, ctx)?;
                    if flow != Flow::Normal {
                        return Ok(flow);
                    }
                }
            }
            TStmtKind::Case {
                scrutinee,
                clauses,
                otherwise,
            } => {
                let v = self.eval(scrutinee, ctx)?;
                if let Some(flow) = self.clauses(clauses, v, ctx)? {
                    return Ok(flow);
                }
                if let Some(b) = otherwise {
                    return self.block(b, ctx);
                }
            }
            TStmtKind::Select {
                id,
                target,
                target_kind,
                snapshot,
                clauses,
            } => {
                let a = self.addr(target, ctx)?;
                let v = self.ld(ctx, a, &Type::Int(*target_kind))?;
                self.st(ctx, ctx.frame + snapshot, &Type::Int(*target_kind), v)?;
                return Ok(match self.clauses(clauses, v, ctx)? {
                    Some(Flow::Next(n)) if n == *id => Flow::Normal,
                    Some(flow) => flow,
                    None => Flow::Normal,
                });
            }
            TStmtKind::Next {
                select,
                target,
                target_kind,
                value,
                ..
            } => {
                let a = self.addr(target, ctx)?;
                self.st(ctx, a, &Type::Int(*target_kind), *value)?;
                return Ok(Flow::Next(*select));
            }
            TStmtKind::Return(v) => {
                let v = match v {
                    Some(e) => Some(self.eval(e, ctx)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
            TStmtKind::Log { text, value } => {
                let value = match value {
                    Some(e) => Some(self.eval(e, ctx)?),
                    None => None,
                };
                self.transcript.push(Event::Log {
                    module: self.program.modules[ctx.module].name.clone(),
                    instance: ctx.instance,
                    text: text.clone(),
                    value,
                });
            }
            TStmtKind::New { port, size, site } => {
                let (a, held) = self.handle(ctx, port)?;
                let n = self.eval(size, ctx)?;
                if !(1..=BLOCK_SIZE as i64).contains(&n) {
                    return Err(self.fault(ctx, FaultKind::ExtendRange, *site));
                }
                if held.is_some() {
                    return Err(self.fault(ctx, FaultKind::NewOnFullPort, *site));
                }
                let Some(id) = self.mem.pool.alloc(n as u32) else {
                    return Err(self.fault(ctx, FaultKind::PoolExhausted, *site));
                };
                self.st(ctx, a, &Type::Port, id.handle() as i64)?;
            }
            TStmtKind::Dispose { port } => {
                let (a, held) = self.handle(ctx, port)?;
                if let Some(id) = held {
                    self.mem.pool.release(id);
                    self.st(ctx, a, &Type::Port, 0)?;
                }
            }
            TStmtKind::Clone { src, dst, site } => {
                let (_, from) = self.handle(ctx, src)?;
                let (d, held) = self.handle(ctx, dst)?;
                if let Some(from) = from {
                    if held.is_some() {
                        return Err(self.fault(ctx, FaultKind::NewOnFullPort, *site));
                    }
                    let Some(id) = self.mem.pool.alloc(0) else {
                        return Err(self.fault(ctx, FaultKind::PoolExhausted, *site));
                    };
                    let b = self.mem.pool.block(from).clone();
                    *self.mem.pool.block_mut(id) = b;
                    self.st(ctx, d, &Type::Port, id.handle() as i64)?;
                }
            }
            TStmtKind::Extend { port, delta, site } => {
                let (_, held) = self.handle(ctx, port)?;
                let n = self.eval(delta, ctx)?;
                match held {
                    None if self.checks() => return Err(self.fault(ctx, FaultKind::EmptyPort, *site)),
                    None => {}
                    Some(id) => {
                        let used = self.mem.pool.block(id).used as i64 + n;
                        if !(0..=BLOCK_SIZE as i64).contains(&used) {
                            return Err(self.fault(ctx, FaultKind::ExtendRange, *site));
                        }
                        self.mem.pool.block_mut(id).used = used as u32;
                    }
                }
            }
            TStmtKind::Send { src, dst } => {
                self.send(src, dst, ctx)?;
            }
        }
        Ok(Flow::Normal)
    }

    /// Moves the block from `src` to `dst` when `src` is full and `dst` empty.
    fn send(&mut self, src: &Place, dst: &Place, ctx: Ctx) -> R<bool> {
        let (s, from) = self.handle(ctx, src)?;
        let (d, to) = self.handle(ctx, dst)?;
        match (from, to) {
            (Some(id), None) => {
                self.st(ctx, s, &Type::Port, 0)?;
                self.st(ctx, d, &Type::Port, id.handle() as i64)?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}
