//! Operator semantics. Values are 64-bit integers; the nominal type only
//! matters for bitwise normalization and the range checks at stores.

use super::types::IntKind;
use crate::syntax::ast::{BinaryOp, UnaryOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithFault {
    DivZero,
    ShiftRange,
}

/// Evaluates an integer operator. `kind` is the nominal result type (see
/// [`binary_kind`]). Comparisons return 0 or 1. AND/OR are not handled here
/// because they short-circuit.
pub fn eval_binary(op: BinaryOp, a: i64, b: i64, kind: IntKind) -> Result<i64, ArithFault> {
    use BinaryOp::*;
    Ok(match op {
        Add => a.wrapping_add(b),
        Sub => a.wrapping_sub(b),
        Mul => a.wrapping_mul(b),
        Div | IntDiv => {
            if b == 0 {
                return Err(ArithFault::DivZero);
            }
            a.wrapping_div(b)
        }
        Mod => {
            if b == 0 {
                return Err(ArithFault::DivZero);
            }
            a.wrapping_rem(b)
        }
        Shl | Shr => {
            if !(0..32).contains(&b) {
                return Err(ArithFault::ShiftRange);
            }
            let pattern = a as u32;
            let r = if op == Shl {
                pattern << b
            } else {
                pattern >> b
            };
            r as i64
        }
        BitAnd => kind.wrap(a & b),
        BitOr => kind.wrap(a | b),
        BitXor => kind.wrap(a ^ b),
        Eq => (a == b) as i64,
        Ne => (a != b) as i64,
        Lt => (a < b) as i64,
        Le => (a <= b) as i64,
        Gt => (a > b) as i64,
        Ge => (a >= b) as i64,
        And | Or => unreachable!("short-circuit operators are evaluated by the caller"),
    })
}

/// Value used in place of a faulting operation when checks are disabled.
pub const UNCHECKED_RESULT: i64 = 0;

pub fn eval_unary(op: UnaryOp, v: i64, kind: IntKind) -> i64 {
    match op {
        UnaryOp::Plus => v,
        UnaryOp::Neg => v.wrapping_neg(),
        UnaryOp::BitNot => kind.wrap(!v),
        UnaryOp::Not => (v == 0) as i64,
    }
}

/// Nominal result type of an integer binary operator.
pub fn binary_kind(op: BinaryOp, a: IntKind, b: IntKind) -> IntKind {
    match op {
        BinaryOp::Shl | BinaryOp::Shr => IntKind::U32,
        _ => a.join(b),
    }
}

/// A closed interval of possible values, used to decide where narrowing
/// checks are needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Range {
    pub lo: i128,
    pub hi: i128,
}

impl Range {
    pub fn new(lo: i128, hi: i128) -> Self {
        Range { lo, hi }
    }

    pub fn exact(v: i64) -> Self {
        Range::new(v as i128, v as i128)
    }

    pub fn of_kind(k: IntKind) -> Self {
        Range::new(k.min() as i128, k.max() as i128)
    }

    pub fn fits(self, k: IntKind) -> bool {
        self.lo >= k.min() as i128 && self.hi <= k.max() as i128
    }

    fn span(a: i128, b: i128, c: i128, d: i128) -> Self {
        Range::new(a.min(b).min(c).min(d), a.max(b).max(c).max(d))
    }

    fn clamp(self) -> Self {
        // Beyond 64 bits the runtime value wraps; give up on precision.
        if self.lo < i64::MIN as i128 || self.hi > i64::MAX as i128 {
            Range::new(i64::MIN as i128, i64::MAX as i128)
        } else {
            self
        }
    }

    fn max_abs(self) -> i128 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn union(self, o: Range) -> Self {
        Range::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    /// Conservative result range of an integer binary operator.
    pub fn binary(op: BinaryOp, a: Range, b: Range, kind: IntKind) -> Range {
        use BinaryOp::*;
        let r = match op {
            Add => Range::new(a.lo + b.lo, a.hi + b.hi),
            Sub => Range::new(a.lo - b.hi, a.hi - b.lo),
            Mul => Range::span(a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi),
            // A divisor of known sign keeps the quotient between 0 and the
            // (possibly negated) dividend, whichever way it rounds.
            Div | IntDiv if b.lo >= 1 => Range::new(a.lo.min(0), a.hi.max(0)),
            Div | IntDiv if b.hi <= -1 => Range::new(-a.hi.max(0), -a.lo.min(0)),
            Div | IntDiv => {
                let m = a.max_abs();
                Range::new(if a.lo < 0 || b.lo < 0 { -m } else { 0 }, m)
            }
            Mod => {
                let m = (b.max_abs() - 1).max(0).min(a.max_abs());
                Range::new(if a.lo < 0 { -m } else { 0 }, if a.hi > 0 { m } else { 0 })
            }
            Shl | Shr => Range::of_kind(IntKind::U32),
            BitAnd | BitOr | BitXor => Range::of_kind(kind),
            _ => Range::new(0, 1),
        };
        r.clamp()
    }

    pub fn unary(op: UnaryOp, a: Range, kind: IntKind) -> Range {
        match op {
            UnaryOp::Plus => a,
            UnaryOp::Neg => Range::new(-a.hi, -a.lo).clamp(),
            UnaryOp::BitNot => Range::of_kind(kind),
            UnaryOp::Not => Range::new(0, 1),
        }
    }
}
