//! Compile-time evaluation of constant expressions.

use std::collections::HashMap;

use thiserror::Error;

use super::ops::{self, ArithFault};
use super::types::{ConstValue, IntKind, Type};
use crate::diag::codes;
use crate::source::Loc;
use crate::syntax::ast::{BinaryOp, Expr, ExprKind, TypeExpr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ConstError {
    pub code: &'static str,
    pub loc: Loc,
    pub message: String,
}

impl ConstError {
    pub fn new(code: &'static str, loc: Loc, message: impl Into<String>) -> Self {
        ConstError {
            code,
            loc,
            message: message.into(),
        }
    }
}

/// Names visible to a constant expression.
pub trait ConstEnv {
    fn constant(&self, name: &str) -> Option<ConstValue>;

    /// `SIZE(t)`.
    fn size_of(&self, ty: &TypeExpr) -> Result<u32, ConstError>;

    /// `MODULE_ID`, when it is a compile-time constant in this context.
    fn module_id(&self) -> Option<u32> {
        None
    }

    /// `INSTANCE`, when it is a compile-time constant in this context.
    fn instance(&self) -> Option<u32> {
        None
    }
}

/// A plain table of constants; types resolve to the builtin names only.
#[derive(Debug, Clone, Default)]
pub struct MapEnv {
    pub values: HashMap<String, ConstValue>,
}

impl ConstEnv for MapEnv {
    fn constant(&self, name: &str) -> Option<ConstValue> {
        self.values.get(name).copied()
    }

    fn size_of(&self, ty: &TypeExpr) -> Result<u32, ConstError> {
        let TypeExpr::Named(id) = ty else {
            return Err(ConstError::new(codes::NOT_CONST, ty.loc(), "unsupported type in SIZE"));
        };
        builtin_type(&id.name)
            .and_then(|t| t.size())
            .ok_or_else(|| ConstError::new(codes::UNDEFINED, id.loc, format!("unknown type `{}`", id.name)))
    }
}

pub fn builtin_type(name: &str) -> Option<Type> {
    match name {
        "boolean" => Some(Type::Bool),
        "port" => Some(Type::Port),
        _ => IntKind::from_name(name).map(Type::Int),
    }
}

/// Names of the builtin constants, accepted in upper or lower case.
pub fn is_module_id(name: &str) -> bool {
    name == "MODULE_ID" || name == "module_id"
}

pub fn is_instance(name: &str) -> bool {
    name == "INSTANCE" || name == "instance"
}

/// Evaluates `expr` with 64-bit integers.
pub fn fold_constant(expr: &Expr, env: &dyn ConstEnv) -> Result<ConstValue, ConstError> {
    let loc = expr.loc;
    match &expr.kind {
        ExprKind::Number(v) => Ok(ConstValue::Int(*v as i64, IntKind::of_literal(*v))),
        ExprKind::Bool(b) => Ok(ConstValue::Bool(*b)),
        ExprKind::SizeOf(ty) => Ok(ConstValue::Int(env.size_of(ty)? as i64, IntKind::U32)),
        ExprKind::Designator(d) => {
            let Some(id) = d.as_name() else {
                return Err(ConstError::new(codes::NOT_CONST, loc, "expression is not constant"));
            };
            if let Some(v) = env.constant(&id.name) {
                return Ok(v);
            }
            let builtin = if is_module_id(&id.name) {
                Some(env.module_id())
            } else if is_instance(&id.name) {
                Some(env.instance())
            } else {
                None
            };
            match builtin {
                Some(Some(v)) => Ok(ConstValue::Int(v as i64, IntKind::U32)),
                Some(None) => Err(ConstError::new(
                    codes::NOT_CONST,
                    loc,
                    format!("`{}` is not constant here", id.name),
                )),
                None => Err(ConstError::new(
                    codes::NOT_CONST,
                    loc,
                    format!("`{}` is not a constant", id.name),
                )),
            }
        }
        ExprKind::Unary(op, e) => {
            let v = fold_constant(e, env)?;
            match (op, v) {
                (UnaryOp::Not, ConstValue::Bool(b)) => Ok(ConstValue::Bool(!b)),
                (UnaryOp::Not, _) => Err(type_error(loc, "NOT needs a boolean operand")),
                (_, ConstValue::Int(x, k)) => Ok(ConstValue::Int(ops::eval_unary(*op, x, k), k)),
                (_, ConstValue::Bool(_)) => Err(type_error(loc, "arithmetic on a boolean")),
            }
        }
        ExprKind::Binary(op, a, b) => {
            let a = fold_constant(a, env)?;
            let b = fold_constant(b, env)?;
            fold_binary(*op, a, b, loc)
        }
    }
}

pub(crate) fn fold_binary(op: BinaryOp, a: ConstValue, b: ConstValue, loc: Loc) -> Result<ConstValue, ConstError> {
    match (a, b) {
        (ConstValue::Bool(x), ConstValue::Bool(y)) => match op {
            BinaryOp::And => Ok(ConstValue::Bool(x && y)),
            BinaryOp::Or => Ok(ConstValue::Bool(x || y)),
            BinaryOp::Eq => Ok(ConstValue::Bool(x == y)),
            BinaryOp::Ne => Ok(ConstValue::Bool(x != y)),
            _ => Err(type_error(loc, format!("`{}` is not defined on booleans", op.symbol()))),
        },
        (ConstValue::Int(x, kx), ConstValue::Int(y, ky)) => {
            if matches!(op, BinaryOp::And | BinaryOp::Or) {
                return Err(type_error(loc, format!("`{}` needs boolean operands", op.symbol())));
            }
            let kind = ops::binary_kind(op, kx, ky);
            match ops::eval_binary(op, x, y, kind) {
                Ok(v) if op.is_comparison() => Ok(ConstValue::Bool(v != 0)),
                Ok(v) => Ok(ConstValue::Int(v, kind)),
                Err(ArithFault::DivZero) => Err(ConstError::new(
                    codes::CONST_DIV_ZERO,
                    loc,
                    "division by zero in constant expression",
                )),
                Err(ArithFault::ShiftRange) => Err(ConstError::new(
                    codes::RANGE,
                    loc,
                    "shift count out of range 0..31",
                )),
            }
        }
        _ => Err(type_error(loc, "operands of different kinds")),
    }
}

fn type_error(loc: Loc, message: impl Into<String>) -> ConstError {
    ConstError::new(codes::TYPE, loc, message)
}

/// Folds an integer constant and checks it against `kind`.
pub fn fold_int(expr: &Expr, env: &dyn ConstEnv, kind: IntKind) -> Result<i64, ConstError> {
    match fold_constant(expr, env)? {
        ConstValue::Int(v, _) if kind.contains(v) => Ok(v),
        ConstValue::Int(v, _) => Err(ConstError::new(
            codes::RANGE,
            expr.loc,
            format!("constant {v} does not fit in {}", kind.name()),
        )),
        ConstValue::Bool(_) => Err(type_error(expr.loc, "expected an integer constant")),
    }
}
