//! Resolved types and the integer semantics shared by the folder, the
//! interpreter and the C backend.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntKind {
    U8,
    U16,
    U32,
    S8,
    S16,
    S32,
}

impl IntKind {
    pub const ALL: [IntKind; 6] = [
        IntKind::U8,
        IntKind::U16,
        IntKind::U32,
        IntKind::S8,
        IntKind::S16,
        IntKind::S32,
    ];

    pub fn bits(self) -> u32 {
        match self {
            IntKind::U8 | IntKind::S8 => 8,
            IntKind::U16 | IntKind::S16 => 16,
            IntKind::U32 | IntKind::S32 => 32,
        }
    }

    pub fn bytes(self) -> u32 {
        self.bits() / 8
    }

    pub fn signed(self) -> bool {
        matches!(self, IntKind::S8 | IntKind::S16 | IntKind::S32)
    }

    pub fn min(self) -> i64 {
        if self.signed() {
            -(1i64 << (self.bits() - 1))
        } else {
            0
        }
    }

    pub fn max(self) -> i64 {
        if self.signed() {
            (1i64 << (self.bits() - 1)) - 1
        } else {
            (1i64 << self.bits()) - 1
        }
    }

    pub fn contains(self, v: i64) -> bool {
        (self.min()..=self.max()).contains(&v)
    }

    /// Reduces `v` modulo 2^bits into the kind's range (two's complement).
    pub fn wrap(self, v: i64) -> i64 {
        match self {
            IntKind::U8 => v as u8 as i64,
            IntKind::U16 => v as u16 as i64,
            IntKind::U32 => v as u32 as i64,
            IntKind::S8 => v as i8 as i64,
            IntKind::S16 => v as i16 as i64,
            IntKind::S32 => v as i32 as i64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IntKind::U8 => "u8",
            IntKind::U16 => "u16",
            IntKind::U32 => "u32",
            IntKind::S8 => "s8",
            IntKind::S16 => "s16",
            IntKind::S32 => "s32",
        }
    }

    pub fn from_name(name: &str) -> Option<IntKind> {
        IntKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Nominal type of a mixed arithmetic result: the wider operand, unsigned on ties.
    pub fn join(self, other: IntKind) -> IntKind {
        match self.bits().cmp(&other.bits()) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal if !self.signed() => self,
            std::cmp::Ordering::Equal => other,
        }
    }

    /// Type of an integer literal: s32 when it fits, else u32.
    pub fn of_literal(v: u64) -> IntKind {
        if v <= i32::MAX as u64 {
            IntKind::S32
        } else {
            IntKind::U32
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Int(IntKind),
    Bool,
    Port,
    Pointer { volatile: bool, to: Box<Type> },
    Array { len: u32, elem: Box<Type> },
    Record(Vec<(String, Type)>),
}

/// Bytes in a message block; `DATA(p)` is an array of this many bytes.
pub const BLOCK_SIZE: u32 = 4096;

impl Type {
    pub const U32: Type = Type::Int(IntKind::U32);
    pub const S32: Type = Type::Int(IntKind::S32);

    pub fn pointer_to(to: Type) -> Type {
        Type::Pointer {
            volatile: false,
            to: Box::new(to),
        }
    }

    pub fn block_data() -> Type {
        Type::Array {
            len: BLOCK_SIZE,
            elem: Box::new(Type::Int(IntKind::U8)),
        }
    }

    pub fn int_kind(&self) -> Option<IntKind> {
        match self {
            Type::Int(k) => Some(*k),
            _ => None,
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Type::Int(_))
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Type::Int(_) | Type::Bool | Type::Pointer { .. })
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self, Type::Array { .. } | Type::Record(_))
    }

    pub fn contains_port(&self) -> bool {
        match self {
            Type::Port => true,
            Type::Int(_) | Type::Bool => false,
            Type::Pointer { to, .. } => to.contains_port(),
            Type::Array { elem, .. } => elem.contains_port(),
            Type::Record(fields) => fields.iter().any(|(_, t)| t.contains_port()),
        }
    }

    /// `SIZE(t)`; `None` for `port`, whose representation is opaque.
    pub fn size(&self) -> Option<u32> {
        match self {
            Type::Int(k) => Some(k.bytes()),
            Type::Bool => Some(1),
            Type::Port => None,
            Type::Pointer { .. } => Some(4),
            Type::Array { len, elem } => elem.size().map(|s| s * len),
            Type::Record(fields) => fields.iter().map(|(_, t)| t.size()).sum(),
        }
    }

    /// Bytes occupied in a data block or frame. A port occupies one handle word.
    pub fn storage_size(&self) -> u32 {
        match self {
            Type::Port => 4,
            t => t.size().unwrap_or(4),
        }
    }

    /// Alignment used when laying out module data and frames.
    pub fn align(&self) -> u32 {
        match self {
            Type::Int(k) => k.bytes(),
            Type::Bool => 1,
            Type::Port | Type::Pointer { .. } => 4,
            Type::Array { elem, .. } => elem.align(),
            Type::Record(fields) => fields.iter().map(|(_, t)| t.align()).max().unwrap_or(1),
        }
    }

    /// Byte offset of a record field.
    pub fn field(&self, name: &str) -> Option<(u32, &Type)> {
        let Type::Record(fields) = self else {
            return None;
        };
        let mut offset = 0;
        for (n, t) in fields {
            if n == name {
                return Some((offset, t));
            }
            offset += t.storage_size();
        }
        None
    }

    /// Whether a value of `self` may be stored into a location of type `to`.
    /// Integers convert freely (with a range check); everything else must match.
    pub fn assignable_to(&self, to: &Type) -> bool {
        match (self, to) {
            (Type::Int(_), Type::Int(_)) => true,
            (Type::Pointer { to: a, .. }, Type::Pointer { to: b, .. }) => a == b,
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Type {
    /// Surface syntax with single spaces, as used in `.hi` files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int(k) => f.write_str(k.name()),
            Type::Bool => f.write_str("boolean"),
            Type::Port => f.write_str("port"),
            Type::Pointer { volatile, to } => {
                if *volatile {
                    f.write_str("VOLATILE ")?;
                }
                write!(f, "POINTER TO {to}")
            }
            Type::Array { len, elem } => write!(f, "ARRAY {len} OF {elem}"),
            Type::Record(fields) => {
                f.write_str("RECORD ")?;
                for (i, (name, t)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    write!(f, "{name}: {t}")?;
                }
                f.write_str(" END")
            }
        }
    }
}

/// A compile-time value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstValue {
    Int(i64, IntKind),
    Bool(bool),
}

impl ConstValue {
    pub fn ty(self) -> Type {
        match self {
            ConstValue::Int(_, k) => Type::Int(k),
            ConstValue::Bool(_) => Type::Bool,
        }
    }

    pub fn as_int(self) -> Option<i64> {
        match self {
            ConstValue::Int(v, _) => Some(v),
            ConstValue::Bool(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_prefers_width_then_unsigned() {
        assert_eq!(IntKind::U8.join(IntKind::S16), IntKind::S16);
        assert_eq!(IntKind::S32.join(IntKind::U32), IntKind::U32);
        assert_eq!(IntKind::U32.join(IntKind::S32), IntKind::U32);
        assert_eq!(IntKind::S8.join(IntKind::S8), IntKind::S8);
    }

    #[test]
    fn sizes() {
        assert_eq!(Type::U32.size(), Some(4));
        assert_eq!(Type::Port.size(), None);
        let rec = Type::Record(vec![
            ("a".into(), Type::Int(IntKind::U8)),
            ("b".into(), Type::U32),
        ]);
        assert_eq!(rec.size(), Some(5));
        assert_eq!(rec.field("b").map(|f| f.0), Some(1));
        let arr = Type::Array {
            len: 3,
            elem: Box::new(rec),
        };
        assert_eq!(arr.size(), Some(15));
    }

    #[test]
    fn wrap_and_range() {
        assert_eq!(IntKind::U8.wrap(256), 0);
        assert_eq!(IntKind::S8.wrap(128), -128);
        assert_eq!(IntKind::U32.wrap(-1), 0xFFFF_FFFF);
        assert!(IntKind::S16.contains(-32768));
        assert!(!IntKind::S16.contains(32768));
    }

    #[test]
    fn display_is_surface_syntax() {
        let t = Type::Pointer {
            volatile: true,
            to: Box::new(Type::Array {
                len: 4,
                elem: Box::new(Type::Record(vec![("x".into(), Type::S32)])),
            }),
        };
        assert_eq!(t.to_string(), "VOLATILE POINTER TO ARRAY 4 OF RECORD x: s32 END");
    }
}
