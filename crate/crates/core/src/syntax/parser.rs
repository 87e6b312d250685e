//! Recursive-descent parser producing [`ast::Unit`].
//!
//! Keywords written in lowercase double as identifiers wherever the keyword
//! itself cannot appear, so `IMPORT mod := mod[*]` parses even though `mod`
//! is the lowercase spelling of `MOD`.

use std::fmt;

use thiserror::Error;

use super::ast::*;
use crate::diag::codes;
use crate::lexer::{Keyword, Punct, Token, TokenKind};
use crate::source::Loc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub loc: Loc,
    /// Never empty.
    pub expected: Vec<String>,
    pub found: String,
    pub code: &'static str,
    pub note: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(note) = &self.note {
            return write!(f, "{note}");
        }
        write!(f, "expected ")?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => {
                let (last, rest) = many.split_last().expect("expected-set is never empty");
                write!(f, "{} or {}", rest.join(", "), last)?;
            }
        }
        write!(f, ", found {}", self.found)
    }
}

pub type PResult<T> = Result<T, ParseError>;

pub fn parse_unit(tokens: &[Token]) -> PResult<Unit> {
    Parser::new(tokens).unit()
}

/// Parses a single type expression (used when reading interface files).
pub fn parse_type(tokens: &[Token]) -> PResult<TypeExpr> {
    let mut p = Parser::new(tokens);
    let ty = p.ty()?;
    p.expect_eof()?;
    Ok(ty)
}

/// Parses a single expression.
pub fn parse_expr(tokens: &[Token]) -> PResult<Expr> {
    let mut p = Parser::new(tokens);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

const BLOCK_END: [Keyword; 3] = [Keyword::End, Keyword::Elsif, Keyword::Else];

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token]) -> Self {
        assert!(
            toks.last().is_some_and(|t| t.kind == TokenKind::Eof),
            "token stream must end with Eof"
        );
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &'t Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek().is_keyword(kw)
    }

    fn at_punct(&self, p: Punct) -> bool {
        self.peek().is_punct(p)
    }

    fn eat_kw(&mut self, kw: Keyword) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            loc: t.loc,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.describe(),
            code: codes::PARSE,
            note: None,
        }
    }

    fn expect_kw(&mut self, kw: Keyword) -> PResult<&'t Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            Err(self.error(&[kw.as_str()]))
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<&'t Token> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{}`", p.as_str())]))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn ident_like(tok: &Token) -> bool {
        tok.kind == TokenKind::Ident || tok.is_lowercase_keyword()
    }

    fn expect_ident(&mut self) -> PResult<Ident> {
        let t = self.peek();
        if Self::ident_like(t) {
            self.bump();
            Ok(Ident::new(t.text.clone(), t.loc))
        } else {
            Err(self.error(&["identifier"]))
        }
    }

    fn at_block_end(&self) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Eof
            || t.is_punct(Punct::Bar)
            || BLOCK_END.iter().any(|&kw| t.is_keyword(kw))
    }

    // ---- toplevel ----

    fn unit(&mut self) -> PResult<Unit> {
        let mut unit = Unit::default();
        loop {
            while self.eat_punct(Punct::Semi) {}
            if self.peek().kind == TokenKind::Eof {
                return Ok(unit);
            }
            unit.toplevels.push(self.toplevel()?);
        }
    }

    fn toplevel(&mut self) -> PResult<Toplevel> {
        let t = self.peek();
        match t.kind {
            TokenKind::Keyword(Keyword::Type) => {
                self.bump();
                let mut defs = Vec::new();
                while self.at_definition() {
                    let name = self.expect_ident()?;
                    self.expect_punct(Punct::Eq)?;
                    let ty = self.ty()?;
                    self.expect_punct(Punct::Semi)?;
                    defs.push(TypeDef { name, ty });
                }
                Ok(Toplevel::Types(defs, t.loc))
            }
            TokenKind::Keyword(Keyword::Const) => {
                self.bump();
                let mut defs = Vec::new();
                while self.at_definition() {
                    let name = self.expect_ident()?;
                    self.expect_punct(Punct::Eq)?;
                    let value = self.expr()?;
                    self.expect_punct(Punct::Semi)?;
                    defs.push(ConstDef { name, value });
                }
                Ok(Toplevel::Consts(defs, t.loc))
            }
            TokenKind::Keyword(Keyword::Module) => self.module().map(Toplevel::Module),
            TokenKind::Keyword(Keyword::Procedure) => self.procedure().map(Toplevel::Procedure),
            TokenKind::Keyword(Keyword::Contract) => self.contract().map(Toplevel::Contract),
            TokenKind::Keyword(Keyword::Include) => {
                self.bump();
                let s = self.peek();
                if s.kind != TokenKind::Str {
                    return Err(self.error(&["string"]));
                }
                self.bump();
                Ok(Toplevel::Include(Include {
                    path: s.string_value().to_string(),
                    loc: t.loc,
                }))
            }
            _ => Err(self.error(&["TYPE", "CONST", "MODULE", "PROCEDURE", "CONTRACT", "INCLUDE"])),
        }
    }

    /// `id =` starts another TYPE or CONST definition.
    fn at_definition(&self) -> bool {
        Self::ident_like(self.peek()) && self.peek_at(1).is_punct(Punct::Eq)
    }

    fn module(&mut self) -> PResult<Module> {
        let start = self.expect_kw(Keyword::Module)?;
        let name = self.expect_ident()?;
        let multi = self.eat_punct(Punct::Star);
        self.expect_punct(Punct::Semi)?;

        let mut vars = Vec::new();
        if self.eat_kw(Keyword::Var) {
            loop {
                vars.push(self.var_decl()?);
                // Declarations are separated by `;`, or by `,` as in
                // `VAR exported*: u32, listener*: port;`.
                let sep = self.eat_punct(Punct::Semi) || self.eat_punct(Punct::Comma);
                if !(sep && self.at_var_decl()) {
                    break;
                }
            }
        }

        let mut procedures = Vec::new();
        while self.at_kw(Keyword::Procedure) {
            procedures.push(self.procedure()?);
            self.eat_punct(Punct::Semi);
        }

        self.expect_kw(Keyword::Begin)?;
        let body = self.block()?;
        self.expect_kw(Keyword::End)?;
        let end_name = self.expect_ident()?;
        if end_name.name != name.name {
            return Err(ParseError {
                loc: end_name.loc,
                expected: vec![format!("`{}`", name.name)],
                found: format!("`{}`", end_name.name),
                code: codes::MODULE_NAME,
                note: Some(format!(
                    "module `{}` is closed with `END {}`",
                    name.name, end_name.name
                )),
            });
        }
        self.expect_punct(Punct::Dot)?;
        Ok(Module {
            name,
            multi,
            vars,
            procedures,
            body,
            loc: start.loc,
        })
    }

    fn at_var_decl(&self) -> bool {
        Self::ident_like(self.peek())
            && matches!(
                self.peek_at(1).kind,
                TokenKind::Punct(Punct::Comma | Punct::Star | Punct::Colon)
            )
    }

    fn var_decl(&mut self) -> PResult<VarDecl> {
        let mut names = Vec::new();
        loop {
            let id = self.expect_ident()?;
            let exported = self.eat_punct(Punct::Star);
            names.push((id, exported));
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::Colon)?;
        let ty = self.ty()?;
        Ok(VarDecl { names, ty })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        loop {
            let by_ref = self.eat_kw(Keyword::Var);
            let mut names = vec![self.expect_ident()?];
            while self.eat_punct(Punct::Comma) {
                names.push(self.expect_ident()?);
            }
            self.expect_punct(Punct::Colon)?;
            let ty = self.ty()?;
            params.push(Param { by_ref, names, ty });
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(params)
    }

    fn procedure(&mut self) -> PResult<Procedure> {
        let start = self.expect_kw(Keyword::Procedure)?;
        let name = self.expect_ident()?;
        let params = self.params()?;
        let ret = if self.eat_punct(Punct::Colon) {
            Some(self.ty()?)
        } else {
            None
        };
        self.expect_kw(Keyword::Begin)?;
        let body = self.block()?;
        self.expect_kw(Keyword::End)?;
        Ok(Procedure {
            name,
            params,
            ret,
            body,
            loc: start.loc,
        })
    }

    fn contract(&mut self) -> PResult<Contract> {
        let start = self.expect_kw(Keyword::Contract)?;
        let name = self.expect_ident()?;
        let params = if self.at_punct(Punct::LParen) {
            Some(self.params()?)
        } else {
            None
        };
        self.expect_kw(Keyword::Begin)?;
        let body = self.block()?;
        self.expect_kw(Keyword::End)?;
        Ok(Contract {
            name,
            params,
            body,
            loc: start.loc,
        })
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<TypeExpr> {
        let t = self.peek();
        match t.kind {
            TokenKind::Keyword(Keyword::Array) => {
                self.bump();
                let len = self.expr()?;
                self.expect_kw(Keyword::Of)?;
                let elem = self.ty()?;
                Ok(TypeExpr::Array {
                    len,
                    elem: Box::new(elem),
                    loc: t.loc,
                })
            }
            TokenKind::Keyword(Keyword::Record) => {
                self.bump();
                let mut fields = Vec::new();
                while !self.at_kw(Keyword::End) {
                    let mut names = vec![self.expect_ident()?];
                    while self.eat_punct(Punct::Comma) {
                        names.push(self.expect_ident()?);
                    }
                    self.expect_punct(Punct::Colon)?;
                    let ty = self.ty()?;
                    fields.push(Field { names, ty });
                    if !self.eat_punct(Punct::Semi) {
                        break;
                    }
                }
                self.expect_kw(Keyword::End)?;
                Ok(TypeExpr::Record(fields, t.loc))
            }
            TokenKind::Keyword(Keyword::Volatile) | TokenKind::Keyword(Keyword::Pointer) => {
                let volatile = self.eat_kw(Keyword::Volatile);
                self.expect_kw(Keyword::Pointer)?;
                self.expect_kw(Keyword::To)?;
                let to = self.ty()?;
                Ok(TypeExpr::Pointer {
                    volatile,
                    to: Box::new(to),
                    loc: t.loc,
                })
            }
            _ if Self::ident_like(t) => Ok(TypeExpr::Named(self.expect_ident()?)),
            _ => Err(self.error(&["type"])),
        }
    }

    // ---- statements ----

    fn at_check(&self) -> Option<CheckKind> {
        let t = self.peek();
        if t.is_keyword(Keyword::Require) {
            Some(CheckKind::Require)
        } else if t.is_keyword(Keyword::Provide) {
            Some(CheckKind::Provide)
        } else if t.is_keyword(Keyword::Invariant) {
            Some(CheckKind::Invariant)
        } else {
            None
        }
    }

    fn block(&mut self) -> PResult<Block> {
        let mut block = Block::default();
        while let Some(kind) = self.at_check() {
            let start = self.bump();
            let mut asserts = vec![self.assert()?];
            while self.eat_punct(Punct::Comma) {
                asserts.push(self.assert()?);
            }
            block.checks.push(Check {
                kind,
                asserts,
                loc: start.loc,
            });
            if !self.eat_punct(Punct::Semi) && !self.at_block_end() {
                return Err(self.error(&["`;`"]));
            }
        }
        // The empty statement is a lone `;`; a sequence with no tokens at all
        // is not a statement sequence.
        if block.checks.is_empty() && self.at_block_end() {
            return Err(self.error(&["statement", "`;`"]));
        }
        loop {
            if self.at_block_end() {
                return Ok(block);
            }
            if self.eat_punct(Punct::Semi) {
                continue;
            }
            if self.at_check().is_some() && !self.lowercase_keyword_designator() {
                let t = self.peek();
                return Err(ParseError {
                    loc: t.loc,
                    expected: vec!["statement".to_string()],
                    found: t.describe(),
                    code: codes::CHECK_POSITION,
                    note: Some(format!(
                        "{} is only allowed at the start of a statement sequence",
                        t.text.to_ascii_uppercase()
                    )),
                });
            }
            block.stmts.push(self.statement()?);
            if !self.eat_punct(Punct::Semi) && !self.at_block_end() {
                return Err(self.error(&["`;`", "END"]));
            }
        }
    }

    fn assert(&mut self) -> PResult<Assert> {
        let name = self.expect_ident()?;
        if self.at_punct(Punct::LParen) {
            let call = self.call_args(name)?;
            Ok(Assert::Call(call))
        } else {
            Ok(Assert::Name(name))
        }
    }

    /// A lowercase keyword followed by `:=`, `.`, `[` or `^` at statement
    /// start is a variable, e.g. `state := 1`.
    fn lowercase_keyword_designator(&self) -> bool {
        self.peek().is_lowercase_keyword()
            && matches!(
                self.peek_at(1).kind,
                TokenKind::Punct(Punct::Assign | Punct::Dot | Punct::LBracket | Punct::Caret)
            )
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let t = self.peek();
        let loc = t.loc;
        let kw = match t.kind {
            TokenKind::Keyword(kw) if !self.lowercase_keyword_designator() => Some(kw),
            _ => None,
        };
        let kind = match kw {
            Some(Keyword::If) => {
                self.bump();
                let mut arms = Vec::new();
                let cond = self.expr()?;
                self.expect_kw(Keyword::Then)?;
                arms.push((cond, self.block()?));
                let mut otherwise = None;
                loop {
                    if self.eat_kw(Keyword::Elsif) {
                        let cond = self.expr()?;
                        self.expect_kw(Keyword::Then)?;
                        arms.push((cond, self.block()?));
                    } else if self.eat_kw(Keyword::Else) {
                        otherwise = Some(self.block()?);
                        self.expect_kw(Keyword::End)?;
                        break;
                    } else {
                        self.expect_kw(Keyword::End)?;
                        break;
                    }
                }
                StmtKind::If { arms, otherwise }
            }
            Some(Keyword::While) | Some(Keyword::Repeat) => {
                let guard = if self.eat_kw(Keyword::While) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect_kw(Keyword::Repeat)?;
                let count = self.expr()?;
                self.expect_kw(Keyword::Times)?;
                let body = self.block()?;
                self.expect_kw(Keyword::End)?;
                StmtKind::Loop { guard, count, body }
            }
            Some(Keyword::Return) => {
                self.bump();
                if self.at_block_end() || self.at_punct(Punct::Semi) {
                    StmtKind::Return(None)
                } else {
                    StmtKind::Return(Some(self.expr()?))
                }
            }
            Some(Keyword::Local) => {
                self.bump();
                let mut decls = Vec::new();
                loop {
                    let name = self.expect_ident()?;
                    self.expect_punct(Punct::Assign)?;
                    let init = self.expr()?;
                    let ty = if self.eat_punct(Punct::Colon) {
                        Some(self.ty()?)
                    } else {
                        None
                    };
                    decls.push(LocalDecl { name, init, ty });
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
                StmtKind::Local(decls)
            }
            Some(Keyword::External) => {
                self.bump();
                let mut decls = Vec::new();
                loop {
                    let name = self.expect_ident()?;
                    self.expect_punct(Punct::Assign)?;
                    let address = self.expr()?;
                    self.expect_punct(Punct::Colon)?;
                    let ty = self.ty()?;
                    decls.push(ExternalDecl { name, address, ty });
                    if !self.eat_punct(Punct::Comma) {
                        break;
                    }
                }
                StmtKind::External(decls)
            }
            Some(Keyword::State) => {
                self.bump();
                let mut ids = vec![self.expect_ident()?];
                while self.eat_punct(Punct::Comma) {
                    ids.push(self.expect_ident()?);
                }
                StmtKind::State(ids)
            }
            Some(Keyword::Import) => {
                self.bump();
                let mut imports = vec![self.import_spec()?];
                while self.eat_punct(Punct::Comma) {
                    imports.push(self.import_spec()?);
                }
                StmtKind::Import(imports)
            }
            Some(Keyword::Select) => {
                self.bump();
                let target = self.designator()?;
                self.expect_kw(Keyword::Of)?;
                let mut clauses = vec![self.clause()?];
                while self.eat_punct(Punct::Bar) {
                    clauses.push(self.clause()?);
                }
                self.expect_kw(Keyword::End)?;
                StmtKind::Select { target, clauses }
            }
            Some(Keyword::Log) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let s = self.peek();
                if s.kind != TokenKind::Str {
                    return Err(self.error(&["string"]));
                }
                self.bump();
                let value = if self.eat_punct(Punct::Comma) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect_punct(Punct::RParen)?;
                StmtKind::Log {
                    text: s.string_value().to_string(),
                    value,
                }
            }
            Some(Keyword::Next) => {
                self.bump();
                StmtKind::Next(self.expr()?)
            }
            Some(Keyword::Case) => {
                self.bump();
                let scrutinee = self.expr()?;
                self.expect_kw(Keyword::Of)?;
                let mut clauses = vec![self.clause()?];
                while self.eat_punct(Punct::Bar) {
                    clauses.push(self.clause()?);
                }
                let otherwise = if self.eat_kw(Keyword::Else) {
                    Some(self.block()?)
                } else {
                    None
                };
                self.expect_kw(Keyword::End)?;
                StmtKind::Case {
                    scrutinee,
                    clauses,
                    otherwise,
                }
            }
            _ if Self::ident_like(t) => {
                let target = self.designator()?;
                if self.eat_punct(Punct::Assign) {
                    let value = self.expr()?;
                    StmtKind::Assign { target, value }
                } else if let Some(call) = target.as_call() {
                    StmtKind::Call(call.clone())
                } else {
                    return Err(self.error(&["`:=`"]));
                }
            }
            _ => return Err(self.error(&["statement"])),
        };
        Ok(Stmt { kind, loc })
    }

    fn import_spec(&mut self) -> PResult<ImportSpec> {
        let alias = self.expect_ident()?;
        if !self.eat_punct(Punct::Assign) {
            return Ok(ImportSpec {
                module: alias.clone(),
                alias,
                selector: None,
                renamed: false,
            });
        }
        let module = self.expect_ident()?;
        let selector = if self.eat_punct(Punct::LBracket) {
            let sel = if self.eat_punct(Punct::Star) {
                ImportSelector::Corresponding
            } else {
                ImportSelector::Fixed(self.expr()?)
            };
            self.expect_punct(Punct::RBracket)?;
            Some(sel)
        } else {
            None
        };
        Ok(ImportSpec {
            alias,
            module,
            selector,
            renamed: true,
        })
    }

    fn clause(&mut self) -> PResult<Clause> {
        let loc = self.peek().loc;
        let mut labels = Vec::new();
        loop {
            let lo = self.expr()?;
            let hi = if self.eat_punct(Punct::DotDot) {
                Some(self.expr()?)
            } else {
                None
            };
            labels.push(Label { lo, hi });
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::Colon)?;
        let body = self.block()?;
        Ok(Clause { labels, body, loc })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.sum()?;
        let op = match self.peek().kind {
            TokenKind::Punct(Punct::Eq) => BinaryOp::Eq,
            TokenKind::Punct(Punct::Hash) => BinaryOp::Ne,
            TokenKind::Punct(Punct::Lt) => BinaryOp::Lt,
            TokenKind::Punct(Punct::Le) => BinaryOp::Le,
            TokenKind::Punct(Punct::Gt) => BinaryOp::Gt,
            TokenKind::Punct(Punct::Ge) => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        let loc = self.bump().loc;
        let rhs = self.sum()?;
        Ok(Expr::new(
            ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            loc,
        ))
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Punct(Punct::Plus) => BinaryOp::Add,
                TokenKind::Punct(Punct::Minus) => BinaryOp::Sub,
                TokenKind::Keyword(Keyword::Or) => BinaryOp::Or,
                TokenKind::Punct(Punct::BitOr) => BinaryOp::BitOr,
                TokenKind::Punct(Punct::BitXor) => BinaryOp::BitXor,
                _ => return Ok(lhs),
            };
            let loc = self.bump().loc;
            let rhs = self.term()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), loc);
        }
    }

    fn shift_op(&self) -> Option<BinaryOp> {
        match self.peek().kind {
            TokenKind::Punct(Punct::Shl) => Some(BinaryOp::Shl),
            TokenKind::Punct(Punct::Shr) => Some(BinaryOp::Shr),
            _ => None,
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let lhs = self.product()?;
        let Some(op) = self.shift_op() else {
            return Ok(lhs);
        };
        let loc = self.bump().loc;
        let rhs = self.product()?;
        if self.shift_op().is_some() {
            let t = self.peek();
            return Err(ParseError {
                loc: t.loc,
                expected: vec!["end of shift expression".to_string()],
                found: t.describe(),
                code: codes::PARSE,
                note: Some("shift operators do not associate; use parentheses".to_string()),
            });
        }
        Ok(Expr::new(
            ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            loc,
        ))
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Punct(Punct::Star) => BinaryOp::Mul,
                TokenKind::Punct(Punct::Slash) => BinaryOp::Div,
                TokenKind::Keyword(Keyword::Div) => BinaryOp::IntDiv,
                TokenKind::Keyword(Keyword::Mod) => BinaryOp::Mod,
                TokenKind::Keyword(Keyword::And) => BinaryOp::And,
                TokenKind::Punct(Punct::BitAnd) => BinaryOp::BitAnd,
                _ => return Ok(lhs),
            };
            let loc = self.bump().loc;
            let rhs = self.unary()?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), loc);
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let t = self.peek();
        let op = match t.kind {
            TokenKind::Punct(Punct::Plus) => UnaryOp::Plus,
            TokenKind::Punct(Punct::Minus) => UnaryOp::Neg,
            TokenKind::Punct(Punct::Tilde) => UnaryOp::BitNot,
            TokenKind::Keyword(Keyword::Not) => UnaryOp::Not,
            TokenKind::Keyword(Keyword::Size) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let ty = self.ty()?;
                self.expect_punct(Punct::RParen)?;
                return Ok(Expr::new(ExprKind::SizeOf(Box::new(ty)), t.loc));
            }
            _ => return self.factor(),
        };
        self.bump();
        let operand = self.factor()?;
        Ok(Expr::new(ExprKind::Unary(op, Box::new(operand)), t.loc))
    }

    fn factor(&mut self) -> PResult<Expr> {
        let t = self.peek();
        match t.kind {
            TokenKind::Int => {
                self.bump();
                Ok(Expr::new(ExprKind::Number(t.value), t.loc))
            }
            TokenKind::Keyword(Keyword::True) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(true), t.loc))
            }
            TokenKind::Keyword(Keyword::False) => {
                self.bump();
                Ok(Expr::new(ExprKind::Bool(false), t.loc))
            }
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(e)
            }
            _ if Self::ident_like(t) => {
                let d = self.designator()?;
                Ok(Expr::new(ExprKind::Designator(d), t.loc))
            }
            _ => Err(self.error(&["expression"])),
        }
    }

    fn call_args(&mut self, name: Ident) -> PResult<Call> {
        let loc = name.loc;
        self.expect_punct(Punct::LParen)?;
        let mut args = vec![self.expr()?];
        while self.eat_punct(Punct::Comma) {
            args.push(self.expr()?);
        }
        self.expect_punct(Punct::RParen)?;
        Ok(Call { name, args, loc })
    }

    fn designator(&mut self) -> PResult<Designator> {
        let name = self.expect_ident()?;
        let loc = name.loc;
        let root = if self.at_punct(Punct::LParen) {
            DesignatorRoot::Call(self.call_args(name)?)
        } else {
            DesignatorRoot::Name(name)
        };
        let mut selectors = Vec::new();
        loop {
            if self.eat_punct(Punct::Dot) {
                selectors.push(Selector::Field(self.expect_ident()?));
            } else if self.eat_punct(Punct::LBracket) {
                selectors.push(Selector::Index(self.expr()?));
                self.expect_punct(Punct::RBracket)?;
            } else if self.at_punct(Punct::Caret) {
                let t = self.bump();
                selectors.push(Selector::Deref(t.loc));
            } else {
                break;
            }
        }
        Ok(Designator {
            root,
            selectors,
            loc,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::tokenize;

    fn parse(src: &str) -> PResult<Unit> {
        parse_unit(&tokenize(src, 0).expect("lex"))
    }

    fn module_body(stmts: &str) -> Block {
        let src = format!("MODULE m; BEGIN {stmts} END m.");
        let unit = parse(&src).unwrap_or_else(|e| panic!("{e}: {src}"));
        match unit.toplevels.into_iter().next().unwrap() {
            Toplevel::Module(m) => m.body,
            _ => unreachable!(),
        }
    }

    fn expr(src: &str) -> Expr {
        let mut e = parse_expr(&tokenize(src, 0).unwrap()).unwrap();
        e.clear_locs();
        e
    }

    fn num(v: u64) -> Expr {
        Expr::new(ExprKind::Number(v), Loc::default())
    }

    fn bin(op: BinaryOp, a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Binary(op, Box::new(a), Box::new(b)), Loc::default())
    }

    #[test]
    fn module_skeleton() {
        let unit = parse(
            "MODULE name;
             VAR exported*: u32, listener*: port;
                    secret, unknown: u32;
             BEGIN
                 RETURN
             END name.",
        )
        .unwrap();
        let Toplevel::Module(m) = &unit.toplevels[0] else {
            panic!()
        };
        let names: Vec<_> = m
            .vars
            .iter()
            .flat_map(|v| v.names.iter())
            .map(|(id, ex)| (id.name.as_str(), *ex))
            .collect();
        assert_eq!(
            names,
            vec![
                ("exported", true),
                ("listener", true),
                ("secret", false),
                ("unknown", false)
            ]
        );
        assert!(!m.multi);
    }

    #[test]
    fn multi_instance_header() {
        let unit = parse("MODULE spw*; BEGIN ; END spw.").unwrap();
        let Toplevel::Module(m) = &unit.toplevels[0] else {
            panic!()
        };
        assert!(m.multi);
    }

    #[test]
    fn precedence_mul_over_add() {
        assert_eq!(
            expr("1 + 2 * 3"),
            bin(BinaryOp::Add, num(1), bin(BinaryOp::Mul, num(2), num(3)))
        );
    }

    #[test]
    fn additive_is_left_assoc() {
        assert_eq!(
            expr("1 - 2 - 3"),
            bin(BinaryOp::Sub, bin(BinaryOp::Sub, num(1), num(2)), num(3))
        );
    }

    #[test]
    fn shift_binds_tighter_than_add() {
        assert_eq!(
            expr("1 + 2 << 3"),
            bin(BinaryOp::Add, num(1), bin(BinaryOp::Shl, num(2), num(3)))
        );
    }

    #[test]
    fn shifts_do_not_chain() {
        let err = parse_expr(&tokenize("a << b << c", 0).unwrap()).unwrap_err();
        assert_eq!(err.code, codes::PARSE);
        assert!(parse_expr(&tokenize("(a << b) << c", 0).unwrap()).is_ok());
    }

    #[test]
    fn assignment_tree() {
        let b = module_body("x := 1 + 2 * 3");
        let StmtKind::Assign { target, value } = &b.stmts[0].kind else {
            panic!()
        };
        assert_eq!(target.as_name().unwrap().name, "x");
        let mut v = value.clone();
        v.clear_locs();
        assert_eq!(
            v,
            bin(BinaryOp::Add, num(1), bin(BinaryOp::Mul, num(2), num(3)))
        );
    }

    #[test]
    fn minimal_if() {
        let b = module_body("IF x THEN RETURN END");
        let StmtKind::If { arms, otherwise } = &b.stmts[0].kind else {
            panic!()
        };
        assert_eq!(arms.len(), 1);
        assert!(otherwise.is_none());
        assert!(matches!(arms[0].1.stmts[0].kind, StmtKind::Return(None)));
    }

    #[test]
    fn elsif_carries_condition() {
        let b = module_body("IF a THEN x := 1 ELSIF b THEN x := 2 ELSE x := 3 END");
        let StmtKind::If { arms, otherwise } = &b.stmts[0].kind else {
            panic!()
        };
        assert_eq!(arms.len(), 2);
        assert!(otherwise.is_some());
        assert!(parse("MODULE m; BEGIN IF a THEN x := 1 ELSIF x := 2 END END m.").is_err());
    }

    #[test]
    fn zero_argument_call_rejected() {
        assert!(parse("MODULE m; BEGIN f() END m.").is_err());
    }

    #[test]
    fn repeat_requires_times() {
        assert!(parse("MODULE m; BEGIN REPEAT 3 x := 1 END END m.").is_err());
        assert!(parse("MODULE m; BEGIN WHILE b REPEAT 3 TIMES x := 1 END END m.").is_ok());
    }

    #[test]
    fn select_requires_clause() {
        assert!(parse("MODULE m; BEGIN SELECT s OF END END m.").is_err());
    }

    #[test]
    fn checks_only_at_block_start() {
        assert!(parse("MODULE m; BEGIN REQUIRE c; x := 1 END m.").is_ok());
        let err = parse("MODULE m; BEGIN x := 1; REQUIRE c END m.").unwrap_err();
        assert_eq!(err.code, codes::CHECK_POSITION);
    }

    #[test]
    fn mismatched_module_end() {
        let err = parse("MODULE a; BEGIN ; END b.").unwrap_err();
        assert_eq!(err.code, codes::MODULE_NAME);
    }

    #[test]
    fn lowercase_keyword_as_module_alias() {
        let b = module_body("IMPORT mod0 := mod[0]; IMPORT mod := mod[*]; SEND(msg, mod.port)");
        assert_eq!(b.stmts.len(), 3);
        let StmtKind::Import(imports) = &b.stmts[1].kind else {
            panic!()
        };
        assert_eq!(imports[0].alias.name, "mod");
        assert_eq!(imports[0].selector, Some(ImportSelector::Corresponding));
    }

    #[test]
    fn lowercase_keywords_still_keywords() {
        let b = module_body("if a then x := a mod 2 end");
        let StmtKind::If { arms, .. } = &b.stmts[0].kind else {
            panic!()
        };
        let StmtKind::Assign { value, .. } = &arms[0].1.stmts[0].kind else {
            panic!()
        };
        assert!(matches!(value.kind, ExprKind::Binary(BinaryOp::Mod, _, _)));
    }

    #[test]
    fn empty_statements_and_bodies() {
        assert!(parse("PROCEDURE p(x: s32) BEGIN ; END; MODULE m; BEGIN ; END m.").is_ok());
        assert!(parse("MODULE m; BEGIN END m.").is_err());
        assert!(parse("MODULE m; BEGIN IF TRUE THEN END END m.").is_err());
        assert!(parse("CONTRACT c BEGIN return TRUE END;").is_ok());
    }

    #[test]
    fn procedure_requires_params() {
        assert!(parse("PROCEDURE p BEGIN END;").is_err());
    }

    #[test]
    fn expected_set_nonempty() {
        let err = parse("MODULE").unwrap_err();
        assert!(!err.expected.is_empty());
        assert_eq!(err.found, "end of file");
    }

    #[test]
    fn case_with_ranges_and_else() {
        let b = module_body("CASE x OF 1, 3..5: y := 1 | 6: y := 2 ELSE y := 0 END");
        let StmtKind::Case {
            clauses, otherwise, ..
        } = &b.stmts[0].kind
        else {
            panic!()
        };
        assert_eq!(clauses.len(), 2);
        assert_eq!(clauses[0].labels.len(), 2);
        assert!(clauses[0].labels[1].hi.is_some());
        assert!(otherwise.is_some());
    }

    #[test]
    fn designator_selectors() {
        let b = module_body("DATA(p)[3] := r.a[i]^.b");
        let StmtKind::Assign { target, value } = &b.stmts[0].kind else {
            panic!()
        };
        assert!(matches!(target.root, DesignatorRoot::Call(_)));
        assert_eq!(target.selectors.len(), 1);
        let ExprKind::Designator(d) = &value.kind else {
            panic!()
        };
        assert_eq!(d.selectors.len(), 4);
    }
}
