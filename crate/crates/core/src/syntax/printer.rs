//! Renders a syntax tree back to hO source text.
//!
//! Parentheses are inserted only where the operator levels require them, so
//! `parse(print(ast))` reproduces `ast` up to source locations.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "    ";

pub fn print_unit(unit: &Unit) -> String {
    let mut p = Printer::default();
    for (i, top) in unit.toplevels.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        p.toplevel(top);
    }
    p.out
}

pub fn print_expr(e: &Expr) -> String {
    let mut p = Printer::default();
    p.expr(e);
    p.out
}

pub fn print_type(t: &TypeExpr) -> String {
    let mut p = Printer::default();
    p.ty(t);
    p.out
}

#[derive(Default)]
struct Printer {
    out: String,
    depth: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn toplevel(&mut self, top: &Toplevel) {
        match top {
            Toplevel::Types(defs, _) => {
                self.line("TYPE");
                self.depth += 1;
                for d in defs {
                    let text = format!("{} = {};", d.name.name, type_text(&d.ty));
                    self.line(&text);
                }
                self.depth -= 1;
            }
            Toplevel::Consts(defs, _) => {
                self.line("CONST");
                self.depth += 1;
                for d in defs {
                    let text = format!("{} = {};", d.name.name, print_expr(&d.value));
                    self.line(&text);
                }
                self.depth -= 1;
            }
            Toplevel::Include(inc) => self.line(&format!("INCLUDE \"{}\";", inc.path)),
            Toplevel::Procedure(p) => {
                self.procedure(p);
            }
            Toplevel::Contract(c) => {
                let mut head = format!("CONTRACT {}", c.name.name);
                if let Some(params) = &c.params {
                    head.push_str(&params_text(params));
                }
                self.line(&head);
                self.line("BEGIN");
                self.body(&c.body);
                self.line("END;");
            }
            Toplevel::Module(m) => self.module(m),
        }
    }

    fn procedure(&mut self, p: &Procedure) {
        let mut head = format!("PROCEDURE {}{}", p.name.name, params_text(&p.params));
        if let Some(ret) = &p.ret {
            let _ = write!(head, ": {}", type_text(ret));
        }
        self.line(&head);
        self.line("BEGIN");
        self.body(&p.body);
        self.line("END;");
    }

    fn module(&mut self, m: &Module) {
        self.line(&format!(
            "MODULE {}{};",
            m.name.name,
            if m.multi { "*" } else { "" }
        ));
        for (i, v) in m.vars.iter().enumerate() {
            let names: Vec<String> = v
                .names
                .iter()
                .map(|(id, ex)| format!("{}{}", id.name, if *ex { "*" } else { "" }))
                .collect();
            let decl = format!("{}: {};", names.join(", "), type_text(&v.ty));
            if i == 0 {
                self.line(&format!("VAR {decl}"));
            } else {
                self.line(&format!("{INDENT}{decl}"));
            }
        }
        for p in &m.procedures {
            self.procedure(p);
        }
        self.line("BEGIN");
        self.body(&m.body);
        self.line(&format!("END {}.", m.name.name));
    }

    fn body(&mut self, b: &Block) {
        self.depth += 1;
        self.block(b);
        self.depth -= 1;
    }

    fn block(&mut self, b: &Block) {
        for c in &b.checks {
            let asserts: Vec<String> = c
                .asserts
                .iter()
                .map(|a| match a {
                    Assert::Call(call) => call_text(call),
                    Assert::Name(id) => id.name.clone(),
                })
                .collect();
            self.line(&format!("{} {};", c.kind.keyword(), asserts.join(", ")));
        }
        let n = b.stmts.len();
        if n == 0 && b.checks.is_empty() {
            self.line(";");
        }
        for (i, s) in b.stmts.iter().enumerate() {
            self.stmt(s, i + 1 < n);
        }
    }

    fn stmt(&mut self, s: &Stmt, more: bool) {
        let semi = if more { ";" } else { "" };
        match &s.kind {
            StmtKind::If { arms, otherwise } => {
                for (i, (cond, body)) in arms.iter().enumerate() {
                    let kw = if i == 0 { "IF" } else { "ELSIF" };
                    self.line(&format!("{kw} {} THEN", print_expr(cond)));
                    self.body(body);
                }
                if let Some(b) = otherwise {
                    self.line("ELSE");
                    self.body(b);
                }
                self.line(&format!("END{semi}"));
            }
            StmtKind::Loop { guard, count, body } => {
                let mut head = String::new();
                if let Some(g) = guard {
                    let _ = write!(head, "WHILE {} ", print_expr(g));
                }
                let _ = write!(head, "REPEAT {} TIMES", print_expr(count));
                self.line(&head);
                self.body(body);
                self.line(&format!("END{semi}"));
            }
            StmtKind::Return(None) => self.line(&format!("RETURN{semi}")),
            StmtKind::Return(Some(e)) => self.line(&format!("RETURN {}{semi}", print_expr(e))),
            StmtKind::Call(c) => self.line(&format!("{}{semi}", call_text(c))),
            StmtKind::Local(decls) => {
                let parts: Vec<String> = decls
                    .iter()
                    .map(|d| {
                        let mut t = format!("{} := {}", d.name.name, print_expr(&d.init));
                        if let Some(ty) = &d.ty {
                            let _ = write!(t, ": {}", type_text(ty));
                        }
                        t
                    })
                    .collect();
                self.line(&format!("LOCAL {}{semi}", parts.join(", ")));
            }
            StmtKind::External(decls) => {
                let parts: Vec<String> = decls
                    .iter()
                    .map(|d| {
                        format!(
                            "{} := {}: {}",
                            d.name.name,
                            print_expr(&d.address),
                            type_text(&d.ty)
                        )
                    })
                    .collect();
                self.line(&format!("EXTERNAL {}{semi}", parts.join(", ")));
            }
            StmtKind::State(ids) => {
                let names: Vec<&str> = ids.iter().map(|i| i.name.as_str()).collect();
                self.line(&format!("STATE {}{semi}", names.join(", ")));
            }
            StmtKind::Import(imports) => {
                let parts: Vec<String> = imports.iter().map(import_text).collect();
                self.line(&format!("IMPORT {}{semi}", parts.join(", ")));
            }
            StmtKind::Select { target, clauses } => {
                self.line(&format!("SELECT {} OF", designator_text(target)));
                self.clauses(clauses);
                self.line(&format!("END{semi}"));
            }
            StmtKind::Log { text, value } => match value {
                Some(v) => self.line(&format!("LOG(\"{text}\", {}){semi}", print_expr(v))),
                None => self.line(&format!("LOG(\"{text}\"){semi}")),
            },
            StmtKind::Next(e) => self.line(&format!("NEXT {}{semi}", print_expr(e))),
            StmtKind::Case {
                scrutinee,
                clauses,
                otherwise,
            } => {
                self.line(&format!("CASE {} OF", print_expr(scrutinee)));
                self.clauses(clauses);
                if let Some(b) = otherwise {
                    self.line("ELSE");
                    self.body(b);
                }
                self.line(&format!("END{semi}"));
            }
            StmtKind::Assign { target, value } => self.line(&format!(
                "{} := {}{semi}",
                designator_text(target),
                print_expr(value)
            )),
        }
    }

    fn clauses(&mut self, clauses: &[Clause]) {
        for (i, c) in clauses.iter().enumerate() {
            let labels: Vec<String> = c
                .labels
                .iter()
                .map(|l| match &l.hi {
                    Some(hi) => format!("{}..{}", print_expr(&l.lo), print_expr(hi)),
                    None => print_expr(&l.lo),
                })
                .collect();
            let bar = if i == 0 { "  " } else { "| " };
            self.line(&format!("{bar}{}:", labels.join(", ")));
            self.depth += 1;
            self.body(&c.body);
            self.depth -= 1;
        }
    }

    fn ty(&mut self, t: &TypeExpr) {
        self.out.push_str(&type_text(t));
    }

    fn expr(&mut self, e: &Expr) {
        self.out.push_str(&expr_text(e));
    }
}

fn import_text(s: &ImportSpec) -> String {
    if !s.renamed {
        return s.module.name.clone();
    }
    let mut t = format!("{} := {}", s.alias.name, s.module.name);
    match &s.selector {
        Some(ImportSelector::Corresponding) => t.push_str("[*]"),
        Some(ImportSelector::Fixed(e)) => {
            let _ = write!(t, "[{}]", expr_text(e));
        }
        None => {}
    }
    t
}

fn params_text(params: &[Param]) -> String {
    let parts: Vec<String> = params
        .iter()
        .map(|p| {
            let names: Vec<&str> = p.names.iter().map(|n| n.name.as_str()).collect();
            format!(
                "{}{}: {}",
                if p.by_ref { "VAR " } else { "" },
                names.join(", "),
                type_text(&p.ty)
            )
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// Surface syntax of a type, single-spaced.
pub fn type_text(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Named(id) => id.name.clone(),
        TypeExpr::Record(fields, _) => {
            let parts: Vec<String> = fields
                .iter()
                .map(|f| {
                    let names: Vec<&str> = f.names.iter().map(|n| n.name.as_str()).collect();
                    format!("{}: {}", names.join(", "), type_text(&f.ty))
                })
                .collect();
            if parts.is_empty() {
                "RECORD END".to_string()
            } else {
                format!("RECORD {} END", parts.join("; "))
            }
        }
        TypeExpr::Pointer { volatile, to, .. } => format!(
            "{}POINTER TO {}",
            if *volatile { "VOLATILE " } else { "" },
            type_text(to)
        ),
        TypeExpr::Array { len, elem, .. } => {
            format!("ARRAY {} OF {}", expr_text(len), type_text(elem))
        }
    }
}

fn call_text(c: &Call) -> String {
    let args: Vec<String> = c.args.iter().map(expr_text).collect();
    format!("{}({})", c.name.name, args.join(", "))
}

fn designator_text(d: &Designator) -> String {
    let mut t = match &d.root {
        DesignatorRoot::Name(id) => id.name.clone(),
        DesignatorRoot::Call(c) => call_text(c),
    };
    for s in &d.selectors {
        match s {
            Selector::Field(id) => {
                t.push('.');
                t.push_str(&id.name);
            }
            Selector::Index(e) => {
                let _ = write!(t, "[{}]", expr_text(e));
            }
            Selector::Deref(_) => t.push('^'),
        }
    }
    t
}

// Levels 0..=3 are the binary operator levels; 4 is unary, 5 a factor.
fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary(op, ..) => op.precedence() as u8,
        ExprKind::Unary(..) | ExprKind::SizeOf(_) => 4,
        _ => 5,
    }
}

fn expr_text(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Number(v) => v.to_string(),
        ExprKind::Bool(true) => "TRUE".to_string(),
        ExprKind::Bool(false) => "FALSE".to_string(),
        ExprKind::Designator(d) => designator_text(d),
        ExprKind::SizeOf(t) => format!("SIZE({})", type_text(t)),
        ExprKind::Unary(op, operand) => {
            let inner = if level(operand) < 5 {
                format!("({})", expr_text(operand))
            } else {
                expr_text(operand)
            };
            match op {
                UnaryOp::Not => format!("NOT {inner}"),
                _ => format!("{}{inner}", op.symbol()),
            }
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let me = op.precedence() as u8;
            let chains = matches!(
                op.precedence(),
                Precedence::Additive | Precedence::Multiplicative
            );
            let left_needs = level(lhs) < me || (!chains && level(lhs) == me);
            let right_needs = level(rhs) <= me;
            let wrap = |needs: bool, x: &Expr| {
                if needs {
                    format!("({})", expr_text(x))
                } else {
                    expr_text(x)
                }
            };
            format!(
                "{} {} {}",
                wrap(left_needs, lhs),
                op.symbol(),
                wrap(right_needs, rhs)
            )
        }
    }
}
