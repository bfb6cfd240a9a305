//! Deterministic canonical rendering of syntax trees back to source text.
//!
//! The canonical style is fixed (4-space indents, single-space operators, one
//! statement per line) so that diffs between two renderings isolate real tree
//! edits. `RenderStyle` exists for the reformat attack, which must produce an
//! identical parse tree under different surface formatting.

use super::ast::*;

#[derive(Debug, Clone)]
pub struct RenderStyle {
    /// One level of indentation.
    pub indent: String,
    /// Omit spaces around binary operators and after commas.
    pub tight: bool,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            indent: "    ".to_string(),
            tight: false,
        }
    }
}

pub fn render(module: &Module) -> String {
    render_with_style(module, &RenderStyle::default())
}

pub fn render_with_style(module: &Module, style: &RenderStyle) -> String {
    let mut r = Renderer {
        out: String::new(),
        style,
    };
    for stmt in &module.body {
        r.stmt(stmt, 0);
    }
    for t in &module.trailing {
        r.trivia(t, 0);
    }
    r.out
}

struct Renderer<'a> {
    out: String,
    style: &'a RenderStyle,
}

impl Renderer<'_> {
    fn indent(&mut self, level: usize) {
        for _ in 0..level {
            self.out.push_str(&self.style.indent);
        }
    }

    fn trivia(&mut self, t: &Trivia, level: usize) {
        match t {
            Trivia::Blank => self.out.push('\n'),
            Trivia::Comment(text) => {
                self.indent(level);
                if text.is_empty() {
                    self.out.push_str("#\n");
                } else {
                    self.out.push_str("# ");
                    self.out.push_str(text);
                    self.out.push('\n');
                }
            }
        }
    }

    fn end_line(&mut self, trailing: &Option<String>) {
        if let Some(text) = trailing {
            if text.is_empty() {
                self.out.push_str("  #");
            } else {
                self.out.push_str("  # ");
                self.out.push_str(text);
            }
        }
        self.out.push('\n');
    }

    fn stmt(&mut self, stmt: &Stmt, level: usize) {
        for t in &stmt.leading {
            self.trivia(t, level);
        }
        match &stmt.kind {
            StmtKind::FunctionDef { name, params, body } => {
                self.indent(level);
                self.out.push_str("def ");
                self.out.push_str(name);
                self.out.push('(');
                for (i, p) in params.iter().enumerate() {
                    if i > 0 {
                        self.comma();
                    }
                    self.out.push_str(p);
                }
                self.out.push_str("):");
                self.end_line(&stmt.trailing_comment);
                self.block(body, level + 1);
            }
            StmtKind::If { test, body, orelse } => {
                self.if_chain(stmt, test, body, orelse, level, "if");
            }
            StmtKind::While { test, body } => {
                self.indent(level);
                self.out.push_str("while ");
                self.out.push_str(&expr_str(test, 0, self.style.tight));
                self.out.push(':');
                self.end_line(&stmt.trailing_comment);
                self.block(body, level + 1);
            }
            StmtKind::For { target, iter, body } => {
                self.indent(level);
                self.out.push_str("for ");
                self.out.push_str(&bare_str(target, self.style.tight));
                self.out.push_str(" in ");
                self.out.push_str(&bare_str(iter, self.style.tight));
                self.out.push(':');
                self.end_line(&stmt.trailing_comment);
                self.block(body, level + 1);
            }
            StmtKind::Return(value) => {
                self.indent(level);
                self.out.push_str("return");
                if let Some(v) = value {
                    self.out.push(' ');
                    self.out.push_str(&bare_str(v, self.style.tight));
                }
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Assign { targets, value } => {
                self.indent(level);
                for t in targets {
                    self.out.push_str(&bare_str(t, self.style.tight));
                    self.out.push_str(if self.style.tight { "=" } else { " = " });
                }
                self.out.push_str(&bare_str(value, self.style.tight));
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::AugAssign { target, op, value } => {
                self.indent(level);
                self.out.push_str(&bare_str(target, self.style.tight));
                if self.style.tight {
                    self.out.push_str(op.symbol());
                    self.out.push('=');
                } else {
                    self.out.push(' ');
                    self.out.push_str(op.symbol());
                    self.out.push_str("= ");
                }
                self.out.push_str(&bare_str(value, self.style.tight));
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Assert { test, msg } => {
                self.indent(level);
                self.out.push_str("assert ");
                self.out.push_str(&expr_str(test, 0, self.style.tight));
                if let Some(m) = msg {
                    self.comma();
                    self.out.push_str(&expr_str(m, 0, self.style.tight));
                }
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Expr(e) => {
                self.indent(level);
                self.out.push_str(&bare_str(e, self.style.tight));
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Pass => {
                self.indent(level);
                self.out.push_str("pass");
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Break => {
                self.indent(level);
                self.out.push_str("break");
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Continue => {
                self.indent(level);
                self.out.push_str("continue");
                self.end_line(&stmt.trailing_comment);
            }
            StmtKind::Import(raw) => {
                self.indent(level);
                self.out.push_str(raw);
                self.end_line(&stmt.trailing_comment);
            }
        }
    }

    fn comma(&mut self) {
        self.out.push_str(if self.style.tight { "," } else { ", " });
    }

    fn if_chain(
        &mut self,
        stmt: &Stmt,
        test: &Expr,
        body: &[Stmt],
        orelse: &[Stmt],
        level: usize,
        keyword: &str,
    ) {
        self.indent(level);
        self.out.push_str(keyword);
        self.out.push(' ');
        self.out.push_str(&expr_str(test, 0, self.style.tight));
        self.out.push(':');
        self.end_line(&stmt.trailing_comment);
        self.block(body, level + 1);
        if orelse.is_empty() {
            return;
        }
        // An else consisting of a single trivia-free if renders as elif.
        if orelse.len() == 1 {
            if let StmtKind::If {
                test: t2,
                body: b2,
                orelse: o2,
            } = &orelse[0].kind
            {
                if orelse[0].leading.is_empty() {
                    self.if_chain(&orelse[0], t2, b2, o2, level, "elif");
                    return;
                }
            }
        }
        self.indent(level);
        self.out.push_str("else:\n");
        self.block(orelse, level + 1);
    }

    fn block(&mut self, body: &[Stmt], level: usize) {
        if body.is_empty() {
            self.indent(level);
            self.out.push_str("pass\n");
            return;
        }
        for stmt in body {
            self.stmt(stmt, level);
        }
    }
}

/// Renders an expression; a top-level tuple is written without parentheses.
fn bare_str(e: &Expr, tight: bool) -> String {
    match e {
        Expr::Tuple(items) if !items.is_empty() => {
            let sep = if tight { "," } else { ", " };
            let mut s = items
                .iter()
                .map(|it| expr_str(it, 0, tight))
                .collect::<Vec<_>>()
                .join(sep);
            if items.len() == 1 {
                s.push(',');
            }
            s
        }
        _ => expr_str(e, 0, tight),
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::BoolOp {
            op: BoolOpKind::Or, ..
        } => 1,
        Expr::BoolOp {
            op: BoolOpKind::And,
            ..
        } => 2,
        Expr::UnaryOp {
            op: UnaryOpKind::Not,
            ..
        } => 3,
        Expr::Compare { .. } => 4,
        Expr::BinOp { op, .. } => match op {
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::FloorDiv | BinOp::Mod => 6,
            BinOp::Pow => 8,
        },
        Expr::UnaryOp { .. } => 7,
        Expr::Call { .. } | Expr::Attribute { .. } | Expr::Subscript { .. } => 9,
        _ => 10,
    }
}

pub(crate) fn expr_str(e: &Expr, min_prec: u8, tight: bool) -> String {
    let p = prec(e);
    let sep = if tight { "," } else { ", " };
    let body = match e {
        Expr::Name(n) => n.clone(),
        Expr::Num(n) => n.clone(),
        Expr::Str(s) => s.clone(),
        Expr::Bool(true) => "True".to_string(),
        Expr::Bool(false) => "False".to_string(),
        Expr::NoneLit => "None".to_string(),
        Expr::Tuple(items) => {
            if items.is_empty() {
                "()".to_string()
            } else if items.len() == 1 {
                format!("({},)", expr_str(&items[0], 0, tight))
            } else {
                format!(
                    "({})",
                    items
                        .iter()
                        .map(|it| expr_str(it, 0, tight))
                        .collect::<Vec<_>>()
                        .join(sep)
                )
            }
        }
        Expr::List(items) => format!(
            "[{}]",
            items
                .iter()
                .map(|it| expr_str(it, 0, tight))
                .collect::<Vec<_>>()
                .join(sep)
        ),
        Expr::Dict(pairs) => {
            let inner = pairs
                .iter()
                .map(|(k, v)| {
                    format!(
                        "{}{}{}",
                        expr_str(k, 0, tight),
                        if tight { ":" } else { ": " },
                        expr_str(v, 0, tight)
                    )
                })
                .collect::<Vec<_>>()
                .join(sep);
            format!("{{{inner}}}")
        }
        Expr::BinOp { left, op, right } => {
            let (lp, rp) = match op {
                BinOp::Pow => (9, 7),
                BinOp::Add | BinOp::Sub => (5, 6),
                _ => (6, 7),
            };
            let sym = op.symbol();
            if tight {
                format!("{}{}{}", expr_str(left, lp, tight), sym, expr_str(right, rp, tight))
            } else {
                format!(
                    "{} {} {}",
                    expr_str(left, lp, tight),
                    sym,
                    expr_str(right, rp, tight)
                )
            }
        }
        Expr::UnaryOp { op, operand } => match op {
            UnaryOpKind::Not => format!("not {}", expr_str(operand, 3, tight)),
            UnaryOpKind::Neg => format!("-{}", expr_str(operand, 7, tight)),
            UnaryOpKind::Pos => format!("+{}", expr_str(operand, 7, tight)),
        },
        Expr::BoolOp { op, values } => {
            let kw = match op {
                BoolOpKind::And => " and ",
                BoolOpKind::Or => " or ",
            };
            values
                .iter()
                .map(|v| expr_str(v, p + 1, tight))
                .collect::<Vec<_>>()
                .join(kw)
        }
        Expr::Compare {
            left,
            ops,
            comparators,
        } => {
            let mut s = expr_str(left, 5, tight);
            for (op, c) in ops.iter().zip(comparators) {
                s.push(' ');
                s.push_str(op.symbol());
                s.push(' ');
                s.push_str(&expr_str(c, 5, tight));
            }
            s
        }
        Expr::Call { func, args, kwargs } => {
            let mut parts: Vec<String> = args.iter().map(|a| expr_str(a, 0, tight)).collect();
            for (name, v) in kwargs {
                parts.push(format!("{name}={}", expr_str(v, 0, tight)));
            }
            format!("{}({})", expr_str(func, 9, tight), parts.join(sep))
        }
        Expr::Attribute { value, attr } => {
            format!("{}.{}", expr_str(value, 9, tight), attr)
        }
        Expr::Subscript { value, index } => {
            format!(
                "{}[{}]",
                expr_str(value, 9, tight),
                expr_str(index, 0, tight)
            )
        }
        Expr::Slice { lower, upper } => {
            format!(
                "{}:{}",
                lower
                    .as_ref()
                    .map(|e| expr_str(e, 0, tight))
                    .unwrap_or_default(),
                upper
                    .as_ref()
                    .map(|e| expr_str(e, 0, tight))
                    .unwrap_or_default()
            )
        }
        Expr::ListComp {
            elt,
            target,
            iter,
            cond,
        } => {
            let mut s = format!(
                "[{} for {} in {}",
                expr_str(elt, 0, tight),
                bare_str(target, tight),
                expr_str(iter, 0, tight)
            );
            if let Some(c) = cond {
                s.push_str(" if ");
                s.push_str(&expr_str(c, 0, tight));
            }
            s.push(']');
            s
        }
    };
    if p < min_prec {
        format!("({body})")
    } else {
        body
    }
}
