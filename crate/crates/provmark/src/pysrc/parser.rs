//! Recursive-descent parser producing the canonical syntax tree.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

pub fn parse_module(source: &str) -> Result<Module, ParseError> {
    let toks = tokenize(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        pending: Vec::new(),
    };
    p.module()
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Trivia waiting to be attached to the next statement.
    pending: Vec<Trivia>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].kind
    }

    fn peek2(&self) -> &Tok {
        if self.pos + 1 < self.toks.len() {
            &self.toks[self.pos + 1].kind
        } else {
            &self.toks[self.toks.len() - 1].kind
        }
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError {
            line,
            column,
            message: msg.into(),
        })
    }

    fn expect_op(&mut self, op: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Op(o) if *o == op => {
                self.bump();
                Ok(())
            }
            other => self.error(format!("expected {op:?}, found {other:?}")),
        }
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn collect_trivia(&mut self) {
        loop {
            match self.peek() {
                Tok::BlankLine => {
                    self.pending.push(Trivia::Blank);
                    self.bump();
                }
                Tok::CommentLine(text) => {
                    let text = text.clone();
                    self.pending.push(Trivia::Comment(text));
                    self.bump();
                }
                _ => break,
            }
        }
    }

    fn module(&mut self) -> Result<Module, ParseError> {
        let mut body = Vec::new();
        loop {
            self.collect_trivia();
            if matches!(self.peek(), Tok::Eof) {
                break;
            }
            body.extend(self.statement_line()?);
        }
        Ok(Module {
            body,
            trailing: std::mem::take(&mut self.pending),
        })
    }

    /// One logical source line: a compound statement, or `;`-separated
    /// simple statements. Pending trivia attaches to the first statement.
    fn statement_line(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let leading = std::mem::take(&mut self.pending);
        let mut stmts = if self.is_compound_start() {
            vec![self.compound_stmt()?]
        } else {
            let mut out = vec![self.simple_stmt()?];
            while self.at_op(";") {
                self.bump();
                if matches!(self.peek(), Tok::Newline | Tok::TrailingComment(_)) {
                    break;
                }
                out.push(self.simple_stmt()?);
            }
            if let Tok::TrailingComment(text) = self.peek() {
                let text = text.clone();
                self.bump();
                out.last_mut().unwrap().trailing_comment = Some(text);
            }
            match self.peek() {
                Tok::Newline => {
                    self.bump();
                }
                Tok::Eof | Tok::Dedent => {}
                other => return self.error(format!("unexpected {other:?} after statement")),
            }
            out
        };
        stmts.first_mut().unwrap().leading = leading;
        Ok(stmts)
    }

    fn is_compound_start(&self) -> bool {
        matches!(self.peek(), Tok::Name(n) if matches!(n.as_str(), "def" | "if" | "while" | "for"))
    }

    fn compound_stmt(&mut self) -> Result<Stmt, ParseError> {
        let (start_line, start_col) = self.here();
        let kw = match self.peek() {
            Tok::Name(n) => n.clone(),
            _ => unreachable!(),
        };
        self.bump();
        match kw.as_str() {
            "def" => {
                let name = self.name_token()?;
                self.expect_op("(")?;
                let mut params = Vec::new();
                while !self.at_op(")") {
                    params.push(self.name_token()?);
                    if self.at_op(",") {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_op(")")?;
                let (body, tc) = self.suite()?;
                return Ok(self.finish_stmt(
                    StmtKind::FunctionDef { name, params, body },
                    tc,
                    start_line,
                    start_col,
                ));
            }
            "if" => {
                let test = self.expr()?;
                let (body, tc) = self.suite()?;
                let orelse = self.else_clause()?;
                return Ok(self.finish_stmt(
                    StmtKind::If { test, body, orelse },
                    tc,
                    start_line,
                    start_col,
                ));
            }
            "while" => {
                let test = self.expr()?;
                let (body, tc) = self.suite()?;
                return Ok(self.finish_stmt(
                    StmtKind::While { test, body },
                    tc,
                    start_line,
                    start_col,
                ));
            }
            "for" => {
                let target = self.target_list()?;
                if !self.eat_kw("in") {
                    return self.error("expected 'in' in for statement");
                }
                let iter = self.expr_list()?;
                let (body, tc) = self.suite()?;
                Ok(self.finish_stmt(
                    StmtKind::For { target, iter, body },
                    tc,
                    start_line,
                    start_col,
                ))
            }
            _ => unreachable!(),
        }
    }

    fn finish_stmt(
        &mut self,
        kind: StmtKind,
        trailing_comment: Option<String>,
        start_line: u32,
        start_col: u32,
    ) -> Stmt {
        let prev = &self.toks[self.pos.saturating_sub(1)];
        Stmt {
            leading: Vec::new(),
            kind,
            trailing_comment,
            span: Span {
                start_line,
                start_col,
                end_line: prev.line,
                end_col: prev.col,
            },
        }
    }

    /// `elif` chains become a nested `If` inside `orelse`.
    fn else_clause(&mut self) -> Result<Vec<Stmt>, ParseError> {
        let checkpoint = self.pos;
        let saved_pending = self.pending.len();
        self.collect_trivia();
        if self.at_kw("elif") {
            let trivia: Vec<Trivia> = self.pending.drain(saved_pending..).collect();
            let (start_line, start_col) = self.here();
            self.bump();
            let test = self.expr()?;
            let (body, tc) = self.suite()?;
            let orelse = self.else_clause()?;
            let mut stmt =
                self.finish_stmt(StmtKind::If { test, body, orelse }, tc, start_line, start_col);
            stmt.leading = trivia;
            return Ok(vec![stmt]);
        }
        if self.at_kw("else") {
            let trivia: Vec<Trivia> = self.pending.drain(saved_pending..).collect();
            self.bump();
            let (mut body, _tc) = self.suite()?;
            if let Some(first) = body.first_mut() {
                let mut lead = trivia;
                lead.append(&mut first.leading);
                first.leading = lead;
            }
            return Ok(body);
        }
        // Not an else/elif: rewind so trivia attaches to whatever follows.
        self.pos = checkpoint;
        self.pending.truncate(saved_pending);
        Ok(Vec::new())
    }

    /// Parses `: suite`, returning the body and any trailing comment on the
    /// header line.
    fn suite(&mut self) -> Result<(Vec<Stmt>, Option<String>), ParseError> {
        self.expect_op(":")?;
        let mut header_comment = None;
        if let Tok::TrailingComment(text) = self.peek() {
            header_comment = Some(text.clone());
            self.bump();
        }
        if matches!(self.peek(), Tok::Newline) {
            self.bump();
            self.collect_trivia();
            if !matches!(self.peek(), Tok::Indent) {
                return self.error("expected an indented block");
            }
            self.bump();
            let mut body = Vec::new();
            loop {
                self.collect_trivia();
                match self.peek() {
                    Tok::Dedent => {
                        self.bump();
                        break;
                    }
                    Tok::Eof => break,
                    _ => body.extend(self.statement_line()?),
                }
            }
            // Trivia left over at the dedent flows to the next statement.
            Ok((body, header_comment))
        } else {
            // Inline suite: simple statements on the header line.
            let mut body = vec![self.simple_stmt()?];
            while self.at_op(";") {
                self.bump();
                if matches!(self.peek(), Tok::Newline | Tok::TrailingComment(_)) {
                    break;
                }
                body.push(self.simple_stmt()?);
            }
            if let Tok::TrailingComment(text) = self.peek() {
                header_comment = Some(text.clone());
                self.bump();
            }
            match self.peek() {
                Tok::Newline => {
                    self.bump();
                }
                Tok::Eof | Tok::Dedent => {}
                other => return self.error(format!("unexpected {other:?} after inline suite")),
            }
            Ok((body, header_comment))
        }
    }

    fn simple_stmt(&mut self) -> Result<Stmt, ParseError> {
        let (start_line, start_col) = self.here();
        if let Tok::Name(n) = self.peek() {
            match n.as_str() {
                "return" => {
                    self.bump();
                    let value = if self.at_stmt_end() {
                        None
                    } else {
                        Some(self.expr_list()?)
                    };
                    return Ok(self.finish_stmt(StmtKind::Return(value), None, start_line, start_col));
                }
                "pass" => {
                    self.bump();
                    return Ok(self.finish_stmt(StmtKind::Pass, None, start_line, start_col));
                }
                "break" => {
                    self.bump();
                    return Ok(self.finish_stmt(StmtKind::Break, None, start_line, start_col));
                }
                "continue" => {
                    self.bump();
                    return Ok(self.finish_stmt(StmtKind::Continue, None, start_line, start_col));
                }
                "assert" => {
                    self.bump();
                    let test = self.expr()?;
                    let msg = if self.at_op(",") {
                        self.bump();
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    return Ok(self.finish_stmt(
                        StmtKind::Assert { test, msg },
                        None,
                        start_line,
                        start_col,
                    ));
                }
                "import" | "from" => {
                    let raw = self.raw_to_line_end()?;
                    return Ok(self.finish_stmt(StmtKind::Import(raw), None, start_line, start_col));
                }
                "def" | "if" | "while" | "for" | "elif" | "else" => {
                    return self.error(format!("{n:?} is not valid here"));
                }
                _ => {}
            }
        }
        // Assignment, augmented assignment, or bare expression.
        let first = self.expr_list()?;
        if let Tok::Op(op) = self.peek() {
            let aug = match *op {
                "+=" => Some(BinOp::Add),
                "-=" => Some(BinOp::Sub),
                "*=" => Some(BinOp::Mul),
                "/=" => Some(BinOp::Div),
                "//=" => Some(BinOp::FloorDiv),
                "%=" => Some(BinOp::Mod),
                "**=" => Some(BinOp::Pow),
                _ => None,
            };
            if let Some(binop) = aug {
                self.bump();
                let value = self.expr_list()?;
                return Ok(self.finish_stmt(
                    StmtKind::AugAssign {
                        target: first,
                        op: binop,
                        value,
                    },
                    None,
                    start_line,
                    start_col,
                ));
            }
            if *op == "=" {
                let mut targets = vec![first];
                let mut value = {
                    self.bump();
                    self.expr_list()?
                };
                while self.at_op("=") {
                    self.bump();
                    targets.push(value);
                    value = self.expr_list()?;
                }
                return Ok(self.finish_stmt(
                    StmtKind::Assign { targets, value },
                    None,
                    start_line,
                    start_col,
                ));
            }
        }
        Ok(self.finish_stmt(StmtKind::Expr(first), None, start_line, start_col))
    }

    fn at_stmt_end(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Newline | Tok::TrailingComment(_) | Tok::Eof | Tok::Dedent
        ) || self.at_op(";")
    }

    /// Reconstructs an import line verbatim-ish from its tokens.
    fn raw_to_line_end(&mut self) -> Result<String, ParseError> {
        let mut parts: Vec<String> = Vec::new();
        loop {
            match self.peek() {
                Tok::Newline | Tok::Eof | Tok::Dedent | Tok::TrailingComment(_) => break,
                Tok::Name(n) => {
                    parts.push(n.clone());
                    self.bump();
                }
                Tok::Num(n) => {
                    parts.push(n.clone());
                    self.bump();
                }
                Tok::Str(s) => {
                    parts.push(s.clone());
                    self.bump();
                }
                Tok::Op(o) => {
                    parts.push((*o).to_string());
                    self.bump();
                }
                other => return self.error(format!("unexpected {other:?} in import")),
            }
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            if i > 0 && part != "." && part != "," && parts[i - 1] != "." {
                out.push(' ');
            }
            out.push_str(part);
        }
        Ok(out)
    }

    fn name_token(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Name(n) if !super::KEYWORDS.contains(&n.as_str()) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            other => self.error(format!("expected identifier, found {other:?}")),
        }
    }

    /// Assignment / for-loop targets: names, attributes, subscripts, tuples.
    fn target_list(&mut self) -> Result<Expr, ParseError> {
        let first = self.postfix()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.at_op(",") {
            self.bump();
            if self.at_kw("in") || self.at_op("=") || self.at_op(":") {
                break;
            }
            items.push(self.postfix()?);
        }
        Ok(Expr::Tuple(items))
    }

    /// Expression, possibly a bare comma-separated tuple.
    fn expr_list(&mut self) -> Result<Expr, ParseError> {
        let first = self.expr()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.at_op(",") {
            self.bump();
            if self.at_stmt_end() || self.at_op("=") || self.at_op(")") || self.at_op("]") {
                break;
            }
            items.push(self.expr()?);
        }
        Ok(Expr::Tuple(items))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let first = self.and_expr()?;
        if !self.at_kw("or") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw("or") {
            values.push(self.and_expr()?);
        }
        Ok(Expr::BoolOp {
            op: BoolOpKind::Or,
            values,
        })
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let first = self.not_expr()?;
        if !self.at_kw("and") {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw("and") {
            values.push(self.not_expr()?);
        }
        Ok(Expr::BoolOp {
            op: BoolOpKind::And,
            values,
        })
    }

    fn not_expr(&mut self) -> Result<Expr, ParseError> {
        if self.at_kw("not") {
            self.bump();
            let operand = self.not_expr()?;
            return Ok(Expr::UnaryOp {
                op: UnaryOpKind::Not,
                operand: Box::new(operand),
            });
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let left = self.arith()?;
        let mut ops = Vec::new();
        let mut comparators = Vec::new();
        loop {
            let op = match self.peek() {
                Tok::Op("<") => Some(CmpOp::Lt),
                Tok::Op(">") => Some(CmpOp::Gt),
                Tok::Op("<=") => Some(CmpOp::Le),
                Tok::Op(">=") => Some(CmpOp::Ge),
                Tok::Op("==") => Some(CmpOp::Eq),
                Tok::Op("!=") => Some(CmpOp::NotEq),
                Tok::Name(n) if n == "in" => Some(CmpOp::In),
                Tok::Name(n) if n == "not" => {
                    if matches!(self.peek2(), Tok::Name(n2) if n2 == "in") {
                        Some(CmpOp::NotIn)
                    } else {
                        None
                    }
                }
                Tok::Name(n) if n == "is" => {
                    if matches!(self.peek2(), Tok::Name(n2) if n2 == "not") {
                        Some(CmpOp::IsNot)
                    } else {
                        Some(CmpOp::Is)
                    }
                }
                _ => None,
            };
            let Some(op) = op else { break };
            self.bump();
            if matches!(op, CmpOp::NotIn | CmpOp::IsNot) {
                self.bump();
            }
            ops.push(op);
            comparators.push(self.arith()?);
        }
        if ops.is_empty() {
            Ok(left)
        } else {
            Ok(Expr::Compare {
                left: Box::new(left),
                ops,
                comparators,
            })
        }
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let right = self.term()?;
            left = Expr::BinOp {
                left: Box::new(left),
                op,
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                _ => break,
            };
            self.bump();
            let right = self.factor()?;
            left = Expr::BinOp {
                left: Box::new(left),
                op,
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek() {
            Tok::Op("-") => Some(UnaryOpKind::Neg),
            Tok::Op("+") => Some(UnaryOpKind::Pos),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.factor()?;
            return Ok(Expr::UnaryOp {
                op,
                operand: Box::new(operand),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.postfix()?;
        if self.at_op("**") {
            self.bump();
            let exp = self.factor()?;
            return Ok(Expr::BinOp {
                left: Box::new(base),
                op: BinOp::Pow,
                right: Box::new(exp),
            });
        }
        Ok(base)
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut value = self.atom()?;
        loop {
            if self.at_op("(") {
                self.bump();
                let mut args = Vec::new();
                let mut kwargs = Vec::new();
                while !self.at_op(")") {
                    let is_kwarg = matches!(self.peek(), Tok::Name(n) if !super::KEYWORDS.contains(&n.as_str()))
                        && matches!(self.peek2(), Tok::Op("="));
                    if is_kwarg {
                        let name = self.name_token()?;
                        self.expect_op("=")?;
                        kwargs.push((name, self.expr()?));
                    } else {
                        args.push(self.expr()?);
                    }
                    if self.at_op(",") {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_op(")")?;
                value = Expr::Call {
                    func: Box::new(value),
                    args,
                    kwargs,
                };
            } else if self.at_op(".") {
                self.bump();
                let attr = match self.peek() {
                    Tok::Name(n) => {
                        let n = n.clone();
                        self.bump();
                        n
                    }
                    other => return self.error(format!("expected attribute name, found {other:?}")),
                };
                value = Expr::Attribute {
                    value: Box::new(value),
                    attr,
                };
            } else if self.at_op("[") {
                self.bump();
                let index = self.subscript_index()?;
                self.expect_op("]")?;
                value = Expr::Subscript {
                    value: Box::new(value),
                    index: Box::new(index),
                };
            } else {
                break;
            }
        }
        Ok(value)
    }

    fn subscript_index(&mut self) -> Result<Expr, ParseError> {
        if self.at_op(":") {
            self.bump();
            let upper = if self.at_op("]") {
                None
            } else {
                Some(Box::new(self.expr()?))
            };
            return Ok(Expr::Slice { lower: None, upper });
        }
        let first = self.expr()?;
        if self.at_op(":") {
            self.bump();
            let upper = if self.at_op("]") {
                None
            } else {
                Some(Box::new(self.expr()?))
            };
            return Ok(Expr::Slice {
                lower: Some(Box::new(first)),
                upper,
            });
        }
        if self.at_op(",") {
            let mut items = vec![first];
            while self.at_op(",") {
                self.bump();
                if self.at_op("]") {
                    break;
                }
                items.push(self.expr()?);
            }
            return Ok(Expr::Tuple(items));
        }
        Ok(first)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Name(n) => match n.as_str() {
                "True" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "False" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                "None" => {
                    self.bump();
                    Ok(Expr::NoneLit)
                }
                kw if super::KEYWORDS.contains(&kw) => {
                    self.error(format!("unexpected keyword {kw:?} in expression"))
                }
                _ => {
                    self.bump();
                    Ok(Expr::Name(n))
                }
            },
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::Op("(") => {
                self.bump();
                if self.at_op(")") {
                    self.bump();
                    return Ok(Expr::Tuple(Vec::new()));
                }
                let first = self.expr()?;
                if self.at_op(",") {
                    let mut items = vec![first];
                    while self.at_op(",") {
                        self.bump();
                        if self.at_op(")") {
                            break;
                        }
                        items.push(self.expr()?);
                    }
                    self.expect_op(")")?;
                    return Ok(Expr::Tuple(items));
                }
                self.expect_op(")")?;
                Ok(first)
            }
            Tok::Op("[") => {
                self.bump();
                if self.at_op("]") {
                    self.bump();
                    return Ok(Expr::List(Vec::new()));
                }
                let first = self.expr()?;
                if self.at_kw("for") {
                    self.bump();
                    let target = self.target_list()?;
                    if !self.eat_kw("in") {
                        return self.error("expected 'in' in comprehension");
                    }
                    let iter = self.expr()?;
                    let cond = if self.at_kw("if") {
                        self.bump();
                        Some(Box::new(self.expr()?))
                    } else {
                        None
                    };
                    self.expect_op("]")?;
                    return Ok(Expr::ListComp {
                        elt: Box::new(first),
                        target: Box::new(target),
                        iter: Box::new(iter),
                        cond,
                    });
                }
                let mut items = vec![first];
                while self.at_op(",") {
                    self.bump();
                    if self.at_op("]") {
                        break;
                    }
                    items.push(self.expr()?);
                }
                self.expect_op("]")?;
                Ok(Expr::List(items))
            }
            Tok::Op("{") => {
                self.bump();
                let mut pairs = Vec::new();
                while !self.at_op("}") {
                    let key = self.expr()?;
                    self.expect_op(":")?;
                    let value = self.expr()?;
                    pairs.push((key, value));
                    if self.at_op(",") {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect_op("}")?;
                Ok(Expr::Dict(pairs))
            }
            other => self.error(format!("unexpected {other:?} in expression")),
        }
    }
}
