//! Syntax tree for the supported Python subset.
//!
//! Trees are value types: cloning is cheap enough at the file sizes this
//! toolkit operates on, and all transformation passes work on owned trees.

/// Source location of a statement: (start line, start column, end line, end column),
/// all 1-based lines and 0-based columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

/// A comment or blank line attached to the statement that follows it.
/// Trivia never participates in structural comparison or anchor logic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trivia {
    Blank,
    /// Comment text without the leading `#`.
    Comment(String),
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub leading: Vec<Trivia>,
    pub kind: StmtKind,
    /// Comment at the end of the statement's own line, without the `#`.
    pub trailing_comment: Option<String>,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt {
            leading: Vec::new(),
            kind,
            trailing_comment: None,
            span: Span::default(),
        }
    }
}

// Span is deliberately excluded: two trees are equal when they produce the
// same canonical rendering.
impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.leading == other.leading
            && self.kind == other.kind
            && self.trailing_comment == other.trailing_comment
    }
}
impl Eq for Stmt {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    FunctionDef {
        name: String,
        params: Vec<String>,
        body: Vec<Stmt>,
    },
    If {
        test: Expr,
        body: Vec<Stmt>,
        /// `elif` chains parse as a single nested `If` in `orelse`.
        orelse: Vec<Stmt>,
    },
    While {
        test: Expr,
        body: Vec<Stmt>,
    },
    For {
        target: Expr,
        iter: Expr,
        body: Vec<Stmt>,
    },
    Return(Option<Expr>),
    Assign {
        targets: Vec<Expr>,
        value: Expr,
    },
    AugAssign {
        target: Expr,
        op: BinOp,
        value: Expr,
    },
    Assert {
        test: Expr,
        msg: Option<Expr>,
    },
    Expr(Expr),
    Pass,
    Break,
    Continue,
    /// `import` / `from ... import ...` lines, kept verbatim and anchor-free.
    Import(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    In,
    NotIn,
    Is,
    IsNot,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::NotEq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::In => "in",
            CmpOp::NotIn => "not in",
            CmpOp::Is => "is",
            CmpOp::IsNot => "is not",
        }
    }

    /// The operator naming the same relation with swapped operands, where one exists.
    pub fn mirrored(self) -> Option<CmpOp> {
        match self {
            CmpOp::Lt => Some(CmpOp::Gt),
            CmpOp::Gt => Some(CmpOp::Lt),
            CmpOp::Le => Some(CmpOp::Ge),
            CmpOp::Ge => Some(CmpOp::Le),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOpKind {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOpKind {
    Neg,
    Pos,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Name(String),
    /// Numeric literal, kept as its source lexeme.
    Num(String),
    /// String literal, kept verbatim including quotes.
    Str(String),
    Bool(bool),
    NoneLit,
    Tuple(Vec<Expr>),
    List(Vec<Expr>),
    Dict(Vec<(Expr, Expr)>),
    BinOp {
        left: Box<Expr>,
        op: BinOp,
        right: Box<Expr>,
    },
    UnaryOp {
        op: UnaryOpKind,
        operand: Box<Expr>,
    },
    BoolOp {
        op: BoolOpKind,
        values: Vec<Expr>,
    },
    Compare {
        left: Box<Expr>,
        ops: Vec<CmpOp>,
        comparators: Vec<Expr>,
    },
    Call {
        func: Box<Expr>,
        args: Vec<Expr>,
        kwargs: Vec<(String, Expr)>,
    },
    Attribute {
        value: Box<Expr>,
        attr: String,
    },
    Subscript {
        value: Box<Expr>,
        index: Box<Expr>,
    },
    Slice {
        lower: Option<Box<Expr>>,
        upper: Option<Box<Expr>>,
    },
    ListComp {
        elt: Box<Expr>,
        target: Box<Expr>,
        iter: Box<Expr>,
        cond: Option<Box<Expr>>,
    },
}

impl Expr {
    pub fn is_literal(&self) -> bool {
        matches!(
            self,
            Expr::Num(_) | Expr::Str(_) | Expr::Bool(_) | Expr::NoneLit
        )
    }

    /// True when the expression mentions `name` as a variable reference
    /// anywhere in its subtree.
    pub fn mentions(&self, name: &str) -> bool {
        let mut found = false;
        self.visit_names(&mut |n| {
            if n == name {
                found = true;
            }
        });
        found
    }

    /// Calls `f` on every `Name` node in the subtree.
    pub fn visit_names(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Expr::Name(n) => f(n),
            Expr::Num(_) | Expr::Str(_) | Expr::Bool(_) | Expr::NoneLit => {}
            Expr::Tuple(items) | Expr::List(items) => {
                for e in items {
                    e.visit_names(f);
                }
            }
            Expr::Dict(pairs) => {
                for (k, v) in pairs {
                    k.visit_names(f);
                    v.visit_names(f);
                }
            }
            Expr::BinOp { left, right, .. } => {
                left.visit_names(f);
                right.visit_names(f);
            }
            Expr::UnaryOp { operand, .. } => operand.visit_names(f),
            Expr::BoolOp { values, .. } => {
                for e in values {
                    e.visit_names(f);
                }
            }
            Expr::Compare {
                left, comparators, ..
            } => {
                left.visit_names(f);
                for e in comparators {
                    e.visit_names(f);
                }
            }
            Expr::Call { func, args, kwargs } => {
                func.visit_names(f);
                for e in args {
                    e.visit_names(f);
                }
                for (_, e) in kwargs {
                    e.visit_names(f);
                }
            }
            Expr::Attribute { value, .. } => value.visit_names(f),
            Expr::Subscript { value, index } => {
                value.visit_names(f);
                index.visit_names(f);
            }
            Expr::Slice { lower, upper } => {
                if let Some(e) = lower {
                    e.visit_names(f);
                }
                if let Some(e) = upper {
                    e.visit_names(f);
                }
            }
            Expr::ListComp {
                elt,
                target,
                iter,
                cond,
            } => {
                elt.visit_names(f);
                target.visit_names(f);
                iter.visit_names(f);
                if let Some(c) = cond {
                    c.visit_names(f);
                }
            }
        }
    }

    /// Renames every `Name` node equal to `from` into `to`.
    pub fn rename(&mut self, from: &str, to: &str) {
        match self {
            Expr::Name(n) => {
                if n == from {
                    *n = to.to_string();
                }
            }
            Expr::Num(_) | Expr::Str(_) | Expr::Bool(_) | Expr::NoneLit => {}
            Expr::Tuple(items) | Expr::List(items) => {
                for e in items {
                    e.rename(from, to);
                }
            }
            Expr::Dict(pairs) => {
                for (k, v) in pairs {
                    k.rename(from, to);
                    v.rename(from, to);
                }
            }
            Expr::BinOp { left, right, .. } => {
                left.rename(from, to);
                right.rename(from, to);
            }
            Expr::UnaryOp { operand, .. } => operand.rename(from, to),
            Expr::BoolOp { values, .. } => {
                for e in values {
                    e.rename(from, to);
                }
            }
            Expr::Compare {
                left, comparators, ..
            } => {
                left.rename(from, to);
                for e in comparators {
                    e.rename(from, to);
                }
            }
            Expr::Call { func, args, kwargs } => {
                func.rename(from, to);
                for e in args {
                    e.rename(from, to);
                }
                for (_, e) in kwargs {
                    e.rename(from, to);
                }
            }
            Expr::Attribute { value, .. } => value.rename(from, to),
            Expr::Subscript { value, index } => {
                value.rename(from, to);
                index.rename(from, to);
            }
            Expr::Slice { lower, upper } => {
                if let Some(e) = lower {
                    e.rename(from, to);
                }
                if let Some(e) = upper {
                    e.rename(from, to);
                }
            }
            Expr::ListComp {
                elt,
                target,
                iter,
                cond,
            } => {
                elt.rename(from, to);
                target.rename(from, to);
                iter.rename(from, to);
                if let Some(c) = cond {
                    c.rename(from, to);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Module {
    pub body: Vec<Stmt>,
    /// Trivia after the last statement.
    pub trailing: Vec<Trivia>,
}
