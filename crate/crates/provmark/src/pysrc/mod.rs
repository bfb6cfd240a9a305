//! Parsing, rendering, and addressing of subject-language (Python 3 subset)
//! source files.

pub mod ast;
mod lexer;
mod parser;
mod render;

pub use ast::{BinOp, BoolOpKind, CmpOp, Expr, Module, Span, Stmt, StmtKind, Trivia, UnaryOpKind};
pub use render::{render_with_style, RenderStyle};

use thiserror::Error;

/// Reserved words of the subject grammar. Identifiers may not shadow these.
pub const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return",
    "try", "while", "with", "yield",
];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

/// A parsed subject-language source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubjectProgram {
    pub text: String,
    pub tree: Module,
    /// Origin identifier (usually a file path).
    pub path: String,
}

impl SubjectProgram {
    pub fn parse(text: &str, path: &str) -> Result<SubjectProgram, ParseError> {
        let tree = parser::parse_module(text)?;
        Ok(SubjectProgram {
            text: text.to_string(),
            tree,
            path: path.to_string(),
        })
    }

    /// Canonical rendering. Same tree, same bytes.
    pub fn render(&self) -> String {
        render::render(&self.tree)
    }

    /// Rebuilds `text` (and spans) from the current tree.
    pub fn rerendered(&self) -> SubjectProgram {
        let text = self.render();
        // A well-formed tree always renders to parseable text.
        SubjectProgram::parse(&text, &self.path).expect("canonical rendering must re-parse")
    }
}

pub fn parse_module(text: &str) -> Result<Module, ParseError> {
    parser::parse_module(text)
}

pub fn render(module: &Module) -> String {
    render::render(module)
}

/// Stable address of a statement: a chain of (block, index) hops from the
/// module root. Block 0 is the primary body; block 1 is an `If`'s else body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StmtPath(pub Vec<(u8, u32)>);

impl StmtPath {
    pub fn sibling(&self, index: u32) -> StmtPath {
        let mut v = self.0.clone();
        let last = v.last_mut().unwrap();
        last.1 = index;
        StmtPath(v)
    }

    pub fn index(&self) -> u32 {
        self.0.last().unwrap().1
    }
}

fn blocks_of(kind: &StmtKind) -> Vec<&Vec<Stmt>> {
    match kind {
        StmtKind::FunctionDef { body, .. }
        | StmtKind::While { body, .. }
        | StmtKind::For { body, .. } => vec![body],
        StmtKind::If { body, orelse, .. } => vec![body, orelse],
        _ => vec![],
    }
}

fn blocks_of_mut(kind: &mut StmtKind) -> Vec<&mut Vec<Stmt>> {
    match kind {
        StmtKind::FunctionDef { body, .. }
        | StmtKind::While { body, .. }
        | StmtKind::For { body, .. } => vec![body],
        StmtKind::If { body, orelse, .. } => vec![body, orelse],
        _ => vec![],
    }
}

/// Pre-order walk over all statements, with their addresses.
pub fn walk(module: &Module) -> Vec<(StmtPath, &Stmt)> {
    let mut out = Vec::new();
    fn rec<'a>(stmts: &'a [Stmt], prefix: &StmtPath, block: u8, out: &mut Vec<(StmtPath, &'a Stmt)>) {
        for (i, s) in stmts.iter().enumerate() {
            let mut p = prefix.0.clone();
            p.push((block, i as u32));
            let path = StmtPath(p);
            out.push((path.clone(), s));
            for (b, child) in blocks_of(&s.kind).into_iter().enumerate() {
                rec(child, &path, b as u8, out);
            }
        }
    }
    rec(&module.body, &StmtPath(Vec::new()), 0, &mut out);
    out
}

pub fn stmt_at<'a>(module: &'a Module, path: &StmtPath) -> Option<&'a Stmt> {
    let mut stmts = &module.body;
    let mut current: Option<&Stmt> = None;
    for (block, idx) in &path.0 {
        if let Some(stmt) = current {
            stmts = *blocks_of(&stmt.kind).get(*block as usize)?;
        } else if *block != 0 {
            return None;
        }
        current = stmts.get(*idx as usize);
        current?;
    }
    current
}

pub fn stmt_at_mut<'a>(module: &'a mut Module, path: &StmtPath) -> Option<&'a mut Stmt> {
    let mut stmts = &mut module.body;
    for (i, (block, idx)) in path.0.iter().enumerate() {
        if i + 1 == path.0.len() {
            return stmts.get_mut(*idx as usize);
        }
        let stmt = stmts.get_mut(*idx as usize)?;
        let next_block = path.0[i + 1].0;
        stmts = blocks_of_mut(&mut stmt.kind).into_iter().nth(next_block as usize)?;
        let _ = block;
    }
    None
}

/// Structural equality ignoring trivia and spans.
pub fn isomorphic(a: &Module, b: &Module) -> bool {
    stmts_isomorphic(&a.body, &b.body)
}

fn stmts_isomorphic(a: &[Stmt], b: &[Stmt]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| stmt_isomorphic(x, y))
}

fn stmt_isomorphic(a: &Stmt, b: &Stmt) -> bool {
    use StmtKind::*;
    match (&a.kind, &b.kind) {
        (
            FunctionDef {
                name: n1,
                params: p1,
                body: b1,
            },
            FunctionDef {
                name: n2,
                params: p2,
                body: b2,
            },
        ) => n1 == n2 && p1 == p2 && stmts_isomorphic(b1, b2),
        (
            If {
                test: t1,
                body: b1,
                orelse: o1,
            },
            If {
                test: t2,
                body: b2,
                orelse: o2,
            },
        ) => t1 == t2 && stmts_isomorphic(b1, b2) && stmts_isomorphic(o1, o2),
        (While { test: t1, body: b1 }, While { test: t2, body: b2 }) => {
            t1 == t2 && stmts_isomorphic(b1, b2)
        }
        (
            For {
                target: t1,
                iter: i1,
                body: b1,
            },
            For {
                target: t2,
                iter: i2,
                body: b2,
            },
        ) => t1 == t2 && i1 == i2 && stmts_isomorphic(b1, b2),
        (x, y) => x == y,
    }
}
