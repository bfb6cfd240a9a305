//! Indentation-aware tokenizer for the supported Python subset.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Name(String),
    Num(String),
    /// String literal, verbatim including quotes.
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    /// Full-line comment (text after `#`, trimmed).
    CommentLine(String),
    BlankLine,
    /// Comment at the end of a code line.
    TrailingComment(String),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: Tok,
    pub line: u32,
    pub col: u32,
}

const OPERATORS: &[&str] = &[
    "**=", "//=", "**", "//", "<=", ">=", "==", "!=", "+=", "-=", "*=", "/=", "%=", "->", "+",
    "-", "*", "/", "%", "<", ">", "=", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";",
];

pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut toks: Vec<Token> = Vec::new();
    let mut indents: Vec<u32> = vec![0];
    let mut depth: usize = 0;
    let mut i = 0usize;
    let mut line: u32 = 1;
    let mut col: u32 = 0;
    let mut at_line_start = true;

    macro_rules! err {
        ($l:expr, $c:expr, $($arg:tt)*) => {
            return Err(ParseError { line: $l, column: $c, message: format!($($arg)*) })
        };
    }

    while i < chars.len() {
        if at_line_start && depth == 0 {
            // Measure indentation; blank and comment-only lines do not affect it.
            let mut width: u32 = 0;
            let start = i;
            while i < chars.len() && (chars[i] == ' ' || chars[i] == '\t') {
                width = if chars[i] == '\t' {
                    (width / 8 + 1) * 8
                } else {
                    width + 1
                };
                i += 1;
            }
            col = (i - start) as u32;
            if i >= chars.len() {
                break;
            }
            if chars[i] == '\n' {
                toks.push(Token {
                    kind: Tok::BlankLine,
                    line,
                    col: 0,
                });
                i += 1;
                line += 1;
                continue;
            }
            if chars[i] == '\r' {
                i += 1;
                continue;
            }
            if chars[i] == '#' {
                let text_start = i + 1;
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                let text: String = chars[text_start..i].iter().collect();
                toks.push(Token {
                    kind: Tok::CommentLine(text.trim().to_string()),
                    line,
                    col,
                });
                if i < chars.len() {
                    i += 1;
                    line += 1;
                }
                continue;
            }
            let current = *indents.last().unwrap();
            if width > current {
                indents.push(width);
                toks.push(Token {
                    kind: Tok::Indent,
                    line,
                    col,
                });
            } else if width < current {
                while *indents.last().unwrap() > width {
                    indents.pop();
                    toks.push(Token {
                        kind: Tok::Dedent,
                        line,
                        col,
                    });
                }
                if *indents.last().unwrap() != width {
                    err!(line, col, "unindent does not match any outer indentation level");
                }
            }
            at_line_start = false;
            continue;
        }

        let c = chars[i];
        match c {
            ' ' | '\t' => {
                i += 1;
                col += 1;
            }
            '\r' => {
                i += 1;
            }
            '\n' => {
                if depth == 0 {
                    toks.push(Token {
                        kind: Tok::Newline,
                        line,
                        col,
                    });
                    at_line_start = true;
                }
                i += 1;
                line += 1;
                col = 0;
            }
            '#' => {
                let text_start = i + 1;
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                let text: String = chars[text_start..i].iter().collect();
                if depth == 0 {
                    toks.push(Token {
                        kind: Tok::TrailingComment(text.trim().to_string()),
                        line,
                        col,
                    });
                }
            }
            '\'' | '"' => {
                let quote = c;
                let start = i;
                let (sl, sc) = (line, col);
                i += 1;
                col += 1;
                let mut closed = false;
                while i < chars.len() {
                    let ch = chars[i];
                    if ch == '\\' {
                        if i + 1 >= chars.len() {
                            err!(sl, sc, "unterminated string literal");
                        }
                        i += 2;
                        col += 2;
                        continue;
                    }
                    if ch == '\n' {
                        err!(sl, sc, "unterminated string literal");
                    }
                    i += 1;
                    col += 1;
                    if ch == quote {
                        closed = true;
                        break;
                    }
                }
                if !closed {
                    err!(sl, sc, "unterminated string literal");
                }
                let text: String = chars[start..i].iter().collect();
                toks.push(Token {
                    kind: Tok::Str(text),
                    line: sl,
                    col: sc,
                });
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                let (sl, sc) = (line, col);
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    col += 1;
                }
                if i < chars.len() && chars[i] == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit()
                {
                    i += 1;
                    col += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                        col += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                toks.push(Token {
                    kind: Tok::Num(text),
                    line: sl,
                    col: sc,
                });
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let (sl, sc) = (line, col);
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                    col += 1;
                }
                let text: String = chars[start..i].iter().collect();
                toks.push(Token {
                    kind: Tok::Name(text),
                    line: sl,
                    col: sc,
                });
            }
            _ => {
                let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
                let mut matched = None;
                for op in OPERATORS {
                    if rest.starts_with(op) {
                        matched = Some(*op);
                        break;
                    }
                }
                match matched {
                    Some(op) => {
                        match op {
                            "(" | "[" | "{" => depth += 1,
                            ")" | "]" | "}" => depth = depth.saturating_sub(1),
                            _ => {}
                        }
                        toks.push(Token {
                            kind: Tok::Op(op),
                            line,
                            col,
                        });
                        i += op.len();
                        col += op.len() as u32;
                    }
                    None => err!(line, col, "unexpected character {c:?}"),
                }
            }
        }
    }

    // Close any open logical line and blocks.
    if let Some(last) = toks.last() {
        if !matches!(
            last.kind,
            Tok::Newline | Tok::BlankLine | Tok::CommentLine(_) | Tok::Indent | Tok::Dedent
        ) {
            toks.push(Token {
                kind: Tok::Newline,
                line,
                col,
            });
        }
    }
    while indents.len() > 1 {
        indents.pop();
        toks.push(Token {
            kind: Tok::Dedent,
            line,
            col: 0,
        });
    }
    toks.push(Token {
        kind: Tok::Eof,
        line,
        col: 0,
    });
    Ok(toks)
}
