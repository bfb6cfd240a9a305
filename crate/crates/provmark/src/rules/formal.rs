//! The ordered formal rule set R1..R6.
//!
//! Every rule operates at statement granularity and keeps the number of
//! statements in the enclosing block unchanged, so statement addresses and
//! the pre-order anchor ordering are invariant under toggling. A site that
//! matches several rules is claimed by the lowest rule id.
//!
//! State convention: 0 = untransformed form (apply is possible), 1 =
//! transformed form (reverse is possible).

use thiserror::Error;

use crate::pysrc::ast::{BinOp, Expr, Stmt, StmtKind, UnaryOpKind};

pub const RULE_COUNT: u8 = 6;

pub fn rule_name(rule_id: u8) -> &'static str {
    match rule_id {
        1 => "aug-assign",
        2 => "loop-to-comprehension",
        3 => "negated-equality",
        4 => "boolean-return",
        5 => "comparison-mirror",
        6 => "range-elision",
        _ => "unknown",
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("site is not an anchor of rule R{0}")]
    NotAnAnchor(u8),
    #[error("unknown rule id {0}")]
    UnknownRule(u8),
}

fn aug_op(op: BinOp) -> bool {
    matches!(op, BinOp::Add | BinOp::Sub | BinOp::Mul)
}

fn r1_state(kind: &StmtKind) -> Option<u8> {
    match kind {
        StmtKind::Assign { targets, value } => {
            let [Expr::Name(x)] = targets.as_slice() else {
                return None;
            };
            let Expr::BinOp { left, op, .. } = value else {
                return None;
            };
            if aug_op(*op) && matches!(&**left, Expr::Name(n) if n == x) {
                Some(0)
            } else {
                None
            }
        }
        StmtKind::AugAssign { target, op, .. } => {
            if matches!(target, Expr::Name(_)) && aug_op(*op) {
                Some(1)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The accumulator list `L` of a matching `L = []` initializer statement.
fn empty_list_init(kind: &StmtKind) -> Option<&str> {
    let StmtKind::Assign { targets, value } = kind else {
        return None;
    };
    let [Expr::Name(l)] = targets.as_slice() else {
        return None;
    };
    match value {
        Expr::List(items) if items.is_empty() => Some(l),
        _ => None,
    }
}

// R2 requires the immediately preceding sibling to be `L = []`; without that
// initializer the comprehension form would not be equivalent to the loop.
fn r2_state(kind: &StmtKind, prev: Option<&StmtKind>) -> Option<u8> {
    let acc = empty_list_init(prev?)?;
    match kind {
        StmtKind::For { target, iter, body } => {
            let Expr::Name(v) = target else {
                return None;
            };
            if v == acc {
                return None;
            }
            let [only] = body.as_slice() else {
                return None;
            };
            let StmtKind::Expr(Expr::Call { func, args, kwargs }) = &only.kind else {
                return None;
            };
            if !kwargs.is_empty() {
                return None;
            }
            let Expr::Attribute { value, attr } = &**func else {
                return None;
            };
            if attr != "append" || !matches!(&**value, Expr::Name(n) if n == acc) {
                return None;
            }
            let [elt] = args.as_slice() else {
                return None;
            };
            if elt.mentions(acc) || iter.mentions(acc) {
                return None;
            }
            Some(0)
        }
        StmtKind::Assign { targets, value } => {
            let [Expr::Name(l)] = targets.as_slice() else {
                return None;
            };
            let Expr::ListComp {
                elt,
                target,
                iter,
                cond: None,
            } = value
            else {
                return None;
            };
            let Expr::Name(v) = &**target else {
                return None;
            };
            if l != acc || v == l || elt.mentions(l) || iter.mentions(l) {
                return None;
            }
            Some(1)
        }
        _ => None,
    }
}

fn condition_of(kind: &StmtKind) -> Option<&Expr> {
    match kind {
        StmtKind::If { test, .. } | StmtKind::While { test, .. } => Some(test),
        _ => None,
    }
}

fn condition_of_mut(kind: &mut StmtKind) -> Option<&mut Expr> {
    match kind {
        StmtKind::If { test, .. } | StmtKind::While { test, .. } => Some(test),
        _ => None,
    }
}

fn r3_state_of_test(test: &Expr) -> Option<u8> {
    match test {
        Expr::UnaryOp {
            op: UnaryOpKind::Not,
            operand,
        } => match &**operand {
            Expr::Compare { ops, .. } if ops.as_slice() == [crate::pysrc::CmpOp::Eq] => Some(0),
            _ => None,
        },
        Expr::Compare { ops, .. } if ops.as_slice() == [crate::pysrc::CmpOp::NotEq] => Some(1),
        _ => None,
    }
}

fn r3_state(kind: &StmtKind) -> Option<u8> {
    r3_state_of_test(condition_of(kind)?)
}

fn is_bool_return(stmt: &Stmt, which: bool) -> bool {
    matches!(&stmt.kind, StmtKind::Return(Some(Expr::Bool(b))) if *b == which)
}

fn r4_state(kind: &StmtKind) -> Option<u8> {
    match kind {
        StmtKind::If { body, orelse, .. } => {
            let ([b], [e]) = (body.as_slice(), orelse.as_slice()) else {
                return None;
            };
            if is_bool_return(b, true) && is_bool_return(e, false) {
                Some(0)
            } else {
                None
            }
        }
        StmtKind::Return(Some(Expr::Call { func, args, kwargs })) => {
            if matches!(&**func, Expr::Name(n) if n == "bool")
                && args.len() == 1
                && kwargs.is_empty()
            {
                Some(1)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn r5_state_of_test(test: &Expr) -> Option<u8> {
    let Expr::Compare {
        left,
        ops,
        comparators,
    } = test
    else {
        return None;
    };
    let ([op], [right]) = (ops.as_slice(), comparators.as_slice()) else {
        return None;
    };
    op.mirrored()?;
    match (left.is_literal(), right.is_literal()) {
        (false, true) => Some(0),
        (true, false) => Some(1),
        _ => None,
    }
}

fn r5_state(kind: &StmtKind) -> Option<u8> {
    r5_state_of_test(condition_of(kind)?)
}

fn range_args(kind: &StmtKind) -> Option<&Vec<Expr>> {
    let StmtKind::For { iter, .. } = kind else {
        return None;
    };
    let Expr::Call { func, args, kwargs } = iter else {
        return None;
    };
    if matches!(&**func, Expr::Name(n) if n == "range") && kwargs.is_empty() {
        Some(args)
    } else {
        None
    }
}

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Num(n) if n == "0")
}

fn r6_state(kind: &StmtKind) -> Option<u8> {
    let args = range_args(kind)?;
    // `range(0)` and `range(0, 0)` are excluded so both forms stay anchors.
    match args.as_slice() {
        [first, second] if is_zero(first) && !is_zero(second) => Some(0),
        [only] if !is_zero(only) => Some(1),
        _ => None,
    }
}

fn state_of(kind: &StmtKind, prev: Option<&StmtKind>, rule_id: u8) -> Option<u8> {
    match rule_id {
        1 => r1_state(kind),
        2 => r2_state(kind, prev),
        3 => r3_state(kind),
        4 => r4_state(kind),
        5 => r5_state(kind),
        6 => r6_state(kind),
        _ => None,
    }
}

/// State bit of `stmt` under one rule: 1 iff the site is in the transformed
/// (reversible) form. `prev` is the preceding sibling statement, needed only
/// by R2's initializer check.
pub fn detect_state(stmt: &Stmt, prev: Option<&Stmt>, rule_id: u8) -> Result<u8, RuleError> {
    if !(1..=RULE_COUNT).contains(&rule_id) {
        return Err(RuleError::UnknownRule(rule_id));
    }
    state_of(&stmt.kind, prev.map(|s| &s.kind), rule_id).ok_or(RuleError::NotAnAnchor(rule_id))
}

/// The anchor claim for a statement: the lowest enabled rule id that matches,
/// with its state. Bit i-1 of `enabled_mask` enables rule Ri.
pub fn classify(stmt: &Stmt, prev: Option<&Stmt>, enabled_mask: u8) -> Option<(u8, u8)> {
    (1..=RULE_COUNT)
        .filter(|r| enabled_mask & (1 << (r - 1)) != 0)
        .find_map(|r| state_of(&stmt.kind, prev.map(|s| &s.kind), r).map(|s| (r, s)))
}

/// Puts the site into the requested state (no-op when already there).
/// Leading trivia, trailing comment, and span stay on the statement.
pub fn set_state(stmt: &mut Stmt, prev: Option<&Stmt>, rule_id: u8, state: u8) -> Result<(), RuleError> {
    let current = detect_state(stmt, prev, rule_id)?;
    if current == state {
        return Ok(());
    }
    let kind = std::mem::replace(&mut stmt.kind, StmtKind::Pass);
    stmt.kind = toggle_kind(kind, rule_id);
    Ok(())
}

pub fn apply(stmt: &mut Stmt, prev: Option<&Stmt>, rule_id: u8) -> Result<(), RuleError> {
    set_state(stmt, prev, rule_id, 1)
}

pub fn reverse(stmt: &mut Stmt, prev: Option<&Stmt>, rule_id: u8) -> Result<(), RuleError> {
    set_state(stmt, prev, rule_id, 0)
}

// Flips a statement already known to match `rule_id` into the opposite form.
fn toggle_kind(kind: StmtKind, rule_id: u8) -> StmtKind {
    match (rule_id, kind) {
        (1, StmtKind::Assign { targets, value }) => {
            let Expr::BinOp { op, right, .. } = value else {
                unreachable!("R1 match guarantees a binary operation");
            };
            StmtKind::AugAssign {
                target: targets.into_iter().next().unwrap(),
                op,
                value: *right,
            }
        }
        (1, StmtKind::AugAssign { target, op, value }) => StmtKind::Assign {
            targets: vec![target.clone()],
            value: Expr::BinOp {
                left: Box::new(target),
                op,
                right: Box::new(value),
            },
        },
        (2, StmtKind::For { target, iter, body }) => {
            let StmtKind::Expr(Expr::Call { func, args, .. }) = body.into_iter().next().unwrap().kind
            else {
                unreachable!("R2 match guarantees an append call body");
            };
            let Expr::Attribute { value: list, .. } = *func else {
                unreachable!("R2 match guarantees an attribute call");
            };
            StmtKind::Assign {
                targets: vec![*list],
                value: Expr::ListComp {
                    elt: Box::new(args.into_iter().next().unwrap()),
                    target: Box::new(target),
                    iter: Box::new(iter),
                    cond: None,
                },
            }
        }
        (2, StmtKind::Assign { targets, value }) => {
            let Expr::ListComp {
                elt, target, iter, ..
            } = value
            else {
                unreachable!("R2 match guarantees a comprehension value");
            };
            let list = targets.into_iter().next().unwrap();
            let call = Expr::Call {
                func: Box::new(Expr::Attribute {
                    value: Box::new(list),
                    attr: "append".to_string(),
                }),
                args: vec![*elt],
                kwargs: vec![],
            };
            StmtKind::For {
                target: *target,
                iter: *iter,
                body: vec![Stmt::new(StmtKind::Expr(call))],
            }
        }
        (3, mut kind) => {
            let test = condition_of_mut(&mut kind).expect("R3 match guarantees a condition");
            let old = std::mem::replace(test, Expr::NoneLit);
            *test = match old {
                Expr::UnaryOp { operand, .. } => {
                    let Expr::Compare {
                        left, comparators, ..
                    } = *operand
                    else {
                        unreachable!("R3 match guarantees an equality comparison");
                    };
                    Expr::Compare {
                        left,
                        ops: vec![crate::pysrc::CmpOp::NotEq],
                        comparators,
                    }
                }
                Expr::Compare {
                    left, comparators, ..
                } => Expr::UnaryOp {
                    op: UnaryOpKind::Not,
                    operand: Box::new(Expr::Compare {
                        left,
                        ops: vec![crate::pysrc::CmpOp::Eq],
                        comparators,
                    }),
                },
                _ => unreachable!("R3 match guarantees one of the two forms"),
            };
            kind
        }
        (4, StmtKind::If { test, .. }) => StmtKind::Return(Some(Expr::Call {
            func: Box::new(Expr::Name("bool".to_string())),
            args: vec![test],
            kwargs: vec![],
        })),
        (4, StmtKind::Return(Some(Expr::Call { args, .. }))) => {
            let ret = |b| Stmt::new(StmtKind::Return(Some(Expr::Bool(b))));
            StmtKind::If {
                test: args.into_iter().next().unwrap(),
                body: vec![ret(true)],
                orelse: vec![ret(false)],
            }
        }
        (5, mut kind) => {
            let test = condition_of_mut(&mut kind).expect("R5 match guarantees a condition");
            let Expr::Compare {
                left,
                ops,
                comparators,
            } = std::mem::replace(test, Expr::NoneLit)
            else {
                unreachable!("R5 match guarantees a comparison");
            };
            let op = ops[0].mirrored().expect("R5 match guarantees a mirrorable operator");
            *test = Expr::Compare {
                left: Box::new(comparators.into_iter().next().unwrap()),
                ops: vec![op],
                comparators: vec![*left],
            };
            kind
        }
        (6, StmtKind::For { target, iter, body }) => {
            let Expr::Call { func, mut args, kwargs } = iter else {
                unreachable!("R6 match guarantees a range call");
            };
            if args.len() == 2 {
                args.remove(0);
            } else {
                args.insert(0, Expr::Num("0".to_string()));
            }
            StmtKind::For {
                target,
                iter: Expr::Call { func, args, kwargs },
                body,
            }
        }
        _ => unreachable!("toggle_kind called on a non-matching site"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pysrc::{parse_module, render, Module};

    fn module(src: &str) -> Module {
        parse_module(src).unwrap()
    }

    fn state_at(src: &str, idx: usize, rule: u8) -> Result<u8, RuleError> {
        let m = module(src);
        let prev = if idx > 0 { Some(&m.body[idx - 1]) } else { None };
        detect_state(&m.body[idx], prev, rule)
    }

    #[test]
    fn r1_states() {
        assert_eq!(state_at("x += 1\n", 0, 1), Ok(1));
        assert_eq!(state_at("x = x + 1\n", 0, 1), Ok(0));
        assert_eq!(state_at("x = y + 1\n", 0, 1), Err(RuleError::NotAnAnchor(1)));
        assert_eq!(state_at("x = x / 2\n", 0, 1), Err(RuleError::NotAnAnchor(1)));
    }

    #[test]
    fn r1_toggle_renders_expected() {
        let mut m = module("x = x + 1\n");
        apply(&mut m.body[0], None, 1).unwrap();
        assert_eq!(render(&m), "x += 1\n");
        reverse(&mut m.body[0], None, 1).unwrap();
        assert_eq!(render(&m), "x = x + 1\n");
    }

    #[test]
    fn r2_states_and_toggle() {
        let src = "out = []\nfor i in range(n):\n    out.append(i * i)\n";
        assert_eq!(state_at(src, 1, 2), Ok(0));
        let mut m = module(src);
        let prev = m.body[0].clone();
        apply(&mut m.body[1], Some(&prev), 2).unwrap();
        assert_eq!(render(&m), "out = []\nout = [i * i for i in range(n)]\n");
        assert_eq!(detect_state(&m.body[1], Some(&prev), 2), Ok(1));
        reverse(&mut m.body[1], Some(&prev), 2).unwrap();
        assert_eq!(render(&m), src);
    }

    #[test]
    fn r2_requires_initializer_and_independence() {
        // No preceding `out = []`.
        let src = "for i in range(n):\n    out.append(i)\n";
        assert_eq!(state_at(src, 0, 2), Err(RuleError::NotAnAnchor(2)));
        // Element mentions the accumulator.
        let src = "out = []\nfor i in xs:\n    out.append(out)\n";
        assert_eq!(state_at(src, 1, 2), Err(RuleError::NotAnAnchor(2)));
    }

    #[test]
    fn r3_states_and_toggle() {
        let src = "if not (a == b):\n    pass\n";
        assert_eq!(state_at(src, 0, 3), Ok(0));
        let mut m = module(src);
        apply(&mut m.body[0], None, 3).unwrap();
        assert_eq!(render(&m), "if a != b:\n    pass\n");
        reverse(&mut m.body[0], None, 3).unwrap();
        assert_eq!(render(&m), "if not a == b:\n    pass\n");
        assert_eq!(state_at("while a != b:\n    pass\n", 0, 3), Ok(1));
    }

    #[test]
    fn r4_states_and_toggle() {
        let src = "def f(x):\n    if x > 0:\n        return True\n    else:\n        return False\n";
        let mut m = module(src);
        let StmtKind::FunctionDef { body, .. } = &mut m.body[0].kind else {
            panic!()
        };
        assert_eq!(detect_state(&body[0], None, 4), Ok(0));
        apply(&mut body[0], None, 4).unwrap();
        assert_eq!(render(&m), "def f(x):\n    return bool(x > 0)\n");
        let StmtKind::FunctionDef { body, .. } = &mut m.body[0].kind else {
            panic!()
        };
        assert_eq!(detect_state(&body[0], None, 4), Ok(1));
        reverse(&mut body[0], None, 4).unwrap();
        assert_eq!(render(&m), src);
    }

    #[test]
    fn r5_states_and_toggle() {
        assert_eq!(state_at("if a < 3:\n    pass\n", 0, 5), Ok(0));
        assert_eq!(state_at("if 3 > a:\n    pass\n", 0, 5), Ok(1));
        // Two non-literals or two literals: ambiguous, not an anchor.
        assert_eq!(state_at("if a < b:\n    pass\n", 0, 5), Err(RuleError::NotAnAnchor(5)));
        assert_eq!(state_at("if 1 < 3:\n    pass\n", 0, 5), Err(RuleError::NotAnAnchor(5)));
        let mut m = module("while n >= 10:\n    n -= 1\n");
        apply(&mut m.body[0], None, 5).unwrap();
        assert_eq!(render(&m), "while 10 <= n:\n    n -= 1\n");
        reverse(&mut m.body[0], None, 5).unwrap();
        assert_eq!(render(&m), "while n >= 10:\n    n -= 1\n");
    }

    #[test]
    fn r6_states_and_toggle() {
        assert_eq!(state_at("for i in range(0, n):\n    pass\n", 0, 6), Ok(0));
        assert_eq!(state_at("for i in range(n):\n    pass\n", 0, 6), Ok(1));
        assert_eq!(
            state_at("for i in range(1, n):\n    pass\n", 0, 6),
            Err(RuleError::NotAnAnchor(6))
        );
        let mut m = module("for i in range(0, n):\n    pass\n");
        apply(&mut m.body[0], None, 6).unwrap();
        assert_eq!(render(&m), "for i in range(n):\n    pass\n");
        reverse(&mut m.body[0], None, 6).unwrap();
        assert_eq!(render(&m), "for i in range(0, n):\n    pass\n");
    }

    #[test]
    fn lowest_rule_id_claims_site() {
        // This `if` matches both R3 (negated equality) and R4 (boolean return).
        let src = "def f(a, b):\n    if not (a == b):\n        return True\n    else:\n        return False\n";
        let m = module(src);
        let StmtKind::FunctionDef { body, .. } = &m.body[0].kind else {
            panic!()
        };
        assert_eq!(classify(&body[0], None, 0b11_1111), Some((3, 0)));
        // With R3 disabled, R4 claims it.
        assert_eq!(classify(&body[0], None, 0b11_1111 & !0b100), Some((4, 0)));
    }

    #[test]
    fn classify_stable_across_claimed_toggle() {
        // Toggling a site's claiming rule must not change which rule claims it.
        let cases = [
            ("x = x + 1\n", 0),
            ("out = []\nfor i in range(0, n):\n    out.append(i)\n", 1),
            ("if not (a == b):\n    return True\nelse:\n    return False\n", 0),
            ("if a < 3:\n    return True\nelse:\n    return False\n", 0),
        ];
        for (src, idx) in cases {
            let mut m = module(src);
            let prev = if idx > 0 { Some(m.body[idx - 1].clone()) } else { None };
            let (rule, s0) = classify(&m.body[idx], prev.as_ref(), 0b11_1111).unwrap();
            set_state(&mut m.body[idx], prev.as_ref(), rule, 1 - s0).unwrap();
            let after = classify(&m.body[idx], prev.as_ref(), 0b11_1111).unwrap();
            assert_eq!(after, (rule, 1 - s0), "claim moved for {src:?}");
        }
    }

    #[test]
    fn reverse_after_apply_is_identity_on_synthetic_sites() {
        let mut sites: Vec<(String, usize)> = Vec::new();
        let ops = ["+", "-", "*"];
        for i in 0..17 {
            let op = ops[i % 3];
            sites.push((format!("v{i} = v{i} {op} {}\n", i + 1), 0));
            sites.push((
                format!("acc{i} = []\nfor e{i} in src{i}:\n    acc{i}.append(e{i} {op} {i})\n"),
                1,
            ));
            sites.push((format!("if not (a{i} == {i}):\n    x = {i}\n", i = i), 0));
            sites.push((
                format!("if p{i} and q{i}:\n    return True\nelse:\n    return False\n"),
                0,
            ));
            let cmp = ["<", ">", "<=", ">="][i % 4];
            sites.push((format!("while n{i} {cmp} {}:\n    pass\n", i + 2), 0));
            sites.push((format!("for j{i} in range(0, m{i}):\n    f(j{i})\n"), 0));
        }
        assert!(sites.len() >= 50 * 2);
        for (src, idx) in sites {
            let original = module(&src);
            let mut m = original.clone();
            let prev = if idx > 0 { Some(m.body[idx - 1].clone()) } else { None };
            let (rule, s) = classify(&m.body[idx], prev.as_ref(), 0b11_1111)
                .unwrap_or_else(|| panic!("no anchor in {src:?}"));
            assert_eq!(s, 0, "site not in untransformed form: {src:?}");
            apply(&mut m.body[idx], prev.as_ref(), rule).unwrap();
            assert_eq!(detect_state(&m.body[idx], prev.as_ref(), rule), Ok(1));
            reverse(&mut m.body[idx], prev.as_ref(), rule).unwrap();
            assert_eq!(m, original, "round trip changed {src:?}");
        }
    }
}
