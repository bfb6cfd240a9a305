//! Anchor identification, canonical ordering, and grouping for both channels.
//!
//! Ordering must survive the very transformations that carry the watermark,
//! so everything here is computed on positions, never on mutable spellings:
//! formal anchors sort by (rule id, pre-order statement index); natural
//! variables sort by the first occurrence of their canonical identifier in a
//! canonicalized view of the tree (all formal anchors reversed, all renaming
//! variants stripped), which both embedding and detection reconstruct
//! identically.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::config::ToolkitConfig;
use crate::gf2::Grouping;
use crate::pysrc::ast::{Expr, Module, Stmt, StmtKind};
use crate::pysrc::{stmt_at, stmt_at_mut, walk, StmtPath};
use crate::rules::{
    apply_variants, classify, decomposes_uniquely, set_state, strip_variants, VariantSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Channel {
    Formal,
    Natural,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalAnchor {
    pub rule_id: u8,
    pub path: StmtPath,
    pub state: u8,
    /// Pre-order statement index; stands in for source position.
    pub order: u32,
}

/// One natural-channel variable: a group of three variant anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableAnchor {
    pub canonical: String,
    /// The identifier as it currently appears in the program.
    pub current: String,
    /// Address of the owning `def`.
    pub scope: StmtPath,
    /// Variant states in id order (Underline, InitialCapitalization, Suffix).
    pub states: [u8; 3],
    /// First-occurrence position in the canonicalized tree.
    pub order: u32,
}

#[derive(Debug, Clone, Default)]
pub struct AnchorIndex {
    pub formal: Vec<FormalAnchor>,
    pub variables: Vec<VariableAnchor>,
}

impl AnchorIndex {
    pub fn formal_states(&self) -> Vec<u8> {
        self.formal.iter().map(|a| a.state).collect()
    }

    /// Natural anchor states flattened three per variable.
    pub fn natural_states(&self) -> Vec<u8> {
        self.variables.iter().flat_map(|v| v.states).collect()
    }

    pub fn count(&self, channel: Channel) -> usize {
        match channel {
            Channel::Formal => self.formal.len(),
            Channel::Natural => self.variables.len() * 3,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{channel:?} channel has {have} anchors, needs {need}")]
pub struct InsufficientAnchors {
    pub channel: Channel,
    pub have: usize,
    pub need: usize,
}

/// Splits the first q·α anchors of a channel into q consecutive groups.
/// Anchors beyond them take no part in encoding or verification.
pub fn group_anchors(
    index: &AnchorIndex,
    channel: Channel,
    alpha: usize,
    q: usize,
) -> Result<Grouping, InsufficientAnchors> {
    let have = index.count(channel);
    let need = q * alpha;
    if have < need {
        return Err(InsufficientAnchors { channel, have, need });
    }
    Ok(Grouping::consecutive(q, alpha))
}

fn prev_sibling<'a>(module: &'a Module, path: &StmtPath) -> Option<&'a Stmt> {
    let idx = path.index();
    if idx == 0 {
        return None;
    }
    stmt_at(module, &path.sibling(idx - 1))
}

pub fn identify_anchors(module: &Module, cfg: &ToolkitConfig) -> AnchorIndex {
    let mut formal = Vec::new();
    for (order, (path, stmt)) in walk(module).iter().enumerate() {
        let prev = prev_sibling(module, path);
        if let Some((rule_id, state)) = classify(stmt, prev, cfg.enabled_rules) {
            formal.push(FormalAnchor {
                rule_id,
                path: path.clone(),
                state,
                order: order as u32,
            });
        }
    }
    formal.sort_by(|a, b| (a.rule_id, a.order).cmp(&(b.rule_id, b.order)));

    AnchorIndex {
        formal,
        variables: identify_variables(module, cfg),
    }
}

/// Reverses every formal anchor to state 0 on a clone of the tree. The result
/// is the same no matter which states the input carried.
pub fn normalize_formal(module: &Module, enabled_mask: u8) -> Module {
    let mut out = module.clone();
    let paths: Vec<StmtPath> = walk(&out).into_iter().map(|(p, _)| p).collect();
    for path in paths {
        let prev = prev_sibling(&out, &path).cloned();
        let stmt = stmt_at(&out, &path).expect("walk paths are valid");
        if let Some((rule, 1)) = classify(stmt, prev.as_ref(), enabled_mask) {
            let stmt = stmt_at_mut(&mut out, &path).expect("walk paths are valid");
            set_state(stmt, prev.as_ref(), rule, 0).expect("classified site toggles");
        }
    }
    out
}

// ---- natural channel ----

/// Per-def facts gathered from the canonical tree.
struct ScopeFacts {
    path: StmtPath,
    parent: Option<usize>,
    /// First token position per name (canonical tree, global counter).
    first_seen: HashMap<String, u32>,
    /// Canonically-named variables bound here, in binding order.
    bound: Vec<String>,
    /// Tokens of the real tree that are not occurrences of this scope's own
    /// variables. These never change under embedding, so collision checks
    /// against them agree between embedding and detection.
    stable: HashSet<String>,
}

fn identify_variables(module: &Module, cfg: &ToolkitConfig) -> Vec<VariableAnchor> {
    let canonical = canonicalize(module, cfg);
    let mut scopes = vec![ScopeFacts {
        path: StmtPath(Vec::new()),
        parent: None,
        first_seen: HashMap::new(),
        bound: Vec::new(),
        stable: HashSet::new(),
    }];
    let mut counter = 0u32;
    scan_block(&canonical.body, &StmtPath(Vec::new()), 0, 0, &mut scopes, &mut counter);

    // Fill in stable tokens from the real tree (same scope discovery order:
    // canonicalization never moves a def).
    for sid in 0..scopes.len() {
        let (tokens, erase): (HashSet<String>, HashSet<String>) = if sid == 0 {
            let mut t = HashSet::new();
            collect_scope_tokens(&module.body, &mut |n| {
                t.insert(n.to_string());
            });
            (t, HashSet::new())
        } else {
            let def = stmt_at(module, &scopes[sid].path).expect("scope paths address real defs");
            let StmtKind::FunctionDef { params, body, .. } = &def.kind else {
                unreachable!("scopes point at defs");
            };
            let mut t: HashSet<String> = params.iter().cloned().collect();
            collect_scope_tokens(body, &mut |n| {
                t.insert(n.to_string());
            });
            (t, bound_names_of_def(def).into_iter().collect())
        };
        scopes[sid].stable = tokens.difference(&erase).cloned().collect();
    }

    // Collision pool per scope: its own stable tokens, every nested scope's,
    // and everything visible at the top level.
    let mut pools: Vec<HashSet<String>> = scopes.iter().map(|s| s.stable.clone()).collect();
    for i in (1..scopes.len()).rev() {
        if let Some(p) = scopes[i].parent {
            let child = pools[i].clone();
            pools[p].extend(child);
        }
    }
    let top = pools[0].clone();

    let mut variables = Vec::new();
    for (sid, scope) in scopes.iter().enumerate().skip(1) {
        // Spellings in the real tree, keyed by canonical name.
        let real_def = stmt_at(module, &scope.path).expect("scope paths address real defs");
        let mut current: BTreeMap<String, String> = BTreeMap::new();
        let mut duplicated: HashSet<String> = HashSet::new();
        for real_name in bound_names_of_def(real_def) {
            let (canon, _) = strip_variants(&real_name, &cfg.suffix_table);
            match current.get(&canon) {
                Some(existing) if *existing != real_name => {
                    duplicated.insert(canon);
                }
                Some(_) => {}
                None => {
                    current.insert(canon, real_name);
                }
            }
        }

        let mut candidates: Vec<&String> = scope
            .bound
            .iter()
            .filter(|c| !duplicated.contains(*c) && decomposes_uniquely(c, &cfg.suffix_table))
            .collect();
        let forms: HashMap<&String, HashSet<String>> = candidates
            .iter()
            .map(|c| {
                let set = VariantSet::all()
                    .iter()
                    .map(|v| apply_variants(c, *v, &cfg.suffix_table))
                    .collect::<HashSet<_>>();
                (*c, set)
            })
            .collect();
        // Drop variables any of whose renamed forms (including the canonical
        // spelling itself) would shadow a stable name visible in the scope,
        // then any pair whose form sets overlap.
        let pool: HashSet<&String> = pools[sid].iter().chain(top.iter()).collect();
        candidates.retain(|c| forms[*c].iter().all(|f| !pool.contains(f)));
        let mut overlapping: HashSet<String> = HashSet::new();
        for c in &candidates {
            for d in &candidates {
                if c != d && !forms[*c].is_disjoint(&forms[*d]) {
                    overlapping.insert((*c).clone());
                    overlapping.insert((*d).clone());
                }
            }
        }
        candidates.retain(|c| !overlapping.contains(*c));

        for canon in candidates {
            let Some(real_name) = current.get(canon) else {
                continue;
            };
            let states = strip_variants(real_name, &cfg.suffix_table).1.states();
            variables.push(VariableAnchor {
                canonical: canon.clone(),
                current: real_name.clone(),
                scope: scope.path.clone(),
                states,
                order: scope.first_seen[canon],
            });
        }
    }
    variables.sort_by_key(|v| (v.order, v.canonical.clone()));
    variables
}

/// Clone with all formal anchors reversed and every strippable bound
/// identifier renamed back to its canonical form.
fn canonicalize(module: &Module, cfg: &ToolkitConfig) -> Module {
    let mut out = normalize_formal(module, cfg.enabled_rules);
    let defs: Vec<StmtPath> = walk(&out)
        .into_iter()
        .filter(|(_, s)| matches!(s.kind, StmtKind::FunctionDef { .. }))
        .map(|(p, _)| p)
        .collect();
    for path in defs {
        let stmt = stmt_at(&out, &path).unwrap();
        let renames: Vec<(String, String)> = bound_names_of_def(stmt)
            .into_iter()
            .filter_map(|name| {
                let (canon, set) = strip_variants(&name, &cfg.suffix_table);
                (set != VariantSet::empty()).then_some((name, canon))
            })
            .collect();
        let stmt = stmt_at_mut(&mut out, &path).unwrap();
        for (from, to) in renames {
            rename_in_def(stmt, &from, &to);
        }
    }
    out
}

/// Names bound inside one `def` (params, assignment/loop/comprehension
/// targets), in first-binding order, not descending into nested defs.
pub fn bound_names_of_def(stmt: &Stmt) -> Vec<String> {
    let StmtKind::FunctionDef { params, body, .. } = &stmt.kind else {
        return Vec::new();
    };
    let mut out: Vec<String> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for p in params {
        if seen.insert(p.clone()) {
            out.push(p.clone());
        }
    }
    collect_bound(body, &mut |n| {
        if seen.insert(n.to_string()) {
            out.push(n.to_string());
        }
    });
    out
}

fn collect_bound(stmts: &[Stmt], push: &mut dyn FnMut(&str)) {
    for stmt in stmts {
        match &stmt.kind {
            StmtKind::FunctionDef { .. } => {}
            StmtKind::Assign { targets, value } => {
                for t in targets {
                    target_names(t, push);
                }
                comp_targets(value, push);
            }
            StmtKind::AugAssign { target, value, .. } => {
                target_names(target, push);
                comp_targets(value, push);
            }
            StmtKind::For { target, iter, body } => {
                target_names(target, push);
                comp_targets(iter, push);
                collect_bound(body, push);
            }
            StmtKind::If { test, body, orelse } => {
                comp_targets(test, push);
                collect_bound(body, push);
                collect_bound(orelse, push);
            }
            StmtKind::While { test, body } => {
                comp_targets(test, push);
                collect_bound(body, push);
            }
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => comp_targets(e, push),
            StmtKind::Assert { test, msg } => {
                comp_targets(test, push);
                if let Some(m) = msg {
                    comp_targets(m, push);
                }
            }
            _ => {}
        }
    }
}

/// Simple binding targets: names and tuples of names.
fn target_names(e: &Expr, f: &mut dyn FnMut(&str)) {
    match e {
        Expr::Name(n) => f(n),
        Expr::Tuple(items) => {
            for t in items {
                target_names(t, f);
            }
        }
        _ => {}
    }
}

/// Comprehension targets bind names too, anywhere inside an expression.
fn comp_targets(e: &Expr, f: &mut dyn FnMut(&str)) {
    match e {
        Expr::Name(_) | Expr::Num(_) | Expr::Str(_) | Expr::Bool(_) | Expr::NoneLit => {}
        Expr::Tuple(items) | Expr::List(items) => items.iter().for_each(|x| comp_targets(x, f)),
        Expr::Dict(pairs) => pairs.iter().for_each(|(k, v)| {
            comp_targets(k, f);
            comp_targets(v, f);
        }),
        Expr::BinOp { left, right, .. } => {
            comp_targets(left, f);
            comp_targets(right, f);
        }
        Expr::UnaryOp { operand, .. } => comp_targets(operand, f),
        Expr::BoolOp { values, .. } => values.iter().for_each(|x| comp_targets(x, f)),
        Expr::Compare {
            left, comparators, ..
        } => {
            comp_targets(left, f);
            comparators.iter().for_each(|x| comp_targets(x, f));
        }
        Expr::Call { func, args, kwargs } => {
            comp_targets(func, f);
            args.iter().for_each(|x| comp_targets(x, f));
            kwargs.iter().for_each(|(_, v)| comp_targets(v, f));
        }
        Expr::Attribute { value, .. } => comp_targets(value, f),
        Expr::Subscript { value, index } => {
            comp_targets(value, f);
            comp_targets(index, f);
        }
        Expr::Slice { lower, upper } => {
            lower.iter().for_each(|x| comp_targets(x, f));
            upper.iter().for_each(|x| comp_targets(x, f));
        }
        Expr::ListComp {
            elt,
            target,
            iter,
            cond,
        } => {
            target_names(target, f);
            comp_targets(elt, f);
            comp_targets(iter, f);
            cond.iter().for_each(|x| comp_targets(x, f));
        }
    }
}

/// Renames a variable throughout one `def`, skipping nested defs.
pub fn rename_in_def(stmt: &mut Stmt, from: &str, to: &str) {
    let StmtKind::FunctionDef { params, body, .. } = &mut stmt.kind else {
        return;
    };
    for p in params.iter_mut() {
        if p == from {
            *p = to.to_string();
        }
    }
    rename_in_block(body, from, to);
}

fn rename_in_block(stmts: &mut [Stmt], from: &str, to: &str) {
    for stmt in stmts {
        match &mut stmt.kind {
            StmtKind::FunctionDef { .. } => {}
            StmtKind::If { test, body, orelse } => {
                test.rename(from, to);
                rename_in_block(body, from, to);
                rename_in_block(orelse, from, to);
            }
            StmtKind::While { test, body } => {
                test.rename(from, to);
                rename_in_block(body, from, to);
            }
            StmtKind::For { target, iter, body } => {
                target.rename(from, to);
                iter.rename(from, to);
                rename_in_block(body, from, to);
            }
            StmtKind::Assign { targets, value } => {
                targets.iter_mut().for_each(|t| t.rename(from, to));
                value.rename(from, to);
            }
            StmtKind::AugAssign { target, value, .. } => {
                target.rename(from, to);
                value.rename(from, to);
            }
            StmtKind::Return(Some(e)) | StmtKind::Expr(e) => e.rename(from, to),
            StmtKind::Assert { test, msg } => {
                test.rename(from, to);
                if let Some(m) = msg {
                    m.rename(from, to);
                }
            }
            _ => {}
        }
    }
}

// Single deterministic pass over the canonical tree: records used tokens,
// first-seen positions, and bound variables per scope. `scope` 0 is the
// module level, which never contributes variables but feeds collision pools.
fn scan_block(
    stmts: &[Stmt],
    prefix: &StmtPath,
    block: u8,
    scope: usize,
    scopes: &mut Vec<ScopeFacts>,
    counter: &mut u32,
) {
    for (i, stmt) in stmts.iter().enumerate() {
        let mut p = prefix.0.clone();
        p.push((block, i as u32));
        let path = StmtPath(p);
        if let StmtKind::FunctionDef { name, params, body } = &stmt.kind {
            see(scopes, scope, name, counter);
            let sid = scopes.len();
            scopes.push(ScopeFacts {
                path: path.clone(),
                parent: Some(scope),
                first_seen: HashMap::new(),
                bound: Vec::new(),
                stable: HashSet::new(),
            });
            for param in params {
                see(scopes, sid, param, counter);
                bind(scopes, sid, param);
            }
            scan_block(body, &path, 0, sid, scopes, counter);
            continue;
        }

        for e in stmt_exprs(&stmt.kind) {
            e.visit_names(&mut |n| see(scopes, scope, n, counter));
        }
        if scope != 0 {
            let mut bound = Vec::new();
            collect_bound(std::slice::from_ref(stmt), &mut |n| bound.push(n.to_string()));
            for n in bound {
                bind(scopes, scope, &n);
            }
        }

        match &stmt.kind {
            StmtKind::If { body, orelse, .. } => {
                scan_block(body, &path, 0, scope, scopes, counter);
                scan_block(orelse, &path, 1, scope, scopes, counter);
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
                scan_block(body, &path, 0, scope, scopes, counter);
            }
            _ => {}
        }
    }
}

/// Expressions of a simple statement, in rendering order.
fn stmt_exprs(kind: &StmtKind) -> Vec<&Expr> {
    match kind {
        StmtKind::Assign { targets, value } => {
            targets.iter().chain(std::iter::once(value)).collect()
        }
        StmtKind::AugAssign { target, value, .. } => vec![target, value],
        StmtKind::For { target, iter, .. } => vec![target, iter],
        StmtKind::If { test, .. } | StmtKind::While { test, .. } => vec![test],
        StmtKind::Return(Some(e)) | StmtKind::Expr(e) => vec![e],
        StmtKind::Assert { test, msg } => {
            std::iter::once(test).chain(msg.iter()).collect()
        }
        _ => vec![],
    }
}

fn see(scopes: &mut [ScopeFacts], scope: usize, name: &str, counter: &mut u32) {
    *counter += 1;
    let s = &mut scopes[scope];
    s.first_seen.entry(name.to_string()).or_insert(*counter);
}

/// Identifier tokens of a statement block, not descending into nested defs
/// (each def contributes its own scope; only its name belongs to this one).
fn collect_scope_tokens(stmts: &[Stmt], f: &mut dyn FnMut(&str)) {
    for stmt in stmts {
        if let StmtKind::FunctionDef { name, .. } = &stmt.kind {
            f(name);
            continue;
        }
        for e in stmt_exprs(&stmt.kind) {
            e.visit_names(f);
        }
        match &stmt.kind {
            StmtKind::If { body, orelse, .. } => {
                collect_scope_tokens(body, f);
                collect_scope_tokens(orelse, f);
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => {
                collect_scope_tokens(body, f);
            }
            _ => {}
        }
    }
}

fn bind(scopes: &mut [ScopeFacts], scope: usize, name: &str) {
    let s = &mut scopes[scope];
    if !s.bound.iter().any(|b| b == name) {
        s.bound.push(name.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pysrc::parse_module;

    fn cfg() -> ToolkitConfig {
        ToolkitConfig::default()
    }

    fn index_of(src: &str) -> AnchorIndex {
        identify_anchors(&parse_module(src).unwrap(), &cfg())
    }

    #[test]
    fn formal_ordering_and_states() {
        let src = "x += 1\nout = []\nfor i in range(n):\n    out.append(i)\n";
        let idx = index_of(src);
        let summary: Vec<(u8, u8)> = idx.formal.iter().map(|a| (a.rule_id, a.state)).collect();
        assert_eq!(summary, vec![(1, 1), (2, 0)]);
    }

    #[test]
    fn formal_sorted_by_rule_then_position() {
        let src = "for i in range(n):\n    pass\nx = x + 1\nif a != 0:\n    pass\ny += 2\n";
        let idx = index_of(src);
        let rules: Vec<u8> = idx.formal.iter().map(|a| a.rule_id).collect();
        assert_eq!(rules, vec![1, 1, 3, 6]);
        // Within R1, textual order: `x = x + 1` before `y += 2`.
        assert!(idx.formal[0].order < idx.formal[1].order);
    }

    #[test]
    fn variable_states_from_decomposition() {
        let src = "def f(Count_, flag):\n    return Count_ + flag\n";
        let idx = index_of(src);
        let vars: Vec<(&str, [u8; 3])> = idx
            .variables
            .iter()
            .map(|v| (v.canonical.as_str(), v.states))
            .collect();
        // (Underline, InitialCapitalization, Suffix) per variable.
        assert_eq!(vars, vec![("count", [1, 1, 0]), ("flag", [0, 0, 0])]);
        assert_eq!(idx.variables[0].current, "Count_");
    }

    #[test]
    fn natural_order_is_first_occurrence() {
        let src = "def f(n):\n    total = 0\n    for i in range(n):\n        total = total + i\n    return total\n";
        let idx = index_of(src);
        let order: Vec<&str> = idx.variables.iter().map(|v| v.canonical.as_str()).collect();
        assert_eq!(order, vec!["n", "total", "i"]);
    }

    #[test]
    fn colliding_names_are_excluded() {
        // `count` and `count_` in one scope collide after stripping.
        let src = "def f(count, count_):\n    return count + count_\n";
        let idx = index_of(src);
        assert!(idx.variables.is_empty());
        // A name equal to a used function is excluded, an unrelated one stays.
        let src = "def f(x):\n    helper_ = 1\n    return helper(x) + helper_\n";
        let idx = index_of(src);
        let names: Vec<&str> = idx.variables.iter().map(|v| v.canonical.as_str()).collect();
        assert_eq!(names, vec!["x"]);
    }

    #[test]
    fn ordering_invariant_under_formal_toggles_and_renames() {
        let src = "def f(n):\n    out = []\n    for i in range(0, n):\n        out.append(i * i)\n    if not (n == 0):\n        total = n\n    return out\n";
        let module = parse_module(src).unwrap();
        let base = identify_anchors(&module, &cfg());

        // Toggle every formal anchor.
        let mut toggled = module.clone();
        let anchors = base.formal.clone();
        for a in &anchors {
            let prev = prev_sibling(&toggled, &a.path).cloned();
            let stmt = stmt_at_mut(&mut toggled, &a.path).unwrap();
            set_state(stmt, prev.as_ref(), a.rule_id, 1 - a.state).unwrap();
        }
        let after = identify_anchors(&toggled, &cfg());
        let base_rules: Vec<u8> = base.formal.iter().map(|a| a.rule_id).collect();
        let after_rules: Vec<u8> = after.formal.iter().map(|a| a.rule_id).collect();
        assert_eq!(base_rules, after_rules);
        for (b, a) in base.formal.iter().zip(&after.formal) {
            assert_eq!(a.state, 1 - b.state);
        }
        let base_vars: Vec<&str> = base.variables.iter().map(|v| v.canonical.as_str()).collect();
        let after_vars: Vec<&str> = after.variables.iter().map(|v| v.canonical.as_str()).collect();
        assert_eq!(base_vars, after_vars);

        // Rename a variable into one of its variant forms.
        let mut renamed = module.clone();
        let def = stmt_at_mut(&mut renamed, &base.variables[0].scope).unwrap();
        let table = cfg().suffix_table;
        let new = apply_variants(&base.variables[0].canonical, VariantSet::of(&[crate::rules::Variant::Underline]), &table);
        rename_in_def(def, &base.variables[0].current, &new);
        let after = identify_anchors(&renamed, &cfg());
        let after_vars: Vec<&str> = after.variables.iter().map(|v| v.canonical.as_str()).collect();
        assert_eq!(base_vars, after_vars);
        assert_eq!(after.variables[0].states, [1, 0, 0]);
    }

    #[test]
    fn grouping_prefix_rule() {
        let mut idx = AnchorIndex::default();
        for i in 0..13 {
            idx.formal.push(FormalAnchor {
                rule_id: 1,
                path: StmtPath(vec![(0, i)]),
                state: 0,
                order: i,
            });
        }
        let g = group_anchors(&idx, Channel::Formal, 3, 4).unwrap();
        assert_eq!(g.groups().len(), 4);
        assert_eq!(g.groups()[0], vec![0, 1, 2]);
        assert_eq!(g.groups()[3], vec![9, 10, 11]);
        idx.formal.truncate(5);
        assert_eq!(
            group_anchors(&idx, Channel::Formal, 3, 4),
            Err(InsufficientAnchors {
                channel: Channel::Formal,
                have: 5,
                need: 12
            })
        );
    }

    #[test]
    fn hand_audited_corpus_counts() {
        // Twelve small programs with hand-counted anchors.
        let audited: &[(&str, usize, usize)] = &[
            // (source, formal anchors, natural variables)
            ("x = 1\n", 0, 0),
            ("x = x + 1\n", 1, 0),
            ("def f(a):\n    return a\n", 0, 1),
            ("def f(a):\n    a += 1\n    return a\n", 1, 1),
            (
                "def f(n):\n    out = []\n    for i in range(0, n):\n        out.append(i)\n    return out\n",
                1, // the loop is claimed by R2; R6 is suppressed
                3,
            ),
            ("if not (a == b):\n    pass\n", 1, 0),
            (
                "def f(x):\n    if x > 0:\n        return True\n    else:\n        return False\n",
                1, 1,
            ),
            ("while n < 10:\n    n = n + 2\n", 2, 0),
            ("for i in range(5):\n    pass\n", 1, 0),
            (
                "def g(a, b):\n    if a != b:\n        a += 1\n    return bool(a == b)\n",
                3, // R3 on the if, R1 inside, R4 on `return bool(...)`
                2,
            ),
            ("import os\n\n# comment\npass\n", 0, 0),
            (
                "def h(items):\n    total = 0\n    for v in items:\n        total += v\n    return total\n",
                1, 3,
            ),
        ];
        for (src, formal, vars) in audited {
            let idx = index_of(src);
            assert_eq!(idx.formal.len(), *formal, "formal count for {src:?}");
            assert_eq!(idx.variables.len(), *vars, "variable count for {src:?}");
        }
    }
}
