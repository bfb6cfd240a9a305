//! Semantics-preserving attacks used by the robustness experiments.

use rand::Rng;

use crate::anchors::{bound_names_of_def, identify_anchors, rename_in_def};
use crate::config::ToolkitConfig;
use crate::pysrc::{render, render_with_style, stmt_at, stmt_at_mut, walk, RenderStyle, StmtKind};
use crate::rules::set_state;
use crate::SubjectProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// Renames each variable to a fresh random identifier with probability
    /// `intensity`.
    VariableRename,
    /// Toggles each formal anchor with probability `intensity` — a worst-case
    /// refactorer that happens to know the rule set.
    Refactor,
    /// Re-renders with different whitespace conventions; the tree is
    /// untouched.
    Reformat,
}

impl AttackKind {
    pub fn parse(s: &str) -> Option<AttackKind> {
        match s {
            "rename" => Some(AttackKind::VariableRename),
            "refactor" => Some(AttackKind::Refactor),
            "reformat" => Some(AttackKind::Reformat),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub intensity: f64,
}

impl AttackSpec {
    /// Parses "kind:intensity", e.g. "rename:1.0".
    pub fn parse(s: &str) -> Option<AttackSpec> {
        let (kind, intensity) = s.split_once(':')?;
        Some(AttackSpec {
            kind: AttackKind::parse(kind)?,
            intensity: intensity.parse().ok().filter(|i| (0.0..=1.0).contains(i))?,
        })
    }
}

pub fn attack(
    program: &SubjectProgram,
    spec: &AttackSpec,
    cfg: &ToolkitConfig,
    rng: &mut impl Rng,
) -> SubjectProgram {
    if spec.intensity == 0.0 {
        return program.clone();
    }
    match spec.kind {
        AttackKind::VariableRename => {
            let mut tree = program.tree.clone();
            let defs: Vec<_> = walk(&tree)
                .into_iter()
                .filter(|(_, s)| matches!(s.kind, StmtKind::FunctionDef { .. }))
                .map(|(p, _)| p)
                .collect();
            let mut fresh = 0u32;
            for path in defs {
                let names = bound_names_of_def(stmt_at(&tree, &path).unwrap());
                for name in names {
                    if rng.gen_bool(spec.intensity) {
                        fresh += 1;
                        let new = format!("zz{fresh}q{}", rng.gen_range(100..1000));
                        rename_in_def(stmt_at_mut(&mut tree, &path).unwrap(), &name, &new);
                    }
                }
            }
            rebuilt(program, tree)
        }
        AttackKind::Refactor => {
            let mut tree = program.tree.clone();
            let index = identify_anchors(&tree, cfg);
            for anchor in &index.formal {
                if rng.gen_bool(spec.intensity) {
                    let prev = if anchor.path.index() > 0 {
                        stmt_at(&tree, &anchor.path.sibling(anchor.path.index() - 1)).cloned()
                    } else {
                        None
                    };
                    let stmt = stmt_at_mut(&mut tree, &anchor.path).unwrap();
                    set_state(stmt, prev.as_ref(), anchor.rule_id, 1 - anchor.state)
                        .expect("identified anchors toggle");
                }
            }
            rebuilt(program, tree)
        }
        AttackKind::Reformat => {
            let style = RenderStyle {
                indent: ["  ", "\t", "        ", "   "][rng.gen_range(0..4)].to_string(),
                tight: rng.gen_bool(0.5),
            };
            let text = render_with_style(&program.tree, &style);
            SubjectProgram::parse(&text, &program.path).expect("restyled output re-parses")
        }
    }
}

fn rebuilt(original: &SubjectProgram, tree: crate::pysrc::Module) -> SubjectProgram {
    SubjectProgram {
        text: render(&tree),
        tree,
        path: original.path.clone(),
    }
}
