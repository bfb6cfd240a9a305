//! Insertion and extraction across both channels with adaptive capacity.
//!
//! Capacity ladder per channel (n = usable anchors, l/k from the configured
//! code, α the group size, fixed = the organization's fixed code):
//!   Case1  n ≥ α·l        embed a sampled codeword of the message
//!   Case2  α·k ≤ n < α·l  embed the raw message bits
//!   Case3  |fixed| ≤ n     embed the fixed code under a unit matrix (α=1, τ=1)
//!   otherwise              the channel is skipped
//! Extraction evaluates the same ladder on the anchor count it observes.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anchors::{identify_anchors, AnchorIndex, Channel};
use crate::bits::{bits_to_string, is_all_zero};
use crate::codec::{decode, sample_watermark, CodecError};
use crate::config::ToolkitConfig;
use crate::gf2::{solve_constrained, threshold_groups, Grouping, ParityCheckMatrix};
use crate::pysrc::{stmt_at, stmt_at_mut, Module};
use crate::registry::{unit_matrix, OrganizationProfile, Registry, RegistryError};
use crate::rules::{apply_variants, set_state, VariantSet};
use crate::SubjectProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapacityCase {
    Case1,
    Case2,
    Case3,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("message length {got}, configured code expects {want}")]
    MessageLength { want: usize, got: usize },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

/// Capacity cases open to a channel, best first.
pub fn capacity_ladder(
    n: usize,
    alpha: usize,
    k: usize,
    l: usize,
    fixed_len: usize,
) -> Vec<CapacityCase> {
    let mut out = Vec::new();
    if n >= alpha * l {
        out.push(CapacityCase::Case1);
    }
    if n >= alpha * k {
        out.push(CapacityCase::Case2);
    }
    if n >= fixed_len {
        out.push(CapacityCase::Case3);
    }
    out.dedup();
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelEmbed {
    pub channel: Channel,
    pub anchor_count: usize,
    pub skipped: Option<String>,
    pub case: Option<CapacityCase>,
    pub embedded_w: Option<String>,
    pub resamples: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InsertReport {
    pub formal: ChannelEmbed,
    pub natural: ChannelEmbed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelDetection {
    pub channel: Channel,
    pub anchor_count: usize,
    pub detected: bool,
    pub case: Option<CapacityCase>,
    pub recovered_w: Option<String>,
    pub recovered_m: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrgDetection {
    pub org_id: String,
    pub formal: ChannelDetection,
    pub natural: ChannelDetection,
    /// Either channel verified.
    pub combined: bool,
    /// Both channels verified.
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub orgs: Vec<OrgDetection>,
    /// Organizations verified on at least one channel.
    pub attributed: Vec<String>,
}

struct CasePlan {
    q: usize,
    alpha: usize,
    tau: usize,
    matrix: ParityCheckMatrix,
}

fn channel_params(channel: Channel, cfg: &ToolkitConfig) -> (usize, usize) {
    match channel {
        Channel::Formal => (cfg.alpha, cfg.tau),
        // A natural group is always one variable's three variants.
        Channel::Natural => (3, cfg.tau.min(3)),
    }
}

fn plan(
    case: CapacityCase,
    alpha: usize,
    tau: usize,
    k: usize,
    l: usize,
    fixed: &[u8],
    org: &OrganizationProfile,
) -> CasePlan {
    match case {
        CapacityCase::Case1 => CasePlan {
            q: l,
            alpha,
            tau,
            matrix: org.matrix_for(l, alpha),
        },
        CapacityCase::Case2 => CasePlan {
            q: k,
            alpha,
            tau,
            matrix: org.matrix_for(k, alpha),
        },
        CapacityCase::Case3 => CasePlan {
            q: fixed.len(),
            alpha: 1,
            tau: 1,
            matrix: unit_matrix(fixed.len()),
        },
    }
}

pub fn insert(
    program: &SubjectProgram,
    m: &[u8],
    org: &OrganizationProfile,
    cfg: &ToolkitConfig,
    rng: &mut impl Rng,
) -> Result<(SubjectProgram, InsertReport), EngineError> {
    cfg.validate()?;
    let (_, k) = cfg.code_id.params().expect("validated config has a block code");
    if m.len() != k {
        return Err(EngineError::MessageLength { want: k, got: m.len() });
    }
    let mut tree = program.tree.clone();
    let formal = embed_channel(&mut tree, Channel::Formal, m, org, cfg, rng)?;
    let natural = embed_channel(&mut tree, Channel::Natural, m, org, cfg, rng)?;
    let report = InsertReport { formal, natural };

    let out = if report.formal.skipped.is_some() && report.natural.skipped.is_some() {
        // No-op contract: nothing embedded, nothing reformatted.
        program.clone()
    } else {
        SubjectProgram {
            text: crate::pysrc::render(&tree),
            tree,
            path: program.path.clone(),
        }
    };
    Ok((out, report))
}

fn embed_channel(
    tree: &mut Module,
    channel: Channel,
    m: &[u8],
    org: &OrganizationProfile,
    cfg: &ToolkitConfig,
    rng: &mut impl Rng,
) -> Result<ChannelEmbed, EngineError> {
    let (l, k) = cfg.code_id.params().expect("validated config");
    let (alpha, tau) = channel_params(channel, cfg);
    let fixed = org.fixed_code_bits()?;
    let index = identify_anchors(tree, cfg);
    let n = index.count(channel);
    let skipped = |reason: &str, resamples| ChannelEmbed {
        channel,
        anchor_count: n,
        skipped: Some(reason.to_string()),
        case: None,
        embedded_w: None,
        resamples,
    };

    let ladder = capacity_ladder(n, alpha, k, l, fixed.len());
    if ladder.is_empty() {
        return Ok(skipped("insufficient anchors", 0));
    }
    let mut resamples = 0u32;
    for case in ladder {
        if case == CapacityCase::Case2 && is_all_zero(m) {
            // The raw message would embed the all-zero vector, which reads
            // as "unwatermarked"; fall through to the fixed code.
            continue;
        }
        let p = plan(case, alpha, tau, k, l, &fixed, org);
        let grouping = Grouping::consecutive(p.q, p.alpha);
        let attempts = if case == CapacityCase::Case1 {
            cfg.retry_budget.max(1)
        } else {
            1
        };
        for _ in 0..attempts {
            let w = match case {
                CapacityCase::Case1 => sample_watermark(m, cfg.code_id, rng)?.bits,
                CapacityCase::Case2 => m.to_vec(),
                CapacityCase::Case3 => fixed.clone(),
            };
            match solve_constrained(&p.matrix, &w, &grouping, p.tau, rng, false) {
                Ok(r) => {
                    apply_states(tree, &index, channel, &r, cfg);
                    return Ok(ChannelEmbed {
                        channel,
                        anchor_count: n,
                        skipped: None,
                        case: Some(case),
                        embedded_w: Some(bits_to_string(&w)),
                        resamples,
                    });
                }
                Err(_) => {
                    resamples += 1;
                }
            }
        }
    }
    Ok(skipped("no feasible parity system", resamples))
}

/// Drives the first `r.len()` anchors of a channel into the solved states.
/// Later anchors keep whatever state they already had.
fn apply_states(tree: &mut Module, index: &AnchorIndex, channel: Channel, r: &[u8], cfg: &ToolkitConfig) {
    match channel {
        Channel::Formal => {
            for (anchor, &state) in index.formal.iter().zip(r) {
                let prev = if anchor.path.index() > 0 {
                    stmt_at(tree, &anchor.path.sibling(anchor.path.index() - 1)).cloned()
                } else {
                    None
                };
                let stmt = stmt_at_mut(tree, &anchor.path).expect("anchor paths stay valid");
                set_state(stmt, prev.as_ref(), anchor.rule_id, state)
                    .expect("identified anchors toggle");
            }
        }
        Channel::Natural => {
            for (i, var) in index.variables.iter().enumerate() {
                let mut states = var.states;
                let mut touched = false;
                for j in 0..3 {
                    if let Some(&bit) = r.get(i * 3 + j) {
                        states[j] = bit;
                        touched = true;
                    }
                }
                if !touched {
                    break;
                }
                let new_name =
                    apply_variants(&var.canonical, VariantSet::from_states(states), &cfg.suffix_table);
                if new_name != var.current {
                    let def = stmt_at_mut(tree, &var.scope).expect("scope paths stay valid");
                    crate::anchors::rename_in_def(def, &var.current, &new_name);
                }
            }
        }
    }
}

pub fn detect_for_org(
    index: &AnchorIndex,
    org: &OrganizationProfile,
    cfg: &ToolkitConfig,
) -> Result<OrgDetection, EngineError> {
    let formal = detect_channel(index, Channel::Formal, org, cfg)?;
    let natural = detect_channel(index, Channel::Natural, org, cfg)?;
    let combined = formal.detected || natural.detected;
    let strict = formal.detected && natural.detected;
    Ok(OrgDetection {
        org_id: org.id.clone(),
        formal,
        natural,
        combined,
        strict,
    })
}

fn detect_channel(
    index: &AnchorIndex,
    channel: Channel,
    org: &OrganizationProfile,
    cfg: &ToolkitConfig,
) -> Result<ChannelDetection, EngineError> {
    let (l, k) = cfg.code_id.params().expect("validated config");
    let (alpha, tau) = channel_params(channel, cfg);
    let fixed = org.fixed_code_bits()?;
    let n = index.count(channel);
    let undetected = |case| ChannelDetection {
        channel,
        anchor_count: n,
        detected: false,
        case,
        recovered_w: None,
        recovered_m: None,
    };

    let Some(&case) = capacity_ladder(n, alpha, k, l, fixed.len()).first() else {
        return Ok(undetected(None));
    };
    let p = plan(case, alpha, tau, k, l, &fixed, org);
    let states = match channel {
        Channel::Formal => index.formal_states(),
        Channel::Natural => index.natural_states(),
    };
    let r = &states[..p.q * p.alpha];
    if is_all_zero(r) {
        return Ok(undetected(Some(case)));
    }
    let grouping = Grouping::consecutive(p.q, p.alpha);
    let c = threshold_groups(r, &grouping, p.tau);
    if !crate::gf2::verify(&p.matrix, r, &c).expect("shapes agree by construction") {
        return Ok(undetected(Some(case)));
    }
    let recovered_m = match case {
        CapacityCase::Case1 => decode(&c, cfg.code_id)?,
        CapacityCase::Case2 => (!is_all_zero(&c)).then(|| c.clone()),
        CapacityCase::Case3 => (c == fixed).then(Vec::new),
    };
    let Some(m) = recovered_m else {
        return Ok(undetected(Some(case)));
    };
    Ok(ChannelDetection {
        channel,
        anchor_count: n,
        detected: true,
        case: Some(case),
        recovered_w: Some(bits_to_string(&c)),
        recovered_m: Some(bits_to_string(&m)),
    })
}

pub fn extract(
    program: &SubjectProgram,
    registry: &Registry,
    cfg: &ToolkitConfig,
) -> Result<ExtractionReport, EngineError> {
    cfg.validate()?;
    let index = identify_anchors(&program.tree, cfg);
    let mut orgs = Vec::new();
    for org in &registry.orgs {
        orgs.push(detect_for_org(&index, org, cfg)?);
    }
    let attributed = orgs
        .iter()
        .filter(|o| o.combined)
        .map(|o| o.org_id.clone())
        .collect();
    Ok(ExtractionReport { orgs, attributed })
}
