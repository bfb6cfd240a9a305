//! Detection, robustness, and indistinguishability metrics over the bundled
//! corpus.

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::anchors::identify_anchors;
use crate::bits::bits_to_string;
use crate::config::ToolkitConfig;
use crate::engine::{detect_for_org, insert};
use crate::harness::attacks::{attack, AttackSpec};
use crate::harness::corpus::CorpusFile;
use crate::registry::OrganizationProfile;
use crate::SubjectProgram;

#[derive(Debug, Clone, Serialize)]
pub struct FileRow {
    pub name: String,
    pub family: String,
    /// At least one channel embedded something.
    pub embedded: bool,
    pub message: String,
    /// Detection verdicts on the (possibly attacked) watermarked file.
    pub combined: bool,
    pub strict: bool,
    /// Verdicts on the untouched original, for the false-positive rates.
    pub clean_combined: bool,
    pub clean_strict: bool,
    /// Whether the formal channel ran at full codeword capacity and, if so,
    /// whether the exact message came back.
    pub case1_msg_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalSummary {
    pub files: usize,
    pub embedded: usize,
    pub tpr_combined: f64,
    pub tpr_strict: f64,
    pub fpr_combined: f64,
    pub fpr_strict: f64,
    pub msg_acc_case1: f64,
    pub rows: Vec<FileRow>,
}

fn message_bits(value: usize, k: usize) -> Vec<u8> {
    (0..k).map(|b| ((value >> (k - 1 - b)) & 1) as u8).collect()
}

fn file_rng(seed: u64, index: usize) -> StdRng {
    StdRng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Embeds a message into every corpus file for `org`, optionally attacks the
/// result, and detects both the watermarked and the clean versions. Rates are
/// over files where at least one channel embedded (true-positive side) and
/// over all files (false-positive side).
pub fn evaluate(
    files: &[CorpusFile],
    org: &OrganizationProfile,
    spec: Option<&AttackSpec>,
    cfg: &ToolkitConfig,
    seed: u64,
) -> EvalSummary {
    let (_, k) = cfg.code_id.params().expect("validated config has a block code");
    let mut rows = Vec::with_capacity(files.len());
    for (i, f) in files.iter().enumerate() {
        let mut rng = file_rng(seed, i);
        let program = SubjectProgram::parse(&f.source, &f.name).expect("corpus parses");
        // Skip the all-zero message so every capacity case is exercised.
        let m = message_bits(1 + i % ((1 << k) - 1), k);
        let (marked, report) =
            insert(&program, &m, org, cfg, &mut rng).expect("corpus files embed");
        let embedded = report.formal.skipped.is_none() || report.natural.skipped.is_none();
        let suspect = match spec {
            Some(spec) => attack(&marked, spec, cfg, &mut rng),
            None => marked,
        };
        let det = detect_for_org(&identify_anchors(&suspect.tree, cfg), org, cfg)
            .expect("detection runs");
        let clean = detect_for_org(&identify_anchors(&program.tree, cfg), org, cfg)
            .expect("detection runs");
        let case1_msg_ok = match (&report.formal.case, &det.formal.recovered_m) {
            (Some(crate::engine::CapacityCase::Case1), recovered) => {
                Some(recovered.as_deref() == Some(bits_to_string(&m).as_str()))
            }
            _ => None,
        };
        rows.push(FileRow {
            name: f.name.clone(),
            family: f.family.to_string(),
            embedded,
            message: bits_to_string(&m),
            combined: det.combined,
            strict: det.strict,
            clean_combined: clean.combined,
            clean_strict: clean.strict,
            case1_msg_ok,
        });
    }
    summarize(rows)
}

fn rate(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

fn summarize(rows: Vec<FileRow>) -> EvalSummary {
    let embedded = rows.iter().filter(|r| r.embedded).count();
    let tp_c = rows.iter().filter(|r| r.embedded && r.combined).count();
    let tp_s = rows.iter().filter(|r| r.embedded && r.strict).count();
    let fp_c = rows.iter().filter(|r| r.clean_combined).count();
    let fp_s = rows.iter().filter(|r| r.clean_strict).count();
    let case1: Vec<_> = rows.iter().filter_map(|r| r.case1_msg_ok).collect();
    let msg_ok = case1.iter().filter(|&&ok| ok).count();
    EvalSummary {
        files: rows.len(),
        embedded,
        tpr_combined: rate(tp_c, embedded),
        tpr_strict: rate(tp_s, embedded),
        fpr_combined: rate(fp_c, rows.len()),
        fpr_strict: rate(fp_s, rows.len()),
        msg_acc_case1: rate(msg_ok, case1.len()),
        rows,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndisReport {
    pub anchors: usize,
    pub reps: usize,
    /// Per message: per-anchor activation frequency across repetitions.
    pub frequencies: Vec<Vec<f64>>,
    /// Mean over message pairs of the per-anchor-averaged Jensen–Shannon
    /// divergence, in nats.
    pub mean_pairwise_jsd_nats: f64,
    /// Mutual information between the message and each anchor state, in bits.
    pub mi_bits: Vec<f64>,
    pub total_mi_bits: f64,
    /// Min/max pairwise Hamming similarity among state vectors carrying the
    /// same message.
    pub same_message_similarity_min: f64,
    pub same_message_similarity_max: f64,
    pub same_message_similarity_range: f64,
}

fn kl_nats(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum()
}

/// Jensen–Shannon divergence between two Bernoulli distributions, in nats.
pub fn bernoulli_jsd_nats(p: f64, q: f64) -> f64 {
    let pd = [p, 1.0 - p];
    let qd = [q, 1.0 - q];
    let md = [(p + q) / 2.0, 1.0 - (p + q) / 2.0];
    0.5 * kl_nats(&pd, &md) + 0.5 * kl_nats(&qd, &md)
}

fn entropy_bits(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Mutual information in bits between a uniform message variable and one
/// binary anchor, given the anchor's activation frequency under each message.
pub fn anchor_mi_bits(freqs: &[f64]) -> f64 {
    let mean = freqs.iter().sum::<f64>() / freqs.len() as f64;
    let cond: f64 = freqs.iter().map(|&f| entropy_bits(f)).sum::<f64>() / freqs.len() as f64;
    (entropy_bits(mean) - cond).max(0.0)
}

fn hamming_similarity(a: &[u8], b: &[u8]) -> f64 {
    let same = a.iter().zip(b).filter(|(x, y)| x == y).count();
    same as f64 / a.len() as f64
}

/// Repeatedly embeds every k-bit message into the template and measures how
/// much the resulting formal-channel anchor states reveal about the message.
/// The natural channel draws its states independently from the same
/// constrained system, so its leakage profile is identical by construction.
pub fn indistinguishability(
    template: &CorpusFile,
    org: &OrganizationProfile,
    cfg: &ToolkitConfig,
    reps: usize,
    seed: u64,
) -> IndisReport {
    let (_, k) = cfg.code_id.params().expect("validated config has a block code");
    let program = SubjectProgram::parse(&template.source, &template.name).expect("template parses");
    let messages: Vec<Vec<u8>> = (0..1usize << k).map(|v| message_bits(v, k)).collect();

    let mut samples: Vec<Vec<Vec<u8>>> = Vec::with_capacity(messages.len());
    for (mi, m) in messages.iter().enumerate() {
        let mut per_message = Vec::with_capacity(reps);
        for rep in 0..reps {
            let mut rng = file_rng(seed, mi * reps + rep);
            let (marked, _) = insert(&program, m, org, cfg, &mut rng).expect("template embeds");
            let index = identify_anchors(&marked.tree, cfg);
            per_message.push(index.formal_states());
        }
        samples.push(per_message);
    }
    let anchors = samples[0][0].len();

    let frequencies: Vec<Vec<f64>> = samples
        .iter()
        .map(|per_message| {
            (0..anchors)
                .map(|j| {
                    per_message.iter().map(|s| s[j] as f64).sum::<f64>() / reps as f64
                })
                .collect()
        })
        .collect();

    let mut jsd_sum = 0.0;
    let mut pairs = 0usize;
    for a in 0..frequencies.len() {
        for b in a + 1..frequencies.len() {
            let per_anchor: f64 = (0..anchors)
                .map(|j| bernoulli_jsd_nats(frequencies[a][j], frequencies[b][j]))
                .sum::<f64>()
                / anchors as f64;
            jsd_sum += per_anchor;
            pairs += 1;
        }
    }
    let mean_pairwise_jsd_nats = jsd_sum / pairs as f64;

    let mi_bits: Vec<f64> = (0..anchors)
        .map(|j| {
            let freqs: Vec<f64> = frequencies.iter().map(|f| f[j]).collect();
            anchor_mi_bits(&freqs)
        })
        .collect();
    let total_mi_bits = mi_bits.iter().sum();

    let mut sim_min = f64::INFINITY;
    let mut sim_max = f64::NEG_INFINITY;
    for per_message in &samples {
        for a in 0..per_message.len() {
            for b in a + 1..per_message.len() {
                let s = hamming_similarity(&per_message[a], &per_message[b]);
                sim_min = sim_min.min(s);
                sim_max = sim_max.max(s);
            }
        }
    }

    IndisReport {
        anchors,
        reps,
        frequencies,
        mean_pairwise_jsd_nats,
        mi_bits,
        total_mi_bits,
        same_message_similarity_min: sim_min,
        same_message_similarity_max: sim_max,
        same_message_similarity_range: sim_max - sim_min,
    }
}
