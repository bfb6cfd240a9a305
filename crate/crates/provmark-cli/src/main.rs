//! Command-line driver: embed, detect, attack, evaluate, and manage the
//! organization registry.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use provmark::bits::parse_bits;
use provmark::config::ToolkitConfig;
use provmark::engine::{extract, insert};
use provmark::harness::{attack, corpus, evaluate, AttackSpec};
use provmark::registry::{OrganizationProfile, Registry};
use provmark::SubjectProgram;

#[derive(Parser)]
#[command(name = "provmark", version, about = "Dual-channel source code watermarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Randomness seed; overrides the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Registry file; overrides the config value.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Watermark files with an identity message.
    Embed {
        #[command(flatten)]
        common: Common,
        /// Identity message bits, e.g. "01".
        #[arg(long)]
        message: String,
        /// Embedding organization id.
        #[arg(long)]
        org: String,
        /// Output directory; defaults to rewriting in place.
        #[arg(long)]
        out: Option<PathBuf>,
        inputs: Vec<PathBuf>,
    },
    /// Detect and attribute watermarks.
    Detect {
        #[command(flatten)]
        common: Common,
        /// Check a single organization.
        #[arg(long, conflicts_with = "all_orgs")]
        org: Option<String>,
        /// Check every registered organization.
        #[arg(long)]
        all_orgs: bool,
        /// Require both channels to verify.
        #[arg(long)]
        strict: bool,
        inputs: Vec<PathBuf>,
    },
    /// Apply a semantics-preserving attack to files.
    Attack {
        #[command(flatten)]
        common: Common,
        /// Attack specification, "kind:intensity" with kind one of
        /// rename, refactor, reformat.
        #[arg(long)]
        attack: String,
        /// Output directory; defaults to rewriting in place.
        #[arg(long)]
        out: Option<PathBuf>,
        inputs: Vec<PathBuf>,
    },
    /// Run the evaluation harness over the bundled corpus.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Optional attack applied between embedding and detection.
        #[arg(long)]
        attack: Option<String>,
        /// Organization id from the registry; defaults to a built-in profile.
        #[arg(long)]
        org: Option<String>,
        /// CSV output path; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Manage the organization registry.
    Org {
        #[command(flatten)]
        common: Common,
        #[command(subcommand)]
        action: OrgAction,
    },
}

#[derive(Subcommand)]
enum OrgAction {
    /// Create an empty registry file.
    Init,
    /// Register an organization.
    Add {
        #[arg(long)]
        id: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "01")]
        fixed_code: String,
    },
    /// Print the registered organizations.
    List,
}

fn load_config(common: &Common) -> Result<ToolkitConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => ToolkitConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(reg) = &common.registry {
        cfg.registry_path = Some(reg.display().to_string());
    }
    cfg.validate().map_err(|e| anyhow!("invalid configuration: {e}"))?;
    Ok(cfg)
}

fn registry_path(cfg: &ToolkitConfig) -> Result<PathBuf> {
    cfg.registry_path
        .as_ref()
        .map(PathBuf::from)
        .ok_or_else(|| anyhow!("no registry: pass --registry or set registry_path in the config"))
}

fn load_registry(cfg: &ToolkitConfig) -> Result<Registry> {
    let path = registry_path(cfg)?;
    Registry::load(&path).with_context(|| format!("loading registry {}", path.display()))
}

fn output_path(input: &Path, out: &Option<PathBuf>) -> PathBuf {
    match out {
        Some(dir) => dir.join(input.file_name().expect("input paths name files")),
        None => input.to_path_buf(),
    }
}

fn read_program(path: &Path) -> Result<SubjectProgram> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    SubjectProgram::parse(&text, &path.display().to_string())
        .map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn print_report(files: Vec<Value>, extra: Value) -> Result<()> {
    let mut report = json!({ "schema": 1, "files": files });
    if let Value::Object(map) = extra {
        for (k, v) in map {
            report[k] = v;
        }
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_embed(
    common: Common,
    message: String,
    org_id: String,
    out: Option<PathBuf>,
    inputs: Vec<PathBuf>,
) -> Result<u8> {
    let cfg = load_config(&common)?;
    let registry = load_registry(&cfg)?;
    let org = registry.get(&org_id)?;
    let m = parse_bits(&message).ok_or_else(|| anyhow!("message must be a bitstring"))?;
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
    }
    let mut files = Vec::new();
    let mut any_unwatermarkable = false;
    let mut any_error = false;
    for (i, input) in inputs.iter().enumerate() {
        // Per-file stream: one file's outcome never shifts another's draws.
        let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let row = (|| -> Result<Value> {
            let program = read_program(input)?;
            let (marked, report) = insert(&program, &m, org, &cfg, &mut rng)?;
            let unwatermarkable =
                report.formal.skipped.is_some() && report.natural.skipped.is_some();
            any_unwatermarkable |= unwatermarkable;
            let dest = output_path(input, &out);
            std::fs::write(&dest, &marked.text)
                .with_context(|| format!("writing {}", dest.display()))?;
            Ok(json!({
                "file": input.display().to_string(),
                "out": dest.display().to_string(),
                "unwatermarkable": unwatermarkable,
                "formal": report.formal,
                "natural": report.natural,
            }))
        })()
        .unwrap_or_else(|e| {
            any_error = true;
            json!({ "file": input.display().to_string(), "error": e.to_string() })
        });
        files.push(row);
    }
    print_report(files, json!({ "org": org_id, "message": message }))?;
    Ok(if any_error {
        1
    } else if any_unwatermarkable {
        2
    } else {
        0
    })
}

fn cmd_detect(
    common: Common,
    org: Option<String>,
    all_orgs: bool,
    strict: bool,
    inputs: Vec<PathBuf>,
) -> Result<u8> {
    let cfg = load_config(&common)?;
    let registry = load_registry(&cfg)?;
    let scope = match (&org, all_orgs) {
        (Some(id), false) => Registry { orgs: vec![registry.get(id)?.clone()] },
        (None, _) => registry,
        (Some(_), true) => unreachable!("clap forbids --org with --all-orgs"),
    };
    let mut files = Vec::new();
    for input in &inputs {
        let row = (|| -> Result<Value> {
            let program = read_program(input)?;
            let report = extract(&program, &scope, &cfg)?;
            let detected = report.orgs.iter().any(|o| if strict { o.strict } else { o.combined });
            Ok(json!({
                "file": input.display().to_string(),
                "detected": detected,
                "attribution": report.attributed,
                "orgs": report.orgs,
            }))
        })()
        .unwrap_or_else(|e| json!({ "file": input.display().to_string(), "error": e.to_string() }));
        files.push(row);
    }
    print_report(files, json!({ "strict": strict }))?;
    Ok(0)
}

fn cmd_attack(
    common: Common,
    spec: String,
    out: Option<PathBuf>,
    inputs: Vec<PathBuf>,
) -> Result<u8> {
    let cfg = load_config(&common)?;
    let spec = AttackSpec::parse(&spec)
        .ok_or_else(|| anyhow!("attack must be kind:intensity with kind rename|refactor|reformat"))?;
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
    }
    let mut files = Vec::new();
    let mut any_error = false;
    for (i, input) in inputs.iter().enumerate() {
        let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let row = (|| -> Result<Value> {
            let program = read_program(input)?;
            let attacked = attack(&program, &spec, &cfg, &mut rng);
            let dest = output_path(input, &out);
            std::fs::write(&dest, &attacked.text)
                .with_context(|| format!("writing {}", dest.display()))?;
            Ok(json!({
                "file": input.display().to_string(),
                "out": dest.display().to_string(),
                "changed": attacked.text != program.text,
            }))
        })()
        .unwrap_or_else(|e| {
            any_error = true;
            json!({ "file": input.display().to_string(), "error": e.to_string() })
        });
        files.push(row);
    }
    print_report(files, json!({}))?;
    Ok(if any_error { 1 } else { 0 })
}

fn cmd_eval(
    common: Common,
    attack: Option<String>,
    org_id: Option<String>,
    out: Option<PathBuf>,
) -> Result<u8> {
    let cfg = load_config(&common)?;
    let spec = match &attack {
        Some(s) => Some(AttackSpec::parse(s).ok_or_else(|| anyhow!("bad attack spec {s:?}"))?),
        None => None,
    };
    let org = match &org_id {
        Some(id) => load_registry(&cfg)?.get(id)?.clone(),
        None => OrganizationProfile {
            id: "eval".to_string(),
            seed: cfg.seed,
            fixed_code: "01".to_string(),
        },
    };
    let files = corpus::corpus();
    let summary = evaluate(&files, &org, spec.as_ref(), &cfg, cfg.seed);
    let mut csv = String::from("file,family,embedded,combined,strict,clean_combined,clean_strict,case1_msg_ok\n");
    for r in &summary.rows {
        let msg_ok = r.case1_msg_ok.map(|b| b.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.name, r.family, r.embedded, r.combined, r.strict, r.clean_combined, r.clean_strict, msg_ok
        ));
    }
    csv.push_str(&format!(
        "summary,,{},tpr_combined={:.4},tpr_strict={:.4},fpr_combined={:.4},fpr_strict={:.4},msg_acc_case1={:.4}\n",
        summary.embedded,
        summary.tpr_combined,
        summary.tpr_strict,
        summary.fpr_combined,
        summary.fpr_strict,
        summary.msg_acc_case1
    ));
    match out {
        Some(path) => std::fs::write(&path, csv)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_org(common: Common, action: OrgAction) -> Result<u8> {
    let cfg = load_config(&common)?;
    let path = registry_path(&cfg)?;
    match action {
        OrgAction::Init => {
            if !path.exists() {
                Registry { orgs: Vec::new() }.save(&path)?;
            }
            println!("{}", path.display());
        }
        OrgAction::Add { id, seed, fixed_code } => {
            let mut registry = if path.exists() {
                Registry::load(&path)?
            } else {
                Registry { orgs: Vec::new() }
            };
            if registry.orgs.iter().any(|o| o.id == id) {
                bail!("organization {id:?} already registered");
            }
            let org = OrganizationProfile { id, seed, fixed_code };
            org.fixed_code_bits()?;
            registry.orgs.push(org);
            registry.save(&path)?;
        }
        OrgAction::List => {
            let registry = Registry::load(&path)?;
            for org in &registry.orgs {
                println!("{}\tseed={}\tfixed_code={}", org.id, org.seed, org.fixed_code);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Embed { common, message, org, out, inputs } => {
            cmd_embed(common, message, org, out, inputs)
        }
        Command::Detect { common, org, all_orgs, strict, inputs } => {
            cmd_detect(common, org, all_orgs, strict, inputs)
        }
        Command::Attack { common, attack, out, inputs } => {
            cmd_attack(common, attack, out, inputs)
        }
        Command::Eval { common, attack, org, out } => cmd_eval(common, attack, org, out),
        Command::Org { common, action } => cmd_org(common, action),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
