//! Command-line front end. Every command writes one JSON report.
//!
//! Exit codes: 0 success, 1 validation error, 2 guard violation, 3 failed
//! assertion. Axiom verdicts are data and never change the exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{AxiomError, RuleError, VerifyError};
use crate::model::{RiskProfile, Universe};
use crate::report::{parse_profile, ProfileOutput, Report, ReportKind, RunConfig};
use crate::risk::ProfileSpec;
use crate::verify::{search_survivors, trace_decisiveness, AxiomSet, SearchOptions};
use crate::zoo::{audit, audit_on, AuditConfig, ErmSingle, RuleSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hetero-choice", version, about = "Axiom audits and impossibility checks for multi-environment learning rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Audit one aggregation rule against every axiom.
    Audit(AuditArgs),
    /// Exhaustively search pairwise rules satisfying an axiom set.
    Verify(VerifyArgs),
    /// Contract the environment set down to a decisive singleton.
    Trace(TraceArgs),
    /// Build a risk profile from a generator spec.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// One of erm_single, risk_min, pooled_erm, weighted_sum, leximin,
    /// pareto_front, borda, nash_product.
    #[arg(long)]
    rule: String,
    /// Comma-separated weights for weighted_sum.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Comma-separated risk values for risk_min.
    #[arg(long, value_delimiter = ',')]
    risk: Option<Vec<f64>>,
    /// 1-based environment for erm_single.
    #[arg(long)]
    env_index: Option<usize>,
    /// Number of environments.
    #[arg(long)]
    envs: Option<usize>,
    /// Number of hypotheses.
    #[arg(long)]
    universe: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Audit this profile instead of random ones.
    #[arg(long)]
    profile_file: Option<PathBuf>,
    /// Sample count for the IIH and IR checks.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Random profiles for the alpha, beta, PO and IR checks.
    #[arg(long, default_value_t = 50)]
    profiles: usize,
    /// Also test IIH on profiles with ties.
    #[arg(long)]
    include_ties: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Number of hypotheses.
    #[arg(long, default_value_t = 3)]
    alternatives: usize,
    /// Number of environments.
    #[arg(long, default_value_t = 3)]
    environments: usize,
    /// Comma-separated subset of ic,po,iih,ir,ci.
    #[arg(long, default_value = "ic,po,iih,ir")]
    axioms: String,
    /// Exit 3 unless the impossibility result holds.
    #[arg(long)]
    assert_theorem: bool,
    /// Permit axiom sets without PO.
    #[arg(long)]
    allow_no_po: bool,
    /// Disable pruning.
    #[arg(long)]
    no_prune: bool,
    /// Drop the triple menus from the feasible family.
    #[arg(long)]
    omit_triples: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long)]
    environments: usize,
    /// 1-based dictator of the traced single-environment rule.
    #[arg(long, default_value_t = 1)]
    env_index: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timestamp: bool,
}

/// A failed command and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<RuleError> for Failure {
    fn from(e: RuleError) -> Self {
        Failure::validation(e.to_string())
    }
}

impl From<AxiomError> for Failure {
    fn from(e: AxiomError) -> Self {
        let code = match e {
            AxiomError::GuardExceeded { .. } => EXIT_GUARD,
            _ => EXIT_VALIDATION,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Axiom(a) => a.into(),
            VerifyError::Guard { .. } => Failure { code: EXIT_GUARD, message: e.to_string() },
            VerifyError::CorollaryViolated(_) | VerifyError::TheoremViolated { .. } => {
                Failure { code: EXIT_ASSERTION, message: e.to_string() }
            }
            _ => Failure::validation(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Audit(a) => cmd_audit(a),
        Command::Verify(v) => cmd_verify(v),
        Command::Trace(t) => cmd_trace(t),
        Command::Profile(p) => cmd_profile(p),
    }
}

fn emit<T: serde::Serialize>(report: &Report<T>, out: Option<&PathBuf>) -> Result<(), Failure> {
    let json = report.to_json();
    match out {
        Some(path) => fs::write(path, json)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|e| Failure::validation(format!("cannot write to stdout: {e}"))),
    }
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn rule_spec(a: &AuditArgs) -> Result<RuleSpec, Failure> {
    let need = |flag: &str| Failure::validation(format!("rule {} needs --{flag}", a.rule));
    Ok(match a.rule.as_str() {
        "erm_single" => RuleSpec::ErmSingle { env_index: a.env_index.ok_or_else(|| need("env-index"))? },
        "risk_min" => RuleSpec::RiskMin { risk: a.risk.clone().ok_or_else(|| need("risk"))? },
        "pooled_erm" => RuleSpec::PooledErm,
        "weighted_sum" => RuleSpec::WeightedSum { weights: a.weights.clone().ok_or_else(|| need("weights"))? },
        "leximin" => RuleSpec::Leximin,
        "pareto_front" => RuleSpec::ParetoFront,
        "borda" => RuleSpec::Borda,
        "nash_product" => RuleSpec::NashProduct,
        other => {
            return Err(Failure::validation(format!(
                "unknown rule {other:?}; expected one of {}",
                RuleSpec::NAMES.join(", ")
            )))
        }
    })
}

fn cmd_audit(a: AuditArgs) -> Result<(), Failure> {
    let spec = rule_spec(&a)?;
    let profile: Option<RiskProfile> = match &a.profile_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
            Some(parse_profile(&text).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?)
        }
        None => None,
    };
    let (m, n) = match &profile {
        Some(p) => {
            for (flag, given, actual) in [("universe", a.universe, p.hyps()), ("envs", a.envs, p.envs())] {
                if given.is_some_and(|g| g != actual) {
                    return Err(Failure::validation(format!("--{flag} disagrees with the profile file")));
                }
            }
            (p.hyps(), p.envs())
        }
        None => (a.universe.unwrap_or(3), a.envs.unwrap_or(2)),
    };
    Universe::of_size(m).map_err(|e| Failure::validation(e.to_string()))?;
    if n == 0 {
        return Err(Failure::validation("--envs must be at least 1"));
    }
    if a.samples == 0 || a.profiles == 0 {
        return Err(Failure::validation("--samples and --profiles must be at least 1"));
    }
    let rule = spec.build(m, n)?;
    let cfg = AuditConfig {
        m,
        n,
        seed: a.seed,
        profiles: if profile.is_some() { 1 } else { a.profiles },
        iih_samples: a.samples,
        ir_samples: a.samples,
        include_ties: a.include_ties,
    };
    let report = match &profile {
        Some(p) => audit_on(rule.as_ref(), &cfg, std::slice::from_ref(p))?,
        None => audit(rule.as_ref(), &cfg)?,
    };
    let config = RunConfig {
        command: "audit".into(),
        m: Some(m),
        n: Some(n),
        rule: Some(spec),
        seed: Some(a.seed),
        samples: Some(a.samples),
        profiles: Some(cfg.profiles),
        profile_file: path_string(&a.profile_file),
        out: path_string(&a.out),
        include_ties: a.include_ties,
        ..RunConfig::default()
    };
    emit(&Report::new(ReportKind::Audit, config, report, !a.no_timestamp), a.out.as_ref())
}

fn cmd_verify(v: VerifyArgs) -> Result<(), Failure> {
    let axioms: AxiomSet = v.axioms.parse().map_err(Failure::validation)?;
    let mut opts = if v.no_prune { SearchOptions::unpruned() } else { SearchOptions::default() };
    opts.allow_no_po = v.allow_no_po;
    opts.omit_triples = v.omit_triples;
    let mut report = search_survivors(v.alternatives, v.environments, axioms, &opts)?;
    if v.no_timestamp {
        report.elapsed_ms = None;
    }
    let failed = v.assert_theorem
        && if axioms.ci {
            v.environments >= 3 && report.survivor_count > 0
        } else {
            !report.all_dictatorial
        };
    let config = RunConfig {
        command: "verify".into(),
        m: Some(v.alternatives),
        n: Some(v.environments),
        axioms: Some(axioms),
        out: path_string(&v.out),
        allow_no_po: v.allow_no_po,
        no_prune: v.no_prune,
        omit_triples: v.omit_triples,
        assert_theorem: v.assert_theorem,
        ..RunConfig::default()
    };
    let count = report.survivor_count;
    emit(&Report::new(ReportKind::Verify, config, report, !v.no_timestamp), v.out.as_ref())?;
    if failed {
        return Err(Failure {
            code: EXIT_ASSERTION,
            message: format!("assertion failed: {count} survivors under {axioms}"),
        });
    }
    Ok(())
}

fn cmd_trace(t: TraceArgs) -> Result<(), Failure> {
    if t.environments == 0 {
        return Err(Failure::validation("--environments must be at least 1"));
    }
    if t.env_index == 0 || t.env_index > t.environments {
        return Err(Failure::validation("--env-index must lie in 1..=environments"));
    }
    let trace = trace_decisiveness(&ErmSingle::new(t.env_index - 1), t.environments)?;
    let config = RunConfig {
        command: "trace".into(),
        m: Some(3),
        n: Some(t.environments),
        rule: Some(RuleSpec::ErmSingle { env_index: t.env_index }),
        out: path_string(&t.out),
        ..RunConfig::default()
    };
    emit(&Report::new(ReportKind::Trace, config, trace, !t.no_timestamp), t.out.as_ref())
}

fn cmd_profile(p: ProfileArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&p.spec)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", p.spec.display())))?;
    let spec: ProfileSpec = serde_json::from_str(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", p.spec.display())))?;
    let profile = spec.build(p.seed).map_err(|e| Failure::validation(e.to_string()))?;
    let output = ProfileOutput {
        hypotheses: spec.hypotheses.iter().map(|h| h.id.clone()).collect(),
        profile,
    };
    let config = RunConfig {
        command: "profile".into(),
        m: Some(output.profile.hyps()),
        n: Some(output.profile.envs()),
        seed: Some(p.seed),
        spec_file: Some(p.spec.display().to_string()),
        out: path_string(&p.out),
        ..RunConfig::default()
    };
    emit(&Report::new(ReportKind::Profile, config, output, !p.no_timestamp), p.out.as_ref())
}
