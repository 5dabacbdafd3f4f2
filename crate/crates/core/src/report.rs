//! Versioned JSON envelope shared by every command's output.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::model::RiskProfile;
use crate::verify::{AxiomSet, DecisivenessTrace, SurvivorReport};
use crate::zoo::{AxiomReport, RuleSpec};

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Audit,
    Verify,
    Trace,
    Profile,
}

/// The full configuration of a run, validated before any computation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axioms: Option<AxiomSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub include_ties: bool,
    #[serde(default)]
    pub allow_no_po: bool,
    #[serde(default)]
    pub no_prune: bool,
    #[serde(default)]
    pub omit_triples: bool,
    #[serde(default)]
    pub assert_theorem: bool,
}

/// A command's output: envelope plus payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub schema_version: String,
    pub kind: ReportKind,
    pub config: RunConfig,
    /// Seconds since the Unix epoch; absent in reproducible runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(kind: ReportKind, config: RunConfig, result: T, timestamp: bool) -> Self {
        let generated_at = timestamp
            .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        Self { schema_version: SCHEMA_VERSION.into(), kind, config, generated_at, result }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Payload of the `profile` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileOutput {
    pub hypotheses: Vec<String>,
    pub profile: RiskProfile,
}

fn parse_as<T: DeserializeOwned + Serialize>(
    value: &serde_json::Value,
) -> Result<(), String> {
    let typed: Report<T> = serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
    if typed.schema_version != SCHEMA_VERSION {
        return Err(format!("unsupported schema version {}", typed.schema_version));
    }
    let back = serde_json::to_value(&typed).map_err(|e| e.to_string())?;
    if &back != value {
        return Err("report does not round-trip through its schema".into());
    }
    Ok(())
}

/// Checks a report against the schema of its kind and that it re-serializes
/// to the same JSON value.
pub fn validate(value: &serde_json::Value) -> Result<ReportKind, String> {
    let kind: ReportKind = value
        .get("kind")
        .cloned()
        .ok_or("missing kind")
        .and_then(|k| serde_json::from_value(k).map_err(|_| "unknown kind"))?;
    match kind {
        ReportKind::Audit => parse_as::<AxiomReport>(value)?,
        ReportKind::Verify => parse_as::<SurvivorReport>(value)?,
        ReportKind::Trace => parse_as::<DecisivenessTrace>(value)?,
        ReportKind::Profile => parse_as::<ProfileOutput>(value)?,
    }
    Ok(kind)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileInput {
    Report { result: ProfileOutput },
    Wrapped { profile: RiskProfile },
    Bare(RiskProfile),
}

/// Reads a profile from a `profile` report, an object with a `profile`
/// field, or a bare environments-by-hypotheses matrix.
pub fn parse_profile(json: &str) -> Result<RiskProfile, String> {
    let input: ProfileInput = serde_json::from_str(json).map_err(|e| e.to_string())?;
    Ok(match input {
        ProfileInput::Report { result } => result.profile,
        ProfileInput::Wrapped { profile } | ProfileInput::Bare(profile) => profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_inputs() {
        let bare = "[[0.1, 0.2], [0.3, 0.4]]";
        let p = parse_profile(bare).unwrap();
        assert_eq!((p.envs(), p.hyps()), (2, 2));
        assert_eq!(parse_profile(&format!("{{\"profile\": {bare}}}")).unwrap(), p);
        let report = Report::new(
            ReportKind::Profile,
            RunConfig { command: "profile".into(), ..RunConfig::default() },
            ProfileOutput { hypotheses: vec!["a".into(), "b".into()], profile: p.clone() },
            false,
        );
        assert_eq!(parse_profile(&report.to_json()).unwrap(), p);
        let value: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(validate(&value), Ok(ReportKind::Profile));
        assert!(parse_profile("[[0.1], [0.2, 0.3]]").is_err());
    }

    #[test]
    fn validate_rejects_unknown_fields_in_shape() {
        let v = serde_json::json!({"schema_version": SCHEMA_VERSION, "kind": "profile", "config": {"command": "x"}});
        assert!(validate(&v).is_err());
        assert!(validate(&serde_json::json!({"kind": "nope"})).is_err());
    }
}
