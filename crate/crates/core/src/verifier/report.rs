use serde::{Deserialize, Serialize};

use crate::maps::MemberRole;
use crate::tolerances;

/// One inequality `lhs <= rhs` evaluated on one sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    pub fn new(label: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.to_string(),
            lhs,
            rhs,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Everything one sample index produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: u64,
    pub family: String,
    pub member: u64,
    pub role: MemberRole,
    pub inputs: Vec<String>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: u64,
    pub check: String,
    pub family: String,
    pub member: u64,
    pub role: MemberRole,
    pub inputs: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub index: u64,
    pub check: String,
    pub role: MemberRole,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub checks: usize,
    pub violations: Vec<Violation>,
    pub min_slack: f64,
    pub max_slack: f64,
    pub mean_slack: f64,
    pub equality_witnesses: Vec<Witness>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    /// Aggregates outcomes, which must already be sorted by index.
    pub fn from_outcomes(suite: &str, seed: u64, tolerance: f64, outcomes: &[SampleOutcome], runtime_ms: u64) -> Self {
        let mut violations = Vec::new();
        let mut witnesses = Vec::new();
        let mut min_slack = f64::INFINITY;
        let mut max_slack = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut checks = 0usize;
        for o in outcomes {
            for c in &o.checks {
                let slack = c.slack();
                checks += 1;
                sum += slack;
                min_slack = min_slack.min(slack);
                max_slack = max_slack.max(slack);
                if !(slack >= -tolerance) {
                    violations.push(Violation {
                        index: o.index,
                        check: c.label.clone(),
                        family: o.family.clone(),
                        member: o.member,
                        role: o.role,
                        inputs: o.inputs.clone(),
                        lhs: c.lhs,
                        rhs: c.rhs,
                        slack,
                    });
                }
                if slack.abs() < tolerances::EQUALITY_WITNESS {
                    witnesses.push(Witness {
                        index: o.index,
                        check: c.label.clone(),
                        role: o.role,
                        slack,
                    });
                }
            }
        }
        if checks == 0 {
            // keeps the report finite, so it survives a JSON round trip
            min_slack = 0.0;
            max_slack = 0.0;
        }
        Self {
            suite: suite.to_string(),
            seed,
            samples: outcomes.len(),
            tolerance,
            checks,
            violations,
            min_slack,
            max_slack,
            mean_slack: if checks > 0 { sum / checks as f64 } else { 0.0 },
            equality_witnesses: witnesses,
            runtime_ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One CSV row of the slack dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackRow {
    pub index: u64,
    pub check: String,
    pub inputs: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

pub fn slack_rows(outcomes: &[SampleOutcome]) -> Vec<SlackRow> {
    outcomes
        .iter()
        .flat_map(|o| {
            o.checks.iter().map(move |c| SlackRow {
                index: o.index,
                check: c.label.clone(),
                inputs: o.inputs.join(" "),
                lhs: c.lhs,
                rhs: c.rhs,
                slack: c.slack(),
            })
        })
        .collect()
}
