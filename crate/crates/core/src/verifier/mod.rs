//! Inequality suites, the path-minimization oracle, and report aggregation.
//!
//! Every sample index owns its generators (see [`crate::maps::sample_rng`]),
//! so a suite's report does not depend on how many worker threads ran it.

pub mod audit;
pub mod oracle;
pub mod report;
pub mod suites;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::tolerances;

pub use audit::{normalization_audit, AuditCase, AuditReport};
pub use oracle::{path_oracle, OracleResult, PathProblem};
pub use report::{slack_rows, Check, SampleOutcome, SlackRow, VerificationReport, Violation, Witness};
pub use suites::SuiteId;

/// One suite run: which inequality, how many samples, under which seed and tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalitySuite {
    #[serde(with = "suite_id_serde")]
    pub id: SuiteId,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl InequalitySuite {
    pub fn new(id: SuiteId, samples: usize, seed: u64) -> Self {
        Self {
            id,
            samples,
            seed,
            tolerance: tolerances::INEQUALITY,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// All sample outcomes, sorted by index.
    pub fn outcomes(&self) -> Result<Vec<SampleOutcome>> {
        (0..self.samples as u64)
            .into_par_iter()
            .map(|i| self.id.sample(self.seed, i))
            .collect()
    }
}

mod suite_id_serde {
    use super::SuiteId;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(id: &SuiteId, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(id.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SuiteId, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Runs a suite and aggregates its report.
pub fn run_suite(suite: &InequalitySuite) -> Result<VerificationReport> {
    Ok(run_suite_detailed(suite)?.0)
}

/// Like [`run_suite`], also returning the per-sample outcomes for slack dumps.
pub fn run_suite_detailed(suite: &InequalitySuite) -> Result<(VerificationReport, Vec<SampleOutcome>)> {
    let start = Instant::now();
    let outcomes = suite.outcomes()?;
    let elapsed = start.elapsed().as_millis() as u64;
    let report = VerificationReport::from_outcomes(suite.id.as_str(), suite.seed, suite.tolerance, &outcomes, elapsed);
    Ok((report, outcomes))
}

/// Runs every registered suite in registry order.
pub fn run_all(samples: usize, seed: u64, tolerance: f64) -> Result<Vec<VerificationReport>> {
    SuiteId::ALL
        .iter()
        .map(|&id| run_suite(&InequalitySuite::new(id, samples, seed).with_tolerance(tolerance)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_is_independent_of_thread_count() {
        let suite = InequalitySuite::new(SuiteId::BallDistortion, 64, 3);
        let parallel = suite.outcomes().unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| suite.outcomes().unwrap());
        assert_eq!(parallel, serial);
        assert!(parallel.windows(2).all(|w| w[0].index < w[1].index));
    }

    #[test]
    fn suite_config_serializes_id_as_string() {
        let s = InequalitySuite::new(SuiteId::KvDisk, 10, 1);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"kv-disk\""));
        assert_eq!(serde_json::from_str::<InequalitySuite>(&json).unwrap(), s);
    }
}
