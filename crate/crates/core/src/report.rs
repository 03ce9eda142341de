//! Seeded, parallel case runner and the JSON report it produces.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fields::FieldTower;
use crate::forms::TriBool;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status", content = "error")]
pub enum Status {
    Pass,
    Fail,
    Unknown,
    Error(String),
}

/// One assertion inside a case.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub check: String,
    pub input: String,
    #[serde(flatten)]
    pub status: Status,
}

impl Check {
    /// Runs `f` at once; errors and panics become [`Status::Error`].
    pub fn new(check: impl Into<String>, input: String, f: impl FnOnce() -> Result<TriBool>) -> Check {
        let status = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(TriBool::True)) => Status::Pass,
            Ok(Ok(TriBool::False)) => Status::Fail,
            Ok(Ok(TriBool::Unknown)) => Status::Unknown,
            Ok(Err(e)) => Status::Error(e.to_string()),
            Err(p) => Status::Error(
                p.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into()),
            ),
        };
        Check { check: check.into(), input, status }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseRecord {
    pub index: usize,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub anchor: String,
    pub field: Option<String>,
    pub samples: usize,
    pub seed: u64,
    pub unknown_tolerant: bool,
    pub cases: Vec<CaseRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Report>,
}

impl Report {
    pub fn new(suite: &str, anchor: &str, field: Option<&FieldTower>, samples: usize, seed: u64) -> Report {
        Report {
            suite: suite.into(),
            anchor: anchor.into(),
            field: field.map(|k| k.to_string()),
            samples,
            seed,
            unknown_tolerant: false,
            cases: Vec::new(),
            parts: Vec::new(),
        }
    }

    fn check_ok(&self, c: &Check) -> bool {
        c.status == Status::Pass || (self.unknown_tolerant && c.status == Status::Unknown)
    }

    pub fn checks(&self) -> usize {
        self.cases.iter().map(|c| c.checks.len()).sum::<usize>() + self.parts.iter().map(Report::checks).sum::<usize>()
    }

    /// Failing checks, with the suite they belong to.
    pub fn failures(&self) -> Vec<(String, &Check)> {
        let mut out: Vec<(String, &Check)> = self
            .cases
            .iter()
            .flat_map(|c| c.checks.iter())
            .filter(|c| !self.check_ok(c))
            .map(|c| (self.suite.clone(), c))
            .collect();
        for p in &self.parts {
            out.extend(p.failures());
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// Nests `parts` under a combined report.
    pub fn combine(suite: &str, anchor: &str, samples: usize, seed: u64, parts: Vec<Report>) -> Report {
        let mut r = Report::new(suite, anchor, None, samples, seed);
        r.parts = parts;
        r
    }

    pub fn summary(&self) -> String {
        let f = self.failures().len();
        format!(
            "{}: {} ({} checks, {} failing) [{}]",
            self.suite,
            if f == 0 { "pass" } else { "FAIL" },
            self.checks(),
            f,
            self.anchor
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn fnv(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// The RNG of case `i` of a suite: independent of scheduling and of other cases.
pub fn case_rng(seed: u64, tag: &str, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(tag));
    rng.set_stream(i as u64);
    rng
}

/// Runs `n` cases in parallel; the result is ordered by case index.
pub fn run_cases<F>(tag: &str, n: usize, seed: u64, f: F) -> Vec<CaseRecord>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Vec<Check> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, tag, i);
            CaseRecord { index: i, checks: f(i, &mut rng) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn runs_are_reproducible() {
        let run = || {
            run_cases("t", 20, 5, |i, rng| {
                let v: u32 = rng.gen();
                vec![Check::new("even", format!("{i}:{v}"), || Ok(TriBool::from_bool(v.is_multiple_of(2) || v % 2 == 1)))]
            })
        };
        let a = serde_json::to_string(&run()).unwrap();
        assert_eq!(a, serde_json::to_string(&run()).unwrap());
        let bad = Check::new("boom", String::new(), || panic!("nope"));
        assert_eq!(bad.status, Status::Error("nope".into()));
    }
}
