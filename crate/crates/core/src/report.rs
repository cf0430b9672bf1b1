//! Verification reports: one JSON object per line, and a plain-text summary.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub claim: String,
    pub instance: String,
    pub result: Outcome,
    pub witnesses: Vec<String>,
    pub counts: BTreeMap<String, u64>,
    pub wall_ms: f64,
}

impl VerificationReport {
    /// A failed report with no witness gets a generic one.
    pub fn new(claim: impl Into<String>, instance: impl Into<String>, pass: bool, witnesses: Vec<String>) -> Self {
        let mut witnesses = witnesses;
        if !pass && witnesses.is_empty() {
            witnesses.push("check failed without a recorded witness".into());
        }
        Self {
            schema: REPORT_SCHEMA.into(),
            claim: claim.into(),
            instance: instance.into(),
            result: if pass { Outcome::Pass } else { Outcome::Fail },
            witnesses,
            counts: BTreeMap::new(),
            wall_ms: 0.0,
        }
    }

    pub fn skipped(claim: impl Into<String>, instance: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut r = Self::new(claim, instance, true, vec![reason.into()]);
        r.result = Outcome::Skipped;
        r
    }

    /// Failure from an error raised while building the instance.
    pub fn error(claim: impl Into<String>, instance: impl Into<String>, e: &crate::Error) -> Self {
        Self::new(claim, instance, false, vec![format!("error: {e}")])
    }

    pub fn count(mut self, key: &str, value: impl TryInto<u64>) -> Self {
        self.counts.insert(key.into(), value.try_into().unwrap_or(u64::MAX));
        self
    }

    /// Wall time in milliseconds, rounded to the microsecond.
    pub fn timed(mut self, start: Instant) -> Self {
        self.wall_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
        self
    }

    pub fn passed(&self) -> bool {
        self.result != Outcome::Fail
    }

    /// The report with the timing field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self { wall_ms: 0.0, ..self.clone() }
    }
}

/// Sorted by claim, then instance.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| (&a.claim, &a.instance).cmp(&(&b.claim, &b.instance)));
}

pub fn to_jsonl(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(s: &str) -> crate::Result<Vec<VerificationReport>> {
    s.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimSummary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

pub fn summarize(reports: &[VerificationReport]) -> BTreeMap<String, ClaimSummary> {
    let mut m: BTreeMap<String, ClaimSummary> = BTreeMap::new();
    for r in reports {
        let e = m.entry(r.claim.clone()).or_default();
        match r.result {
            Outcome::Pass => e.pass += 1,
            Outcome::Fail => e.fail += 1,
            Outcome::Skipped => e.skipped += 1,
        }
    }
    m
}

/// One row per claim, then the first witness of every failure.
pub fn summary_table(reports: &[VerificationReport]) -> String {
    let summary = summarize(reports);
    let width = summary.keys().map(String::len).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:>6}  {:>6}  {:>7}\n", "claim", "pass", "fail", "skipped");
    for (claim, s) in &summary {
        out.push_str(&format!("{claim:<width$}  {:>6}  {:>6}  {:>7}\n", s.pass, s.fail, s.skipped));
    }
    let total_fail: usize = summary.values().map(|s| s.fail).sum();
    out.push_str(&format!("{} reports, {} failed\n", reports.len(), total_fail));
    for r in reports.iter().filter(|r| r.result == Outcome::Fail) {
        out.push_str(&format!(
            "FAIL {} [{}]: {}\n",
            r.claim,
            r.instance,
            r.witnesses.first().map(String::as_str).unwrap_or("")
        ));
    }
    out
}

pub fn all_passed(reports: &[VerificationReport]) -> bool {
    reports.iter().all(VerificationReport::passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_always_has_a_witness() {
        let r = VerificationReport::new("c", "i", false, vec![]);
        assert_eq!(r.result, Outcome::Fail);
        assert_eq!(r.witnesses.len(), 1);
    }

    #[test]
    fn jsonl_round_trip() {
        let rs = vec![
            VerificationReport::new("a", "1", true, vec![]).count("n", 3usize),
            VerificationReport::skipped("b", "2", "q too small"),
        ];
        let back = from_jsonl(&to_jsonl(&rs)).unwrap();
        assert_eq!(back, rs);
        assert!(to_jsonl(&rs).lines().all(|l| l.contains("\"schema\":\"report/1\"")));
    }
}
