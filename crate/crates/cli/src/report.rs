//! Machine-readable run reports. Every collection is ordered, so a fixed
//! config produces byte-identical JSON across runs and thread counts
//! (timing is opt-in for the same reason).

use std::collections::BTreeMap;

use serde::Serialize;

pub const REPORT_SCHEMA: &str = "report/1";

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inapplicable,
    ObservedTrue,
    ObservedFalse,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckVerdict {
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub task: String,
    pub group: String,
    pub t: String,
    pub c: BTreeMap<String, String>,
    pub degree_bound: usize,
    pub results: serde_json::Value,
    pub checks: BTreeMap<String, CheckVerdict>,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(task: &str, group: &str, t: &str, c: BTreeMap<String, String>, degree_bound: usize) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            task: task.to_string(),
            group: group.to_string(),
            t: t.to_string(),
            c,
            degree_bound,
            results: serde_json::Value::Null,
            checks: BTreeMap::new(),
            flags: Vec::new(),
            timing_ms: None,
            exit_code: 0,
        }
    }

    pub fn set_check(&mut self, id: &str, status: CheckStatus, detail: impl Into<String>) {
        self.checks.insert(
            id.to_string(),
            CheckVerdict {
                status,
                detail: detail.into(),
            },
        );
    }

    pub fn finalize_exit_code(&mut self) {
        let failed = self
            .checks
            .values()
            .any(|v| v.status == CheckStatus::Fail);
        self.exit_code = if failed { 1 } else { 0 };
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "task {} on {} (t = {}, c = {:?}, degrees <= {})\n",
            self.task, self.group, self.t, self.c, self.degree_bound
        ));
        if self.results != serde_json::Value::Null {
            out.push_str(&format!(
                "results:\n{}\n",
                serde_json::to_string_pretty(&self.results).unwrap()
            ));
        }
        for (id, v) in &self.checks {
            let status = match v.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Inapplicable => "inapplicable",
                CheckStatus::ObservedTrue => "observed: true",
                CheckStatus::ObservedFalse => "observed: false",
            };
            if v.detail.is_empty() {
                out.push_str(&format!("  {:<32} {}\n", id, status));
            } else {
                out.push_str(&format!("  {:<32} {}  ({})\n", id, status, v.detail));
            }
        }
        for f in &self.flags {
            out.push_str(&format!("  flag: {}\n", f));
        }
        if let Some(ms) = self.timing_ms {
            out.push_str(&format!("  timing: {} ms\n", ms));
        }
        out.push_str(&format!("exit code: {}\n", self.exit_code));
        out
    }
}

/// Multiplicity vectors as ordered JSON objects.
pub fn mults_json(m: &std::collections::BTreeMap<String, usize>) -> serde_json::Value {
    serde_json::Value::Object(
        m.iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
            .collect(),
    )
}
