//! JSON-lines rendering of verification reports.

use incsp_core::oracle::OracleReport;
use serde_json::{json, Map, Value};

/// One line per recorded failure, then a summary line.
pub fn report_lines(structure: &str, report: &OracleReport) -> Vec<String> {
    let mut out: Vec<String> = report
        .failures
        .iter()
        .map(|f| {
            json!({
                "type": "failure",
                "check": f.check,
                "update": f.update,
                "location": f.location,
                "bound": f.bound,
                "observed": f.observed,
                "pass": f.pass,
            })
            .to_string()
        })
        .collect();
    let mut checks = Map::new();
    for (name, &(runs, failures)) in &report.tally {
        checks.insert((*name).to_string(), json!({ "runs": runs, "failures": failures }));
    }
    let summary = json!({
        "type": "summary",
        "structure": structure,
        "updates": report.updates,
        "passed": report.passed(),
        "failures": report.failure_count(),
        "first_failure_update": report.first_failure(),
        "worst_ratio": report.worst_ratio,
        "checks": Value::Object(checks),
    });
    out.push(summary.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_is_last_and_parses() {
        let lines = report_lines("sssp", &OracleReport::default());
        assert_eq!(lines.len(), 1);
        let v: Value = serde_json::from_str(&lines[0]).unwrap();
        assert_eq!(v["type"], "summary");
        assert_eq!(v["passed"], true);
    }
}
