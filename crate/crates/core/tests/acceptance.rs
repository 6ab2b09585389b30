//! One line per acceptance criterion. Criteria with a known, analysed shortfall are reported
//! as FAIL and only their failing sub-checks are pinned down; everything else must pass.

use k3lat_core::verify::{self, parse_params, CheckReport, Status};
use rayon::prelude::*;
use serde_json::Value;

struct Criterion {
    n: u32,
    name: &'static str,
    checks: &'static [(&'static str, &'static str)],
    /// Substring every failing sub-check must contain, for criteria that fail honestly.
    known_failure: Option<&'static str>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { n: 1, name: "disc-forms", checks: &[("disc-forms", "")], known_failure: None },
    Criterion { n: 2, name: "matrix-M", checks: &[("matrix-M", "")], known_failure: None },
    Criterion {
        n: 3,
        name: "rank10-ns-equal",
        checks: &[("rank10-ns-equal", "")],
        known_failure: Some("NS(Y) = target"),
    },
    Criterion { n: 4, name: "rank11-table", checks: &[("rank11-table", "")], known_failure: None },
    Criterion { n: 5, name: "rank11-fibrations", checks: &[("rank11-fibrations", "")], known_failure: None },
    Criterion { n: 6, name: "rank12-equal", checks: &[("rank12-equal", "e=1..6")], known_failure: None },
    Criterion { n: 7, name: "glue-lemma", checks: &[("glue-lemma", "n=2..8")], known_failure: None },
    Criterion {
        n: 8,
        name: "five-specializations",
        checks: &[("five-specializations", "")],
        known_failure: Some("saturation index 2^2*4"),
    },
    Criterion {
        n: 9,
        name: "gamma-blocks, nu-blocks",
        checks: &[("gamma-blocks", ""), ("nu-blocks", "")],
        known_failure: None,
    },
    Criterion { n: 10, name: "gamma-criterion", checks: &[("gamma-criterion", "")], known_failure: None },
    Criterion { n: 11, name: "weierstrass", checks: &[("weierstrass", "")], known_failure: None },
    Criterion { n: 12, name: "order3-suite", checks: &[("order3-suite", "")], known_failure: None },
    Criterion {
        n: 13,
        name: "property-suite",
        checks: &[("property-suite", "trials=200")],
        known_failure: None,
    },
];

fn failed_names(r: &CheckReport) -> Vec<String> {
    match r.details.get("failed") {
        Some(Value::Array(a)) => a.iter().filter_map(|v| v.as_str().map(String::from)).collect(),
        _ => Vec::new(),
    }
}

fn main() {
    let jobs: Vec<(&str, &str)> = CRITERIA.iter().flat_map(|c| c.checks.iter().copied()).collect();
    let reports: Vec<CheckReport> = jobs
        .par_iter()
        .map(|(id, p)| verify::verify(id, &parse_params(p).unwrap()).unwrap())
        .collect();
    let by_id = |id: &str| reports.iter().find(|r| r.check_id == id).unwrap();

    let mut unexpected = Vec::new();
    for c in CRITERIA {
        let rs: Vec<&CheckReport> = c.checks.iter().map(|(id, _)| by_id(id)).collect();
        let pass = rs.iter().all(|r| r.status == Status::Pass);
        let failed: Vec<String> = rs.iter().flat_map(|r| failed_names(r)).collect();
        println!("criterion {:>2} {:<24} {}", c.n, c.name, if pass { "PASS" } else { "FAIL" });
        if !pass {
            for f in &failed {
                println!("             failed: {f}");
            }
            if let Some(r) = rs.iter().find_map(|r| ["analysis", "reason", "error"].iter().find_map(|k| r.details.get(*k))) {
                println!("             reason: {r}");
            }
        }
        match c.known_failure {
            None if !pass => unexpected.push(format!("criterion {} ({})", c.n, c.name)),
            Some(k) => {
                let errored = rs.iter().any(|r| r.details.get("error").is_some());
                if errored || failed.iter().any(|f| !f.contains(k)) {
                    unexpected.push(format!("criterion {} ({}): failures beyond the known one", c.n, c.name));
                }
            }
            None => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
