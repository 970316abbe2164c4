use std::fmt::Write;

use clap::ValueEnum;
use lyubeznik::invariants::SuiteReport;
use lyubeznik::linalg::FieldSpec;
use lyubeznik::oracle::SweepReport;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// The result of one command, independent of the output format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Chi { values: Vec<(String, i64)> },
    Lambda { indices: Vec<usize>, value: usize },
    Table { d: usize, entries: Vec<Vec<usize>> },
    Bound { j: usize, value: usize },
    Check { rows: Vec<CheckRow>, failures: Vec<String> },
}

impl Outcome {
    pub fn check(report: SuiteReport, oracle: Option<Vec<(FieldSpec, SweepReport)>>) -> Self {
        let mut rows: Vec<CheckRow> = report
            .checks
            .iter()
            .map(|c| CheckRow {
                name: c.name.clone(),
                passed: c.passed,
                failed: c.failed,
                skipped: c.skipped,
            })
            .collect();
        let mut failures: Vec<String> = report
            .violations
            .iter()
            .map(|v| {
                format!(
                    "{}: {} (n = {}, ideals {:?}, indices {:?})",
                    v.check, v.detail, v.reproducer.n, v.reproducer.ideals, v.reproducer.indices
                )
            })
            .collect();
        for (field, sweep) in oracle.into_iter().flatten() {
            let total = sweep.single_checks + sweep.iterated_checks;
            rows.push(CheckRow {
                name: format!("window-oracle[{field}]"),
                passed: total - sweep.failures.len(),
                failed: sweep.failures.len(),
                skipped: 0,
            });
            for f in &sweep.failures {
                let gens: Vec<Vec<usize>> = f.ideal.generators().iter().map(|g| g.to_one_based()).collect();
                failures.push(format!(
                    "window-oracle[{field}]: {} (n = {}, generators {gens:?}, degrees {:?})",
                    f.violation,
                    f.ideal.n(),
                    f.degrees
                ));
            }
        }
        Outcome::Check { rows, failures }
    }

    /// Disagreeing characteristics or failed checks.
    pub fn is_failure(&self) -> bool {
        match self {
            Outcome::Chi { values } => values.iter().any(|(_, v)| *v != values[0].1),
            Outcome::Check { failures, .. } => !failures.is_empty(),
            _ => false,
        }
    }

    pub fn failure_summary(&self) -> String {
        match self {
            Outcome::Chi { .. } => "the methods disagree".into(),
            Outcome::Check { failures, .. } => format!("{} check failures", failures.len()),
            _ => String::new(),
        }
    }
}

fn method_note(method: &str) -> &'static str {
    match method {
        "engine" => "alternating lengths of local cohomology",
        "faces" => "weighted f-vector",
        _ => "inclusion-exclusion over generator lcms",
    }
}

pub fn render(outcome: &Outcome, format: Format, field: FieldSpec) -> String {
    match format {
        Format::Text => text(outcome, field),
        Format::Json => {
            let mut value = json_value(outcome);
            value["field"] = json!(field.to_string());
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json values serialize"))
        }
        Format::Csv => csv(outcome),
    }
}

fn text(outcome: &Outcome, field: FieldSpec) -> String {
    let mut out = String::new();
    match outcome {
        Outcome::Chi { values } => {
            for (m, v) in values {
                writeln!(out, "chi({m}) = {v}  via {}", method_note(m)).unwrap();
            }
        }
        Outcome::Lambda { indices, value } => {
            let idx: Vec<String> = indices.iter().map(usize::to_string).collect();
            writeln!(
                out,
                "lambda[{}] = {value}  via lengths of iterated local cohomology over {field}",
                idx.join(",")
            )
            .unwrap();
        }
        Outcome::Table { d, entries } => {
            writeln!(out, "Lyubeznik table, d = {d}, over {field}, rows i, columns j").unwrap();
            write!(out, "i\\j").unwrap();
            for j in 0..=*d {
                write!(out, " {j:>3}").unwrap();
            }
            for (i, row) in entries.iter().enumerate() {
                write!(out, "\n{i:>3}").unwrap();
                for v in row {
                    write!(out, " {v:>3}").unwrap();
                }
            }
            out.push('\n');
        }
        Outcome::Bound { j, value } => {
            writeln!(out, "bound[j = {j}] = {value}  via sums of minimal primes").unwrap();
        }
        Outcome::Check { rows, failures } => {
            for r in rows {
                writeln!(
                    out,
                    "{}: {} passed, {} failed, {} skipped",
                    r.name, r.passed, r.failed, r.skipped
                )
                .unwrap();
            }
            for f in failures {
                writeln!(out, "violation {f}").unwrap();
            }
        }
    }
    out
}

fn json_value(outcome: &Outcome) -> serde_json::Value {
    match outcome {
        Outcome::Chi { values } => {
            let map: serde_json::Map<String, serde_json::Value> =
                values.iter().map(|(m, v)| (m.clone(), json!(v))).collect();
            json!({ "command": "chi", "chi": map, "agree": !outcome.is_failure() })
        }
        Outcome::Lambda { indices, value } => json!({ "command": "lambda", "indices": indices, "lambda": value }),
        Outcome::Table { d, entries } => json!({ "command": "table", "d": d, "entries": entries }),
        Outcome::Bound { j, value } => json!({ "command": "bound", "j": j, "bound": value }),
        Outcome::Check { rows, failures } => json!({ "command": "check", "checks": rows, "violations": failures }),
    }
}

fn csv(outcome: &Outcome) -> String {
    let mut out = String::new();
    match outcome {
        Outcome::Chi { values } => {
            out.push_str("method,chi\n");
            for (m, v) in values {
                writeln!(out, "{m},{v}").unwrap();
            }
        }
        Outcome::Lambda { indices, value } => {
            let idx: Vec<String> = indices.iter().map(usize::to_string).collect();
            writeln!(out, "indices,lambda\n{},{value}", idx.join(";")).unwrap();
        }
        Outcome::Table { d, entries } => {
            out.push_str("i\\j");
            for j in 0..=*d {
                write!(out, ",{j}").unwrap();
            }
            out.push('\n');
            for (i, row) in entries.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                writeln!(out, "{i},{}", cells.join(",")).unwrap();
            }
        }
        Outcome::Bound { j, value } => {
            writeln!(out, "j,bound\n{j},{value}").unwrap();
        }
        Outcome::Check { rows, .. } => {
            out.push_str("check,passed,failed,skipped\n");
            for r in rows {
                writeln!(out, "{},{},{},{}", r.name, r.passed, r.failed, r.skipped).unwrap();
            }
        }
    }
    out
}
