//! Running a task file into a versioned report, and replaying reports.

use std::collections::BTreeMap;
use std::time::Instant;

use mcalg::certificate::{self, Certificate, Verdict};
use mcalg::par::{self, Exec};
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::ops::{self, Config};
use crate::taskfile::TaskFile;

pub const SCHEMA: &str = "mcalg.report";
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
/// No computation draws random numbers; the seed is recorded for the schema.
pub const SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub name: String,
    pub op: String,
    pub line: usize,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub caps_used: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Json::is_null")]
    pub result: Json,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: u32,
    pub toolkit: String,
    pub seed: u64,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.tasks.iter().any(|t| t.status == Status::Error)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// One line per task.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let status = match (&t.status, t.verdict) {
                (Status::Error, _) => format!("error: {}", t.error.as_deref().unwrap_or("")),
                (Status::Ok, Some(v)) => v.to_string(),
                (Status::Ok, None) => "ok".into(),
            };
            let summary = if t.result.is_null() {
                String::new()
            } else {
                format!("  {}", t.result)
            };
            out.push_str(&format!("{:<24} {:<20} {status}{summary}\n", t.name, t.op));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub exec: Exec,
    pub timings: bool,
}

/// Runs every task of `file`; the report lists them in file order.
pub fn run(file: &TaskFile, flags: &Config, opts: RunOptions) -> Report {
    let cfg = Config {
        degree_bound: file.settings.degree_bound.unwrap_or(flags.degree_bound),
        exponent_cap: file.settings.exponent_cap.unwrap_or(flags.exponent_cap),
        prime: file.settings.prime.or(flags.prime),
        limit: flags.limit,
    };
    let tasks = par::map(opts.exec, &file.tasks, |task| {
        let start = Instant::now();
        let out = ops::run(task, file, &cfg);
        let wall_ms = opts.timings.then(|| start.elapsed().as_millis() as u64);
        let mut rep = TaskReport {
            name: task.name.clone(),
            op: task.op.clone(),
            line: task.line,
            status: Status::Ok,
            verdict: None,
            caps_used: BTreeMap::new(),
            result: Json::Null,
            certificate: None,
            error: None,
            wall_ms,
        };
        match out {
            Ok(o) => {
                rep.verdict = Some(o.certificate.verdict);
                rep.caps_used = o.caps;
                rep.result = o.result;
                rep.certificate = Some(o.certificate);
            }
            Err(e) => {
                rep.status = Status::Error;
                rep.error = Some(e.to_string());
            }
        }
        rep
    });
    Report {
        schema: SCHEMA.into(),
        version: SCHEMA_VERSION,
        toolkit: format!("mcalg {TOOLKIT_VERSION}"),
        seed: SEED,
        tasks,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayLine {
    pub task: String,
    pub outcome: Result<(), String>,
}

/// Re-checks every certificate in a report. Tasks that errored carry no
/// certificate and are skipped.
pub fn replay(report: &Report, exec: Exec) -> Result<Vec<ReplayLine>, String> {
    if report.schema != SCHEMA || report.version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported report schema {} v{}",
            report.schema, report.version
        ));
    }
    let with_cert: Vec<&TaskReport> = report
        .tasks
        .iter()
        .filter(|t| t.certificate.is_some())
        .collect();
    Ok(par::map(exec, &with_cert, |t| {
        let cert = t.certificate.as_ref().expect("filtered");
        let outcome = if t.verdict != Some(cert.verdict) {
            Err("recorded verdict differs from the certificate".to_string())
        } else {
            certificate::replay(cert).map_err(|f| f.to_string())
        };
        ReplayLine {
            task: t.name.clone(),
            outcome,
        }
    }))
}
