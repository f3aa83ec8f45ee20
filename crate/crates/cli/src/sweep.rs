use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::run::{execute, parse_weights, Check, CliError, CliResult, RunConfig};
use wps_core::FieldConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub line: usize,
    pub weights: String,
    pub check: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<String>,
    pub period: Option<u32>,
    pub message: String,
}

const HEADER: [&str; 7] = ["line", "weights", "check", "status", "elapsed_ms", "period", "message"];

pub struct SweepOptions {
    pub checks: Vec<Check>,
    pub field: FieldConfig,
    pub degree_bound: Option<i64>,
    pub timings: bool,
}

enum Job {
    Warning(usize, String, String),
    Run(usize, String, Check),
}

/// One row per (line, check); unparseable lines become a single warning row.
pub fn sweep(contents: &str, opts: &SweepOptions) -> Vec<Row> {
    let mut jobs = Vec::new();
    for (i, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_weights(line) {
            Err(e) => jobs.push(Job::Warning(i + 1, line.to_string(), e.to_string())),
            Ok(_) => jobs.extend(opts.checks.iter().map(|&c| Job::Run(i + 1, line.to_string(), c))),
        }
    }
    jobs.into_par_iter().map(|job| run_job(job, opts)).collect()
}

fn run_job(job: Job, opts: &SweepOptions) -> Row {
    match job {
        Job::Warning(line, weights, message) => Row {
            line,
            weights,
            check: String::new(),
            status: "warning".into(),
            elapsed_ms: None,
            period: None,
            message: format!("skipped: {message}"),
        },
        Job::Run(line, weights, check) => {
            let start = Instant::now();
            let result = parse_weights(&weights)
                .and_then(|w| RunConfig::new(w, opts.field, opts.degree_bound))
                .and_then(|cfg| execute(check, &cfg));
            let elapsed = start.elapsed();
            let (status, period, message) = match result {
                Ok(o) => (if o.pass { "pass" } else { "fail" }, o.period, String::new()),
                Err(e) => ("error", None, e.to_string()),
            };
            Row {
                line,
                weights: weights.split(',').map(str::trim).collect::<Vec<_>>().join(","),
                check: check.name().into(),
                status: status.into(),
                elapsed_ms: opts.timings.then(|| format!("{:.3}", elapsed.as_secs_f64() * 1e3)),
                period,
                message,
            }
        }
    }
}

/// Passing means no row failed or errored; warnings do not count.
pub fn all_pass(rows: &[Row]) -> bool {
    rows.iter().all(|r| r.status == "pass" || r.status == "warning")
}

pub fn to_csv(rows: &[Row], timings: bool) -> CliResult<String> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let header: Vec<&str> = HEADER.iter().copied().filter(|&h| timings || h != "elapsed_ms").collect();
    let io = |e: csv::Error| CliError::Verify(e.to_string());
    out.write_record(&header).map_err(io)?;
    for r in rows {
        let mut rec = vec![r.line.to_string(), r.weights.clone(), r.check.clone(), r.status.clone()];
        if timings {
            rec.push(r.elapsed_ms.clone().unwrap_or_default());
        }
        rec.push(r.period.map(|p| p.to_string()).unwrap_or_default());
        rec.push(r.message.clone());
        out.write_record(&rec).map_err(io)?;
    }
    let bytes = out.into_inner().map_err(|e| CliError::Verify(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Verify(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(checks: Vec<Check>) -> SweepOptions {
        SweepOptions { checks, field: FieldConfig::Rationals, degree_bound: None, timings: false }
    }

    #[test]
    fn ktheory_rows_pass() {
        let rows = sweep("1,1,1\n1,1,2\n1,2,3\n", &opts(vec![Check::Ktheory]));
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.status == "pass"));
        assert_eq!(rows.iter().map(|r| r.period).collect::<Vec<_>>(), vec![Some(3), Some(4), Some(6)]);
    }

    #[test]
    fn malformed_and_empty() {
        assert!(sweep("", &opts(vec![Check::Ktheory])).is_empty());
        let rows = sweep("1,x\n\n# comment\n1,1\n", &opts(vec![Check::Ktheory, Check::D2]));
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].status, "warning");
        assert_eq!(rows[0].line, 1);
        assert!(all_pass(&rows));
    }

    #[test]
    fn csv_header_without_timings() {
        let csv = to_csv(&[], false).unwrap();
        assert_eq!(csv, "line,weights,check,status,period,message\n");
    }
}
