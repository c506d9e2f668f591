use std::process::ExitCode;
use std::time::Duration;

use liquidpower::RationalValue;
use serde_json::{json, Value};

pub struct Report {
    pub instance: Value,
    pub results: Value,
    /// False when the command ran but found an inconsistency.
    pub ok: bool,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub elapsed: Duration,
}

/// Exact `num/den` string plus a decimal approximation.
pub fn rational(v: &RationalValue) -> Value {
    json!({ "exact": v.to_string(), "approx": v.to_f64() })
}

pub fn emit(argv: &[String], report: Report, pretty: bool) -> ExitCode {
    let status = if report.ok { "ok" } else { "failure" };
    if pretty {
        println!("{}  ({status}, {:.3} ms)", argv.join(" "), report.elapsed.as_secs_f64() * 1e3);
        print_table(&report.header, &report.rows);
    } else {
        let doc = json!({
            "status": status,
            "command": argv,
            "instance": report.instance,
            "results": report.results,
            "timing_ms": report.elapsed.as_secs_f64() * 1e3,
        });
        println!("{doc}");
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

pub fn emit_error(argv: &[String], err: &anyhow::Error, pretty: bool) -> ExitCode {
    let kind = err
        .downcast_ref::<liquidpower::Error>()
        .map(|e| {
            let dbg = format!("{e:?}");
            dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
        })
        .unwrap_or_else(|| "Error".to_string());
    let message = format!("{err:#}");
    if pretty {
        eprintln!("error ({kind}): {message}");
    } else {
        println!("{}", json!({ "status": "error", "command": argv, "error": { "kind": kind, "message": message } }));
    }
    ExitCode::FAILURE
}

fn print_table(header: &[String], rows: &[Vec<String>]) {
    let cols = header.len();
    let mut width = vec![0; cols];
    for row in std::iter::once(header).chain(rows.iter().map(|r| r.as_slice())) {
        for (i, cell) in row.iter().enumerate().take(cols) {
            width[i] = width[i].max(cell.len());
        }
    }
    let line = |row: &[String]| {
        row.iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<w$}", w = width[i]))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!("{}", line(header));
    println!("{}", width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    for row in rows {
        println!("{}", line(row));
    }
}
