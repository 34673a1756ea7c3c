//! CSV and JSON renderings of a report. Both print every float through the
//! same 15-significant-digit formatter, so the two agree field for field.

use std::io::Write;

use anyhow::Result;
use qstancu_core::report::{format_sig15, round_sig15, ConvergenceReport, ReportRow};
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const CSV_HEADER: &str = "n,q,function,norm,x,error,bound,slack,pass";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(report: &ConvergenceReport, mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            format_sig15(r.q),
            csv_field(&r.function),
            csv_field(&r.norm),
            format_sig15(r.x),
            format_sig15(r.error),
            format_sig15(r.bound),
            format_sig15(r.slack),
            r.pass
        )?;
    }
    Ok(())
}

/// Finite values become JSON numbers rounded as in the CSV; NaN and
/// infinities become the strings the CSV prints.
fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig15(x))
    } else {
        Value::String(format_sig15(x))
    }
}

fn row_json(r: &ReportRow) -> Value {
    json!({
        "n": r.n,
        "q": number(r.q),
        "function": r.function,
        "norm": r.norm,
        "x": number(r.x),
        "error": number(r.error),
        "bound": number(r.bound),
        "slack": number(r.slack),
        "pass": r.pass,
    })
}

pub fn to_json(config: &RunConfig, report: &ConvergenceReport) -> Result<Value> {
    let s = report.summary();
    Ok(json!({
        "config": serde_json::to_value(config)?,
        "rows": report.rows.iter().map(row_json).collect::<Vec<_>>(),
        "summary": {
            "rows": s.rows,
            "failures": s.failures,
            "min_slack": number(s.min_slack),
            "all_pass": s.all_pass,
        },
    }))
}

pub fn write_json<W: Write>(config: &RunConfig, report: &ConvergenceReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &to_json(config, report)?)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;

    fn sample() -> ConvergenceReport {
        let mut r = ConvergenceReport::default();
        r.push(ReportRow::check(5, 0.5, "t", "sup", f64::NAN, 1.0 / 3.0, 0.5));
        r.push(ReportRow::informational(5, 0.5, "a,b", "x", 1.0, 2.0));
        r
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "5,5.00000000000000e-1,t,sup,NaN,3.33333333333333e-1,5.00000000000000e-1,1.66666666666667e-1,true"
        );
        assert!(lines[2].contains("\"a,b\""));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_matches_csv_values() {
        let config = RunConfig::new(Command::Moments).unwrap();
        let v = to_json(&config, &sample()).unwrap();
        assert_eq!(v["rows"][0]["error"], json!(0.333333333333333));
        assert_eq!(v["rows"][0]["x"], json!("NaN"));
        assert_eq!(v["summary"]["all_pass"], json!(true));
        assert_eq!(v["config"]["operator"], json!("cai"));
    }
}
