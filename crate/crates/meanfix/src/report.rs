//! Serialization of reports and traces.
//!
//! JSON output is pretty-printed serde with fixed field order; CSV output is
//! the long format `step,metric,value` for traces and flat rows otherwise.
//! Both start from the same in-memory reports, so identical configurations
//! serialize byte-identically. Every CSV carries the schema and the full
//! configuration echo as `#`-comment lines.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use serde::Serialize;

use crate::driver::{
    AfpsRunReport, ExperimentConfig, LipschitzReport, SweepReport, VerifyCommandReport,
    WitnessCommandReport, SCHEMA,
};

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_header(config: &ExperimentConfig, columns: &str) -> String {
    let config_json = serde_json::to_string(config).expect("config serializes");
    format!("# schema: {SCHEMA}\n# config: {config_json}\n{columns}\n")
}

/// Long-format trace CSV. Per-step residuals come first; the terminal
/// residual family follows under metric names `r1..`, `chain1..`, `r_tau`,
/// `r_t_alpha`, `r_t`.
pub fn afps_csv(report: &AfpsRunReport) -> String {
    let mut out = csv_header(&report.config, "step,metric,value");
    if let Some(trace) = &report.trace {
        for rec in &trace.records {
            writeln!(out, "{},residual,{}", rec.step, rec.residual).unwrap();
        }
    } else {
        writeln!(out, "{},residual,{}", report.steps, report.final_residual).unwrap();
    }
    let last = report.steps;
    for (i, r) in report.residual_family.conditions.iter().enumerate() {
        writeln!(out, "{last},r{},{}", i + 1, r).unwrap();
    }
    for (i, r) in report.residual_family.chain.iter().enumerate() {
        writeln!(out, "{last},chain{},{}", i + 1, r).unwrap();
    }
    writeln!(out, "{last},r_tau,{}", report.residual_family.r_tau).unwrap();
    writeln!(out, "{last},r_t_alpha,{}", report.residual_family.r_t_alpha).unwrap();
    writeln!(out, "{last},r_t,{}", report.residual_family.r_t).unwrap();
    out
}

/// One row per grid point per condition.
pub fn sweep_csv(report: &SweepReport) -> String {
    let n = report.config.alpha.len();
    let alpha_cols: Vec<String> = (1..=n).map(|i| format!("alpha{i}")).collect();
    let mut out = csv_header(
        &report.config,
        &format!("{},p,condition_id,verdict,lhs,rhs", alpha_cols.join(",")),
    );
    for row in &report.rows {
        let weights: Vec<String> = row.alpha.iter().map(|w| w.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            weights.join(","),
            row.p,
            row.id,
            row.verdict,
            row.lhs,
            row.rhs
        )
        .unwrap();
    }
    out
}

pub fn verify_csv(report: &VerifyCommandReport) -> String {
    let mut out = csv_header(&report.config, "check,pass,detail");
    for check in &report.checks {
        writeln!(
            out,
            "{},{},{}",
            check.id,
            check.pass,
            check.detail.replace(',', ";")
        )
        .unwrap();
    }
    out
}

pub fn lipschitz_csv(report: &LipschitzReport) -> String {
    let mut out = csv_header(&report.config, "map,k_hat,pairs_sampled");
    for entry in &report.entries {
        writeln!(out, "{},{},{}", entry.map, entry.k_hat, entry.pairs_sampled).unwrap();
    }
    out
}

pub fn witness_csv(report: &WitnessCommandReport) -> String {
    let mut out = csv_header(&report.config, "found,ratio");
    match &report.witness {
        Some(w) => writeln!(out, "true,{}", w.ratio).unwrap(),
        None => writeln!(out, "false,").unwrap(),
    }
    out
}

/// Writes to the given path, or to stdout when no path is configured.
pub fn write_output(out: Option<&str>, content: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(Path::new(path), content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
