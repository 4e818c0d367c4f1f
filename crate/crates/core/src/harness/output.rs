//! CSV writers. Floats use Rust's shortest round-trip formatting, so values
//! parse back bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use super::{HarnessError, OracleRow, ResultRecord, TrialFailure};
use crate::optimizer::ConvergenceTrace;

pub const CSV_HEADER: &str = "sweep_value,strategy,trial,seed,final_sinr_db,iterations,wall_time_ms";

fn write_file(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn write_csv(records: &[ResultRecord], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.sweep_value, r.strategy, r.trial, r.seed, r.final_sinr_db, r.iterations, r.wall_time_ms
        );
    }
    write_file(path.as_ref(), &out)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRecord>, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(HarnessError::Csv {
            line: 1,
            message: "unexpected header".into(),
        });
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |message: String| HarnessError::Csv { line: i + 2, message };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(format!("expected 7 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
            let int = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("`{s}`: {e}")));
            Ok(ResultRecord {
                sweep_value: num(f[0])?,
                strategy: f[1].parse().map_err(bad)?,
                trial: int(f[2])? as usize,
                seed: int(f[3])?,
                final_sinr_db: num(f[4])?,
                iterations: int(f[5])? as usize,
                wall_time_ms: num(f[6])?,
            })
        })
        .collect()
}

pub fn write_failures(failures: &[TrialFailure], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut out = String::from("sweep_value,strategy,trial,seed,stage,message\n");
    for f in failures {
        let message = f.message.replace([',', '\n'], " ");
        let _ = writeln!(out, "{},{},{},{},{},{}", f.sweep_value, f.strategy, f.trial, f.seed, f.stage, message);
    }
    write_file(path.as_ref(), &out)
}

/// One row per outer iteration, numbered from 1.
pub fn emit_trace(trace: &ConvergenceTrace, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    if trace.sinr_per_iteration.is_empty() {
        return Err(HarnessError::InvalidInput("empty convergence trace".into()));
    }
    let mut out = String::from("iteration,sinr_db\n");
    for (i, s) in trace.sinr_per_iteration.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, 10.0 * s.log10());
    }
    write_file(path.as_ref(), &out)
}

pub fn write_oracle_csv(rows: &[OracleRow], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let mut out = String::from("trial,seed,alternating_sinr_db,oracle_sinr_db,ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.trial,
            r.seed,
            10.0 * r.alternating_sinr.log10(),
            10.0 * r.oracle_sinr.log10(),
            r.ratio()
        );
    }
    write_file(path.as_ref(), &out)
}
