//! `trace.csv`: one row per time step.

use std::fmt::Write as _;
use std::path::Path;

use crate::driver::{StepKind, StepRecord};
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "step,t,dt,kind,energy,dissipation,cracked_nodes,gmres_iters";

/// The columns of a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub kind: StepKind,
    pub energy: f64,
    pub dissipation: f64,
    pub cracked_nodes: usize,
    pub gmres_iters: usize,
}

impl From<&StepRecord> for TraceRow {
    fn from(r: &StepRecord) -> Self {
        Self {
            step: r.step,
            t: r.t,
            dt: r.dt,
            kind: r.kind,
            energy: r.energy,
            dissipation: r.dissipation,
            cracked_nodes: r.cracked_nodes,
            gmres_iters: r.gmres_iters,
        }
    }
}

/// Shortest decimal representation that parses back to the same `f64`.
pub fn format_trace(records: &[StepRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{},{:?},{:?},{},{}",
            r.step,
            r.t,
            r.dt,
            r.kind.name(),
            r.energy,
            r.dissipation,
            r.cracked_nodes,
            r.gmres_iters
        );
    }
    out
}

pub fn write_trace(records: &[StepRecord], path: &Path) -> Result<()> {
    std::fs::write(path, format_trace(records))?;
    Ok(())
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == TRACE_HEADER => {}
        _ => {
            return Err(Error::Config {
                line: 1,
                message: format!("expected header `{TRACE_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Config { line: idx + 1, message };
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 8 {
            return Err(err(format!("expected 8 columns, found {}", cols.len())));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad integer `{s}`")));
        rows.push(TraceRow {
            step: int(cols[0])?,
            t: float(cols[1])?,
            dt: float(cols[2])?,
            kind: StepKind::parse(cols[3]).ok_or_else(|| err(format!("bad step kind `{}`", cols[3])))?,
            energy: float(cols[4])?,
            dissipation: float(cols[5])?,
            cracked_nodes: int(cols[6])?,
            gmres_iters: int(cols[7])?,
        });
    }
    Ok(rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    parse_trace(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(step: usize, t: f64, energy: f64, kind: StepKind) -> StepRecord {
        StepRecord {
            step,
            t,
            dt: 0.1 / 3.0,
            kind,
            energy,
            dissipation: -1e-300,
            cracked_nodes: step * 7,
            gmres_iters: 12,
            gmres_max: 12,
            cg_iters: 3,
            s_changed: false,
            material_version: 1,
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let records = vec![
            record(1, 0.001, std::f64::consts::PI, StepKind::Elastic),
            record(2, 0.0015, 1e-17, StepKind::Dissipative),
        ];
        write_trace(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("step,t,dt,kind,energy,dissipation,cracked_nodes,gmres_iters\n"));
        let rows = read_trace(&path).unwrap();
        let expected: Vec<TraceRow> = records.iter().map(TraceRow::from).collect();
        assert_eq!(rows, expected);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_trace("bad header\n").is_err());
        let text = format!("{TRACE_HEADER}\n1,0.1,0.1,elastic,1,0,0\n");
        assert!(matches!(parse_trace(&text), Err(Error::Config { line: 2, .. })));
        let text = format!("{TRACE_HEADER}\n1,0.1,0.1,plastic,1,0,0,3\n");
        assert!(parse_trace(&text).is_err());
    }

    proptest! {
        #[test]
        fn values_are_reproduced_bit_for_bit(t in any::<f64>().prop_filter("finite", |v| v.is_finite()),
                                              e in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let records = vec![record(3, t, e, StepKind::Elastic)];
            let rows = parse_trace(&format_trace(&records)).unwrap();
            prop_assert_eq!(rows[0].t.to_bits(), t.to_bits());
            prop_assert_eq!(rows[0].energy.to_bits(), e.to_bits());
        }
    }
}
