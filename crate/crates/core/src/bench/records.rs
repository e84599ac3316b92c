//! Run records and their file formats.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tts::SolveResult;
use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverTag {
    #[serde(rename = "tabu")]
    Tabu,
    #[serde(rename = "memetic")]
    Memetic,
    #[serde(rename = "pce")]
    Pce,
    #[serde(rename = "pce+tabu")]
    PceTabu,
    #[serde(rename = "exact")]
    Exact,
}

impl SolverTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverTag::Tabu => "tabu",
            SolverTag::Memetic => "memetic",
            SolverTag::Pce => "pce",
            SolverTag::PceTabu => "pce+tabu",
            SolverTag::Exact => "exact",
        }
    }
}

impl fmt::Display for SolverTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tabu" => Ok(SolverTag::Tabu),
            "memetic" => Ok(SolverTag::Memetic),
            "pce" => Ok(SolverTag::Pce),
            "pce+tabu" => Ok(SolverTag::PceTabu),
            "exact" => Ok(SolverTag::Exact),
            other => Err(Error::invalid(format!("unknown solver tag {other:?}"))),
        }
    }
}

/// Which counter a fit or export reads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[default]
    Exact,
    First,
    Second,
}

impl Target {
    pub fn as_str(&self) -> &'static str {
        match self {
            Target::Exact => "exact",
            Target::First => "first",
            Target::Second => "second",
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Target::Exact),
            "first" | "1st" => Ok(Target::First),
            "second" | "2nd" => Ok(Target::Second),
            other => Err(Error::invalid(format!("unknown target {other:?}"))),
        }
    }
}

/// One solver run inside a campaign: a JSON-lines row.
///
/// Invariant: `tts_2nd <= tts_1st <= tts` where present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub solver: SolverTag,
    pub n: usize,
    pub seed: u64,
    pub run_index: usize,
    pub tts: Option<u64>,
    pub tts_1st: Option<u64>,
    pub tts_2nd: Option<u64>,
    pub best_energy: i64,
    pub total_evals: u64,
    pub restarts_used: u64,
    /// Seconds; only recorded on request so that output stays reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    pub config: serde_json::Value,
}

impl RunRecord {
    pub fn from_result(solver: SolverTag, n: usize, run_index: usize, result: &SolveResult, config: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            solver,
            n,
            seed: result.seed,
            run_index,
            tts: result.evals_to_exact,
            tts_1st: result.evals_to_first,
            tts_2nd: result.evals_to_second,
            best_energy: result.best_energy,
            total_evals: result.total_evals,
            restarts_used: result.restarts_used,
            wall_time: None,
            config,
        }
    }

    pub fn counter(&self, target: Target) -> Option<u64> {
        match target {
            Target::Exact => self.tts,
            Target::First => self.tts_1st,
            Target::Second => self.tts_2nd,
        }
    }
}

pub fn write_jsonl<W: Write>(records: &[RunRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Runtime(e.to_string()))?;
        out.write_all(b"\n").map_err(|e| Error::Runtime(e.to_string()))?;
    }
    Ok(())
}

/// Parses JSON lines, skipping blank lines.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Runtime(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RunRecord =
            serde_json::from_str(&line).map_err(|e| Error::invalid(format!("record on line {}: {e}", i + 1)))?;
        records.push(r);
    }
    Ok(records)
}

/// CSV with columns `N, tts, solver, seed, target`; absent counters are empty cells.
pub fn write_csv<W: Write>(records: &[RunRecord], target: Target, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Runtime(e.to_string());
    w.write_record(["N", "tts", "solver", "seed", "target"]).map_err(err)?;
    for r in records {
        let tts = r.counter(target).map(|t| t.to_string()).unwrap_or_default();
        w.write_record([r.n.to_string(), tts, r.solver.to_string(), r.seed.to_string(), target.as_str().to_string()])
            .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Runtime(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize, tts: Option<u64>) -> RunRecord {
        RunRecord {
            schema_version: SCHEMA_VERSION,
            solver: SolverTag::PceTabu,
            n,
            seed: 5,
            run_index: 0,
            tts,
            tts_1st: tts,
            tts_2nd: None,
            best_energy: 6,
            total_evals: 100,
            restarts_used: 1,
            wall_time: None,
            config: serde_json::json!({}),
        }
    }

    #[test]
    fn jsonl_round_trip() {
        let records = vec![record(13, Some(40)), record(21, None)];
        let mut buf = Vec::new();
        write_jsonl(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"solver\":\"pce+tabu\""));
        assert!(!text.contains("wall_time"));
        assert_eq!(read_jsonl(&buf[..]).unwrap(), records);
        assert!(read_jsonl(&b"{not json}\n"[..]).is_err());
    }

    #[test]
    fn csv_columns() {
        let mut buf = Vec::new();
        write_csv(&[record(13, Some(40)), record(21, None)], Target::Exact, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "N,tts,solver,seed,target\n13,40,pce+tabu,5,exact\n21,,pce+tabu,5,exact\n");
    }

    #[test]
    fn tags_parse() {
        for tag in [SolverTag::Tabu, SolverTag::Memetic, SolverTag::Pce, SolverTag::PceTabu, SolverTag::Exact] {
            assert_eq!(tag.as_str().parse::<SolverTag>().unwrap(), tag);
        }
        assert!("sa".parse::<SolverTag>().is_err());
    }
}
