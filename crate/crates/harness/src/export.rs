use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{HarnessError, Result};
use crate::experiment::RunRecord;

/// Column order of both export formats.
pub const COLUMNS: [&str; 15] = [
    "instance",
    "solver",
    "scenario",
    "qubits",
    "id_qubits",
    "cost",
    "relative_cost",
    "col_violations",
    "row_violations",
    "wall_time_build",
    "wall_time_solve",
    "seed",
    "bits",
    "status",
    "total_violations",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Jsonl => "jsonl",
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        path.extension().and_then(|e| e.to_str()).unwrap_or("").parse()
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for ExportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "jsonl" | "json" => Ok(ExportFormat::Jsonl),
            _ => Err(HarnessError::Config(format!("unknown export format `{s}` (expected csv or jsonl)"))),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn row(r: &RunRecord) -> [String; 15] {
    [
        r.instance.to_string(),
        r.solver.to_string(),
        r.scenario.to_string(),
        r.qubits.to_string(),
        r.id_qubits.to_string(),
        opt(r.cost),
        opt(r.relative_cost),
        opt(r.col_violations),
        opt(r.row_violations),
        r.wall_time_build.to_string(),
        r.wall_time_solve.to_string(),
        r.seed.to_string(),
        r.bits.clone(),
        r.status.clone(),
        opt(r.total_violations()),
    ]
}

/// CSV with a header line, also for an empty batch.
pub fn to_csv_string(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record(row(r))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_jsonl_string(records: &[RunRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

fn parse<T: FromStr>(field: &str, name: &str) -> Result<T> {
    field.parse().map_err(|_| HarnessError::Config(format!("bad value `{field}` in column {name}")))
}

fn parse_opt<T: FromStr>(field: &str, name: &str) -> Result<Option<T>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse(field, name).map(Some)
    }
}

pub fn from_csv_str(text: &str) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(HarnessError::Config(format!("unexpected csv header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        out.push(RunRecord {
            instance: parse(f(0), COLUMNS[0])?,
            solver: f(1).parse()?,
            scenario: f(2).parse()?,
            qubits: parse(f(3), COLUMNS[3])?,
            id_qubits: parse(f(4), COLUMNS[4])?,
            cost: parse_opt(f(5), COLUMNS[5])?,
            relative_cost: parse_opt(f(6), COLUMNS[6])?,
            col_violations: parse_opt(f(7), COLUMNS[7])?,
            row_violations: parse_opt(f(8), COLUMNS[8])?,
            wall_time_build: parse(f(9), COLUMNS[9])?,
            wall_time_solve: parse(f(10), COLUMNS[10])?,
            seed: parse(f(11), COLUMNS[11])?,
            bits: f(12).to_owned(),
            status: f(13).to_owned(),
        });
    }
    Ok(out)
}

pub fn from_jsonl_str(text: &str) -> Result<Vec<RunRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}

/// Writes `records` to `path` in `format`, creating parent directories.
pub fn export(records: &[RunRecord], path: &Path, format: ExportFormat) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let text = match format {
        ExportFormat::Csv => to_csv_string(records)?,
        ExportFormat::Jsonl => to_jsonl_string(records)?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Reads an export back; the format follows the file extension.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path)?;
    match ExportFormat::from_path(path)? {
        ExportFormat::Csv => from_csv_str(&text),
        ExportFormat::Jsonl => from_jsonl_str(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SolverKind;
    use mco_core::Scenario;

    fn record(ok: bool) -> RunRecord {
        RunRecord {
            instance: 3,
            solver: SolverKind::Qaoah,
            scenario: Scenario::S2,
            qubits: 8,
            id_qubits: 2,
            cost: ok.then_some(1.5),
            relative_cost: ok.then_some(0.25),
            col_violations: ok.then_some(0),
            row_violations: ok.then_some(1),
            wall_time_build: 0.0,
            wall_time_solve: 0.125,
            seed: 42,
            bits: if ok { "01100110".into() } else { String::new() },
            status: if ok { "ok".into() } else { "error: budget, \"too\" large".into() },
        }
    }

    #[test]
    fn empty_csv_has_header() {
        let s = to_csv_string(&[]).unwrap();
        assert_eq!(s.trim_end(), COLUMNS.join(","));
        assert!(from_csv_str(&s).unwrap().is_empty());
        assert_eq!(to_jsonl_string(&[]).unwrap(), "");
    }

    #[test]
    fn round_trips() {
        let recs = vec![record(true), record(false)];
        assert_eq!(from_csv_str(&to_csv_string(&recs).unwrap()).unwrap(), recs);
        assert_eq!(from_jsonl_str(&to_jsonl_string(&recs).unwrap()).unwrap(), recs);
    }

    #[test]
    fn format_names() {
        assert_eq!("CSV".parse::<ExportFormat>().unwrap(), ExportFormat::Csv);
        assert_eq!(ExportFormat::from_path(Path::new("a/b.jsonl")).unwrap(), ExportFormat::Jsonl);
        assert!("xml".parse::<ExportFormat>().is_err());
    }
}
