//! CSV and JSON writers.
//!
//! Every trajectory is written as one CSV with header
//! `t,J_up,J_dn,Q_up,Q_dn,n_1..n_L,nup_1..nup_L,ndn_1..ndn_L` and one row per
//! grid time. Values use Rust's `{:.11e}` formatting, i.e. 12 significant
//! digits, so identical runs produce byte-identical files. The JSON mirror
//! uses the same field names with full `f64` precision.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::config::{OutputFormat, RunConfig};
use crate::basis::Spin;
use crate::error::{Error, Result};
use crate::observables::TimeSeriesRecord;
use crate::scenarios::{AlphaScan, Run, ScenarioKind, ScenarioOutput};

/// Significant digits of every CSV value.
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn format_value(x: f64) -> String {
    format!("{:.*e}", CSV_SIGNIFICANT_DIGITS - 1, x)
}

pub fn csv_header(sites: usize) -> Vec<String> {
    let mut header: Vec<String> = ["t", "J_up", "J_dn", "Q_up", "Q_dn"].map(String::from).to_vec();
    for prefix in ["n", "nup", "ndn"] {
        header.extend((1..=sites).map(|i| format!("{prefix}_{i}")));
    }
    header
}

fn row_values(r: &TimeSeriesRecord) -> impl Iterator<Item = f64> + '_ {
    [r.t, r.current_up, r.current_dn, r.charge_up, r.charge_dn]
        .into_iter()
        .chain(r.density.iter().copied())
        .chain(r.density_up.iter().copied())
        .chain(r.density_dn.iter().copied())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// The CSV text of one trajectory.
pub fn records_to_csv(records: &[TimeSeriesRecord]) -> Result<String> {
    let sites = records.first().map_or(0, |r| r.density.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header(sites)).map_err(csv_error)?;
    for r in records {
        w.write_record(row_values(r).map(format_value)).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

/// The JSON mirror of one trajectory: run metadata plus one object per row.
pub fn run_to_json(kind: ScenarioKind, run: &Run) -> Value {
    let sites = run.records.first().map_or(0, |r| r.density.len());
    let header = csv_header(sites);
    let rows: Vec<Value> = run
        .records
        .iter()
        .map(|r| Value::Object(header.iter().cloned().zip(row_values(r).map(Value::from)).collect::<Map<_, _>>()))
        .collect();
    json!({
        "scenario": kind.name(),
        "label": run.label,
        "alpha": run.alpha,
        "records": rows,
    })
}

/// A parsed numeric CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_csv(reader: impl Read) -> Result<CsvTable> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .map(|v| v.parse::<f64>().map_err(|e| Error::Format(format!("bad number {v:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

pub fn read_csv_file(path: &Path) -> Result<CsvTable> {
    read_csv(fs::File::open(path).map_err(|e| Error::io(path, e))?)
}

fn alpha_tag(alpha: f64) -> String {
    format!("alpha-{alpha}")
}

/// File stem of a trajectory, without extension.
pub fn run_stem(kind: ScenarioKind, run: &Run, config: Option<&str>) -> String {
    match (kind, config) {
        (ScenarioKind::BarrierComparison, _) => format!("{kind}_{}", alpha_tag(run.alpha)),
        (ScenarioKind::AlphaScan, Some(c)) => format!("{kind}_{c}_{}", alpha_tag(run.alpha)),
        (ScenarioKind::Custom, _) => kind.name().to_string(),
        _ => format!("{kind}_{}", run.label),
    }
}

pub fn scan_summary_csv(scan: &AlphaScan) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "Qbar_up", "Qbar_dn", "counterprop_flag"]).map_err(csv_error)?;
    for p in &scan.points {
        let flag = if p.counter_propagating() { "1" } else { "0" };
        w.write_record([format_value(p.alpha), format_value(p.qbar_up), format_value(p.qbar_dn), flag.into()])
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

fn scan_summary_json(scan: &AlphaScan) -> Value {
    Value::Array(
        scan.points
            .iter()
            .map(|p| {
                json!({
                    "alpha": p.alpha,
                    "Qbar_up": p.qbar_up,
                    "Qbar_dn": p.qbar_dn,
                    "counterprop_flag": u8::from(p.counter_propagating()),
                })
            })
            .collect(),
    )
}

fn run_summary(run: &Run) -> Value {
    let c = run.conservation();
    json!({
        "label": run.label,
        "alpha": run.alpha,
        "Qbar_up": run.qbar(Spin::Up),
        "Qbar_dn": run.qbar(Spin::Down),
        "max_abs_Q_up": run.max_abs_charge(Spin::Up),
        "max_abs_Q_dn": run.max_abs_charge(Spin::Down),
        "norm_drift": c.norm,
        "energy_drift_rel": c.energy,
        "particle_drift": c.particles,
    })
}

fn write(path: PathBuf, contents: &[u8], written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn write_run(
    dir: &Path,
    kind: ScenarioKind,
    run: &Run,
    config: Option<&str>,
    formats: &[OutputFormat],
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    let stem = run_stem(kind, run, config);
    for format in formats {
        match format {
            OutputFormat::Csv => {
                write(dir.join(format!("{stem}.csv")), records_to_csv(&run.records)?.as_bytes(), written)?
            }
            OutputFormat::Json => {
                let text = serde_json::to_string(&run_to_json(kind, run)).map_err(|e| Error::Format(e.to_string()))?;
                write(dir.join(format!("{stem}.json")), text.as_bytes(), written)?
            }
        }
    }
    Ok(())
}

/// Writes the resolved config, every trajectory, scan summaries and
/// `summary.json` into `dir`, creating it if needed. Returns the files written.
pub fn write_outputs(dir: &Path, config: &RunConfig, output: &ScenarioOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let kind = config.spec.kind;
    let formats = &config.output.formats;
    let mut written = Vec::new();
    write(dir.join(RESOLVED_CONFIG_FILE), config.to_toml().as_bytes(), &mut written)?;

    if let ScenarioOutput::AlphaScan(scans) = output {
        for scan in scans {
            let label = scan.config.label();
            for p in &scan.points {
                write_run(dir, kind, &p.run, Some(label), formats, &mut written)?;
            }
            let stem = format!("{kind}_{label}_summary");
            if formats.contains(&OutputFormat::Csv) {
                write(dir.join(format!("{stem}.csv")), scan_summary_csv(scan)?.as_bytes(), &mut written)?;
            }
            if formats.contains(&OutputFormat::Json) {
                let text = serde_json::to_string_pretty(&scan_summary_json(scan)).expect("plain JSON");
                write(dir.join(format!("{stem}.json")), text.as_bytes(), &mut written)?;
            }
        }
    } else {
        for run in output.runs() {
            write_run(dir, kind, run, None, formats, &mut written)?;
        }
    }

    let runs: Vec<Value> = match output {
        ScenarioOutput::AlphaScan(scans) => scans
            .iter()
            .flat_map(|s| s.points.iter().map(|p| (s.config.label(), &p.run)))
            .map(|(c, r)| {
                let mut v = run_summary(r);
                v["config"] = Value::from(c);
                v
            })
            .collect(),
        _ => output.runs().into_iter().map(run_summary).collect(),
    };
    let summary = json!({ "scenario": kind.name(), "runs": runs });
    let text = serde_json::to_string_pretty(&summary).expect("plain JSON");
    write(dir.join(SUMMARY_FILE), text.as_bytes(), &mut written)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64) -> TimeSeriesRecord {
        TimeSeriesRecord {
            t,
            current_up: -0.123456789012345,
            current_dn: 1e-17,
            charge_up: 3.0,
            charge_dn: -0.0,
            density: vec![1.0, 2.0],
            density_up: vec![0.5, 1.0],
            density_dn: vec![0.5, 1.0],
            bond_up: vec![0.0, 0.0],
            bond_dn: vec![0.0, 0.0],
            norm: 1.0,
            energy: 0.0,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(-0.123456789012345), "-1.23456789012e-1");
        assert_eq!(format_value(20.0), "2.00000000000e1");
        assert_eq!(format_value(0.0), "0.00000000000e0");
    }

    #[test]
    fn header_layout() {
        assert_eq!(csv_header(2).join(","), "t,J_up,J_dn,Q_up,Q_dn,n_1,n_2,nup_1,nup_2,ndn_1,ndn_2");
    }

    #[test]
    fn csv_round_trip() {
        let records = vec![record(0.0), record(0.05)];
        let text = records_to_csv(&records).unwrap();
        let table = read_csv(text.as_bytes()).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.column("t").unwrap(), vec![0.0, 0.05]);
        let j = table.column("J_up").unwrap()[0];
        assert!((j + 0.123456789012345).abs() <= 5e-12 * 0.124);
        assert_eq!(table.column("nup_2").unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn json_uses_csv_field_names() {
        let run = Run { label: "A".into(), alpha: 0.5, records: vec![record(0.0)] };
        let v = run_to_json(ScenarioKind::DirectionFlip, &run);
        let row = v["records"][0].as_object().unwrap();
        let keys: Vec<&String> = row.keys().collect();
        assert_eq!(keys, csv_header(2).iter().collect::<Vec<_>>());
        assert_eq!(row["J_up"], -0.123456789012345);
    }

    #[test]
    fn file_stems() {
        let run = Run { label: "B".into(), alpha: 0.5, records: vec![] };
        assert_eq!(run_stem(ScenarioKind::BarrierComparison, &run, None), "barrier-comparison_alpha-0.5");
        assert_eq!(run_stem(ScenarioKind::DirectionFlip, &run, None), "direction-flip_B");
        assert_eq!(run_stem(ScenarioKind::AlphaScan, &run, Some("B")), "alpha-scan_B_alpha-0.5");
        let one = Run { alpha: 1.0, ..run };
        assert_eq!(run_stem(ScenarioKind::BarrierComparison, &one, None), "barrier-comparison_alpha-1");
    }
}
