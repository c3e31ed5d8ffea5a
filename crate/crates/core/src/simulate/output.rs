use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::sweep::{CellRecord, SkippedCell, SweepResult};

pub const CSV_HEADER: &str = "snr_db,bits,L,g_az,g_el,n_az,n_el,trials,successes,success_rate,ci_lo,ci_hi,seed";

/// One CSV row. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub snr_db: f64,
    /// `1`, `2` or `inf`.
    pub bits: String,
    #[serde(rename = "L")]
    pub paths: usize,
    pub g_az: usize,
    pub g_el: usize,
    pub n_az: usize,
    pub n_el: usize,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl From<&CellRecord> for CsvRow {
    fn from(r: &CellRecord) -> Self {
        CsvRow {
            snr_db: r.cell.snr_db,
            bits: r.cell.resolution.to_string(),
            paths: r.cell.paths,
            g_az: r.cell.g_az,
            g_el: r.cell.g_el,
            n_az: r.cell.n_az,
            n_el: r.cell.n_el,
            trials: r.trials,
            successes: r.successes,
            success_rate: r.success_rate,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
            seed: r.seed,
        }
    }
}

/// Writes the header and one row per reported cell.
pub fn write_csv<W: Write>(result: &SweepResult, writer: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER.split(','))?;
    for r in &result.records {
        w.serialize(CsvRow::from(r))?;
    }
    w.flush()
}

pub fn emit_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(result, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv<R: Read>(reader: R) -> std::result::Result<Vec<CsvRow>, csv::Error> {
    csv::Reader::from_reader(reader).deserialize().collect()
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    config: &'a super::sweep::SweepConfig,
    records: Vec<CsvRow>,
    skipped: &'a [SkippedCell],
}

/// JSON document with the CSV rows under `records` plus skipped cells.
pub fn emit_json(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let summary = JsonSummary {
        config: &result.config,
        records: result.records.iter().map(CsvRow::from).collect(),
        skipped: &result.skipped,
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &summary).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Human-readable table of a sweep.
pub fn format_summary(result: &SweepResult) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "path gains: {:?}, scoring: {:?}",
        result.config.gains, result.config.score
    );
    let _ = writeln!(
        s,
        "{:>5} {:>3} {:>7} {:>7} {:>8} {:>9} {:>8}  {:<17} {:>9}",
        "bits", "L", "grid", "array", "snr_db", "success", "rate", "95% CI", "ms/trial"
    );
    for r in &result.records {
        let c = &r.cell;
        let _ = writeln!(
            s,
            "{:>5} {:>3} {:>7} {:>7} {:>8} {:>9} {:>8.4}  [{:.4}, {:.4}] {:>9.3}",
            c.resolution.to_string(),
            c.paths,
            format!("{}x{}", c.g_az, c.g_el),
            format!("{}x{}", c.n_az, c.n_el),
            c.snr_db,
            format!("{}/{}", r.successes, r.trials),
            r.success_rate,
            r.ci_lo,
            r.ci_hi,
            r.mean_wall_time_per_trial * 1e3
        );
    }
    for sk in &result.skipped {
        let c = &sk.cell;
        let _ = writeln!(
            s,
            "skipped: bits={} L={} grid={}x{} snr_db={}: {}",
            c.resolution, c.paths, c.g_az, c.g_el, c.snr_db, sk.reason
        );
    }
    s
}
