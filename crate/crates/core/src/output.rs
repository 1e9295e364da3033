//! Writing scan results as CSV or JSON, and reading them back.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::SampledSignal;
use crate::error::{Error, Result};
use crate::scan::ScanResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

pub const CSV_HEADER: [&str; 3] = ["r_m", "signal", "classical"];
const EXCLUDED_PREFIX: &str = "# excluded:";

/// 17 significant digits, enough to round-trip any f64.
fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_result(result: &ScanResult, format: OutputFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Json => write_json_to(&mut out, result, path)?,
        OutputFormat::Csv => write_csv_to(&mut out, result, path)?,
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_json_to(&mut out, value, path)?;
    out.flush().map_err(|e| Error::io(path, e))
}

fn write_json_to<T: Serialize>(out: &mut impl Write, value: &T, path: &Path) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    writeln!(out).map_err(|e| Error::io(path, e))
}

/// One `# excluded:` comment line (only when nodes were dropped), the
/// header, then one row per retained node.
fn write_csv_to(out: &mut impl Write, result: &ScanResult, path: &Path) -> Result<()> {
    let excluded = &result.metadata.excluded;
    if !excluded.is_empty() {
        let list: Vec<String> = excluded.iter().map(|&r| number(r)).collect();
        writeln!(out, "{EXCLUDED_PREFIX} {}", list.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    let csv_err = |e: csv::Error| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER).map_err(csv_err)?;
    let rows = result
        .signal
        .coordinates()
        .iter()
        .zip(result.signal.values())
        .zip(result.classical_reference.values());
    for ((&r, &s), &c) in rows {
        writer
            .write_record([number(r), number(s), number(c)])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn read_result(path: &Path) -> Result<ScanResult> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Columns of a CSV scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvScan {
    pub signal: SampledSignal,
    pub classical: SampledSignal,
    pub excluded: Vec<f64>,
}

pub fn read_csv(path: &Path) -> Result<CsvScan> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, path)
}

fn parse_csv(text: &str, path: &Path) -> Result<CsvScan> {
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut excluded = Vec::new();
    for line in text.lines().filter(|l| l.starts_with(EXCLUDED_PREFIX)) {
        for item in line[EXCLUDED_PREFIX.len()..].split_whitespace() {
            excluded.push(
                item.parse()
                    .map_err(|_| bad(format!("bad excluded entry `{item}`")))?,
            );
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let (mut r, mut s, mut c) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record[i]
                .parse()
                .map_err(|_| bad(format!("not a number: `{}`", &record[i])))
        };
        r.push(field(0)?);
        s.push(field(1)?);
        c.push(field(2)?);
    }
    Ok(CsvScan {
        signal: SampledSignal::new(r.clone(), s)?,
        classical: SampledSignal::new(r, c)?,
        excluded,
    })
}
