//! Scan tables as CSV: `N,S_N_<unit>,P_N,S_over_logN,P_over_logN,wall_ms`.
//!
//! Floats are written as `{:.16e}` (17 significant digits, '.' decimal).
//! Missing values are empty fields; the ratio columns are empty at `N = 1`.

use std::io::{Read, Write};

use entropy_lab_core::scaling::ScanRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnit {
    pub fn column(self) -> &'static str {
        match self {
            EntropyUnit::Nats => "S_N_nats",
            EntropyUnit::Bits => "S_N_bits",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntropyUnit::Nats => "nats",
            EntropyUnit::Bits => "bits",
        }
    }

    fn from_nats(self, s: f64) -> f64 {
        match self {
            EntropyUnit::Nats => s,
            EntropyUnit::Bits => s / std::f64::consts::LN_2,
        }
    }

    fn to_nats(self, s: f64) -> f64 {
        match self {
            EntropyUnit::Nats => s,
            EntropyUnit::Bits => s * std::f64::consts::LN_2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub unit: EntropyUnit,
    /// When false the `wall_ms` column is left empty, making output reproducible.
    pub timing: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { unit: EntropyUnit::Nats, timing: true }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}")]
    Header { found: Vec<String> },
    #[error("row {row}: column {column}: {message}")]
    Field { row: usize, column: &'static str, message: String },
    #[error("rows must have strictly increasing N (row {row})")]
    Order { row: usize },
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(unit: EntropyUnit) -> [&'static str; 6] {
    ["N", unit.column(), "P_N", "S_over_logN", "P_over_logN", "wall_ms"]
}

pub fn write_scan<W: Write>(records: &[ScanRecord], opts: CsvOptions, out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(opts.unit))?;
    for r in records {
        let log_n = if r.n > 1 { Some((r.n as f64).ln()) } else { None };
        let s = r.entropy.map(|s| opts.unit.from_nats(s));
        let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
        w.write_record([
            r.n.to_string(),
            opt(s),
            format_float(r.proxy),
            opt(s.zip(log_n).map(|(s, l)| s / l)),
            opt(log_n.map(|l| r.proxy / l)),
            if opts.timing { format!("{:.3}", r.wall_ms) } else { String::new() },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn scan_to_string(records: &[ScanRecord], opts: CsvOptions) -> String {
    let mut buf = Vec::new();
    write_scan(records, opts, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is ASCII")
}

/// A parsed scan table; entropies are converted back to nats.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub unit: EntropyUnit,
    pub records: Vec<ScanRecord>,
}

fn parse_f64(field: &str, row: usize, column: &'static str) -> Result<f64, CsvError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|e| CsvError::Field { row, column, message: format!("{e} ({field:?})") })?;
    if !v.is_finite() {
        return Err(CsvError::Field { row, column, message: "not finite".into() });
    }
    Ok(v)
}

pub fn read_scan<R: Read>(input: R) -> Result<ScanTable, CsvError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    let unit = [EntropyUnit::Nats, EntropyUnit::Bits]
        .into_iter()
        .find(|&u| found.iter().map(String::as_str).eq(header(u)))
        .ok_or(CsvError::Header { found })?;
    let mut records: Vec<ScanRecord> = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row_no = i + 2;
        let row = row?;
        let n: usize = row[0]
            .trim()
            .parse()
            .map_err(|e| CsvError::Field { row: row_no, column: "N", message: format!("{e}") })?;
        if n == 0 {
            return Err(CsvError::Field { row: row_no, column: "N", message: "N must be positive".into() });
        }
        let entropy = match row[1].trim() {
            "" => None,
            s => Some(unit.to_nats(parse_f64(s, row_no, "S_N")?)),
        };
        let proxy = parse_f64(&row[2], row_no, "P_N")?;
        let wall_ms = match row[5].trim() {
            "" => 0.0,
            s => parse_f64(s, row_no, "wall_ms")?,
        };
        if records.last().is_some_and(|r| r.n >= n) {
            return Err(CsvError::Order { row: row_no });
        }
        records.push(ScanRecord { n, entropy, proxy, wall_ms });
    }
    Ok(ScanTable { unit, records })
}
