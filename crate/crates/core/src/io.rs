//! Signal files: raw little-endian `f64` (`.f64`) or one-column CSV (`.csv`).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sigcore::Signal;

pub const CSV_HEADER: &str = "sample";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalFormat {
    F64,
    Csv,
}

impl SignalFormat {
    /// Picks the format from a path's extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) => ext.parse(),
            None => Err(Error::Format(format!(
                "cannot infer signal format of {}; use a .f64 or .csv extension",
                path.display()
            ))),
        }
    }
}

impl std::fmt::Display for SignalFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignalFormat::F64 => "f64",
            SignalFormat::Csv => "csv",
        })
    }
}

impl FromStr for SignalFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f64" => Ok(SignalFormat::F64),
            "csv" => Ok(SignalFormat::Csv),
            other => Err(Error::Format(format!("unknown signal format {other:?}"))),
        }
    }
}

pub fn encode_f64(signal: &Signal) -> Vec<u8> {
    signal.samples().iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn decode_f64(bytes: &[u8]) -> Result<Signal> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!(
            "raw signal has {} bytes, not a multiple of 8",
            bytes.len()
        )));
    }
    let samples = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Signal::new(samples)
}

pub fn write_csv<W: Write>(signal: &Signal, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([CSV_HEADER])?;
    for v in signal.samples() {
        writer.write_record([v.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Signal> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?;
    if headers.len() != 1 || &headers[0] != CSV_HEADER {
        return Err(Error::Format(format!(
            "expected a single {CSV_HEADER:?} column, found {headers:?}"
        )));
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record?;
        let value = record[0]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Format(format!("bad sample {:?}: {e}", &record[0])))?;
        samples.push(value);
    }
    Signal::new(samples)
}

pub fn write_signal(path: &Path, signal: &Signal, format: SignalFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        SignalFormat::F64 => out.write_all(&encode_f64(signal))?,
        SignalFormat::Csv => write_csv(signal, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

pub fn read_signal(path: &Path, format: SignalFormat) -> Result<Signal> {
    let mut input = BufReader::new(File::open(path)?);
    match format {
        SignalFormat::F64 => {
            let mut bytes = Vec::new();
            input.read_to_end(&mut bytes)?;
            decode_f64(&bytes)
        }
        SignalFormat::Csv => read_csv(input),
    }
}
