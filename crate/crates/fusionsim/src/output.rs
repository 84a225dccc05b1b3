//! CSV emission with fixed column order and 9 significant digits.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{CliError, Result};

/// One CSV row type with a stable header.
pub trait CsvRecord {
    const EXPERIMENT: &'static str;
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

/// `%.9g`-style rendering; non-finite values print as `nan`, `inf`, `-inf`.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn format_opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

/// Appends rows to `path`, writing the header only when the file is new or
/// empty. An existing file with a different header is rejected.
pub fn append_rows<R: CsvRecord>(path: &Path, rows: &[R]) -> Result<()> {
    let existing = match File::open(path) {
        Ok(f) => {
            let mut first = String::new();
            BufReader::new(f).read_line(&mut first).map_err(|e| CliError::io(path, e))?;
            Some(first)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(CliError::io(path, e)),
    };
    let write_header = match existing.as_deref().map(str::trim_end) {
        None | Some("") => true,
        Some(line) => {
            let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
            let header = reader.records().next().transpose()?;
            let matches = header.is_some_and(|h| h.iter().eq(R::HEADER.iter().copied()));
            if !matches {
                return Err(CliError::HeaderMismatch {
                    path: path.to_path_buf(),
                    experiment: R::EXPERIMENT.into(),
                });
            }
            false
        }
    };
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if write_header {
        w.write_record(R::HEADER)?;
    }
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}
