use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

const SIG_DIGITS: usize = 12;

/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent
/// form outside `1e-5 ≤ |x| < 1e12`.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIG_DIGITS as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

/// Destination of a command's output.
pub fn open_sink(out: Option<&Path>, append: bool) -> Result<Box<dyn Write>, CliError> {
    match out {
        None => Ok(Box::new(io::stdout().lock())),
        Some(path) => {
            let file = if append {
                OpenOptions::new().create(true).append(true).open(path)
            } else {
                File::create(path)
            };
            let file = file.map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Box::new(io::BufWriter::new(file)))
        }
    }
}

pub fn write_csv(sink: &mut dyn Write, header: Option<&[&str]>, rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().from_writer(sink);
    if let Some(h) = header {
        w.write_record(h).map_err(CliError::from_csv)?;
    }
    for row in rows {
        w.write_record(row).map_err(CliError::from_csv)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_json<T: Serialize>(sink: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *sink, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(sink).map_err(|e| CliError::Io(e.to_string()))?;
    sink.flush().map_err(|e| CliError::Io(e.to_string()))
}
