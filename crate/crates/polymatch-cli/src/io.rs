//! JSONL input/output and the exit-code discipline shared by every command:
//! 0 success, 2 input error, 3 schema mismatch, 4 query/index
//! incompatibility, 5 domain error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};

use polymatch::{Complex, IndexError, Polygon, PolygonIndex, PolygonRecord};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_INCOMPAT: i32 = 4;
pub const EXIT_DOMAIN: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn schema(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_SCHEMA,
            message: message.into(),
        }
    }

    pub fn incompat(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INCOMPAT,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::input(format!("i/o error: {e}"))
    }
}

/// `-` denotes the standard stream.
pub fn reader(path: &str) -> Result<Box<dyn BufRead>, CliError> {
    Ok(if path == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        Box::new(BufReader::new(
            File::open(path).map_err(|e| CliError::input(format!("{path}: {e}")))?,
        ))
    })
}

pub fn writer(path: &str) -> Result<Box<dyn Write>, CliError> {
    Ok(if path == "-" {
        Box::new(BufWriter::new(io::stdout()))
    } else {
        Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::input(format!("{path}: {e}")))?,
        ))
    })
}

/// One polygon record per non-empty line; errors carry the 1-based line
/// number of the offending record.
pub fn read_records(path: &str) -> Result<Vec<(usize, PolygonRecord)>, CliError> {
    let mut out = Vec::new();
    for (idx, line) in reader(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: PolygonRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::input(format!("{path} line {}: {e}", idx + 1)))?;
        out.push((idx + 1, record));
    }
    Ok(out)
}

pub fn record_to_polygon(
    path: &str,
    line: usize,
    record: &PolygonRecord,
) -> Result<Polygon, CliError> {
    record
        .to_polygon()
        .map_err(|e| CliError::input(format!("{path} line {line}: {e}")))
}

pub fn read_polygons(path: &str) -> Result<Vec<Polygon>, CliError> {
    read_records(path)?
        .iter()
        .map(|(line, record)| record_to_polygon(path, *line, record))
        .collect()
}

pub fn load_index(path: &str) -> Result<PolygonIndex, CliError> {
    let mut text = String::new();
    reader(path)?.read_to_string(&mut text)?;
    let dump = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{path}: not a valid index file: {e}")))?;
    PolygonIndex::from_dump(dump).map_err(|e| match e {
        IndexError::UnsupportedVersion(_) | IndexError::Integrity(_) => {
            CliError::schema(format!("{path}: {e}"))
        }
        other => CliError::input(format!("{path}: {other}")),
    })
}

/// Parses `re,im` into a complex number.
pub fn parse_complex(label: &str, text: &str) -> Result<Complex, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::input(format!(
            "{label}: expected re,im — got {text:?}"
        )));
    }
    let re: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| CliError::input(format!("{label}: {e}")))?;
    let im: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| CliError::input(format!("{label}: {e}")))?;
    Ok(Complex::new(re, im))
}

/// Parses a comma-separated j list such as `1,2,3`.
pub fn parse_j_set(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| CliError::input(format!("--j: {e}")))
        })
        .collect()
}
