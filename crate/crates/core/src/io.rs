//! Sequence files: `.txt` holds one decimal value per line (blank lines and
//! `#` comments skipped), `.f64` holds raw little-endian doubles.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: cannot parse `{text}` as a number")]
    Parse { line: usize, text: String },
    #[error("binary file length {0} is not a multiple of 8")]
    BadLength(usize),
    #[error("unknown sequence format for `{0}` (expected .txt or .f64)")]
    UnknownFormat(String),
    #[error("position {0} holds NaN")]
    NotANumber(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Binary,
}

impl Format {
    pub fn of(path: &Path) -> Result<Format, IoError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("txt") => Ok(Format::Text),
            Some("f64") => Ok(Format::Binary),
            _ => Err(IoError::UnknownFormat(path.display().to_string())),
        }
    }
}

pub fn parse_text(text: &str) -> Result<Vec<f64>, IoError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| IoError::Parse { line: n + 1, text: t.to_string() })?;
        if v.is_nan() {
            return Err(IoError::NotANumber(out.len()));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn parse_binary(bytes: &[u8]) -> Result<Vec<f64>, IoError> {
    if !bytes.len().is_multiple_of(8) {
        return Err(IoError::BadLength(bytes.len()));
    }
    let out: Vec<f64> =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    if let Some(i) = out.iter().position(|v| v.is_nan()) {
        return Err(IoError::NotANumber(i));
    }
    Ok(out)
}

pub fn load_sequence(path: &Path) -> Result<Vec<f64>, IoError> {
    match Format::of(path)? {
        Format::Text => parse_text(&fs::read_to_string(path)?),
        Format::Binary => parse_binary(&fs::read(path)?),
    }
}

pub fn save_sequence(path: &Path, values: &[f64]) -> Result<(), IoError> {
    match Format::of(path)? {
        Format::Text => {
            let mut s = String::with_capacity(values.len() * 8);
            for v in values {
                s.push_str(&v.to_string());
                s.push('\n');
            }
            fs::write(path, s)?;
        }
        Format::Binary => {
            let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
            fs::write(path, bytes)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let values = vec![3.0, -1.5, 0.1, 1e300, 7.0];
        for name in ["a.txt", "a.f64"] {
            let p = dir.path().join(name);
            save_sequence(&p, &values).unwrap();
            assert_eq!(load_sequence(&p).unwrap(), values);
        }
    }

    #[test]
    fn text_parsing() {
        assert_eq!(parse_text("# header\n1\n\n 2.5 \n-3\n").unwrap(), vec![1.0, 2.5, -3.0]);
        assert!(matches!(parse_text("1\nx\n"), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_text("1\nNaN\n"), Err(IoError::NotANumber(1))));
    }

    #[test]
    fn binary_errors() {
        assert!(matches!(parse_binary(&[0; 7]), Err(IoError::BadLength(7))));
        assert!(matches!(parse_binary(&f64::NAN.to_le_bytes()), Err(IoError::NotANumber(0))));
        assert!(matches!(Format::of(Path::new("x.csv")), Err(IoError::UnknownFormat(_))));
    }
}
