//! Dense row-major matrices on disk.
//!
//! Layout: one ASCII header line `<tag> <rows> <cols>\n` followed by
//! `rows * cols` little-endian `f64` values in row-major order. Tags in use
//! are `features-v1` (latent signatures) and `dataset-v1` (normalized
//! profile vectors).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

pub const FEATURES_TAG: &str = "features-v1";
pub const DATASET_TAG: &str = "dataset-v1";

#[derive(Debug, thiserror::Error)]
pub enum MatrixIoError {
    #[error("bad matrix header {0:?}")]
    BadHeader(String),
    #[error("expected tag {expected:?}, found {found:?}")]
    WrongTag { expected: String, found: String },
    #[error("matrix body holds {found} values, header promises {expected}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} values do not fill a {1}-column matrix")]
    Shape(usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major matrix with a fixed column count.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MatrixIoError> {
        if data.len() != rows * cols {
            return Err(MatrixIoError::Shape(data.len(), cols));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn write_to(&self, w: &mut impl Write, tag: &str) -> Result<(), MatrixIoError> {
        writeln!(w, "{tag} {} {}", self.rows, self.cols)?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl BufRead, tag: &str) -> Result<Self, MatrixIoError> {
        let mut header = String::new();
        r.read_line(&mut header)?;
        let fields: Vec<&str> = header.trim_end_matches('\n').split(' ').collect();
        let [found, rows, cols] = fields[..] else {
            return Err(MatrixIoError::BadHeader(header));
        };
        if found != tag {
            return Err(MatrixIoError::WrongTag { expected: tag.into(), found: found.into() });
        }
        let parse = |s: &str| s.parse::<usize>().map_err(|_| MatrixIoError::BadHeader(header.clone()));
        let (rows, cols) = (parse(rows)?, parse(cols)?);

        let expected = rows * cols;
        let mut bytes = Vec::with_capacity(expected * 8);
        r.read_to_end(&mut bytes)?;
        if bytes.len() != expected * 8 {
            return Err(MatrixIoError::Truncated { expected, found: bytes.len() / 8 });
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(Self { rows, cols, data })
    }

    pub fn save(&self, path: &Path, tag: &str) -> Result<(), MatrixIoError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w, tag)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path, tag: &str) -> Result<Self, MatrixIoError> {
        Self::read_from(&mut BufReader::new(File::open(path)?), tag)
    }
}
