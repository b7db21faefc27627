//! "PHT v1" text tensor format.
//!
//! ```text
//! PHT 1 <l> <m> <n> <real|complex>
//! <re> [<im>]        # l*m*n lines, (i, k, t) lexicographic
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::HyperMatrix;
use crate::error::{Error, Result};
use crate::hyperalgebra::Field;

pub fn read_pht<R: Read>(reader: R) -> Result<HyperMatrix> {
    let mut lines = BufReader::new(reader).lines();
    let header = loop {
        match lines.next() {
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::Format("empty file".into())),
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "PHT" {
        return Err(Error::Format(format!("bad header {header:?}")));
    }
    if fields[1] != "1" {
        return Err(Error::Format(format!("unsupported version {}", fields[1])));
    }
    let dim = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| Error::Format(format!("bad dimension {s:?}")))
    };
    let (rows, cols, n) = (dim(fields[2])?, dim(fields[3])?, dim(fields[4])?);
    let field = match fields[5] {
        "real" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(Error::Format(format!("unknown field {other:?}"))),
    };

    let total = rows * cols * n;
    let mut data = Vec::with_capacity(total);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if data.len() == total {
            return Err(Error::Format(format!("trailing data at line {}", lineno + 2)));
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", lineno + 2)))?;
        let value = match (field, nums.as_slice()) {
            (Field::Real, [re]) => Complex64::new(*re, 0.0),
            (Field::Complex, [re, im]) => Complex64::new(*re, *im),
            _ => {
                return Err(Error::Format(format!(
                    "line {}: expected {} value(s) for a {} tensor",
                    lineno + 2,
                    if field == Field::Real { 1 } else { 2 },
                    field.as_str()
                )))
            }
        };
        data.push(value);
    }
    if data.len() != total {
        return Err(Error::Format(format!("expected {total} values, found {}", data.len())));
    }
    HyperMatrix::from_data(rows, cols, n, field, data)
}

pub fn write_pht<W: Write>(writer: W, a: &HyperMatrix) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let (rows, cols, n) = a.shape();
    writeln!(w, "PHT 1 {rows} {cols} {n} {}", a.field().as_str())?;
    for z in a.data() {
        match a.field() {
            Field::Real => writeln!(w, "{:.16e}", z.re)?,
            Field::Complex => writeln!(w, "{:.16e} {:.16e}", z.re, z.im)?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_pht_file(path: impl AsRef<Path>) -> Result<HyperMatrix> {
    read_pht(File::open(path)?)
}

pub fn write_pht_file(path: impl AsRef<Path>, a: &HyperMatrix) -> Result<()> {
    write_pht(File::create(path)?, a)
}
