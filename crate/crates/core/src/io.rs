//! Matrix and report serialization.
//!
//! Matrices are read from headerless CSV (one row per line) or MatrixMarket
//! (`array` or `coordinate`, real or integer, general). Floats are written
//! with Rust's shortest round-trip formatting, so write/read is lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::sketching::{ProbabilityVector, SamplingPlan};

/// Reads a headerless numeric CSV.
pub fn read_csv_matrix<R: Read>(reader: R) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut entries = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for record in rdr.records() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Parse(format!(
                    "row {} has {} fields, expected {c}",
                    rows + 1,
                    record.len()
                )))
            }
            _ => {}
        }
        for field in record.iter() {
            entries.push(
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{field}` in row {}", rows + 1)))?,
            );
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse("empty CSV matrix".into()))?;
    DenseMatrix::from_row_major(rows, cols, entries)
}

pub fn write_csv_matrix<W: Write>(writer: W, a: &DenseMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..a.rows() {
        w.write_record(a.row(i).iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a MatrixMarket `array` or `coordinate` matrix.
pub fn read_matrix_market<R: Read>(reader: R) -> Result<DenseMatrix> {
    let mut lines = BufReader::new(reader).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty MatrixMarket file".into()))??;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::Parse(format!("bad MatrixMarket banner `{header}`")));
    }
    if !matches!(fields[3].as_str(), "real" | "integer") || fields[4] != "general" {
        return Err(Error::Parse(format!(
            "unsupported MatrixMarket type `{} {}`",
            fields[3], fields[4]
        )));
    }
    let coordinate = match fields[2].as_str() {
        "array" => false,
        "coordinate" => true,
        f => return Err(Error::Parse(format!("unsupported MatrixMarket format `{f}`"))),
    };
    let mut tokens = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        tokens.extend(t.split_whitespace().map(str::to_owned));
    }
    let mut it = tokens.into_iter();
    let mut next_usize = |what: &str| -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::Parse(format!("missing {what}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad {what}")))
    };
    let n = next_usize("row count")?;
    let d = next_usize("column count")?;
    let nnz = if coordinate { next_usize("entry count")? } else { n * d };
    let rest: Vec<String> = it.collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`")));
    let mut m = DMatrix::zeros(n, d);
    if coordinate {
        if rest.len() != 3 * nnz {
            return Err(Error::Parse(format!("expected {nnz} coordinate entries")));
        }
        for e in rest.chunks(3) {
            let idx = |s: &str, max: usize| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(i) if (1..=max).contains(&i) => Ok(i - 1),
                    _ => Err(Error::Parse(format!("bad index `{s}`"))),
                }
            };
            m[(idx(&e[0], n)?, idx(&e[1], d)?)] += num(&e[2])?;
        }
    } else {
        if rest.len() != nnz {
            return Err(Error::Parse(format!("expected {nnz} values, found {}", rest.len())));
        }
        for (t, v) in rest.iter().enumerate() {
            // column-major
            m[(t % n, t / n)] = num(v)?;
        }
    }
    DenseMatrix::new(m)
}

pub fn write_matrix_market<W: Write>(mut writer: W, a: &DenseMatrix) -> Result<()> {
    writeln!(writer, "%%MatrixMarket matrix array real general")?;
    writeln!(writer, "{} {}", a.rows(), a.cols())?;
    for v in a.iter() {
        writeln!(writer, "{v}")?;
    }
    Ok(())
}

fn is_matrix_market(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx") || e.eq_ignore_ascii_case("mm"))
}

/// Reads a matrix, choosing MatrixMarket for `.mtx`/`.mm` and CSV otherwise.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let f = File::open(path)?;
    if is_matrix_market(path) {
        read_matrix_market(f)
    } else {
        read_csv_matrix(f)
    }
}

pub fn write_matrix(path: &Path, a: &DenseMatrix) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    if is_matrix_market(path) {
        write_matrix_market(f, a)
    } else {
        write_csv_matrix(f, a)
    }
}

/// `index,probability` rows with 0-based indices.
pub fn write_probabilities<W: Write>(writer: W, p: &ProbabilityVector) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "probability"])?;
    for (i, v) in p.probs().iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writeln!(writer)?;
    Ok(())
}

/// One compact JSON document per line.
pub fn write_json_lines<W: Write, T: Serialize>(mut writer: W, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, item)?;
        writeln!(writer)?;
    }
    Ok(())
}

/// CSV with a header taken from the field names of `T`.
pub fn write_csv_rows<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_plan<R: Read>(reader: R) -> Result<SamplingPlan> {
    Ok(serde_json::from_reader(reader)?)
}
