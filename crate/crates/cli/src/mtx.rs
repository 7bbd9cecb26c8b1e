//! Reader for Matrix Market dense `array` files.
//!
//! Entries are stored column-major. For `symmetric`, `hermitian` and
//! `skew-symmetric` files only the lower triangle is present (strictly
//! lower for skew-symmetric) and the rest is filled in on read.

use std::path::Path;

use wmp_core::{c64, Matrix, C64};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

pub fn read_file(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|message| CliError::parse(path, message))
}

pub fn is_matrix_market(text: &str) -> bool {
    text.trim_start().starts_with("%%MatrixMarket")
}

pub fn parse(text: &str) -> Result<Matrix, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    let (field, symmetry) = parse_header(header)?;

    let mut body = lines.filter(|l| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let size = body.next().ok_or("missing size line")?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| format!("bad size line `{size}`")))
        .collect::<Result<_, _>>()?;
    let [rows, cols] = dims[..] else {
        return Err(format!("array size line needs `rows cols`, got `{size}`"));
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err(format!("{symmetry:?} matrix must be square, got {rows}x{cols}"));
    }

    let per_entry = if field == Field::Complex { 2 } else { 1 };
    let mut tokens = body.flat_map(str::split_whitespace);
    let mut next_entry = || -> Result<C64, String> {
        let mut value = [0.0; 2];
        for v in value.iter_mut().take(per_entry) {
            let tok = tokens.next().ok_or("fewer entries than the size line declares")?;
            *v = parse_number(tok, field)?;
        }
        Ok(c64(value[0], value[1]))
    };

    let mut entries = vec![C64::default(); rows * cols];
    for j in 0..cols {
        let first = match symmetry {
            Symmetry::General => 0,
            Symmetry::Symmetric | Symmetry::Hermitian => j,
            Symmetry::Skew => j + 1,
        };
        for i in first..rows {
            let z = next_entry()?;
            entries[i * cols + j] = z;
            if i != j {
                entries[j * cols + i] = match symmetry {
                    Symmetry::General => continue,
                    Symmetry::Symmetric => z,
                    Symmetry::Hermitian => z.conj(),
                    Symmetry::Skew => -z,
                };
            } else if symmetry == Symmetry::Hermitian && z.im != 0.0 {
                return Err(format!("hermitian diagonal entry ({i}, {i}) has nonzero imaginary part"));
            }
        }
    }
    if tokens.next().is_some() {
        return Err("more entries than the size line declares".into());
    }
    Matrix::new(rows, cols, entries).map_err(|e| e.to_string())
}

fn parse_header(header: &str) -> Result<(Field, Symmetry), String> {
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    let [banner, object, format, field, symmetry] = &words[..] else {
        return Err(format!("malformed header `{header}`"));
    };
    if banner != "%%matrixmarket" || object != "matrix" {
        return Err(format!("not a Matrix Market matrix header: `{header}`"));
    }
    if format != "array" {
        return Err(format!("only dense `array` files are supported, got `{format}`"));
    }
    let field = match field.as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(format!("unsupported field `{other}`")),
    };
    let symmetry = match symmetry.as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(format!("unsupported symmetry `{other}`")),
    };
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err("hermitian symmetry requires a complex field".into());
    }
    Ok((field, symmetry))
}

fn parse_number(tok: &str, field: Field) -> Result<f64, String> {
    if field == Field::Integer {
        return tok
            .parse::<i64>()
            .map(|v| v as f64)
            .map_err(|_| format!("bad integer entry `{tok}`"));
    }
    // Fortran-style exponents show up in older corpora.
    let v: f64 = tok
        .replace(['d', 'D'], "e")
        .parse()
        .map_err(|_| format!("bad numeric entry `{tok}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite entry `{tok}`"));
    }
    Ok(v)
}
