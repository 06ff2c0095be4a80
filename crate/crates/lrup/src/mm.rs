//! Matrix Market reader and writer.
//!
//! Coordinate and array bodies with `real`, `integer`, `complex` or `pattern`
//! fields and `general`, `symmetric`, `skew-symmetric` or `hermitian`
//! symmetry. Symmetric storage is expanded to full storage on load.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lrup_core::{Scalar, SparseMatrix, C64};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub format: Format,
    pub field: Field,
    pub symmetry: Symmetry,
}

/// A loaded operator; complex files give `Complex`, everything else `Real`.
#[derive(Debug, Clone, PartialEq)]
pub enum MmMatrix {
    Real(SparseMatrix<f64>),
    Complex(SparseMatrix<C64>),
}

impl MmMatrix {
    pub fn n(&self) -> usize {
        match self {
            MmMatrix::Real(a) => a.n(),
            MmMatrix::Complex(a) => a.n(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            MmMatrix::Real(a) => a.nnz(),
            MmMatrix::Complex(a) => a.nnz(),
        }
    }

    pub fn symmetry_flag(&self) -> bool {
        match self {
            MmMatrix::Real(a) => a.symmetry_flag(),
            MmMatrix::Complex(a) => a.symmetry_flag(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, MmMatrix::Complex(_))
    }

    pub fn into_real(self) -> Result<SparseMatrix<f64>> {
        match self {
            MmMatrix::Real(a) => Ok(a),
            MmMatrix::Complex(_) => Err(Error::Usage("expected a real matrix, found complex".into())),
        }
    }
}

fn parse_header(line: &str) -> Result<Header> {
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(Error::parse(1, "malformed header: expected '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let format = match toks[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(Error::parse(1, format!("malformed header: unknown format '{other}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(Error::parse(1, format!("malformed header: unknown field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::parse(1, format!("malformed header: unknown symmetry '{other}'"))),
    };
    if format == Format::Array && field == Field::Pattern {
        return Err(Error::parse(1, "malformed header: pattern field needs coordinate format"));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(Error::parse(1, "malformed header: hermitian symmetry needs complex field"));
    }
    Ok(Header { format, field, symmetry })
}

struct Body {
    header: Header,
    rows: usize,
    cols: usize,
    /// Zero-based `(i, j, value)` as stored in the file.
    entries: Vec<(usize, usize, C64)>,
}

fn read_body(reader: impl BufRead) -> Result<Body> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let header = match lines.next() {
        Some((_, Ok(l))) => parse_header(&l)?,
        Some((_, Err(e))) => return Err(Error::io("<input>", e)),
        None => return Err(Error::parse(1, "empty file")),
    };
    let mut data = lines.filter_map(|(k, l)| match l {
        Ok(l) if l.trim().is_empty() || l.trim_start().starts_with('%') => None,
        other => Some((k, other)),
    });

    let (size_line, size) = match data.next() {
        Some((k, Ok(l))) => (k, l),
        Some((_, Err(e))) => return Err(Error::io("<input>", e)),
        None => return Err(Error::parse(2, "missing size line")),
    };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::parse(size_line, format!("bad size entry '{t}'"))))
        .collect::<Result<_>>()?;
    let (rows, cols, expected) = match (header.format, dims.as_slice()) {
        (Format::Coordinate, &[r, c, nnz]) => (r, c, nnz),
        (Format::Array, &[r, c]) => {
            let count = match header.symmetry {
                Symmetry::General => r * c,
                Symmetry::SkewSymmetric => r * (r.saturating_sub(1)) / 2,
                _ => r * (r + 1) / 2,
            };
            (r, c, count)
        }
        _ => return Err(Error::parse(size_line, "size line has the wrong number of entries")),
    };
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(Error::parse(size_line, "symmetric storage requires a square matrix"));
    }

    let value_width = match header.field {
        Field::Pattern => 0,
        Field::Complex => 2,
        _ => 1,
    };
    let index_width = if header.format == Format::Coordinate { 2 } else { 0 };
    let width = index_width + value_width;

    let mut entries = Vec::with_capacity(expected);
    // next position of an array body, column-major
    let (mut ai, mut aj) = (0usize, 0usize);
    if header.format == Format::Array && header.symmetry == Symmetry::SkewSymmetric {
        ai = 1;
    }
    for (k, line) in data {
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != width {
            return Err(Error::parse(k, format!("malformed body: expected {width} columns, found {}", toks.len())));
        }
        if entries.len() == expected {
            return Err(Error::parse(k, format!("malformed body: more than {expected} entries")));
        }
        let num = |t: &str| -> Result<f64> { t.parse::<f64>().map_err(|_| Error::parse(k, format!("bad number '{t}'"))) };
        let (i, j) = if header.format == Format::Coordinate {
            let idx = |t: &str, bound: usize| -> Result<usize> {
                let v = t.parse::<usize>().map_err(|_| Error::parse(k, format!("bad index '{t}'")))?;
                if v == 0 || v > bound {
                    return Err(Error::parse(k, format!("index {v} out of range 1..={bound}")));
                }
                Ok(v - 1)
            };
            (idx(toks[0], rows)?, idx(toks[1], cols)?)
        } else {
            let pos = (ai, aj);
            ai += 1;
            if ai == rows {
                aj += 1;
                ai = match header.symmetry {
                    Symmetry::General => 0,
                    Symmetry::SkewSymmetric => aj + 1,
                    _ => aj,
                };
            }
            pos
        };
        let v = &toks[index_width..];
        let value = match header.field {
            Field::Pattern => C64::new(1.0, 0.0),
            Field::Complex => C64::new(num(v[0])?, num(v[1])?),
            _ => C64::new(num(v[0])?, 0.0),
        };
        if header.symmetry != Symmetry::General && i < j {
            return Err(Error::parse(k, "symmetric storage must list the lower triangle only"));
        }
        if header.symmetry == Symmetry::SkewSymmetric && i == j {
            return Err(Error::parse(k, "skew-symmetric storage has no diagonal"));
        }
        entries.push((i, j, value));
    }
    if entries.len() != expected {
        return Err(Error::parse(0, format!("malformed body: expected {expected} entries, found {}", entries.len())));
    }
    Ok(Body {
        header,
        rows,
        cols,
        entries,
    })
}

/// Entries after expanding symmetric storage.
fn expanded(body: &Body) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::with_capacity(2 * body.entries.len());
    for &(i, j, v) in &body.entries {
        out.push((i, j, v));
        if i != j {
            match body.header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => out.push((j, i, v)),
                Symmetry::SkewSymmetric => out.push((j, i, -v)),
                Symmetry::Hermitian => out.push((j, i, v.conj())),
            }
        }
    }
    out
}

/// Reads a square matrix from Matrix Market text. The symmetry flag is set
/// for `symmetric` real files and `hermitian` complex files.
pub fn read_matrix_market(reader: impl BufRead) -> Result<MmMatrix> {
    let body = read_body(reader)?;
    if body.rows != body.cols {
        return Err(Error::Usage(format!("operator must be square, found {}x{}", body.rows, body.cols)));
    }
    let n = body.rows;
    let entries = expanded(&body);
    let symmetric = match body.header.symmetry {
        Symmetry::Symmetric => body.header.field != Field::Complex,
        Symmetry::Hermitian => true,
        _ => false,
    };
    if body.header.field == Field::Complex {
        let a = SparseMatrix::from_triplets(n, &entries)?.with_symmetry_flag(symmetric)?;
        Ok(MmMatrix::Complex(a))
    } else {
        let t: Vec<(usize, usize, f64)> = entries.into_iter().map(|(i, j, v)| (i, j, v.re)).collect();
        let a = SparseMatrix::from_triplets(n, &t)?.with_symmetry_flag(symmetric)?;
        Ok(MmMatrix::Real(a))
    }
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<MmMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix_market(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Reads an `n x 1` array (or coordinate) file as a dense vector.
pub fn read_vector(reader: impl BufRead) -> Result<Vec<C64>> {
    let body = read_body(reader)?;
    if body.cols != 1 {
        return Err(Error::Usage(format!("vector file must have one column, found {}", body.cols)));
    }
    let mut v = vec![C64::new(0.0, 0.0); body.rows];
    for (i, _, x) in expanded(&body) {
        v[i] += x;
    }
    Ok(v)
}

/// Writes a sparse matrix in coordinate format. Real matrices with the
/// symmetry flag set are written as `symmetric` (lower triangle).
pub fn write_matrix_market<T: Scalar>(mut w: impl Write, a: &SparseMatrix<T>) -> std::io::Result<()> {
    let field = if T::IS_COMPLEX { "complex" } else { "real" };
    let sym = a.symmetry_flag();
    let symmetry = match (sym, T::IS_COMPLEX) {
        (false, _) => "general",
        (true, false) => "symmetric",
        (true, true) => "hermitian",
    };
    let mut entries = Vec::with_capacity(a.nnz());
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if !sym || j <= i {
                entries.push((i, j, v));
            }
        }
    }
    writeln!(w, "%%MatrixMarket matrix coordinate {field} {symmetry}")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), entries.len())?;
    for (i, j, v) in entries {
        if T::IS_COMPLEX {
            writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, v.re(), v.im())?;
        } else {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v.re())?;
        }
    }
    Ok(())
}

pub fn save_matrix_market<T: Scalar>(path: impl AsRef<Path>, a: &SparseMatrix<T>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_matrix_market(&mut w, a).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<MmMatrix> {
        read_matrix_market(s.as_bytes())
    }

    #[test]
    fn identity_coordinate() {
        let a = read("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n").unwrap();
        assert_eq!(a.n(), 2);
        assert_eq!(a.nnz(), 2);
        assert!(!a.symmetry_flag());
    }

    #[test]
    fn symmetric_tridiagonal_is_expanded() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n4 4 7\n\
                    1 1 3\n2 1 -1\n2 2 3\n3 2 -1\n3 3 3\n4 3 -1\n4 4 3\n";
        let a = read(text).unwrap().into_real().unwrap();
        assert_eq!(a.nnz(), 10);
        assert!(a.symmetry_flag());
        assert_eq!(a.get(0, 1), -1.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.spmv(&[1.0; 4]).unwrap(), vec![2.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn array_with_three_columns_is_malformed() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1 1 1.0\n2 1 0.0\n1 2 0.0\n2 2 1.0\n";
        let err = read(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().contains("malformed body"));
    }

    #[test]
    fn array_general_and_symmetric() {
        let a = read("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n").unwrap().into_real().unwrap();
        assert_eq!(a.get(1, 0), 2.0);
        assert_eq!(a.get(0, 1), 3.0);
        let s = read("%%MatrixMarket matrix array real symmetric\n2 2\n1\n2\n4\n").unwrap().into_real().unwrap();
        assert_eq!(s.get(0, 1), 2.0);
        assert_eq!(s.get(1, 1), 4.0);
        assert!(s.symmetry_flag());
    }

    #[test]
    fn pattern_and_hermitian() {
        let p = read("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n2 1\n3 2\n").unwrap().into_real().unwrap();
        assert_eq!(p.nnz(), 4);
        assert_eq!(p.get(1, 2), 1.0);
        let h = read("%%MatrixMarket matrix coordinate complex hermitian\n2 2 3\n1 1 2 0\n2 1 1 1\n2 2 3 0\n").unwrap();
        let MmMatrix::Complex(h) = h else { panic!() };
        assert!(h.symmetry_flag());
        assert_eq!(h.get(0, 1), C64::new(1.0, -1.0));
    }

    #[test]
    fn errors() {
        assert!(read("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n").is_err());
        assert!(read("%%MatrixMarket tensor coordinate real general\n2 2 0\n").is_err());
        assert!(read("%%MatrixMarket matrix coordinate real general\n2 3 0\n").is_err());
        assert!(read("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n").is_err());
        assert!(read("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1.0\n").is_err());
    }

    #[test]
    fn write_then_read_roundtrip() {
        let a = SparseMatrix::tridiag(5, -1.0, 3.0, -1.0).with_symmetry_flag(true).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &a).unwrap();
        let b = read_matrix_market(buf.as_slice()).unwrap().into_real().unwrap();
        assert_eq!(a, b);
        let g = SparseMatrix::from_triplets(3, &[(0, 2, C64::new(1.0, 2.0)), (1, 1, C64::new(-0.5, 0.0))]).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &g).unwrap();
        let MmMatrix::Complex(h) = read_matrix_market(buf.as_slice()).unwrap() else { panic!() };
        assert_eq!(g, h);
    }

    #[test]
    fn vector_file() {
        let v = read_vector("%%MatrixMarket matrix array real general\n3 1\n1\n-2\n0.5\n".as_bytes()).unwrap();
        assert_eq!(v.iter().map(|z| z.re).collect::<Vec<_>>(), vec![1.0, -2.0, 0.5]);
    }
}
