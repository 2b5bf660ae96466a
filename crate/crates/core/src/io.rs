//! Matrix and vector interchange files.
//!
//! A matrix with `n` columns is stored as CSV with the header
//! `c0_re,c0_im,c1_re,c1_im,…,c{n-1}_re,c{n-1}_im` and one record per row.
//! A vector is a one-column matrix. Real data simply has zero imaginary
//! columns.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Header for a matrix with `ncols` complex columns.
pub fn matrix_header(ncols: usize) -> Vec<String> {
    (0..ncols).flat_map(|c| [format!("c{c}_re"), format!("c{c}_im")]).collect()
}

pub fn write_matrix_to<W: Write>(m: &DMatrix<C64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(matrix_header(m.ncols()))?;
    for row in m.row_iter() {
        w.write_record(row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_from<R: Read>(input: R) -> Result<DMatrix<C64>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || !header.len().is_multiple_of(2) || header != matrix_header(header.len() / 2) {
        return Err(Error::Io(format!("unexpected matrix header {header:?}")));
    }
    let ncols = header.len() / 2;
    let mut data = Vec::new();
    let mut nrows = 0;
    for (r, row) in rd.records().enumerate() {
        let row = row?;
        if row.len() != header.len() {
            return Err(Error::Io(format!("row {r} has {} fields, expected {}", row.len(), header.len())));
        }
        let vals = row
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| Error::Io(format!("row {r}: bad number '{f}'"))))
            .collect::<Result<Vec<f64>>>()?;
        data.extend(vals.chunks(2).map(|p| C64::new(p[0], p[1])));
        nrows += 1;
    }
    Ok(DMatrix::from_row_slice(nrows, ncols, &data))
}

pub fn write_matrix(m: &DMatrix<C64>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_matrix_to(m, std::io::BufWriter::new(file))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<C64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_matrix_from(std::io::BufReader::new(file))
}

pub fn write_vector(v: &DVector<C64>, path: &Path) -> Result<()> {
    write_matrix(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()), path)
}

pub fn read_vector(path: &Path) -> Result<DVector<C64>> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(Error::Dimension(format!("{} holds {} columns, expected 1", path.display(), m.ncols())));
    }
    Ok(m.column(0).into_owned())
}

/// Whether every imaginary part is exactly zero.
pub fn is_real(m: &DMatrix<C64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}
