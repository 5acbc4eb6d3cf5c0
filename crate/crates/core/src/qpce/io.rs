use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityMatrix, C64};
use std::path::Path;

/// Reads a `dim × 2·dim` CSV (real and imaginary parts alternating). The
/// operator must be Hermitian and positive semidefinite; trace is free.
pub fn read_density_csv(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let nums = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::validation(format!("bad number `{f}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if nums.len() % 2 != 0 {
            return Err(Error::validation("density rows need an even number of columns"));
        }
        rows.push(nums.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    let d = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rows[bad].len(),
        });
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    let dm = DensityMatrix::unchecked(CMatrix::from_row_slice(d, d, &flat))?;
    dm.validate_operator()?;
    Ok(dm)
}

pub fn write_density_csv(dm: &DensityMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    let m = dm.entries();
    for i in 0..dm.dim() {
        let row: Vec<String> = (0..dm.dim())
            .flat_map(|j| [m[(i, j)].re.to_string(), m[(i, j)].im.to_string()])
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
