//! Profile CSV files: fixed column order, 17 significant digits, written
//! through a temporary file and renamed into place.

use std::io::Write;
use std::path::Path;

use slit_fringe::{Grid, Profile};

use crate::error::{CliError, Result};

/// Column order of every profile CSV.
pub const COLUMNS: [&str; 6] = [
    "x",
    "rho_se",
    "omega_nlad",
    "omega_nlad_dilated",
    "log10_rho_se",
    "log10_omega_nlad",
];

/// Floor for the log columns, also used for nonpositive values.
pub const LOG_FLOOR: f64 = -300.0;

pub fn log10_clipped(v: f64) -> f64 {
    if v > 0.0 {
        v.log10().max(LOG_FLOOR)
    } else {
        LOG_FLOOR
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to `path` atomically: a temporary file in the same
/// directory is filled, flushed and renamed over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Named columns sharing one x grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub grid: Grid,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.grid.len());
        self.columns.push((name.to_string(), values));
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn profile(&self, name: &str, time: f64) -> Option<Result<Profile>> {
        self.column(name)
            .map(|v| Profile::new(self.grid, v.to_vec(), time).map_err(CliError::from))
    }

    /// CSV text with columns in [`COLUMNS`] order; unknown names follow.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let rank = |n: &str| COLUMNS.iter().position(|c| *c == n).unwrap_or(COLUMNS.len());
        let mut cols: Vec<&(String, Vec<f64>)> = self.columns.iter().collect();
        cols.sort_by_key(|(n, _)| rank(n));
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = std::iter::once("x").chain(cols.iter().map(|(n, _)| n.as_str())).collect();
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.grid.len() {
            let row = std::iter::once(self.grid.x(i))
                .chain(cols.iter().map(|(_, v)| v[i]))
                .map(format_value);
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| csv_err(e.into_error().into()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv()?)
    }

    /// Reads a CSV whose first column is a uniformly spaced `x`.
    pub fn read(path: &Path) -> Result<Self> {
        let input = |message: String| CliError::Input {
            path: path.to_path_buf(),
            message,
        };
        let mut r = csv::Reader::from_path(path).map_err(|e| input(e.to_string()))?;
        let headers: Vec<String> = r.headers().map_err(|e| input(e.to_string()))?.iter().map(String::from).collect();
        if headers.first().map(String::as_str) != Some("x") {
            return Err(input("first column must be `x`".into()));
        }
        let mut data: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for (row, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| input(e.to_string()))?;
            if rec.len() != headers.len() {
                return Err(input(format!("row {} has {} fields, expected {}", row + 2, rec.len(), headers.len())));
            }
            for (col, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| input(format!("row {}: `{field}` is not a number", row + 2)))?;
                data[col].push(v);
            }
        }
        let xs = &data[0];
        if xs.len() < 2 {
            return Err(input("at least two rows are required".into()));
        }
        let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len()).map_err(|e| input(e.to_string()))?;
        let tol = 1e-9 * grid.dx();
        if let Some(i) = (0..xs.len()).find(|&i| (xs[i] - grid.x(i)).abs() > tol.max(1e-12 * xs[i].abs())) {
            return Err(input(format!("x is not uniformly spaced near row {}", i + 2)));
        }
        let mut table = Table::new(grid);
        for (name, values) in headers.into_iter().zip(data).skip(1) {
            table.columns.push((name, values));
        }
        Ok(table)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Input {
        path: "<csv>".into(),
        message: e.to_string(),
    }
}
