//! Plain CSV tables with fixed 12-significant-digit formatting.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::{Grid, WaveFunction};
use crate::propagate::{TimeRecord, TimeSeries};

pub const WAVEFUNCTION_HEADER: [&str; 3] = ["x", "re", "im"];

/// Formats `v` with 12 significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt12(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// A header plus rows of numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| fmt12(v)))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_path(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file))
    }

    pub fn read_from(input: impl Read) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|_| {
                        Error::Schema(format!("row {}: {field:?} is not a number", line + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != header.len() {
                return Err(Error::Schema(format!("row {} has {} fields, expected {}", line + 1, row.len(), header.len())));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn read_path(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(file)
    }

    pub fn has_header(&self, expected: &[&str]) -> bool {
        self.header.len() == expected.len() && self.header.iter().zip(expected).all(|(a, b)| a == b)
    }
}

pub fn timeseries_table(series: &TimeSeries) -> Table {
    let mut table = Table::new(&TimeRecord::HEADER);
    for r in &series.records {
        table.push(r.values().to_vec());
    }
    table
}

pub fn timeseries_from_table(table: &Table) -> Result<TimeSeries> {
    if !table.has_header(&TimeRecord::HEADER) {
        return Err(Error::Schema(format!("not a time series header: {}", table.header.join(","))));
    }
    let records = table
        .rows
        .iter()
        .map(|row| {
            let mut v = [0.0; 11];
            v.copy_from_slice(row);
            TimeRecord::from_values(v)
        })
        .collect();
    Ok(TimeSeries { records })
}

pub fn wavefunction_table(psi: &WaveFunction) -> Table {
    let mut table = Table::new(&WAVEFUNCTION_HEADER);
    for (x, a) in psi.grid().points().zip(psi.amps()) {
        table.push(vec![x, a.re, a.im]);
    }
    table
}

/// Rebuilds a wave function, recovering the grid from the `x` column.
pub fn wavefunction_from_table(table: &Table) -> Result<WaveFunction> {
    if !table.has_header(&WAVEFUNCTION_HEADER) {
        return Err(Error::Schema(format!("not a wave function header: {}", table.header.join(","))));
    }
    let n = table.rows.len();
    if n < 2 {
        return Err(Error::Schema("wave function needs at least two rows".into()));
    }
    let x0 = table.rows[0][0];
    let dx = table.rows[1][0] - x0;
    let grid = Grid::new(x0, x0 + dx * n as f64, n)?;
    for (j, row) in table.rows.iter().enumerate() {
        if (row[0] - grid.x(j)).abs() > 1e-9 * (1.0 + grid.x(j).abs()) {
            return Err(Error::Schema(format!("x column is not uniform at row {}", j + 1)));
        }
    }
    WaveFunction::new(grid, table.rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}
