//! Column-by-column comparison of two CSV outputs on the same mesh.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::TIMESERIES_NUMERIC;
use crate::table::{wavefunction_from_table, Table, WAVEFUNCTION_HEADER};

/// Relative tolerance on the shared first (mesh) column.
const MESH_TOLERANCE: f64 = 1e-9;

/// Allowed max-abs difference per column, with a default for unlisted columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToleranceSpec {
    pub default: f64,
    pub per_column: BTreeMap<String, f64>,
    /// Threshold on the L² distance when both inputs are wave functions.
    pub l2: Option<f64>,
}

impl ToleranceSpec {
    pub fn uniform(tol: f64) -> Self {
        Self { default: tol, per_column: BTreeMap::new(), l2: None }
    }

    pub fn for_column(&self, name: &str) -> f64 {
        self.per_column.get(name).copied().unwrap_or(self.default)
    }

    /// Parses `name=tol` overrides.
    pub fn with_override(mut self, spec: &str) -> Result<Self> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("tolerance override {spec:?} is not name=value")))?;
        let tol: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("tolerance {value:?} is not a number")))?;
        if !(tol >= 0.0) {
            return Err(Error::Config(format!("tolerance for {name} must be non-negative")));
        }
        self.per_column.insert(name.trim().to_string(), tol);
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnDiff {
    pub column: String,
    pub max_abs: f64,
    pub rms: f64,
    /// Mesh value at which `max_abs` occurs.
    pub at: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub a: PathBuf,
    pub b: PathBuf,
    pub rows: usize,
    pub columns: Vec<ColumnDiff>,
    /// L² distance for wave-function inputs.
    pub l2: Option<f64>,
    pub l2_tolerance: Option<f64>,
    pub pass: bool,
}

impl CompareReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "compare {} vs {} ({} rows)", self.a.display(), self.b.display(), self.rows);
        for c in &self.columns {
            let _ = writeln!(
                s,
                "  {:<8} max_abs {:.3e} (at {:.6}) rms {:.3e} tol {:.1e} {}",
                c.column,
                c.max_abs,
                c.at,
                c.rms,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
        if let Some(l2) = self.l2 {
            let _ = writeln!(s, "  L2 distance {:.3e} tol {:.1e}", l2, self.l2_tolerance.unwrap_or(f64::NAN));
        }
        let _ = writeln!(s, "{}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

/// A run directory stands for its numeric time series.
pub fn resolve_input(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(TIMESERIES_NUMERIC)
    } else {
        path.to_path_buf()
    }
}

pub fn compare_tables(a: &Table, b: &Table, tol: &ToleranceSpec) -> Result<(Vec<ColumnDiff>, Option<f64>)> {
    if a.header != b.header {
        return Err(Error::Schema(format!(
            "headers differ: [{}] vs [{}]",
            a.header.join(","),
            b.header.join(",")
        )));
    }
    if a.header.is_empty() {
        return Err(Error::Schema("empty header".into()));
    }
    if a.rows.len() != b.rows.len() {
        return Err(Error::Schema(format!("row counts differ: {} vs {}", a.rows.len(), b.rows.len())));
    }
    for (i, (ra, rb)) in a.rows.iter().zip(&b.rows).enumerate() {
        if (ra[0] - rb[0]).abs() > MESH_TOLERANCE * (1.0 + ra[0].abs()) {
            return Err(Error::Schema(format!(
                "mesh mismatch in column {} at row {}: {} vs {}",
                a.header[0],
                i + 1,
                ra[0],
                rb[0]
            )));
        }
    }
    let mut columns = Vec::new();
    for (c, name) in a.header.iter().enumerate().skip(1) {
        let (mut max_abs, mut at, mut sum_sq) = (0.0f64, a.rows.first().map_or(0.0, |r| r[0]), 0.0);
        let mut nan_mismatch = false;
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            let (x, y) = (ra[c], rb[c]);
            if x.is_nan() && y.is_nan() {
                continue;
            }
            let d = (x - y).abs();
            if d.is_nan() {
                nan_mismatch = true;
                at = ra[0];
                continue;
            }
            sum_sq += d * d;
            if d > max_abs {
                max_abs = d;
                at = ra[0];
            }
        }
        if nan_mismatch {
            max_abs = f64::INFINITY;
        }
        let rms = if a.rows.is_empty() { 0.0 } else { (sum_sq / a.rows.len() as f64).sqrt() };
        let tolerance = tol.for_column(name);
        columns.push(ColumnDiff { column: name.clone(), max_abs, rms, at, tolerance, pass: max_abs <= tolerance });
    }
    let l2 = if a.has_header(&WAVEFUNCTION_HEADER) {
        Some(wavefunction_from_table(a)?.distance(&wavefunction_from_table(b)?)?)
    } else {
        None
    };
    Ok((columns, l2))
}

/// Compares two CSV files (or run directories) with identical schema and mesh.
pub fn compare(a: &Path, b: &Path, tol: &ToleranceSpec) -> Result<CompareReport> {
    let (pa, pb) = (resolve_input(a), resolve_input(b));
    let (ta, tb) = (Table::read_path(&pa)?, Table::read_path(&pb)?);
    let (columns, l2) = compare_tables(&ta, &tb, tol)?;
    let l2_tolerance = l2.map(|_| tol.l2.unwrap_or(tol.default));
    let l2_pass = match (l2, l2_tolerance) {
        (Some(d), Some(t)) => d <= t,
        _ => true,
    };
    // For wave functions the L² distance is the verdict; pointwise columns are diagnostics.
    let columns_pass = l2.is_some() || columns.iter().all(|c| c.pass);
    Ok(CompareReport {
        a: pa,
        b: pb,
        rows: ta.rows.len(),
        pass: columns_pass && l2_pass,
        columns,
        l2,
        l2_tolerance,
    })
}
