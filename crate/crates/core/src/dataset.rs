//! Tabular input: CSV ingestion, validation and per-column z-scoring.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MODULE: &str = "dataset";

/// An `n × d` sample matrix (rows are points) with dimension names and
/// optional class labels. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: DMatrix<f64>,
    dim_names: Vec<String>,
    labels: Option<Vec<String>>,
    standardized: bool,
}

impl Dataset {
    pub fn new(
        samples: DMatrix<f64>,
        dim_names: Vec<String>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, d) = samples.shape();
        if n < 3 {
            return Err(Error::data(MODULE, format!("need at least 3 samples, got {n}")));
        }
        if d < 3 {
            return Err(Error::data(MODULE, format!("need at least 3 numeric columns, got {d}")));
        }
        if dim_names.len() != d {
            return Err(Error::data(
                MODULE,
                format!("{} dimension names for {d} columns", dim_names.len()),
            ));
        }
        let mut seen = HashSet::new();
        for name in &dim_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::data(MODULE, format!("duplicate dimension name '{name}'")));
            }
        }
        if let Some((idx, _)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::data(
                MODULE,
                format!("non-finite value at row {}, column {}", idx % n, idx / n),
            ));
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::data(MODULE, format!("{} labels for {n} samples", labels.len())));
            }
            let distinct: HashSet<&str> = labels.iter().map(String::as_str).collect();
            if distinct.len() < 2 {
                return Err(Error::data(MODULE, "labels must contain at least 2 distinct classes"));
            }
        }
        Ok(Dataset {
            samples,
            dim_names,
            labels,
            standardized: false,
        })
    }

    /// Reads a comma-separated file with a header row. `label_column`, if
    /// given, names the class column; every other column must be numeric and
    /// every cell present.
    pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)?;
        let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();

        let mut seen = HashSet::new();
        for h in &headers {
            if !seen.insert(h.as_str()) {
                return Err(Error::data(MODULE, format!("duplicate header '{h}' in {}", path.display())));
            }
        }
        let label_idx = match label_column {
            Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
                Error::data(MODULE, format!("label column '{name}' not found in header"))
            })?),
            None => None,
        };
        let numeric_cols: Vec<usize> = (0..headers.len()).filter(|&c| Some(c) != label_idx).collect();
        if numeric_cols.len() < 3 {
            return Err(Error::data(
                MODULE,
                format!("need at least 3 numeric columns, found {}", numeric_cols.len()),
            ));
        }

        let mut values = Vec::new();
        let mut labels = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            // 1-based data row, header excluded
            let line = row + 1;
            if record.len() != headers.len() {
                return Err(Error::data(
                    MODULE,
                    format!("row {line} has {} cells, expected {}", record.len(), headers.len()),
                ));
            }
            for &c in &numeric_cols {
                let cell = record[c].trim();
                if cell.is_empty() {
                    return Err(Error::data(
                        MODULE,
                        format!("missing value at row {line}, column '{}'", headers[c]),
                    ));
                }
                let v: f64 = cell.parse().map_err(|_| {
                    Error::data(
                        MODULE,
                        format!("non-numeric value '{cell}' at row {line}, column '{}'", headers[c]),
                    )
                })?;
                values.push(v);
            }
            if let Some(li) = label_idx {
                let cell = record[li].trim();
                if cell.is_empty() {
                    return Err(Error::data(MODULE, format!("missing label at row {line}")));
                }
                labels.push(cell.to_string());
            }
        }
        let n = values.len() / numeric_cols.len();
        let samples = DMatrix::from_row_slice(n, numeric_cols.len(), &values);
        let names = numeric_cols.iter().map(|&c| headers[c].clone()).collect();
        Dataset::new(samples, names, label_idx.map(|_| labels))
    }

    /// Z-scores every column (population variance). Columns with zero
    /// variance are dropped; their names are returned alongside the result.
    pub fn standardize(&self) -> Result<(Dataset, Vec<String>)> {
        if self.standardized {
            return Err(Error::data(MODULE, "dataset is already standardized"));
        }
        let n = self.n() as f64;
        let mut kept = Vec::new();
        let mut removed = Vec::new();
        let mut columns = Vec::new();
        for (j, col) in self.samples.column_iter().enumerate() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd <= 1e-12 * mean.abs().max(1.0) {
                removed.push(self.dim_names[j].clone());
                continue;
            }
            kept.push(self.dim_names[j].clone());
            columns.push(col.map(|v| (v - mean) / sd));
        }
        if kept.is_empty() {
            return Err(Error::data(MODULE, "every column has zero variance"));
        }
        if !removed.is_empty() {
            log::warn!("dataset: removed zero-variance columns {removed:?}");
        }
        let samples = DMatrix::from_columns(&columns);
        let mut ds = Dataset::new(samples, kept, self.labels.clone())?;
        ds.standardized = true;
        Ok((ds, removed))
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn dim_names(&self) -> &[String] {
        &self.dim_names
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn n(&self) -> usize {
        self.samples.nrows()
    }

    pub fn d(&self) -> usize {
        self.samples.ncols()
    }

    pub fn dim_index(&self, name: &str) -> Option<usize> {
        self.dim_names.iter().position(|n| n == name)
    }
}
