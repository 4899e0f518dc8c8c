//! Numeric CSV datasets and a seeded synthetic regression generator.

use std::io::{Read, Write};
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T: Real = f64> {
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<T>>,
    pub target_name: Option<String>,
    pub target: Option<Vec<T>>,
}

impl<T: Real> Dataset<T> {
    /// Header row of column names, every cell numeric. `target`, when given,
    /// names the column split off as the regression target.
    pub fn from_csv_reader<R: Read>(reader: R, target: Option<&str>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let target_col = match target {
            Some(name) => Some(
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::InvalidInput(format!("target column '{name}' not in header")))?,
            ),
            None => None,
        };
        let feature_names = header
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != target_col)
            .map(|(_, h)| h.clone())
            .collect();
        let mut rows = Vec::new();
        let mut ys = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let mut row = Vec::with_capacity(header.len());
            for (c, cell) in rec.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::InvalidInput(format!("row {r}, column '{}': '{cell}' is not numeric", header[c]))
                })?;
                if Some(c) == target_col {
                    ys.push(T::lit(v));
                } else {
                    row.push(T::lit(v));
                }
            }
            rows.push(row);
        }
        Ok(Self {
            feature_names,
            rows,
            target_name: target.map(str::to_string),
            target: target_col.map(|_| ys),
        })
    }

    pub fn load_csv(path: impl AsRef<Path>, target: Option<&str>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, target)
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, index: usize) -> Result<&[T]> {
        self.rows
            .get(index)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidInput(format!("row index {index} out of range ({} rows)", self.rows.len())))
    }

    /// All rows except the one at `index` (exclusion by row identity).
    pub fn background_excluding(&self, index: usize) -> Vec<Vec<T>> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, r)| r.clone())
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.feature_names.clone();
        if let Some(name) = &self.target_name {
            header.push(name.clone());
        }
        w.write_record(&header)?;
        for (r, row) in self.rows.iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            if let Some(t) = &self.target {
                rec.push(t[r].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Gaussian features with a target mixing linear terms, two interactions
/// and a threshold effect, plus small noise.
pub fn synthetic_regression(rows: usize, n_features: usize, seed: u64) -> Dataset<f64> {
    let mut rng = stream(seed, "synthetic");
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let weights: Vec<f64> = (0..n_features).map(|_| normal()).collect();
    let mut xs = Vec::with_capacity(rows);
    let mut ys = Vec::with_capacity(rows);
    for _ in 0..rows {
        let x: Vec<f64> = (0..n_features).map(|_| normal()).collect();
        let mut y: f64 = x.iter().zip(&weights).map(|(a, b)| a * b).sum();
        if n_features >= 2 {
            y += 1.5 * x[0] * x[1];
        }
        if n_features >= 4 {
            y += if x[2] > 0.0 { 2.0 * x[3] } else { -x[3] };
        }
        y += 0.1 * normal();
        xs.push(x);
        ys.push(y);
    }
    Dataset {
        feature_names: (0..n_features).map(|i| format!("x{i}")).collect(),
        rows: xs,
        target_name: Some("y".into()),
        target: Some(ys),
    }
}
