//! JSON shapes for matrices and generators, and file helpers.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMat;
use crate::symplectic::{FreeGenerator, SymplecticMatrix};

pub fn rows_to_matrix(nrows: usize, ncols: usize, rows: &[Vec<f64>]) -> Result<RMat> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Malformed(format!("expected a {nrows}×{ncols} row list")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Malformed("matrix entries must be finite".into()));
    }
    Ok(RMat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// `{"n": n, "rows": [...]}` for a `2n×2n` phase-space matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &RMat) -> Self {
        Self { n: m.nrows() / 2, rows: matrix_to_rows(m) }
    }

    pub fn to_matrix(&self) -> Result<RMat> {
        if self.n == 0 {
            return Err(Error::Malformed("n must be positive".into()));
        }
        rows_to_matrix(2 * self.n, 2 * self.n, &self.rows)
    }

    /// Parses and checks `SᵀJS = J`.
    pub fn to_symplectic(&self) -> Result<SymplecticMatrix> {
        SymplecticMatrix::new(self.to_matrix()?)
    }
}

impl From<&SymplecticMatrix> for MatrixJson {
    fn from(s: &SymplecticMatrix) -> Self {
        Self::from_matrix(s.matrix())
    }
}

/// `{"n", "P", "L", "Q", "m"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeGeneratorJson {
    pub n: usize,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub m: i64,
}

impl From<&FreeGenerator> for FreeGeneratorJson {
    fn from(g: &FreeGenerator) -> Self {
        Self {
            n: g.n(),
            p: matrix_to_rows(g.p()),
            l: matrix_to_rows(g.l()),
            q: matrix_to_rows(g.q()),
            m: g.m() as i64,
        }
    }
}

impl TryFrom<FreeGeneratorJson> for FreeGenerator {
    type Error = Error;

    fn try_from(j: FreeGeneratorJson) -> Result<Self> {
        if j.n == 0 {
            return Err(Error::Malformed("n must be positive".into()));
        }
        let p = rows_to_matrix(j.n, j.n, &j.p)?;
        let l = rows_to_matrix(j.n, j.n, &j.l)?;
        let q = rows_to_matrix(j.n, j.n, &j.q)?;
        FreeGenerator::new(p, l, q, j.m)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_round_trip() {
        let text = r#"{"n":1,"P":[[0.0]],"L":[[1.0]],"Q":[[0.0]],"m":0}"#;
        let j: FreeGeneratorJson = serde_json::from_str(text).unwrap();
        let g = FreeGenerator::try_from(j).unwrap();
        assert_eq!(g.m(), 0);
        let back = serde_json::to_string(&FreeGeneratorJson::from(&g)).unwrap();
        assert_eq!(back, text);
    }

    #[test]
    fn malformed_shapes_rejected() {
        assert!(matches!(rows_to_matrix(2, 2, &[vec![1.0, 2.0]]), Err(Error::Malformed(_))));
        let j = MatrixJson { n: 1, rows: vec![vec![1.0, 1.0], vec![0.0]] };
        assert!(matches!(j.to_matrix(), Err(Error::Malformed(_))));
        let shear = MatrixJson { n: 1, rows: vec![vec![1.0, 1.0], vec![0.0, 1.0]] };
        assert!(shear.to_symplectic().is_ok());
        let bad = MatrixJson { n: 1, rows: vec![vec![2.0, 0.0], vec![0.0, 2.0]] };
        assert!(matches!(bad.to_symplectic(), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn parity_violation_rejected() {
        let text = r#"{"n":1,"P":[[0.0]],"L":[[1.0]],"Q":[[0.0]],"m":1}"#;
        let j: FreeGeneratorJson = serde_json::from_str(text).unwrap();
        assert!(matches!(FreeGenerator::try_from(j), Err(Error::Parity { .. })));
    }
}
