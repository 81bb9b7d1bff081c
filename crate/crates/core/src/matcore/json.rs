use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{Hermitian, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Wire form `{"n": int, "re": [[...]], "im": [[...]]}`.
///
/// Rows may carry `null` entries (or only the `j >= i` upper part) when the
/// file describes a Hermitian matrix; the gaps are filled by conjugate symmetry.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<Option<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<Option<f64>>>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &Matrix<T>) -> Self {
        let n = m.dim();
        let re = (0..n)
            .map(|i| (0..n).map(|j| Some(m[(i, j)].re.as_f64())).collect())
            .collect();
        let im = (0..n)
            .map(|i| (0..n).map(|j| Some(m[(i, j)].im.as_f64())).collect())
            .collect();
        Self { n, re, im: Some(im) }
    }

    fn expand(&self, rows: &[Vec<Option<f64>>], field: &str) -> Result<Vec<Vec<Option<f64>>>> {
        let n = self.n;
        if rows.len() != n {
            return Err(Error::InvalidMatrix(format!(
                "`{field}` has {} rows, expected {n}",
                rows.len()
            )));
        }
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() == n {
                    Ok(row.clone())
                } else if row.len() == n - i {
                    let mut full = vec![None; i];
                    full.extend(row.iter().copied());
                    Ok(full)
                } else {
                    Err(Error::InvalidMatrix(format!(
                        "`{field}` row {i} has {} entries, expected {n} or {}",
                        row.len(),
                        n - i
                    )))
                }
            })
            .collect()
    }

    /// Decodes a general matrix; every entry must be present.
    pub fn to_matrix<T: Real>(&self) -> Result<Matrix<T>> {
        let re = self.expand(&self.re, "re")?;
        let im = match &self.im {
            Some(im) => self.expand(im, "im")?,
            None => vec![vec![Some(0.0); self.n]; self.n],
        };
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut row = Vec::with_capacity(self.n);
            for j in 0..self.n {
                match (re[i][j], im[i][j]) {
                    (Some(r), Some(m)) => row.push(Complex::new(T::lit(r), T::lit(m))),
                    _ => {
                        return Err(Error::InvalidMatrix(format!(
                            "missing entry ({i}, {j}) in a general matrix"
                        )))
                    }
                }
            }
            rows.push(row);
        }
        Matrix::from_rows(rows)
    }

    /// Decodes a Hermitian matrix, filling omitted lower-triangle entries.
    pub fn to_hermitian<T: Real>(&self) -> Result<Hermitian<T>> {
        let n = self.n;
        let re = self.expand(&self.re, "re")?;
        let im = match &self.im {
            Some(im) => self.expand(im, "im")?,
            None => vec![vec![Some(0.0); n]; n],
        };
        let mut rows = vec![vec![Complex::new(T::zero(), T::zero()); n]; n];
        for i in 0..n {
            for j in 0..n {
                let (r, m) = if j >= i {
                    (re[i][j], im[i][j])
                } else {
                    (
                        re[i][j].or(re[j][i]),
                        im[i][j].or(im[j][i].map(|x| -x)),
                    )
                };
                match (r, m) {
                    (Some(r), Some(m)) => rows[i][j] = Complex::new(T::lit(r), T::lit(m)),
                    _ => {
                        return Err(Error::InvalidMatrix(format!(
                            "missing entry ({i}, {j}) with no symmetric counterpart"
                        )))
                    }
                }
            }
        }
        Hermitian::new(Matrix::from_rows(rows)?)
    }
}
