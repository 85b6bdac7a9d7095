//! Minimal dense row-major matrix, just enough for bilinear forms and
//! power iteration.

use std::ops::Index;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims(format!("matrix dimensions {rows}x{cols} must be >= 1")));
        }
        Ok(Matrix { rows, cols, data: vec![0.0; rows * cols] })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Matrix::zeros(rows, cols)?;
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::dims("matrix must have at least one row and column".to_string()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dims("rows have unequal lengths".to_string()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("matrix entries must be finite".to_string()));
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// `uᵀ A v`; `u` has `rows` entries and `v` has `cols` entries.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != self.rows || v.len() != self.cols {
            return Err(Error::dims(format!(
                "bilinear form needs |u| = {} and |v| = {}, got {} and {}",
                self.rows,
                self.cols,
                u.len(),
                v.len()
            )));
        }
        let mut acc = 0.0;
        for (i, ui) in u.iter().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut dot = 0.0;
            for (aij, vj) in row.iter().zip(v) {
                dot += aij * vj;
            }
            acc += ui * dot;
        }
        Ok(acc)
    }

    /// `out = A v`.
    pub(crate) fn matvec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = Aᵀ v`.
    pub(crate) fn tr_matvec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.fill(0.0);
        for (i, vi) in v.iter().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, aij) in out.iter_mut().zip(row) {
                *o += aij * vi;
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_matches_hand_computation() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        // [1,1]ᵀ A [1,−1] = (1−2) + (3−4) = −2.
        let v = a.bilinear(&[1.0, 1.0], &[1.0, -1.0]).unwrap();
        assert_eq!(v, -2.0);
    }

    #[test]
    fn matvec_pair_is_transpose_consistent() {
        let a = Matrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![0.0, 3.0, 1.0]]).unwrap();
        let u = [0.7, -1.3];
        let v = [2.0, 0.1, -4.0];
        let mut av = [0.0; 2];
        a.matvec(&v, &mut av);
        let mut atu = [0.0; 3];
        a.tr_matvec(&u, &mut atu);
        let lhs: f64 = u.iter().zip(av).map(|(x, y)| x * y).sum();
        let rhs: f64 = v.iter().zip(atu).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).abs() < 1e-14);
        assert!((lhs - a.bilinear(&u, &v).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(Matrix::from_rows(&[]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Matrix::zeros(0, 3).is_err());
        assert!(Matrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn bilinear_rejects_wrong_lengths() {
        let a = Matrix::zeros(2, 3).unwrap();
        assert!(a.bilinear(&[1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(a.bilinear(&[1.0, 2.0], &[1.0]).is_err());
    }
}
