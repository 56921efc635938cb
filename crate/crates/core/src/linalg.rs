//! Minimal dense real matrix support for the small (N <= ~10) coordinate
//! maps used throughout the crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Mat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    libm::fabs(a[(i, col)])
                        .partial_cmp(&libm::fabs(a[(j, col)]))
                        .unwrap()
                })
                .unwrap();
            if libm::fabs(a[(pivot, col)]) < 1e-300 {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= f * a[(col, j)];
                    inv[(i, j)] -= f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    libm::fabs(a[(i, col)])
                        .partial_cmp(&libm::fabs(a[(j, col)]))
                        .unwrap()
                })
                .unwrap();
            if a[(pivot, col)] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            det *= a[(col, col)];
            for i in (col + 1)..n {
                let f = a[(i, col)] / a[(col, col)];
                for j in col..n {
                    a[(i, j)] -= f * a[(col, j)];
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.n {
            self.data.swap(i * self.n + col, j * self.n + col);
        }
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(&[
            vec![1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0],
            vec![-1.0, 1.0, 0.0],
            vec![-1.0, 0.0, 1.0],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        assert!(prod.max_abs_diff(&Mat::identity(3)) < 1e-14);
    }

    #[test]
    fn det_of_permuted_identity() {
        let m = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(m.det(), -1.0);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(m.inverse(), Err(Error::SingularMatrix));
    }
}
