//! Dense real and complex matrices, row-major, sized for antenna-count
//! problems (a few up to a few hundred rows/columns).

use crate::{Error, Result};
use num_complex::Complex64;

/// Dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RealMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("add".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Determinant of a square matrix by LU with partial pivoting.
    pub fn determinant(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut pivot = k;
            for i in k + 1..n {
                if a[i * n + k].abs() > a[pivot * n + k].abs() {
                    pivot = i;
                }
            }
            if a[pivot * n + k] == 0.0 {
                return 0.0;
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= a[k * n + k];
            for i in k + 1..n {
                let factor = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
        det
    }
}

/// Dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Row vector h* as a 1xN channel matrix from the column vector h.
    pub fn miso_row(h: &[Complex64]) -> Self {
        ComplexMatrix {
            rows: 1,
            cols: h.len(),
            data: h.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Column vector as an Nx1 channel matrix.
    pub fn simo_column(h: &[Complex64]) -> Self {
        ComplexMatrix {
            rows: h.len(),
            cols: 1,
            data: h.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("add".into()));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Gram matrix H H*.
    pub fn gram(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                let v: Complex64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                out.set(i, j, v);
            }
        }
        out
    }

    /// Inverse of a square matrix by Gauss-Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<ComplexMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = ComplexMatrix::identity(n).data;
        let scale = self
            .data
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut pivot = k;
            for i in k + 1..n {
                if a[i * n + k].norm() > a[pivot * n + k].norm() {
                    pivot = i;
                }
            }
            if a[pivot * n + k].norm() <= scale * 1e-13 * n as f64 {
                return Err(Error::Singular(format!("{n}x{n} matrix inversion")));
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                    inv.swap(k * n + j, pivot * n + j);
                }
            }
            let d = a[k * n + k];
            for j in 0..n {
                a[k * n + j] /= d;
                inv[k * n + j] /= d;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[i * n + k];
                if f == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let av = a[k * n + j];
                    let iv = inv[k * n + j];
                    a[i * n + j] -= f * av;
                    inv[i * n + j] -= f * iv;
                }
            }
        }
        Ok(ComplexMatrix {
            rows: n,
            cols: n,
            data: inv,
        })
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Complex64::ONE;
        for k in 0..n {
            let mut pivot = k;
            for i in k + 1..n {
                if a[i * n + k].norm() > a[pivot * n + k].norm() {
                    pivot = i;
                }
            }
            if a[pivot * n + k] == Complex64::ZERO {
                return Complex64::ZERO;
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= a[k * n + k];
            for i in k + 1..n {
                let factor = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= factor * v;
                }
            }
        }
        det
    }

    /// The 2Nr x 2Nt real embedding `[[Re H, -Im H], [Im H, Re H]]`.
    pub fn real_lift(&self) -> RealMatrix {
        real_lift(self)
    }
}

/// Real embedding of a complex matrix: `[[Re H, -Im H], [Im H, Re H]]`.
/// Acting on lifted vectors `[Re x; Im x]` it reproduces complex
/// multiplication by H.
pub fn real_lift(h: &ComplexMatrix) -> RealMatrix {
    let (m, n) = (h.rows(), h.cols());
    let mut out = RealMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let z = h.get(i, j);
            out.set(i, j, z.re);
            out.set(i, n + j, -z.im);
            out.set(m + i, j, z.im);
            out.set(m + i, n + j, z.re);
        }
    }
    out
}

/// `[Re x; Im x]` embedding of a complex vector.
pub fn lift_vector(x: &[Complex64]) -> Vec<f64> {
    x.iter()
        .map(|z| z.re)
        .chain(x.iter().map(|z| z.im))
        .collect()
}

/// Inverse of [`lift_vector`]; the slice length must be even.
pub fn unlift_vector(x: &[f64]) -> Vec<Complex64> {
    assert!(x.len().is_multiple_of(2), "lifted vector length must be even");
    let n = x.len() / 2;
    (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect()
}
