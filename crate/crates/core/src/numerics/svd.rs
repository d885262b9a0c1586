//! Singular values via one-sided Jacobi on the real embedding.

use crate::numerics::matrix::{ComplexMatrix, RealMatrix};

/// Singular-value summary of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// Count of singular values above `max(rows, cols) * sigma_max * 1e-12`.
    pub rank: usize,
    /// `sigma_max / sigma_rank` over the retained rank; infinite for the
    /// zero matrix.
    pub condition_number: f64,
}

impl SpectralData {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Singular values of a real matrix by one-sided Jacobi (Hestenes)
/// orthogonalization, sorted nonincreasing.
pub fn real_singular_values(a: &RealMatrix) -> Vec<f64> {
    // Work on the transpose when rows < cols; singular values agree and the
    // sweep cost is quadratic in the column count.
    let work = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.transpose()
    };
    let (m, n) = (work.rows(), work.cols());
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| work.get(i, j)).collect())
        .collect();

    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    let eps = 1e-15;
    for _sweep in 0..64 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = cols.split_at_mut(j);
                for (vi, vj) in head[i].iter_mut().zip(tail[0].iter_mut()) {
                    let (a, b) = (*vi, *vj);
                    *vi = c * a - s * b;
                    *vj = s * a + c * b;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Singular values, numerical rank, and condition number of a complex
/// matrix, computed on the real embedding (whose spectrum is that of the
/// complex matrix with every value doubled).
pub fn singular_values(m: &ComplexMatrix) -> SpectralData {
    let lifted = m.real_lift();
    let doubled = real_singular_values(&lifted);
    let k = m.rows().min(m.cols());
    // Pairs (2i, 2i+1) hold the same value up to roundoff; average them.
    let singular: Vec<f64> = (0..k)
        .map(|i| 0.5 * (doubled[2 * i] + doubled[2 * i + 1]))
        .collect();
    let sigma_max = singular.first().copied().unwrap_or(0.0);
    let tol = m.rows().max(m.cols()) as f64 * sigma_max * 1e-12;
    let rank = singular.iter().filter(|&&s| s > tol).count();
    let condition_number = if rank == 0 {
        f64::INFINITY
    } else {
        sigma_max / singular[rank - 1]
    };
    SpectralData {
        singular_values: singular,
        rank,
        condition_number,
    }
}
