//! Per-pattern max-margin transmit symbols.
//!
//! For a sign pattern `r` the program is
//!
//! ```text
//! max d   s.t.  diag(r) Hhat xhat >= d 1,   ||xhat||^2 <= Pt
//! ```
//!
//! Writing `a_j = r_j * row_j(Hhat)`, the optimum over the unit ball is the
//! max-min of linear forms `max_{||u|| <= 1} min_j a_j . u`, whose value by
//! minimax duality equals the distance from the origin to the convex hull
//! of the `a_j`. That minimum-norm point is found exactly (up to roundoff)
//! with Wolfe's algorithm, and the whole solution scales as `sqrt(Pt)`.

use crate::dmc::QuantPattern;
use crate::numerics::matrix::RealMatrix;
use crate::{Error, Result};

/// Margins below this at `Pt = 1` classify a pattern as infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Wolfe optimality slack, absolute on the normalized point scale.
const WOLFE_TOL: f64 = 1e-11;

/// Weights at or below this are dropped from the corral.
const WEIGHT_FLOOR: f64 = 1e-12;

const MAX_MAJOR_CYCLES: usize = 10_000;

/// One solved pattern: the scaled symbol (as a lifted real vector) and the
/// attained margin.
#[derive(Debug, Clone)]
pub struct MarginSolution {
    pub pattern: QuantPattern,
    pub x_hat: Vec<f64>,
    pub d_star: f64,
}

/// Minimum-norm point of the convex hull of `points`. Returns the point and
/// its norm. Wolfe's algorithm: grow a corral of affinely independent
/// points, solve the affine least-norm subproblem on it, and walk weights
/// back into the simplex until the hull-optimality criterion holds.
fn min_norm_point(points: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let m = points.len();
    let dim = points[0].len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };

    let norms_sq: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let start = (0..m)
        .min_by(|&a, &b| norms_sq[a].partial_cmp(&norms_sq[b]).unwrap())
        .expect("nonempty point set");
    if norms_sq[start] == 0.0 {
        return Ok((vec![0.0; dim], 0.0));
    }

    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = points[start].clone();

    let combination = |corral: &[usize], weights: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; dim];
        for (&idx, &w) in corral.iter().zip(weights) {
            for (xi, pi) in x.iter_mut().zip(&points[idx]) {
                *xi += w * pi;
            }
        }
        x
    };

    for _cycle in 0..MAX_MAJOR_CYCLES {
        let x_norm_sq = dot(&x, &x);
        let x_norm = x_norm_sq.sqrt();
        // Hull optimality: every point satisfies <x, p> >= ||x||^2.
        let (j_min, inner_min) = (0..m)
            .map(|j| (j, dot(&x, &points[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("nonempty point set");
        if x_norm_sq - inner_min <= WOLFE_TOL * x_norm.max(WOLFE_TOL) {
            return Ok((x, x_norm));
        }
        if corral.contains(&j_min) {
            // The violating point is already in the corral: only roundoff
            // level progress remains.
            return Ok((x, x_norm));
        }
        corral.push(j_min);
        weights.push(0.0);

        // Minor cycles: move to the affine minimizer over the corral,
        // walking the weights back into the simplex and shedding points
        // pinned at zero. Each shed removes a point, so corral-many cycles
        // suffice; anything beyond that is a numerical stall.
        let mut settled = false;
        for _minor in 0..corral.len() + 2 {
            let alpha = match affine_min_norm(points, &corral) {
                Some(alpha) => alpha,
                None => break,
            };
            if alpha.iter().all(|&a| a > WEIGHT_FLOOR) {
                weights = alpha;
                settled = true;
                break;
            }
            let mut theta = 1.0f64;
            for (i, &a) in alpha.iter().enumerate() {
                if a <= WEIGHT_FLOOR {
                    let denom = weights[i] - a;
                    if denom > 0.0 {
                        theta = theta.min(weights[i] / denom);
                    }
                }
            }
            if theta.is_nan() || theta <= 0.0 {
                break;
            }
            for (w, &a) in weights.iter_mut().zip(&alpha) {
                *w = theta * a + (1.0 - theta) * *w;
            }
            let mut kept_corral = Vec::with_capacity(corral.len());
            let mut kept_weights = Vec::with_capacity(weights.len());
            for (&idx, &w) in corral.iter().zip(&weights) {
                if w > WEIGHT_FLOOR {
                    kept_corral.push(idx);
                    kept_weights.push(w);
                }
            }
            if kept_corral.is_empty() {
                break;
            }
            corral = kept_corral;
            weights = kept_weights;
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
        }
        x = combination(&corral, &weights);
        if !settled {
            // Accept the current iterate; it is optimal up to roundoff.
            let n = dot(&x, &x).sqrt();
            return Ok((x, n));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_MAJOR_CYCLES,
        best: dot(&x, &x).sqrt(),
    })
}

/// Minimizer of `||sum_i alpha_i p_i||` subject to `sum alpha_i = 1` with
/// unconstrained signs, via the bordered Gram system. `None` when the
/// system is numerically singular.
fn affine_min_norm(points: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    // System over [mu, alpha]: row 0 is sum(alpha) = 1, the rest are
    // mu + (G alpha)_i = 0.
    let n = k + 1;
    let mut m = vec![0.0f64; n * n];
    let mut rhs = vec![0.0f64; n];
    rhs[0] = 1.0;
    for i in 0..k {
        m[i + 1] = 1.0; // first row: coefficients of alpha
        m[(i + 1) * n] = 1.0; // first column: coefficient of mu
        for j in 0..k {
            m[(i + 1) * n + (j + 1)] = dot(&points[corral[i]], &points[corral[j]]);
        }
    }
    // Gaussian elimination with partial pivoting.
    let mut scale = 0.0f64;
    for &v in &m {
        scale = scale.max(v.abs());
    }
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row * n + col].abs() > m[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if m[pivot * n + col].abs() <= scale * 1e-14 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[row * n + j] -= f * m[col * n + j];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut sol = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in row + 1..n {
            acc -= m[row * n + j] * sol[j];
        }
        sol[row] = acc / m[row * n + row];
    }
    Some(sol[1..].to_vec())
}

/// The signed constraint rows `a_j = r_j * row_j(Hhat)`, normalized by the
/// largest row norm. Returns the rows and the normalization scale.
fn signed_rows(hhat: &RealMatrix, pattern: &QuantPattern) -> (Vec<Vec<f64>>, f64) {
    let rows: Vec<Vec<f64>> = (0..hhat.rows())
        .map(|j| {
            let s = f64::from(pattern.signs()[j]);
            hhat.row(j).iter().map(|&v| s * v).collect()
        })
        .collect();
    let scale = rows
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return (rows, 0.0);
    }
    let normalized = rows
        .iter()
        .map(|r| r.iter().map(|&v| v / scale).collect())
        .collect();
    (normalized, scale)
}

/// Margin of the pattern at `Pt = 1` together with the unit-sphere
/// direction attaining it (`None` when the margin is zero).
pub(crate) fn unit_margin(
    hhat: &RealMatrix,
    pattern: &QuantPattern,
) -> Result<(f64, Option<Vec<f64>>)> {
    if pattern.rails() != hhat.rows() {
        return Err(Error::DimensionMismatch(format!(
            "pattern has {} rails, channel lift has {} rows",
            pattern.rails(),
            hhat.rows()
        )));
    }
    let (points, scale) = signed_rows(hhat, pattern);
    if scale == 0.0 {
        return Ok((0.0, None));
    }
    let (x, dist) = min_norm_point(&points)?;
    if dist == 0.0 {
        return Ok((0.0, None));
    }
    let direction: Vec<f64> = x.iter().map(|&v| v / dist).collect();
    Ok((dist * scale, Some(direction)))
}

/// Strict feasibility of `diag(r) Hhat x > 0`: whether the orthant indexed
/// by the pattern meets the column space of `Hhat`. Decided by the margin
/// solve at `Pt = 1` against [`FEASIBILITY_TOL`].
pub fn feasibility_check(hhat: &RealMatrix, pattern: &QuantPattern) -> bool {
    matches!(unit_margin(hhat, pattern), Ok((d, _)) if d > FEASIBILITY_TOL)
}

/// Solve the max-margin program for one pattern at power `pt`. Errors on
/// infeasible patterns.
pub fn max_margin_symbol(
    hhat: &RealMatrix,
    pattern: &QuantPattern,
    pt: f64,
) -> Result<MarginSolution> {
    if !pt.is_finite() || pt <= 0.0 {
        return Err(Error::Domain("power budget must be positive".into()));
    }
    let (d_unit, direction) = unit_margin(hhat, pattern)?;
    let direction = match direction {
        Some(dir) if d_unit > FEASIBILITY_TOL => dir,
        _ => return Err(Error::Infeasible(pattern.index())),
    };
    let amp = pt.sqrt();
    Ok(MarginSolution {
        pattern: pattern.clone(),
        x_hat: direction.iter().map(|&v| amp * v).collect(),
        d_star: amp * d_unit,
    })
}
