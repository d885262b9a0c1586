//! Blahut-Arimoto input-probability optimization for a fixed transition
//! matrix, plain and with an average-cost (power) constraint.

use crate::dmc::TransitionMatrix;
use crate::{Error, Result};
use std::f64::consts::LN_2;

/// Stopping tolerance (bits) and iteration cap.
#[derive(Debug, Clone, Copy)]
pub struct BaOptions {
    pub tol_bits: f64,
    pub max_iter: usize,
}

impl Default for BaOptions {
    fn default() -> Self {
        BaOptions {
            tol_bits: 1e-9,
            max_iter: 10_000,
        }
    }
}

/// Optimized input distribution and the mutual information it attains.
#[derive(Debug, Clone)]
pub struct BaResult {
    pub probs: Vec<f64>,
    pub capacity_bits: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Per-input divergences `D_i = sum_r T_ir log2(T_ir / q_r)` in bits for
/// the output marginal `q` induced by `probs`, split as
/// `D_i = sum_r T_ir log2 T_ir - sum_r T_ir log2 q_r` so the per-iteration
/// logarithms are one per output, not one per matrix entry.
fn divergences(t: &TransitionMatrix, row_self: &[f64], probs: &[f64]) -> Vec<f64> {
    let width = t.n_outputs();
    let mut marginal = vec![0.0f64; width];
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        for (q, &tir) in marginal.iter_mut().zip(t.row(i)) {
            *q += p * tir;
        }
    }
    let neg_log_q: Vec<f64> = marginal
        .iter()
        .map(|&q| if q > 0.0 { -q.log2() } else { 0.0 })
        .collect();
    (0..t.n_inputs())
        .map(|i| {
            let cross: f64 = t
                .row(i)
                .iter()
                .zip(&neg_log_q)
                .map(|(&tir, &nlq)| tir * nlq)
                .sum();
            row_self[i] + cross
        })
        .collect()
}

/// `sum_r T_ir log2 T_ir` per row, with `0 log 0 = 0`.
fn row_self_information(t: &TransitionMatrix) -> Vec<f64> {
    (0..t.n_inputs())
        .map(|i| {
            t.row(i)
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * p.log2())
                .sum()
        })
        .collect()
}

/// Shared alternating-maximization loop: each step reweights
/// `p_i <- p_i exp(ln2 (D_i - lambda w_i))` and stops when the Lagrangian
/// bracket `max_i (D_i - lambda w_i) - sum_i p_i (D_i - lambda w_i)` drops
/// below tolerance. With `lambda = 0` (and zero costs) this is the plain
/// capacity iteration; the bracket above the current mutual information is
/// the standard capacity bound.
fn ba_loop(
    t: &TransitionMatrix,
    costs: Option<(&[f64], f64)>,
    opts: &BaOptions,
) -> (Vec<f64>, f64, bool, usize) {
    let n = t.n_inputs();
    let row_self = row_self_information(t);
    let mut probs = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut mi: f64;
    loop {
        let d = divergences(t, &row_self, &probs);
        let objective: Vec<f64> = match costs {
            Some((w, lambda)) => d
                .iter()
                .zip(w)
                .map(|(&di, &wi)| di - lambda * wi)
                .collect(),
            None => d.clone(),
        };
        mi = probs.iter().zip(&d).map(|(&p, &di)| p * di).sum();
        let obj_mean: f64 = probs.iter().zip(&objective).map(|(&p, &o)| p * o).sum();
        // The sup runs over every input, including zero-probability ones;
        // it is the standard capacity (Lagrangian) upper bound.
        let obj_sup = objective.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if obj_sup - obj_mean < opts.tol_bits {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let shift = obj_sup;
        let mut total = 0.0;
        for (p, &o) in probs.iter_mut().zip(&objective) {
            if *p > 0.0 {
                *p *= (LN_2 * (o - shift)).exp();
                total += *p;
            }
        }
        if total <= 0.0 {
            break;
        }
        for p in &mut probs {
            *p /= total;
        }
    }
    (probs, mi.max(0.0), converged, iterations)
}

/// Capacity of the discrete memoryless channel `t` and the maximizing input
/// distribution. The iterate sequence is monotonically nondecreasing in
/// mutual information, starting from uniform; when the iteration cap is hit
/// the best iterate is returned with `converged = false`.
pub fn blahut_arimoto(t: &TransitionMatrix, opts: &BaOptions) -> Result<BaResult> {
    if t.n_inputs() == 0 {
        return Err(Error::Domain("empty input alphabet".into()));
    }
    let (probs, capacity_bits, converged, iterations) = ba_loop(t, None, opts);
    Ok(BaResult {
        probs,
        capacity_bits,
        converged,
        iterations,
    })
}

/// Capacity of `t` under the average-cost constraint
/// `sum_i p_i costs_i <= budget`, by bisection on the cost multiplier of
/// the Lagrangian iteration. Returns a feasible distribution; when the
/// unconstrained optimum already fits the budget it is returned directly.
pub fn blahut_arimoto_cost_constrained(
    t: &TransitionMatrix,
    costs: &[f64],
    budget: f64,
    opts: &BaOptions,
) -> Result<BaResult> {
    if costs.len() != t.n_inputs() {
        return Err(Error::DimensionMismatch(
            "one cost per input required".into(),
        ));
    }
    if !budget.is_finite() || budget <= 0.0 {
        return Err(Error::Domain("cost budget must be positive".into()));
    }
    let mean_cost = |p: &[f64]| -> f64 { p.iter().zip(costs).map(|(&pi, &wi)| pi * wi).sum() };
    let (cheapest, &cheapest_cost) = costs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("nonempty costs");
    if cheapest_cost > budget {
        return Err(Error::Domain(format!(
            "cheapest input cost {cheapest_cost} exceeds the budget {budget}"
        )));
    }

    let (probs, capacity, converged, iterations) = ba_loop(t, Some((costs, 0.0)), opts);
    if mean_cost(&probs) <= budget {
        return Ok(BaResult {
            probs,
            capacity_bits: capacity,
            converged,
            iterations,
        });
    }

    // Locate the multiplier with cheap inner solves (the mean cost is
    // nonincreasing in the multiplier), then solve once at full precision.
    let probe = BaOptions {
        tol_bits: (opts.tol_bits * 1e3).max(1e-7),
        max_iter: opts.max_iter.min(600),
    };
    let probe_cost = |lambda: f64| -> f64 {
        let sol = ba_loop(t, Some((costs, lambda)), &probe);
        mean_cost(&sol.0)
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut bracketed = false;
    for _ in 0..60 {
        if probe_cost(hi) <= budget {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::NoConvergence {
            iterations: opts.max_iter,
            best: capacity,
        });
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if probe_cost(mid) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-4 * hi {
            break;
        }
    }

    // Full-precision solve. Tighter convergence can land the mean cost
    // marginally over budget (the cost-capacity trade is flat near
    // saturation); blending a sliver of mass onto the cheapest input
    // restores feasibility with an O(sliver) rate change.
    let (mut probs, _, converged, iterations) = ba_loop(t, Some((costs, hi)), opts);
    let cost = mean_cost(&probs);
    if cost > budget {
        let theta = (cost - budget) / (cost - cheapest_cost);
        for p in &mut probs {
            *p *= 1.0 - theta;
        }
        probs[cheapest] += theta;
    }
    let capacity_bits = crate::dmc::mutual_information(t, &probs)?;
    Ok(BaResult {
        probs,
        capacity_bits,
        converged,
        iterations,
    })
}
