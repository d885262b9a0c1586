//! The one-bit-quantized channel as a finite discrete memoryless channel:
//! sign patterns, exact transition probabilities, and mutual information.

use crate::numerics::matrix::{lift_vector, ComplexMatrix};
use crate::numerics::special::q_func;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::SQRT_2;

/// Largest supported number of quantizer rails (2 Nr); the output alphabet
/// has `2^rails` patterns.
pub const MAX_RAILS: usize = 26;

/// Transition-matrix entries below this are treated as exact zeros in
/// entropy sums; high-SNR rows are near-deterministic.
const PROB_FLOOR: f64 = 1e-300;

/// One sign vector in `{-1,+1}^{2Nr}`: real rails of all antennas first,
/// then imaginary rails, matching the real-lift coordinate order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantPattern {
    signs: Vec<i8>,
}

impl QuantPattern {
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("pattern signs must be +1 or -1".into()));
        }
        Ok(QuantPattern { signs })
    }

    /// Decode a pattern index: bit j is `(sign_j + 1)/2`, little-endian
    /// over the rails. Fixed so serialized matrices are comparable across
    /// runs.
    pub fn from_index(index: usize, rails: usize) -> Self {
        let signs = (0..rails)
            .map(|j| if (index >> j) & 1 == 1 { 1 } else { -1 })
            .collect();
        QuantPattern { signs }
    }

    pub fn index(&self) -> usize {
        self.signs
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &s)| acc | (usize::from(s == 1) << j))
    }

    #[inline]
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    #[inline]
    pub fn rails(&self) -> usize {
        self.signs.len()
    }
}

/// Quantize a noiseless (or noisy) receive vector: the sign of every real
/// and imaginary rail, with `sgn(0) = +1`.
pub fn quantize(y: &[Complex64]) -> QuantPattern {
    let lifted = lift_vector(y);
    QuantPattern {
        signs: lifted.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect(),
    }
}

/// A finite input alphabet with probabilities under an average power budget.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub symbols: Vec<Vec<Complex64>>,
    pub probs: Vec<f64>,
    pub power_budget: f64,
}

impl Constellation {
    pub fn new(symbols: Vec<Vec<Complex64>>, probs: Vec<f64>, power_budget: f64) -> Result<Self> {
        if symbols.len() != probs.len() {
            return Err(Error::DimensionMismatch(
                "one probability per symbol required".into(),
            ));
        }
        if !power_budget.is_finite() || power_budget < 0.0 {
            return Err(Error::Domain("power budget must be nonnegative".into()));
        }
        if symbols.is_empty() {
            return Ok(Constellation {
                symbols,
                probs,
                power_budget,
            });
        }
        let dim = symbols[0].len();
        if symbols.iter().any(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch("symbols of unequal length".into()));
        }
        if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::Domain("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let avg_power: f64 = symbols
            .iter()
            .zip(&probs)
            .map(|(s, &p)| p * s.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        if avg_power > power_budget * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::Domain(format!(
                "average power {avg_power} exceeds budget {power_budget}"
            )));
        }
        Ok(Constellation {
            symbols,
            probs,
            power_budget,
        })
    }

    /// Equal probabilities over the given symbols.
    pub fn uniform(symbols: Vec<Vec<Complex64>>, power_budget: f64) -> Result<Self> {
        let n = symbols.len().max(1);
        let probs = vec![1.0 / n as f64; symbols.len()];
        Constellation::new(symbols, probs, power_budget)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn average_power(&self) -> f64 {
        self.symbols
            .iter()
            .zip(&self.probs)
            .map(|(s, &p)| p * s.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// Row-stochastic transition matrix `Pr[pattern | symbol]` over the full
/// `2^rails` output alphabet, rows indexed by constellation symbol and
/// columns by pattern index.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    n_inputs: usize,
    rails: usize,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        1 << self.rails
    }

    pub fn rails(&self) -> usize {
        self.rails
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_outputs();
        &self.probs[i * w..(i + 1) * w]
    }

    /// Build directly from row-stochastic rows over `2^rails` outputs.
    pub fn from_rows(rows: Vec<Vec<f64>>, rails: usize) -> Result<Self> {
        if rails > MAX_RAILS {
            return Err(Error::AlphabetTooLarge {
                rails,
                cap: MAX_RAILS,
            });
        }
        let width = 1usize << rails;
        let n_inputs = rows.len();
        let mut probs = Vec::with_capacity(n_inputs * width);
        for row in &rows {
            if row.len() != width {
                return Err(Error::DimensionMismatch(format!(
                    "row width {} != 2^rails = {width}",
                    row.len()
                )));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "transition rows must be probability vectors (sum {sum})"
                )));
            }
            probs.extend_from_slice(row);
        }
        Ok(TransitionMatrix {
            n_inputs,
            rails,
            probs,
        })
    }

    /// CSV dump for debugging: one row per input, pattern index as columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("input");
        for r in 0..self.n_outputs() {
            out.push_str(&format!(",p{r}"));
        }
        out.push('\n');
        for i in 0..self.n_inputs {
            out.push_str(&i.to_string());
            for &p in self.row(i) {
                out.push_str(&format!(",{p}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Exact probability of observing `pattern` when `x` is sent through `h`:
/// with `z = lift(H) lift(x)` and unit-variance complex noise (1/2 per
/// rail), the rails are independent and
/// `Pr = prod_j Q(-sqrt(2) * sign_j * z_j)`.
pub fn transition_prob(h: &ComplexMatrix, x: &[Complex64], pattern: &QuantPattern) -> f64 {
    assert_eq!(x.len(), h.cols(), "symbol length must match transmit count");
    assert_eq!(
        pattern.rails(),
        2 * h.rows(),
        "pattern rails must match receive count"
    );
    let z = lift_vector(&h.matvec(x));
    pattern
        .signs()
        .iter()
        .zip(&z)
        .map(|(&s, &zj)| q_func(-SQRT_2 * f64::from(s) * zj))
        .product()
}

/// Assemble the transition matrix of an arbitrary symbol list over all
/// `2^{2Nr}` patterns. Errors when the output alphabet exceeds the cap.
pub fn transition_matrix_from_symbols(
    h: &ComplexMatrix,
    symbols: &[Vec<Complex64>],
) -> Result<TransitionMatrix> {
    let rails = 2 * h.rows();
    if rails > MAX_RAILS {
        return Err(Error::AlphabetTooLarge {
            rails,
            cap: MAX_RAILS,
        });
    }
    let width = 1usize << rails;
    let mut probs = Vec::with_capacity(symbols.len() * width);
    for symbol in symbols {
        if symbol.len() != h.cols() {
            return Err(Error::DimensionMismatch(
                "symbol length must match transmit count".into(),
            ));
        }
        let z = lift_vector(&h.matvec(symbol));
        // Per-rail probability of observing +1.
        let p_plus: Vec<f64> = z.iter().map(|&zj| q_func(-SQRT_2 * zj)).collect();
        for index in 0..width {
            let mut p = 1.0;
            for (j, &pp) in p_plus.iter().enumerate() {
                p *= if (index >> j) & 1 == 1 { pp } else { 1.0 - pp };
            }
            probs.push(p);
        }
    }
    Ok(TransitionMatrix {
        n_inputs: symbols.len(),
        rails,
        probs,
    })
}

/// Transition matrix of a constellation's symbol set.
pub fn transition_matrix(h: &ComplexMatrix, c: &Constellation) -> Result<TransitionMatrix> {
    transition_matrix_from_symbols(h, &c.symbols)
}

/// Exact finite-alphabet mutual information in bits,
/// `sum_i sum_r p_i T_ir log2(T_ir / q_r)` with `q_r = sum_i p_i T_ir` and
/// `0 log 0 = 0`.
pub fn mutual_information(t: &TransitionMatrix, probs: &[f64]) -> Result<f64> {
    if probs.len() != t.n_inputs() {
        return Err(Error::DimensionMismatch(format!(
            "{} probabilities for {} inputs",
            probs.len(),
            t.n_inputs()
        )));
    }
    if probs.iter().any(|&p| p.is_nan() || p < 0.0) {
        return Err(Error::Domain("input probabilities must be nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "input probabilities sum to {total}, expected 1"
        )));
    }
    let width = t.n_outputs();
    let mut marginal = vec![0.0f64; width];
    for (i, &p) in probs.iter().enumerate() {
        if p <= PROB_FLOOR {
            continue;
        }
        for (q, &tir) in marginal.iter_mut().zip(t.row(i)) {
            *q += p * tir;
        }
    }
    // Kahan-compensated accumulation; high-SNR terms span many magnitudes.
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if p <= PROB_FLOOR {
            continue;
        }
        for (&tir, &qr) in t.row(i).iter().zip(&marginal) {
            if tir <= PROB_FLOOR {
                continue;
            }
            let term = p * tir * (tir / qr).log2();
            let y = term - carry;
            let tmp = sum + y;
            carry = (tmp - sum) - y;
            sum = tmp;
        }
    }
    Ok(sum.max(0.0))
}
