//! Closed-form capacities, bounds, and low-SNR expansions for the one-bit
//! quantized channel. Noise is unit-variance per complex dimension, so `pt`
//! is the linear SNR.

use crate::dmc::Constellation;
use crate::numerics::matrix::ComplexMatrix;
use crate::numerics::special::{hb, q_func};
use crate::numerics::svd::singular_values;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, LN_2, PI};

/// One evaluated (SNR, rate) sample, labeled by the strategy or formula
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub snr_linear: f64,
    pub rate_bits: f64,
    pub label: String,
}

/// Inputs of the achievable-rate lower bound for max-margin constellations:
/// the number of feasible patterns and the smallest margin among them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexOptBoundInputs {
    /// Number of feasible sign patterns (constellation size M).
    pub feasible_count: usize,
    /// Smallest margin over the kept patterns.
    pub d_min: f64,
    /// Receive antenna count.
    pub nr: usize,
}

/// Capacity of the one-bit quantized scalar channel,
/// `2 (1 - Hb(Q(|h| sqrt(pt))))`.
pub fn siso_capacity(h: Complex64, pt: f64) -> f64 {
    miso_capacity(&[h], pt).0
}

/// The capacity-achieving rotated QPSK constellation of the scalar channel:
/// four symbols `sqrt(pt) e^{j(k pi/2 + pi/4 - arg h)}` with equal
/// probabilities. Aligning the phase with the channel puts the noiseless
/// receive points at the quadrant bisectors.
pub fn siso_constellation(h: Complex64, pt: f64) -> Constellation {
    if h == Complex64::ZERO {
        return Constellation::uniform(Vec::new(), pt).expect("empty constellation");
    }
    let amp = pt.sqrt();
    let symbols = (0..4)
        .map(|k| {
            vec![Complex64::from_polar(
                amp,
                k as f64 * PI / 2.0 + FRAC_PI_4 - h.arg(),
            )]
        })
        .collect();
    Constellation::uniform(symbols, pt).expect("QPSK constellation is valid")
}

/// Capacity of the one-bit quantized MISO channel `y = h* x + n`:
/// `2 (1 - Hb(Q(||h|| sqrt(pt))))`, achieved by beamforming along `h`
/// with QPSK. Returns the capacity and the achieving constellation
/// (empty for the zero channel).
pub fn miso_capacity(h: &[Complex64], pt: f64) -> (f64, Constellation) {
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let capacity = 2.0 * (1.0 - hb(q_func(norm * pt.max(0.0).sqrt())));
    if norm == 0.0 {
        return (
            0.0,
            Constellation::uniform(Vec::new(), pt).expect("empty constellation"),
        );
    }
    let amp = pt.sqrt();
    let symbols = (0..4)
        .map(|k| {
            let phase = Complex64::from_polar(1.0, k as f64 * PI / 2.0 + FRAC_PI_4);
            h.iter().map(|&hi| hi / norm * amp * phase).collect()
        })
        .collect();
    let constellation = Constellation::uniform(symbols, pt).expect("beamformed QPSK is valid");
    (capacity, constellation)
}

/// Two-term low-SNR expansion of the MISO capacity:
/// `(2/pi) ||h||^2 pt / ln 2  -  (2/(3 pi^2)) ||h||^4 pt^2 / ln 2`.
pub fn miso_low_snr_expansion(h: &[Complex64], pt: f64) -> f64 {
    let g = h.iter().map(|z| z.norm_sqr()).sum::<f64>();
    (2.0 / PI) * g * pt / LN_2 - (2.0 / (3.0 * PI * PI)) * g * g * pt * pt / LN_2
}

/// Leading-order low-SNR rate of independent QPSK signaling on every
/// transmit antenna: `(2/pi) tr(H H*) pt / (Nt ln 2)`.
pub fn qpsk_low_snr_rate(h: &ComplexMatrix, pt: f64) -> f64 {
    let trace = h.frobenius_norm().powi(2);
    (2.0 / PI) * trace * pt / (h.cols() as f64 * LN_2)
}

/// Finite-SNR capacity upper bound
/// `2 Nr (1 - Hb(Q(sqrt(pt sigma_max^2 / Nr))))`, tight when H has Nr equal
/// singular values.
pub fn finite_snr_upper_bound(h: &ComplexMatrix, pt: f64) -> f64 {
    let sigma_max = singular_values(h).sigma_max();
    let nr = h.rows() as f64;
    2.0 * nr * (1.0 - hb(q_func((pt.max(0.0) * sigma_max * sigma_max / nr).sqrt())))
}

/// Per-rail argument of the channel-inversion rate: `pt / tr((H H*)^-1)`.
/// Errors when `H H*` is not invertible.
fn channel_inversion_gain(h: &ComplexMatrix, pt: f64) -> Result<f64> {
    let spectral = singular_values(h);
    if spectral.rank < h.rows() {
        return Err(Error::Singular(format!(
            "channel inversion needs full row rank ({} < {})",
            spectral.rank,
            h.rows()
        )));
    }
    let trace_inv: f64 = spectral
        .singular_values
        .iter()
        .map(|&s| 1.0 / (s * s))
        .sum();
    Ok(pt / trace_inv)
}

/// Achievable rate of channel-inversion precoding with independent QPSK:
/// `2 Nr (1 - Hb(Q(sqrt(pt / tr((H H*)^-1)))))`. The channel decomposes
/// into Nr parallel quantized scalar channels with equal gain.
pub fn channel_inversion_rate(h: &ComplexMatrix, pt: f64) -> Result<f64> {
    let gain = channel_inversion_gain(h, pt.max(0.0))?;
    Ok(2.0 * h.rows() as f64 * (1.0 - hb(q_func(gain.sqrt()))))
}

/// One-bit distortion factor of the additive quantization-noise model.
pub fn aqnm_distortion() -> f64 {
    (PI - 2.0) / PI
}

/// Achievable-rate estimate that models quantization error as Gaussian
/// noise: `log2 det(I + (pt/Nt) H* D H)` with
/// `D = diag((1-rho) / (1 + rho pt ||h_i||^2 / Nt))` over the receive rows.
/// Evaluated as `log2 det(I_Nr + (pt/Nt) D H H*)`.
pub fn aqnm_rate(h: &ComplexMatrix, pt: f64) -> f64 {
    let pt = pt.max(0.0);
    let nr = h.rows();
    let nt = h.cols() as f64;
    let rho = aqnm_distortion();
    let gram = h.gram();
    let mut m = ComplexMatrix::identity(nr);
    for i in 0..nr {
        let row_gain = h.row_norm(i).powi(2);
        let d = (1.0 - rho) / (1.0 + rho * pt * row_gain / nt);
        for j in 0..nr {
            let v = m.get(i, j) + gram.get(i, j) * (pt / nt * d);
            m.set(i, j, v);
        }
    }
    // The determinant is real positive; D^{1/2} H H* D^{1/2} is PSD.
    m.determinant().re.max(1.0).log2()
}

/// Water-filling power allocation over channel-mode gains, returned in the
/// order of `gains`. Ties in the gains keep all tied modes active.
pub fn waterfilling_allocation(gains: &[f64], pt: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).unwrap());
    let mut alloc = vec![0.0; gains.len()];
    if order.is_empty() || pt <= 0.0 {
        return alloc;
    }
    // Largest active set whose common water level clears every inverse gain.
    let mut inv_sum = 0.0;
    let mut level = 0.0;
    let mut active = 0;
    for (k, &idx) in order.iter().enumerate() {
        inv_sum += 1.0 / gains[idx];
        let candidate = (pt + inv_sum) / (k + 1) as f64;
        if candidate > 1.0 / gains[idx] {
            level = candidate;
            active = k + 1;
        } else {
            break;
        }
    }
    for &idx in order.iter().take(active) {
        alloc[idx] = level - 1.0 / gains[idx];
    }
    alloc
}

/// Capacity of the unquantized channel with SVD precoding and
/// water-filling: `sum_i log2(1 + p_i sigma_i^2)`.
pub fn unquantized_waterfilling_capacity(h: &ComplexMatrix, pt: f64) -> f64 {
    let gains: Vec<f64> = singular_values(h)
        .singular_values
        .iter()
        .map(|&s| s * s)
        .collect();
    let alloc = waterfilling_allocation(&gains, pt.max(0.0));
    gains
        .iter()
        .zip(&alloc)
        .map(|(&g, &p)| (1.0 + p * g).log2())
        .sum()
}

/// Entropy of a probability `p` spread as `p/m` over `m` bins against the
/// remainder in one bin, the two extreme-point output entropies of the
/// lower-bound argument.
fn neg_p_log2(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Achievable-rate lower bound of the max-margin constellation with `M`
/// symbols, smallest margin `d_min`, and uniform probabilities:
/// `min(a1, a2) - 2 Nr Hb(Q(sqrt(2 d_min^2)))` where `a1`, `a2` are the
/// extreme-point output entropies under the constraint that every kept
/// pattern keeps probability at least `q/M`,
/// `q = (1 - Q(sqrt(2 d_min^2)))^{2Nr}`. Can be negative (vacuous) at low
/// SNR; the raw value is returned.
pub fn convexopt_lower_bound(inputs: &ConvexOptBoundInputs) -> f64 {
    let m = inputs.feasible_count as f64;
    let rails = 2.0 * inputs.nr as f64;
    let arg = (2.0 * inputs.d_min * inputs.d_min).sqrt();
    let flip = q_func(arg);
    let q = (1.0 - flip).powf(rails);
    let a1 = (m - 1.0) * neg_p_log2(q / m) + neg_p_log2(1.0 - (m - 1.0) * q / m);
    let a2 = if q <= 0.0 {
        0.0
    } else {
        -q * (q / m).log2() + neg_p_log2(1.0 - q)
    };
    a1.min(a2) - rails * hb(flip)
}

/// Check the margin upper bound `2 d_min^2 <= pt (min_i ||h_i||)^2` over
/// the receive rows (squared row norms for dimensional consistency).
pub fn dmin_upper_check(h: &ComplexMatrix, pt: f64, d_min: f64) -> bool {
    let min_row = (0..h.rows())
        .map(|i| h.row_norm(i))
        .fold(f64::INFINITY, f64::min);
    2.0 * d_min * d_min <= pt * min_row * min_row * (1.0 + 1e-9) + 1e-12
}
