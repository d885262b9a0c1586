//! Infinite-SNR capacity machinery: orthant counting for hyperplane
//! arrangements, the SIMO noiseless mutual information, and the rank and
//! mmWave bracket bounds.

use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Lower/upper bracket on an infinite-SNR capacity, with the exact value
/// when the bracket collapses.
#[derive(Debug, Clone, PartialEq)]
pub struct InfSnrBounds {
    pub lower_bits: f64,
    pub upper_bits: f64,
    pub exact_bits: Option<f64>,
}

/// Number of orthants of `2Nr`-dimensional space that a generic
/// `2Nt`-dimensional subspace intersects:
/// `K(Nr, Nt) = 2 sum_{k=0}^{2Nt-1} C(2Nr-1, k)`, exact in big integers.
/// This is the number of noiselessly distinguishable inputs.
pub fn orthant_count(nr: usize, nt: usize) -> BigUint {
    assert!(nr >= 1 && nt >= 1, "antenna counts must be at least 1");
    let n = 2 * nr - 1;
    let top = 2 * nt - 1;
    let mut total = BigUint::zero();
    let mut binom = BigUint::one(); // C(n, 0)
    for k in 0..=top.min(n) {
        if k > 0 {
            // C(n, k) = C(n, k-1) * (n-k+1) / k
            binom = binom * BigUint::from(n - k + 1) / BigUint::from(k);
        }
        total += &binom;
    }
    total * BigUint::from(2u8)
}

/// `log2 K(Nr, Nt)` with the big integer rounded through its top 53 bits.
pub fn orthant_count_log2(nr: usize, nt: usize) -> f64 {
    log2_biguint(&orthant_count(nr, nt))
}

pub(crate) fn log2_biguint(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        return value.to_f64().expect("small biguint fits f64").log2();
    }
    let shift = bits - 53;
    let top = (value >> shift).to_f64().expect("53-bit mantissa fits f64");
    top.log2() + shift as f64
}

/// Infinite-SNR capacity bracket of an Nr x Nt channel in general position:
/// `[log2 K, log2(K+1)]`, collapsing to `2 Nr` when `Nt >= Nr`. When a rank
/// is supplied, the rank-aware bracket `[2 rank, log2(K(Nr, rank) + 1)]`
/// applies instead, exact at `rank = Nr`.
pub fn mimo_inf_bounds(nr: usize, nt: usize, rank: Option<usize>) -> Result<InfSnrBounds> {
    if nr < 1 || nt < 1 {
        return Err(Error::Domain("antenna counts must be at least 1".into()));
    }
    match rank {
        None => {
            if nt >= nr {
                let exact = 2.0 * nr as f64;
                Ok(InfSnrBounds {
                    lower_bits: exact,
                    upper_bits: exact,
                    exact_bits: Some(exact),
                })
            } else {
                let k = orthant_count(nr, nt);
                Ok(InfSnrBounds {
                    lower_bits: log2_biguint(&k),
                    upper_bits: log2_biguint(&(k + BigUint::one())),
                    exact_bits: None,
                })
            }
        }
        Some(r) => {
            if r > nr.min(nt) {
                return Err(Error::Domain(format!(
                    "rank {r} exceeds min(Nr, Nt) = {}",
                    nr.min(nt)
                )));
            }
            if r == 0 {
                return Ok(InfSnrBounds {
                    lower_bits: 0.0,
                    upper_bits: 0.0,
                    exact_bits: Some(0.0),
                });
            }
            if r == nr {
                let exact = 2.0 * nr as f64;
                Ok(InfSnrBounds {
                    lower_bits: exact,
                    upper_bits: exact,
                    exact_bits: Some(exact),
                })
            } else {
                let k = orthant_count(nr, r);
                Ok(InfSnrBounds {
                    lower_bits: 2.0 * r as f64,
                    upper_bits: log2_biguint(&(k + BigUint::one())),
                    exact_bits: None,
                })
            }
        }
    }
}

/// Infinite-SNR capacity bracket of an mmWave channel with `paths` rays
/// (fewer than either antenna count): `[log2 K(Nr, L), log2(K(Nr, L)+1)]`.
pub fn mmwave_inf_bounds(nr: usize, paths: usize) -> InfSnrBounds {
    let k = orthant_count(nr, paths);
    InfSnrBounds {
        lower_bits: log2_biguint(&k),
        upper_bits: log2_biguint(&(k + BigUint::one())),
        exact_bits: None,
    }
}

/// Noiseless SIMO mutual information of the three-tier input split (zero
/// symbol with probability `p0`, threshold-phase symbols with `p1`, one
/// symbol per angular region with the rest), evaluated as printed:
///
/// ```text
/// f(p0, p1) = (-1 + p0 - p1 - p0 4Nr/4^Nr)
///               * log2((1 - p0 - p1)/(4Nr) + p0/4^Nr + p1)
///             - 2 p1 - (8 Nr^2 / 4^Nr) p0
///             - ((4^Nr - 4Nr)/4^Nr) p0 log2 p0
/// ```
pub fn simo_inf_mi(nr: usize, p0: f64, p1: f64) -> Result<f64> {
    if nr < 1 {
        return Err(Error::Domain("Nr must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) || p0 + p1 > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "probabilities p0 = {p0}, p1 = {p1} invalid"
        )));
    }
    let four_nr = 4.0 * nr as f64;
    let four_pow = 4.0_f64.powi(nr as i32);
    let arg = (1.0 - p0 - p1) / four_nr + p0 / four_pow + p1;
    let first = if arg > 0.0 {
        (-1.0 + p0 - p1 - p0 * four_nr / four_pow) * arg.log2()
    } else {
        0.0
    };
    let p0_term = if p0 > 0.0 { p0 * p0.log2() } else { 0.0 };
    Ok(first
        - 2.0 * p1
        - (8.0 * (nr * nr) as f64 / four_pow) * p0
        - ((four_pow - four_nr) / four_pow) * p0_term)
}

/// Infinite-SNR SIMO capacity: maximize `f(p0, 0)` over the zero-symbol
/// probability. Returns `(capacity_bits, p0_star)`.
///
/// A 1000-point grid scan locates the basin (guarding against
/// non-unimodality), golden-section refines it to 1e-10 in `p0`.
pub fn simo_inf_capacity(nr: usize) -> (f64, f64) {
    let f = |p0: f64| simo_inf_mi(nr, p0, 0.0).expect("p0 in range");
    let grid_n = 1000;
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    let values: Vec<f64> = (0..=grid_n)
        .map(|i| f(i as f64 / grid_n as f64))
        .collect();
    for (i, &v) in values.iter().enumerate() {
        if v > best_val {
            best_val = v;
            best_idx = i;
        }
    }
    let lo = if best_idx == 0 { 0 } else { best_idx - 1 } as f64 / grid_n as f64;
    let hi = best_idx.saturating_add(1).min(grid_n) as f64 / grid_n as f64;
    let (mut a, mut b) = (lo, hi);
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // Keep the best candidate seen, including the exact endpoints.
    let mut capacity = best_val;
    let mut p0_star = best_idx as f64 / grid_n as f64;
    for cand in [mid, a, b, 0.0, 1.0] {
        let v = f(cand);
        if v > capacity {
            capacity = v;
            p0_star = cand;
        }
    }
    (capacity, p0_star)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_receive_antenna_count() {
        for nt in 1..=8 {
            assert_eq!(orthant_count(1, nt), BigUint::from(4u8));
        }
    }

    #[test]
    fn single_transmit_antenna_count() {
        for nr in 1..=16 {
            assert_eq!(orthant_count(nr, 1), BigUint::from(4 * nr));
        }
    }

    #[test]
    fn known_small_counts() {
        assert_eq!(orthant_count(3, 2), BigUint::from(52u8));
        assert_eq!(orthant_count(2, 2), BigUint::from(16u8));
        assert_eq!(orthant_count(4, 2), BigUint::from(128u16));
        assert_eq!(orthant_count(4, 3), BigUint::from(240u16));
    }

    #[test]
    fn saturates_at_full_orthant_count() {
        for nr in 1..=12 {
            for nt in nr..=12 {
                assert_eq!(
                    orthant_count(nr, nt),
                    BigUint::one() << (2 * nr),
                    "K({nr},{nt})"
                );
            }
        }
    }

    #[test]
    fn nondecreasing_in_each_argument() {
        for nr in 1..=10 {
            for nt in 1..=10 {
                let k = orthant_count(nr, nt);
                assert!(orthant_count(nr + 1, nt) >= k);
                assert!(orthant_count(nr, nt + 1) >= k);
            }
        }
    }

    #[test]
    fn two_dimensional_line_arrangement() {
        // A single complex transmit dimension cuts the plane into 4 Nr
        // angular regions, matching the 2N regions of N lines through the
        // origin of the plane.
        for nr in 1..=16 {
            let lines = 2 * nr;
            assert_eq!(orthant_count(nr, 1), BigUint::from(2 * lines));
        }
    }

    #[test]
    fn log2_of_large_counts() {
        // K(64, 64) = 2^128: exact power of two through the shift path.
        assert_eq!(orthant_count_log2(64, 64), 128.0);
        assert!((orthant_count_log2(3, 2) - 52.0_f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn general_position_bounds() {
        let b = mimo_inf_bounds(2, 4, None).unwrap();
        assert_eq!(b.exact_bits, Some(4.0));
        let b = mimo_inf_bounds(3, 2, None).unwrap();
        assert!((b.lower_bits - 52.0_f64.log2()).abs() < 1e-12);
        assert!((b.upper_bits - 53.0_f64.log2()).abs() < 1e-12);
        assert!(b.exact_bits.is_none());
        assert!(b.lower_bits <= b.upper_bits);
    }

    #[test]
    fn rank_aware_bounds() {
        let b = mimo_inf_bounds(3, 2, Some(2)).unwrap();
        assert!((b.lower_bits - 4.0).abs() < 1e-12);
        assert!((b.upper_bits - 53.0_f64.log2()).abs() < 1e-12);
        let exact = mimo_inf_bounds(2, 2, Some(2)).unwrap();
        assert_eq!(exact.exact_bits, Some(4.0));
        assert!(mimo_inf_bounds(2, 2, Some(3)).is_err());
    }

    #[test]
    fn mmwave_bracket_values() {
        let b = mmwave_inf_bounds(4, 1);
        assert!((b.lower_bits - 4.0).abs() < 1e-12);
        assert!((b.upper_bits - 17.0_f64.log2()).abs() < 1e-12);
        assert!((mmwave_inf_bounds(4, 2).lower_bits - 7.0).abs() < 1e-12);
        assert!((mmwave_inf_bounds(4, 3).lower_bits - 240.0_f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn simo_mi_at_origin() {
        for nr in 1..=8 {
            let f00 = simo_inf_mi(nr, 0.0, 0.0).unwrap();
            assert!((f00 - (4.0 * nr as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn simo_mi_domain_checks() {
        assert!(simo_inf_mi(2, -0.1, 0.0).is_err());
        assert!(simo_inf_mi(2, 0.6, 0.6).is_err());
    }

    #[test]
    fn threshold_symbols_hurt() {
        // Numerical sign of the p1-derivative at interior points.
        for nr in [1usize, 2, 3, 6] {
            for &p0 in &[0.0, 0.05, 0.2] {
                for &p1 in &[0.05, 0.2, 0.4] {
                    let eps = 1e-6;
                    let up = simo_inf_mi(nr, p0, p1 + eps).unwrap();
                    let down = simo_inf_mi(nr, p0, p1 - eps).unwrap();
                    assert!(
                        (up - down) / (2.0 * eps) < 0.0,
                        "df/dp1 >= 0 at nr={nr}, p0={p0}, p1={p1}"
                    );
                }
            }
        }
    }

    #[test]
    fn near_reciprocal_mass_approximates_upper_bound() {
        // Putting mass 1/(4Nr+1) on the zero symbol approaches
        // log2(4Nr + 1); at Nr = 3 the finite-Nr corrections still leave a
        // visible but small gap.
        let value = simo_inf_mi(3, 1.0 / 13.0, 0.0).unwrap();
        assert!((value - 13.0f64.log2()).abs() < 0.15, "f(1/13, 0) = {value}");
    }

    #[test]
    fn simo_capacity_single_antenna() {
        let (capacity, p0) = simo_inf_capacity(1);
        assert!((capacity - 2.0).abs() < 1e-9);
        assert!(p0 < 1e-9);
    }

    #[test]
    fn simo_capacity_brackets() {
        for nr in 1..=64 {
            let (capacity, p0) = simo_inf_capacity(nr);
            let lower = (4.0 * nr as f64).log2();
            let upper = (4.0 * nr as f64 + 1.0).log2();
            assert!(
                capacity >= lower - 1e-9 && capacity <= upper + 1e-9,
                "Nr={nr}: {capacity} outside [{lower}, {upper}]"
            );
            assert!((0.0..=1.0).contains(&p0));
        }
    }

    #[test]
    fn simo_capacity_approaches_upper_bound() {
        for nr in 6..=32 {
            let (capacity, _) = simo_inf_capacity(nr);
            let upper = (4.0 * nr as f64 + 1.0).log2();
            assert!(
                upper - capacity < 0.01,
                "Nr={nr}: gap {}",
                upper - capacity
            );
        }
        // The near-optimal zero-symbol mass at large Nr.
        let (_, p0) = simo_inf_capacity(16);
        assert!((p0 - 1.0 / 65.0).abs() < 0.01, "p0 = {p0}");
    }
}
