//! Transmit constellation construction: one max-margin symbol per feasible
//! sign pattern, channel-inversion and beamforming constructions, and the
//! grid-plus-Blahut-Arimoto capacity optimizer for SIMO channels.

mod ba;
mod margin;

pub use ba::{blahut_arimoto, blahut_arimoto_cost_constrained, BaOptions, BaResult};
pub use margin::{feasibility_check, max_margin_symbol, MarginSolution, FEASIBILITY_TOL};

use crate::channel::{array_response, MmwavePath, UpaGeometry};
use crate::closed_form::miso_capacity;
use crate::dmc::{transition_matrix_from_symbols, Constellation, QuantPattern};
use crate::numerics::matrix::{real_lift, unlift_vector, ComplexMatrix};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

/// Enumeration cap on quantizer rails for full-pattern design (2^20
/// convex solves at most).
pub const DESIGN_RAIL_CAP: usize = 20;

/// A designed constellation: one max-margin symbol per feasible pattern
/// (the zero symbol is excluded), uniform probabilities by default.
#[derive(Debug, Clone)]
pub struct DesignResult {
    pub constellation: Constellation,
    /// Kept patterns, in pattern-index order.
    pub patterns: Vec<QuantPattern>,
    /// Margin attained by each kept pattern, same order.
    pub margins: Vec<f64>,
    /// Smallest kept margin.
    pub d_min: f64,
}

impl DesignResult {
    /// Number of kept patterns (the constellation size M).
    pub fn feasible_count(&self) -> usize {
        self.patterns.len()
    }

    /// The same design rescaled to another power budget; patterns are
    /// scale-invariant and margins scale as sqrt(pt).
    pub fn scaled_to(&self, pt: f64) -> Result<DesignResult> {
        if !pt.is_finite() || pt <= 0.0 {
            return Err(Error::Domain("power budget must be positive".into()));
        }
        let ratio = (pt / self.constellation.power_budget).sqrt();
        let symbols = self
            .constellation
            .symbols
            .iter()
            .map(|s| s.iter().map(|&z| z * ratio).collect())
            .collect();
        let constellation = Constellation::new(symbols, self.constellation.probs.clone(), pt)?;
        Ok(DesignResult {
            constellation,
            patterns: self.patterns.clone(),
            margins: self.margins.iter().map(|&d| d * ratio).collect(),
            d_min: self.d_min * ratio,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DesignResultJson::from(self)).expect("design serializes")
    }
}

/// JSON wire format of a design result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignResultJson {
    pub symbols_re: Vec<Vec<f64>>,
    pub symbols_im: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
    pub margins: Vec<f64>,
    pub m: usize,
    pub d_min: f64,
}

impl From<&DesignResult> for DesignResultJson {
    fn from(d: &DesignResult) -> Self {
        DesignResultJson {
            symbols_re: d
                .constellation
                .symbols
                .iter()
                .map(|s| s.iter().map(|z| z.re).collect())
                .collect(),
            symbols_im: d
                .constellation
                .symbols
                .iter()
                .map(|s| s.iter().map(|z| z.im).collect())
                .collect(),
            probabilities: d.constellation.probs.clone(),
            margins: d.margins.clone(),
            m: d.feasible_count(),
            d_min: d.d_min,
        }
    }
}

/// Enumerate all `2^{2Nr}` sign patterns, keep the feasible ones with their
/// max-margin symbols at power `pt`, and assign uniform probabilities
/// `1/M` over the kept set.
///
/// Patterns are solved in index order; the margin problem is solved once at
/// unit power and scaled, which is exact by homogeneity.
pub fn design_constellation(h: &ComplexMatrix, pt: f64) -> Result<DesignResult> {
    if !pt.is_finite() || pt <= 0.0 {
        return Err(Error::Domain("power budget must be positive".into()));
    }
    let rails = 2 * h.rows();
    if rails > DESIGN_RAIL_CAP {
        return Err(Error::AlphabetTooLarge {
            rails,
            cap: DESIGN_RAIL_CAP,
        });
    }
    let hhat = real_lift(h);
    let amp = pt.sqrt();
    let mut patterns = Vec::new();
    let mut margins = Vec::new();
    let mut symbols: Vec<Vec<Complex64>> = Vec::new();
    for index in 0..(1usize << rails) {
        let pattern = QuantPattern::from_index(index, rails);
        let (d_unit, direction) = margin::unit_margin(&hhat, &pattern)?;
        if d_unit <= FEASIBILITY_TOL {
            continue;
        }
        let direction = direction.expect("positive margin implies a direction");
        let x_hat: Vec<f64> = direction.iter().map(|&v| amp * v).collect();
        symbols.push(unlift_vector(&x_hat));
        margins.push(amp * d_unit);
        patterns.push(pattern);
    }
    if patterns.is_empty() {
        return Err(Error::Infeasible(0));
    }
    let d_min = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let constellation = Constellation::uniform(symbols, pt)?;
    Ok(DesignResult {
        constellation,
        patterns,
        margins,
        d_min,
    })
}

/// Beamforming (maximum ratio transmission) QPSK constellation for the
/// MISO channel `y = h* x + n`. Errors on the zero channel.
pub fn mrt_constellation(h: &[Complex64], pt: f64) -> Result<Constellation> {
    let constellation = miso_capacity(h, pt).1;
    if constellation.is_empty() {
        return Err(Error::Domain("MRT needs a nonzero channel".into()));
    }
    Ok(constellation)
}

/// Channel-inversion constellation
/// `x = sqrt(pt / tr((H H*)^-1)) H* (H H*)^-1 s` over all `4^{Nr}`
/// independent-QPSK vectors `s`, uniform probabilities, average power
/// exactly `pt`. Errors when `H H*` is singular.
pub fn channel_inversion_constellation(h: &ComplexMatrix, pt: f64) -> Result<Constellation> {
    if !pt.is_finite() || pt <= 0.0 {
        return Err(Error::Domain("power budget must be positive".into()));
    }
    let rails = 2 * h.rows();
    if rails > DESIGN_RAIL_CAP {
        return Err(Error::AlphabetTooLarge {
            rails,
            cap: DESIGN_RAIL_CAP,
        });
    }
    let gram_inv = h.gram().inverse()?;
    let precoder = h.hermitian().matmul(&gram_inv)?;
    let trace_inv = gram_inv.trace().re;
    let gain = (pt / trace_inv).sqrt();
    let nr = h.rows();
    let qpsk: Vec<Complex64> = (0..4)
        .map(|k| Complex64::from_polar(1.0, FRAC_PI_4 + k as f64 * PI / 2.0))
        .collect();
    let count = 1usize << rails;
    let mut symbols = Vec::with_capacity(count);
    for code in 0..count {
        let s: Vec<Complex64> = (0..nr).map(|i| qpsk[(code >> (2 * i)) & 3]).collect();
        let x: Vec<Complex64> = precoder.matvec(&s).iter().map(|&v| v * gain).collect();
        symbols.push(x);
    }
    Constellation::uniform(symbols, pt)
}

/// Result of the SIMO grid capacity search.
#[derive(Debug, Clone)]
pub struct SimoGridResult {
    pub capacity_bits: f64,
    /// Grid points that carry probability mass, renormalized.
    pub support: Constellation,
    pub converged: bool,
}

/// Capacity estimate of a SIMO channel at power `pt` by probability
/// optimization over a discrete input set: a `grid_n x grid_n` grid on
/// `[-3 sqrt(pt), 3 sqrt(pt)]^2`, augmented with the exact origin and with
/// power-circle points at the threshold phases `k pi/2 - arg(h_i)` and at
/// the bisectors between them (where the max-margin inputs live).
///
/// The probabilities are optimized by cost-constrained Blahut-Arimoto so
/// the average transmit power meets the budget.
pub fn simo_grid_capacity(h: &[Complex64], pt: f64, grid_n: usize) -> Result<SimoGridResult> {
    if grid_n < 8 {
        return Err(Error::Config("grid_n must be at least 8".into()));
    }
    if h.is_empty() || h.iter().all(|&z| z == Complex64::ZERO) {
        return Err(Error::Domain("SIMO channel must be nonzero".into()));
    }
    if !pt.is_finite() || pt <= 0.0 {
        return Err(Error::Domain("power budget must be positive".into()));
    }
    let amp = pt.sqrt();
    let mut candidates: Vec<Complex64> = Vec::with_capacity(grid_n * grid_n + 8 * h.len() + 1);
    for i in 0..grid_n {
        let re = -3.0 * amp + 6.0 * amp * i as f64 / (grid_n - 1) as f64;
        for j in 0..grid_n {
            let im = -3.0 * amp + 6.0 * amp * j as f64 / (grid_n - 1) as f64;
            candidates.push(Complex64::new(re, im));
        }
    }
    candidates.push(Complex64::ZERO);

    // Threshold phases and their bisectors on the power circle.
    let mut phases: Vec<f64> = Vec::with_capacity(4 * h.len());
    for hi in h {
        if *hi == Complex64::ZERO {
            continue;
        }
        for k in 0..4 {
            phases.push((k as f64 * PI / 2.0 - hi.arg()).rem_euclid(2.0 * PI));
        }
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    phases.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if phases.len() > 1 && (phases[phases.len() - 1] - phases[0] - 2.0 * PI).abs() < 1e-12 {
        phases.pop();
    }
    let n_phases = phases.len();
    for i in 0..n_phases {
        let current = phases[i];
        let next = if i + 1 < n_phases {
            phases[i + 1]
        } else {
            phases[0] + 2.0 * PI
        };
        candidates.push(Complex64::from_polar(amp, current));
        candidates.push(Complex64::from_polar(amp, 0.5 * (current + next)));
    }

    let channel = ComplexMatrix::simo_column(h);
    let symbols: Vec<Vec<Complex64>> = candidates.iter().map(|&c| vec![c]).collect();
    let t = transition_matrix_from_symbols(&channel, &symbols)?;
    let costs: Vec<f64> = candidates.iter().map(|c| c.norm_sqr()).collect();
    // Leave headroom under the budget so pruning low-probability points and
    // renormalizing cannot push the support past it.
    let ba = blahut_arimoto_cost_constrained(&t, &costs, pt * (1.0 - 1e-6), &BaOptions::default())?;

    let mut kept_symbols = Vec::new();
    let mut kept_probs = Vec::new();
    for (i, &p) in ba.probs.iter().enumerate() {
        if p > 1e-11 {
            kept_symbols.push(vec![candidates[i]]);
            kept_probs.push(p);
        }
    }
    let total: f64 = kept_probs.iter().sum();
    for p in &mut kept_probs {
        *p /= total;
    }
    let support = Constellation::new(kept_symbols, kept_probs, pt)?;
    Ok(SimoGridResult {
        capacity_bits: ba.capacity_bits,
        support,
        converged: ba.converged,
    })
}

/// Constellation for a single-path mmWave channel
/// `H = alpha a_r a_t*`: beamform along `a_t`, reduce to the SIMO channel
/// `h = alpha ||a_t||^2 a_r`, and modulate with the grid-optimized scalar
/// symbols.
#[derive(Debug, Clone)]
pub struct SinglePathDesign {
    pub constellation: Constellation,
    pub equivalent_simo: Vec<Complex64>,
    pub capacity_bits: f64,
}

pub fn mmwave_single_path_constellation(
    path: &MmwavePath,
    rx_array: UpaGeometry,
    tx_array: UpaGeometry,
    wavenumber_spacing: f64,
    pt: f64,
    grid_n: usize,
) -> Result<SinglePathDesign> {
    let at = array_response(
        path.azimuth_tx,
        path.elevation_tx,
        tx_array.y,
        tx_array.z,
        wavenumber_spacing,
    );
    let ar = array_response(
        path.azimuth_rx,
        path.elevation_rx,
        rx_array.y,
        rx_array.z,
        wavenumber_spacing,
    );
    let at_norm_sq: f64 = at.iter().map(|z| z.norm_sqr()).sum();
    let equivalent: Vec<Complex64> = ar.iter().map(|&a| path.gain * at_norm_sq * a).collect();
    let grid = simo_grid_capacity(&equivalent, pt, grid_n)?;
    let symbols: Vec<Vec<Complex64>> = grid
        .support
        .symbols
        .iter()
        .map(|s| at.iter().map(|&a| a * s[0]).collect())
        .collect();
    let constellation = Constellation::new(symbols, grid.support.probs.clone(), pt)?;
    Ok(SinglePathDesign {
        constellation,
        equivalent_simo: equivalent,
        capacity_bits: grid.capacity_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{convexopt_lower_bound, dmin_upper_check, siso_capacity, ConvexOptBoundInputs};
    use crate::dmc::{mutual_information, quantize, transition_matrix};
    use crate::inf_snr::orthant_count;
    use crate::rng::Rng;
    use num_traits::ToPrimitive;

    fn random_channel(rng: &mut Rng, nr: usize, nt: usize) -> ComplexMatrix {
        let data = (0..nr * nt).map(|_| rng.complex_gaussian()).collect();
        ComplexMatrix::new(nr, nt, data).unwrap()
    }

    #[test]
    fn miso_design_has_four_symbols_reaching_two_bits() {
        let mut rng = Rng::new(139);
        let h = random_channel(&mut rng, 1, 3);
        let design = design_constellation(&h, 1e6).unwrap();
        assert_eq!(design.feasible_count(), 4);
        let t = transition_matrix(&h, &design.constellation).unwrap();
        let mi = mutual_information(&t, &design.constellation.probs).unwrap();
        assert!((mi - 2.0).abs() < 1e-6, "MI {mi}");
    }

    #[test]
    fn design_counts_match_orthant_function() {
        for &(nr, nt) in &[(2usize, 1usize), (2, 2), (3, 2), (2, 4)] {
            let expected = orthant_count(nr, nt).to_usize().unwrap();
            for seed in 0..3 {
                let mut rng = Rng::new(seed + 211);
                let h = random_channel(&mut rng, nr, nt);
                let design = design_constellation(&h, 1.0).unwrap();
                assert_eq!(design.feasible_count(), expected, "{nr}x{nt} seed {seed}");
            }
        }
    }

    #[test]
    fn noiseless_decoding_consistency() {
        let mut rng = Rng::new(149);
        let h = random_channel(&mut rng, 2, 2);
        let design = design_constellation(&h, 4.0).unwrap();
        for (symbol, pattern) in design.constellation.symbols.iter().zip(&design.patterns) {
            assert_eq!(&quantize(&h.matvec(symbol)), pattern);
        }
    }

    #[test]
    fn design_scales_homogeneously() {
        let mut rng = Rng::new(151);
        let h = random_channel(&mut rng, 2, 3);
        let base = design_constellation(&h, 1.0).unwrap();
        let scaled = design_constellation(&h, 4.0).unwrap();
        assert_eq!(base.patterns, scaled.patterns);
        for (a, b) in base.margins.iter().zip(&scaled.margins) {
            assert!((b / a - 2.0).abs() < 1e-6);
        }
        let rescaled = base.scaled_to(4.0).unwrap();
        assert!((rescaled.d_min - scaled.d_min).abs() < 1e-9);
    }

    #[test]
    fn design_margins_satisfy_dmin_bound() {
        let mut rng = Rng::new(157);
        for _ in 0..50 {
            let h = random_channel(&mut rng, 2, 2);
            let pt = rng.uniform_in(0.5, 50.0);
            let design = design_constellation(&h, pt).unwrap();
            assert!(dmin_upper_check(&h, pt, design.d_min));
        }
    }

    #[test]
    fn lower_bound_below_exact_mi() {
        let mut rng = Rng::new(163);
        let h = random_channel(&mut rng, 2, 2);
        for &pt in &[0.5, 2.0, 10.0, 100.0, 1e4] {
            let design = design_constellation(&h, pt).unwrap();
            let t = transition_matrix(&h, &design.constellation).unwrap();
            let mi = mutual_information(&t, &design.constellation.probs).unwrap();
            let bound = convexopt_lower_bound(&ConvexOptBoundInputs {
                feasible_count: design.feasible_count(),
                d_min: design.d_min,
                nr: h.rows(),
            });
            assert!(bound <= mi + 1e-9, "pt {pt}: bound {bound} > MI {mi}");
        }
    }

    #[test]
    fn channel_inversion_power_and_rails() {
        let mut rng = Rng::new(167);
        let h = random_channel(&mut rng, 2, 4);
        let pt = 7.0;
        let c = channel_inversion_constellation(&h, pt).unwrap();
        assert_eq!(c.len(), 16);
        assert!((c.average_power() - pt).abs() < 1e-9 * pt);
        // Noiseless receive points are scaled QPSK in every entry.
        let gain = (pt
            / h.gram()
                .inverse()
                .unwrap()
                .trace()
                .re)
            .sqrt();
        for symbol in &c.symbols {
            let y = h.matvec(symbol);
            for v in y {
                assert!((v.norm() - gain).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn channel_inversion_matches_closed_form_rate() {
        use crate::closed_form::channel_inversion_rate;
        let mut rng = Rng::new(173);
        let h = random_channel(&mut rng, 2, 4);
        for &pt in &[0.5, 2.0, 8.0] {
            let rate = channel_inversion_rate(&h, pt).unwrap();
            if rate < 1.9 * 2.0 {
                let c = channel_inversion_constellation(&h, pt).unwrap();
                let t = transition_matrix(&h, &c).unwrap();
                let mi = mutual_information(&t, &c.probs).unwrap();
                assert!((mi - rate).abs() < 1e-6, "pt {pt}: {mi} vs {rate}");
            }
        }
    }

    #[test]
    fn mrt_symbols_have_full_power() {
        let mut rng = Rng::new(179);
        let h: Vec<Complex64> = (0..4).map(|_| rng.complex_gaussian()).collect();
        let pt = 3.0;
        let c = mrt_constellation(&h, pt).unwrap();
        assert_eq!(c.len(), 4);
        for symbol in &c.symbols {
            let power: f64 = symbol.iter().map(|z| z.norm_sqr()).sum();
            assert!((power - pt).abs() < 1e-9);
        }
        assert!(mrt_constellation(&[Complex64::ZERO], pt).is_err());
    }

    #[test]
    fn siso_grid_matches_closed_form() {
        let h = vec![Complex64::ONE];
        let pt = 10.0;
        let grid = simo_grid_capacity(&h, pt, 16).unwrap();
        let exact = siso_capacity(Complex64::ONE, pt);
        assert!(
            (grid.capacity_bits - exact).abs() < 0.01,
            "grid {} vs exact {exact}",
            grid.capacity_bits
        );
        assert!(grid.support.average_power() <= pt * (1.0 + 1e-9));
    }

    #[test]
    fn symmetric_two_antenna_support_is_rotated_8psk_with_zero() {
        let h = vec![
            Complex64::from_polar(1.0, PI / 8.0),
            Complex64::from_polar(1.0, -PI / 8.0),
        ];
        let pt = 10.0;
        let grid = simo_grid_capacity(&h, pt, 48).unwrap();
        assert!(
            (grid.capacity_bits - 2.52).abs() < 0.04,
            "capacity {}",
            grid.capacity_bits
        );
        // Mass at the origin plus eight angular clusters on the circle.
        let mut origin_mass = 0.0;
        let mut angles = Vec::new();
        for (s, &p) in grid.support.symbols.iter().zip(&grid.support.probs) {
            if p < 0.005 {
                continue;
            }
            if s[0].norm() < 0.1 * pt.sqrt() {
                origin_mass += p;
            } else {
                angles.push(s[0].arg().rem_euclid(2.0 * PI));
            }
        }
        assert!(origin_mass > 0.01, "origin mass {origin_mass}");
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut clusters = 1;
        for w in angles.windows(2) {
            if w[1] - w[0] > PI / 8.0 {
                clusters += 1;
            }
        }
        assert_eq!(clusters, 8, "angles {angles:?}");
    }

    #[test]
    fn single_path_design_power_and_dims() {
        let path = MmwavePath {
            gain: Complex64::new(0.9, -0.3),
            azimuth_tx: 1.1,
            elevation_tx: 0.4,
            azimuth_rx: 4.0,
            elevation_rx: -0.7,
        };
        let design = mmwave_single_path_constellation(
            &path,
            UpaGeometry { y: 2, z: 2 },
            UpaGeometry { y: 4, z: 4 },
            PI,
            25.0,
            32,
        )
        .unwrap();
        assert_eq!(design.equivalent_simo.len(), 4);
        assert!(design.constellation.average_power() <= 25.0 * (1.0 + 1e-9));
        assert_eq!(design.constellation.symbols[0].len(), 16);
        assert!(design.capacity_bits > 0.0);
    }

    #[test]
    fn single_path_large_array_saturates_near_four_bits() {
        // 4x256 channel through one path: beamforming reduces it to a
        // four-antenna SIMO link, whose noiseless rate sits between 4 bits
        // (power circle only) and log2(17) (with the zero symbol).
        let path = MmwavePath {
            gain: Complex64::new(-0.4, 1.1),
            azimuth_tx: 2.7,
            elevation_tx: -0.2,
            azimuth_rx: 0.8,
            elevation_rx: 0.9,
        };
        let design = mmwave_single_path_constellation(
            &path,
            UpaGeometry { y: 2, z: 2 },
            UpaGeometry { y: 16, z: 16 },
            PI,
            1e8,
            16,
        )
        .unwrap();
        assert_eq!(design.constellation.symbols[0].len(), 256);
        assert!(
            design.capacity_bits >= 3.95 && design.capacity_bits <= 17f64.log2() + 0.02,
            "capacity {}",
            design.capacity_bits
        );
    }

    #[test]
    fn rail_cap_enforced() {
        let h = ComplexMatrix::zeros(11, 1);
        assert!(matches!(
            design_constellation(&h, 1.0),
            Err(Error::AlphabetTooLarge { .. })
        ));
    }
}
