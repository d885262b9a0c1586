//! Channel matrix generation: fixed matrices, IID Rayleigh, and the
//! ray-based mmWave model with uniform planar arrays.

use crate::numerics::matrix::{ComplexMatrix, RealMatrix};
use crate::numerics::svd::real_singular_values;
use crate::rng::Rng;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform planar array laid out as a Y x Z grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpaGeometry {
    pub y: usize,
    pub z: usize,
}

impl UpaGeometry {
    pub fn elements(&self) -> usize {
        self.y * self.z
    }
}

/// One propagation path of the ray-based mmWave model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MmwavePath {
    pub gain: Complex64,
    pub azimuth_tx: f64,
    pub elevation_tx: f64,
    pub azimuth_rx: f64,
    pub elevation_rx: f64,
}

/// The full path set of a generated mmWave channel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MmwavePathSet {
    pub paths: Vec<MmwavePath>,
}

/// Which channel model to draw from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    /// A fixed matrix, given in the JSON wire format below.
    Fixed { matrix: ChannelJson },
    /// Entries drawn independently from CN(0, 1).
    IidGaussian { nr: usize, nt: usize },
    /// Ray-based model with uniform planar arrays at both ends. Azimuths
    /// are uniform on [0, 2pi), elevations on [-pi/2, pi/2], gains CN(0,1).
    Mmwave {
        paths: usize,
        rx_array: UpaGeometry,
        tx_array: UpaGeometry,
        /// Inter-element spacing over wavelength; 0.5 unless stated.
        #[serde(default = "default_spacing")]
        spacing_over_wavelength: f64,
    },
}

fn default_spacing() -> f64 {
    0.5
}

/// A channel model plus the seed that makes the draw reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelModelConfig {
    pub model: ChannelModel,
    pub seed: u64,
}

impl ChannelModelConfig {
    pub fn dims(&self) -> (usize, usize) {
        match &self.model {
            ChannelModel::Fixed { matrix } => (matrix.nr, matrix.nt),
            ChannelModel::IidGaussian { nr, nt } => (*nr, *nt),
            ChannelModel::Mmwave {
                rx_array, tx_array, ..
            } => (rx_array.elements(), tx_array.elements()),
        }
    }

    fn validate(&self) -> Result<()> {
        let (nr, nt) = self.dims();
        if nr == 0 || nt == 0 {
            return Err(Error::Config("antenna counts must be at least 1".into()));
        }
        if let ChannelModel::Mmwave {
            paths,
            spacing_over_wavelength,
            ..
        } = &self.model
        {
            if *paths == 0 {
                return Err(Error::Config("mmwave path count must be at least 1".into()));
            }
            if !spacing_over_wavelength.is_finite() || *spacing_over_wavelength <= 0.0 {
                return Err(Error::Config("spacing_over_wavelength must be positive".into()));
            }
        }
        Ok(())
    }
}

/// JSON wire format for channel matrices:
/// `{"nr": .., "nt": .., "re": [[..]], "im": [[..]]}` with row-major nesting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub nr: usize,
    pub nt: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ChannelJson {
    pub fn from_matrix(h: &ComplexMatrix) -> Self {
        let re = (0..h.rows())
            .map(|i| h.row(i).iter().map(|z| z.re).collect())
            .collect();
        let im = (0..h.rows())
            .map(|i| h.row(i).iter().map(|z| z.im).collect())
            .collect();
        ChannelJson {
            nr: h.rows(),
            nt: h.cols(),
            re,
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.re.len() != self.nr || self.im.len() != self.nr {
            return Err(Error::Config("re/im row counts must equal nr".into()));
        }
        let mut data = Vec::with_capacity(self.nr * self.nt);
        for (re_row, im_row) in self.re.iter().zip(&self.im) {
            if re_row.len() != self.nt || im_row.len() != self.nt {
                return Err(Error::Config("re/im column counts must equal nt".into()));
            }
            data.extend(re_row.iter().zip(im_row).map(|(&a, &b)| Complex64::new(a, b)));
        }
        ComplexMatrix::new(self.nr, self.nt, data)
    }
}

/// Serialize a channel matrix to the JSON wire format.
pub fn channel_to_json(h: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&ChannelJson::from_matrix(h)).expect("channel serializes")
}

/// Parse a channel matrix from the JSON wire format.
pub fn channel_from_json(text: &str) -> Result<ComplexMatrix> {
    let parsed: ChannelJson =
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    parsed.to_matrix()
}

/// A generated channel; mmWave draws also report their path set.
#[derive(Debug, Clone)]
pub struct GeneratedChannel {
    pub matrix: ComplexMatrix,
    pub paths: Option<MmwavePathSet>,
}

/// UPA steering vector with entries
/// `(1/sqrt(YZ)) exp(j k (m sin(phi) sin(theta) + n cos(theta)))`
/// over the double loop `m in 0..Y`, `n in 0..Z` (index `m*Z + n`), where
/// `k = 2 pi d / lambda`. Unit norm by construction.
pub fn array_response(phi: f64, theta: f64, y: usize, z: usize, k: f64) -> Vec<Complex64> {
    assert!(y >= 1 && z >= 1, "array dimensions must be at least 1");
    let norm = 1.0 / ((y * z) as f64).sqrt();
    let mut out = Vec::with_capacity(y * z);
    for m in 0..y {
        for n in 0..z {
            let phase = k * (m as f64 * phi.sin() * theta.sin() + n as f64 * theta.cos());
            out.push(Complex64::from_polar(norm, phase));
        }
    }
    out
}

/// Build the mmWave channel `H = sum_l alpha_l a_r a_t*` from an explicit
/// path set.
pub fn mmwave_from_paths(
    paths: &MmwavePathSet,
    rx_array: UpaGeometry,
    tx_array: UpaGeometry,
    k: f64,
) -> ComplexMatrix {
    let nr = rx_array.elements();
    let nt = tx_array.elements();
    let mut h = ComplexMatrix::zeros(nr, nt);
    for path in &paths.paths {
        let ar = array_response(path.azimuth_rx, path.elevation_rx, rx_array.y, rx_array.z, k);
        let at = array_response(path.azimuth_tx, path.elevation_tx, tx_array.y, tx_array.z, k);
        for (i, &ari) in ar.iter().enumerate() {
            for (j, &atj) in at.iter().enumerate() {
                let v = h.get(i, j) + path.gain * ari * atj.conj();
                h.set(i, j, v);
            }
        }
    }
    h
}

/// Draw a channel. Deterministic given the config seed.
///
/// Draw order is fixed: IID Gaussian entries are drawn row-major; mmWave
/// paths draw gain, then tx azimuth/elevation, then rx azimuth/elevation,
/// one path at a time.
pub fn gen_channel(config: &ChannelModelConfig) -> Result<GeneratedChannel> {
    config.validate()?;
    match &config.model {
        ChannelModel::Fixed { matrix } => Ok(GeneratedChannel {
            matrix: matrix.to_matrix()?,
            paths: None,
        }),
        ChannelModel::IidGaussian { nr, nt } => {
            let mut rng = Rng::new(config.seed);
            let data = (0..nr * nt).map(|_| rng.complex_gaussian()).collect();
            Ok(GeneratedChannel {
                matrix: ComplexMatrix::new(*nr, *nt, data)?,
                paths: None,
            })
        }
        ChannelModel::Mmwave {
            paths,
            rx_array,
            tx_array,
            spacing_over_wavelength,
        } => {
            let mut rng = Rng::new(config.seed);
            let k = 2.0 * PI * spacing_over_wavelength;
            let drawn: Vec<MmwavePath> = (0..*paths)
                .map(|_| {
                    let gain = rng.complex_gaussian();
                    let azimuth_tx = rng.uniform_in(0.0, 2.0 * PI);
                    let elevation_tx = rng.uniform_in(-PI / 2.0, PI / 2.0);
                    let azimuth_rx = rng.uniform_in(0.0, 2.0 * PI);
                    let elevation_rx = rng.uniform_in(-PI / 2.0, PI / 2.0);
                    MmwavePath {
                        gain,
                        azimuth_tx,
                        elevation_tx,
                        azimuth_rx,
                        elevation_rx,
                    }
                })
                .collect();
            let set = MmwavePathSet { paths: drawn };
            let matrix = mmwave_from_paths(&set, *rx_array, *tx_array, k);
            Ok(GeneratedChannel {
                matrix,
                paths: Some(set),
            })
        }
    }
}

/// Exhaustive subset enumeration is combinatorial; above this many rows the
/// general-position check samples 500 random subsets instead.
const EXACT_GP_ROW_CAP: usize = 16;

/// Advance `subset` to the next k-combination of `{0, .., n-1}` in
/// lexicographic order; false once the last combination is reached.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] != i + n - k {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Whether the rows of `hhat` are in general position: every square
/// submatrix built from `cols`-many rows has `|det| > tol * prod(row norms)`.
/// With `rows <= cols` this reduces to a full-row-rank test. The randomized
/// fallback above 16 rows uses a fixed internal seed, so the function stays
/// deterministic.
pub fn is_general_position(hhat: &RealMatrix, tol: f64) -> bool {
    let rows = hhat.rows();
    let cols = hhat.cols();
    if rows == 0 || cols == 0 {
        return false;
    }
    let row_norms: Vec<f64> = (0..rows)
        .map(|i| hhat.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if row_norms.contains(&0.0) {
        return false;
    }

    if rows <= cols {
        // Full row rank: smallest singular value against the row scale.
        let sv = real_singular_values(hhat);
        let scale: f64 = row_norms.iter().fold(0.0_f64, |a, &b| a.max(b));
        return sv[rows - 1] > tol * scale;
    }

    let check_subset = |subset: &[usize]| -> bool {
        let mut sub = RealMatrix::zeros(cols, cols);
        for (r, &idx) in subset.iter().enumerate() {
            for c in 0..cols {
                sub.set(r, c, hhat.get(idx, c));
            }
        }
        let scale: f64 = subset.iter().map(|&i| row_norms[i]).product();
        sub.determinant().abs() > tol * scale
    };

    if rows <= EXACT_GP_ROW_CAP {
        let mut subset: Vec<usize> = (0..cols).collect();
        loop {
            if !check_subset(&subset) {
                return false;
            }
            if !next_combination(&mut subset, rows) {
                return true;
            }
        }
    } else {
        let mut rng = Rng::new(0x006f_7274_6861_6e74);
        for _ in 0..500 {
            let mut pool: Vec<usize> = (0..rows).collect();
            let mut subset = Vec::with_capacity(cols);
            for drawn in 0..cols {
                let pick = drawn + (rng.next_u64() as usize) % (rows - drawn);
                pool.swap(drawn, pick);
                subset.push(pool[drawn]);
            }
            subset.sort_unstable();
            if !check_subset(&subset) {
                return false;
            }
        }
        true
    }
}
