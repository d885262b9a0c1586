//! Capacity analysis and constellation design for flat-fading MIMO channels
//! observed through one-bit analog-to-digital converters, with channel state
//! information at both ends.
//!
//! Each receive antenna feeds two one-bit quantizers (real and imaginary
//! rails), so the channel output alphabet is the finite set of sign patterns
//! in `{-1,+1}^{2Nr}`. The crate treats the quantized channel as a discrete
//! memoryless channel and provides:
//!
//! - closed-form capacities and bounds (SISO/MISO exact capacity, a
//!   finite-SNR upper bound, channel-inversion and quantization-noise-model
//!   lower bounds, unquantized waterfilling for reference),
//! - infinite-SNR capacity machinery built on orthant counting for
//!   hyperplane arrangements,
//! - max-margin transmit constellation design (one convex program per sign
//!   pattern, solved exactly through its minimum-norm-point dual) together
//!   with Blahut-Arimoto input-probability optimization,
//! - channel generation (fixed, IID Rayleigh, ray-based mmWave with uniform
//!   planar arrays) with reproducible seeding,
//! - a registry of interchangeable rate strategies used by the CLI sweeps.
//!
//! Throughout the crate the noise is normalized to unit variance per complex
//! dimension, so the transmit power budget `Pt` is the SNR in linear scale.

#![forbid(unsafe_code)]

pub mod channel;
pub mod closed_form;
pub mod design;
pub mod dmc;
pub mod inf_snr;
pub mod numerics;
pub mod rng;
pub mod strategy;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("output alphabet too large: {rails} rails exceeds cap of {cap}")]
    AlphabetTooLarge { rails: usize, cap: usize },

    #[error("infeasible sign pattern {0:#x}")]
    Infeasible(usize),

    #[error("no convergence after {iterations} iterations (best value {best})")]
    NoConvergence { iterations: usize, best: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use channel::{
    array_response, channel_from_json, channel_to_json, gen_channel, is_general_position,
    mmwave_from_paths, ChannelJson, ChannelModel, ChannelModelConfig, GeneratedChannel,
    MmwavePath, MmwavePathSet, UpaGeometry,
};
pub use closed_form::{
    aqnm_distortion, aqnm_rate, channel_inversion_rate, convexopt_lower_bound, dmin_upper_check,
    finite_snr_upper_bound, miso_capacity, miso_low_snr_expansion, qpsk_low_snr_rate,
    siso_capacity, siso_constellation, unquantized_waterfilling_capacity, waterfilling_allocation,
    ConvexOptBoundInputs, RatePoint,
};
pub use design::{
    blahut_arimoto, blahut_arimoto_cost_constrained, channel_inversion_constellation,
    design_constellation, feasibility_check, max_margin_symbol,
    mmwave_single_path_constellation, mrt_constellation, simo_grid_capacity, BaOptions, BaResult,
    DesignResult, DesignResultJson, MarginSolution, SimoGridResult, SinglePathDesign,
    DESIGN_RAIL_CAP, FEASIBILITY_TOL,
};
pub use dmc::{
    mutual_information, quantize, transition_matrix, transition_matrix_from_symbols,
    transition_prob, Constellation, QuantPattern, TransitionMatrix, MAX_RAILS,
};
pub use inf_snr::{
    mimo_inf_bounds, mmwave_inf_bounds, orthant_count, orthant_count_log2, simo_inf_capacity,
    simo_inf_mi, InfSnrBounds,
};
pub use numerics::matrix::{lift_vector, real_lift, unlift_vector, ComplexMatrix, RealMatrix};
pub use numerics::special::{binary_entropy, q_func};
pub use numerics::svd::{singular_values, SpectralData};
pub use strategy::{ChannelContext, RateStrategy, StrategyError, StrategyRegistry};
