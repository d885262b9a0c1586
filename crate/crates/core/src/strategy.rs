//! Rate strategies behind a common trait, registered by name and selected
//! at runtime by the sweep driver.
//!
//! Every strategy evaluates an achievable rate or bound for one channel at
//! one power level. Per-channel work that several strategies share (the
//! singular values, the max-margin design, the transition matrix at the
//! current power) is cached in a [`ChannelContext`] that lives for one
//! channel draw on one thread.

use crate::closed_form::{
    aqnm_rate, convexopt_lower_bound, qpsk_low_snr_rate, waterfilling_allocation,
    ConvexOptBoundInputs,
};
use crate::design::{blahut_arimoto, design_constellation, BaOptions, DesignResult};
use crate::dmc::{mutual_information, transition_matrix, TransitionMatrix};
use crate::numerics::matrix::ComplexMatrix;
use crate::numerics::special::{hb, q_func};
use crate::numerics::svd::{singular_values, SpectralData};
use crate::Error;
use std::cell::{OnceCell, RefCell};
use std::rc::Rc;

/// Why a strategy produced no rate for a channel.
#[derive(Debug, Clone, thiserror::Error)]
pub enum StrategyError {
    /// The strategy does not apply to this channel (e.g. channel inversion
    /// on a rank-deficient channel). Sweeps report these as skipped.
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// A real computation failure.
    #[error(transparent)]
    Compute(#[from] Error),
}

pub type StrategyResult = std::result::Result<f64, StrategyError>;

/// Per-channel evaluation context with lazily shared intermediates.
pub struct ChannelContext {
    h: ComplexMatrix,
    spectral: OnceCell<SpectralData>,
    unit_design: OnceCell<Result<Rc<DesignResult>, Error>>,
    transition: RefCell<Option<(u64, Rc<TransitionMatrix>)>>,
}

impl ChannelContext {
    pub fn new(h: ComplexMatrix) -> Self {
        ChannelContext {
            h,
            spectral: OnceCell::new(),
            unit_design: OnceCell::new(),
            transition: RefCell::new(None),
        }
    }

    pub fn channel(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn spectral(&self) -> &SpectralData {
        self.spectral.get_or_init(|| singular_values(&self.h))
    }

    /// The max-margin design at unit power; scaled on demand since the
    /// program is homogeneous in the power budget.
    pub fn unit_design(&self) -> Result<Rc<DesignResult>, StrategyError> {
        let cached = self
            .unit_design
            .get_or_init(|| design_constellation(&self.h, 1.0).map(Rc::new));
        match cached {
            Ok(design) => Ok(Rc::clone(design)),
            Err(Error::AlphabetTooLarge { rails, cap }) => Err(StrategyError::NotApplicable(
                format!("pattern enumeration needs {rails} rails, cap is {cap}"),
            )),
            Err(other) => Err(StrategyError::Compute(other.clone())),
        }
    }

    /// Transition matrix of the designed constellation at power `pt`,
    /// cached for the most recent power level so strategies sharing a sweep
    /// point reuse it.
    pub fn design_transition(&self, pt: f64) -> Result<Rc<TransitionMatrix>, StrategyError> {
        let key = pt.to_bits();
        if let Some((cached_key, cached)) = self.transition.borrow().as_ref() {
            if *cached_key == key {
                return Ok(Rc::clone(cached));
            }
        }
        let design = self.unit_design()?.scaled_to(pt)?;
        let t = Rc::new(transition_matrix(&self.h, &design.constellation)?);
        *self.transition.borrow_mut() = Some((key, Rc::clone(&t)));
        Ok(t)
    }
}

/// One interchangeable rate evaluator.
pub trait RateStrategy: Send + Sync {
    /// Registry key, also the label used in CSV output.
    fn name(&self) -> &'static str;
    /// Achievable rate or bound in bits at linear SNR `pt`.
    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult;
}

struct UpperBound;

impl RateStrategy for UpperBound {
    fn name(&self) -> &'static str {
        "upper_bound"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        let sigma_max = ctx.spectral().sigma_max();
        let nr = ctx.channel().rows() as f64;
        Ok(2.0 * nr * (1.0 - hb(q_func((pt * sigma_max * sigma_max / nr).sqrt()))))
    }
}

struct ChannelInversion;

impl RateStrategy for ChannelInversion {
    fn name(&self) -> &'static str {
        "channel_inversion"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        let spectral = ctx.spectral();
        let nr = ctx.channel().rows();
        if spectral.rank < nr {
            return Err(StrategyError::NotApplicable(format!(
                "channel rank {} below receive count {nr}",
                spectral.rank
            )));
        }
        let trace_inv: f64 = spectral
            .singular_values
            .iter()
            .map(|&s| 1.0 / (s * s))
            .sum();
        Ok(2.0 * nr as f64 * (1.0 - hb(q_func((pt / trace_inv).sqrt()))))
    }
}

struct ConvexOpt;

impl RateStrategy for ConvexOpt {
    fn name(&self) -> &'static str {
        "convex_opt"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        let t = ctx.design_transition(pt)?;
        let design = ctx.unit_design()?;
        Ok(mutual_information(&t, &design.constellation.probs)?)
    }
}

struct ConvexOptBa;

impl RateStrategy for ConvexOptBa {
    fn name(&self) -> &'static str {
        "convex_opt_ba"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        let t = ctx.design_transition(pt)?;
        let result = blahut_arimoto(&t, &BaOptions::default())?;
        Ok(result.capacity_bits)
    }
}

struct ConvexOptLowerBound;

impl RateStrategy for ConvexOptLowerBound {
    fn name(&self) -> &'static str {
        "convex_opt_lower_bound"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        let design = ctx.unit_design()?;
        Ok(convexopt_lower_bound(&ConvexOptBoundInputs {
            feasible_count: design.feasible_count(),
            d_min: design.d_min * pt.sqrt(),
            nr: ctx.channel().rows(),
        }))
    }
}

struct Aqnm;

impl RateStrategy for Aqnm {
    fn name(&self) -> &'static str {
        "aqnm"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        Ok(aqnm_rate(ctx.channel(), pt))
    }
}

struct QpskLowSnr;

impl RateStrategy for QpskLowSnr {
    fn name(&self) -> &'static str {
        "qpsk_low_snr"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        Ok(qpsk_low_snr_rate(ctx.channel(), pt))
    }
}

struct UnquantizedWf;

impl RateStrategy for UnquantizedWf {
    fn name(&self) -> &'static str {
        "unquantized_wf"
    }

    fn evaluate(&self, ctx: &ChannelContext, pt: f64) -> StrategyResult {
        let gains: Vec<f64> = ctx
            .spectral()
            .singular_values
            .iter()
            .map(|&s| s * s)
            .collect();
        let alloc = waterfilling_allocation(&gains, pt.max(0.0));
        Ok(gains
            .iter()
            .zip(&alloc)
            .map(|(&g, &p)| (1.0 + p * g).log2())
            .sum())
    }
}

/// Name-indexed registry of the available strategies, in canonical order.
pub struct StrategyRegistry {
    entries: Vec<Box<dyn RateStrategy>>,
}

impl StrategyRegistry {
    /// All built-in strategies.
    pub fn standard() -> Self {
        StrategyRegistry {
            entries: vec![
                Box::new(UpperBound),
                Box::new(ChannelInversion),
                Box::new(ConvexOpt),
                Box::new(ConvexOptBa),
                Box::new(ConvexOptLowerBound),
                Box::new(Aqnm),
                Box::new(QpskLowSnr),
                Box::new(UnquantizedWf),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn RateStrategy> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn RateStrategy> {
        self.entries.iter().map(|b| b.as_ref())
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        StrategyRegistry::standard()
    }
}
