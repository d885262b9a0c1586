//! Monte Carlo rate-versus-SNR sweeps over seeded channel draws.

use onebit_mimo::rng::derive_seed;
use onebit_mimo::{
    gen_channel, ChannelContext, ChannelModelConfig, StrategyError, StrategyRegistry,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sweep description: channel model, SNR grid in dB, strategy subset,
/// Monte Carlo trial count, and master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub channel: ChannelModelConfig,
    pub snr_db: Vec<f64>,
    pub strategies: Vec<String>,
    pub trials: usize,
    pub seed: u64,
}

/// CSV header of sweep output.
pub const SWEEP_HEADER: &str = "snr_db,strategy,mean_rate_bits,stderr_bits,trials,seed";

fn validate(config: &SweepConfig, registry: &StrategyRegistry) -> Result<(), String> {
    if config.trials < 1 {
        return Err("trials: must be at least 1".into());
    }
    if config.snr_db.is_empty() {
        return Err("snr_db: must contain at least one value".into());
    }
    for (i, snr) in config.snr_db.iter().enumerate() {
        if !snr.is_finite() {
            return Err(format!("snr_db[{i}]: must be finite, got {snr}"));
        }
    }
    if config.strategies.is_empty() {
        return Err("strategies: must contain at least one strategy".into());
    }
    for (i, name) in config.strategies.iter().enumerate() {
        if registry.get(name).is_none() {
            return Err(format!(
                "strategies[{i}]: unknown strategy '{name}' (known: {})",
                registry.names().join(", ")
            ));
        }
    }
    Ok(())
}

/// Pairwise (cascade) summation: the result does not depend on how trials
/// were distributed over workers.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Run the sweep and render the CSV. Rows come out in (snr, strategy)
/// order matching the config. Strategies that are not applicable to some
/// trial channel are reported as `skipped` rows (with a note on stderr),
/// never silently dropped. Deterministic given the seed.
pub fn run_sweep(config: &SweepConfig) -> Result<String, String> {
    let registry = StrategyRegistry::standard();
    validate(config, &registry)?;

    // rates[trial][snr_idx][strategy_idx]
    let rates: Vec<Vec<Vec<Option<f64>>>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut channel_config = config.channel.clone();
            channel_config.seed = derive_seed(config.seed, trial as u64);
            let drawn = gen_channel(&channel_config).map_err(|e| e.to_string())?;
            let ctx = ChannelContext::new(drawn.matrix);
            let mut per_snr = Vec::with_capacity(config.snr_db.len());
            for &snr_db in &config.snr_db {
                let pt = 10f64.powf(snr_db / 10.0);
                let mut per_strategy = Vec::with_capacity(config.strategies.len());
                for name in &config.strategies {
                    let strategy = registry.get(name).expect("validated strategy");
                    match strategy.evaluate(&ctx, pt) {
                        Ok(rate) => per_strategy.push(Some(rate)),
                        Err(StrategyError::NotApplicable(_)) => per_strategy.push(None),
                        Err(StrategyError::Compute(e)) => {
                            return Err(format!("strategy '{name}' failed: {e}"))
                        }
                    }
                }
                per_snr.push(per_strategy);
            }
            Ok(per_snr)
        })
        .collect::<Result<_, String>>()?;

    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for (snr_idx, &snr_db) in config.snr_db.iter().enumerate() {
        for (strat_idx, name) in config.strategies.iter().enumerate() {
            let samples: Vec<Option<f64>> = rates
                .iter()
                .map(|trial| trial[snr_idx][strat_idx])
                .collect();
            if samples.iter().any(|s| s.is_none()) {
                eprintln!(
                    "note: strategy '{name}' skipped at {snr_db} dB (not applicable to {} of {} trial channels)",
                    samples.iter().filter(|s| s.is_none()).count(),
                    config.trials
                );
                csv.push_str(&format!(
                    "{snr_db},{name},skipped,skipped,{},{}\n",
                    config.trials, config.seed
                ));
                continue;
            }
            let values: Vec<f64> = samples.into_iter().map(|s| s.expect("checked")).collect();
            let n = values.len() as f64;
            let mean = pairwise_sum(&values) / n;
            let stderr = if values.len() < 2 {
                0.0
            } else {
                let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
                (pairwise_sum(&sq) / (n - 1.0)).sqrt() / n.sqrt()
            };
            csv.push_str(&format!(
                "{snr_db},{name},{mean},{stderr},{},{}\n",
                config.trials, config.seed
            ));
        }
    }
    Ok(csv)
}
