//! Command-line front end: rate sweeps, orthant-count tables, constellation
//! dumps, and infinite-SNR SIMO capacities, all emitting CSV or JSON.

mod sweep;

use clap::{Args, Parser, Subcommand};
use onebit_mimo::{
    channel_from_json, design_constellation, gen_channel, orthant_count, orthant_count_log2,
    simo_grid_capacity, simo_inf_capacity, ChannelJson, ChannelModel, ChannelModelConfig,
    ComplexMatrix, DesignResultJson, UpaGeometry,
};
use serde::Serialize;
use std::fs;
use std::path::PathBuf;
use sweep::{run_sweep, SweepConfig};

/// One-bit quantized MIMO capacity toolbox.
///
/// SNR convention: the noise is unit-variance per complex dimension, so the
/// linear SNR equals the transmit power budget Pt and dB values convert as
/// Pt = 10^(snr_db/10).
#[derive(Parser)]
#[command(name = "onebit-mimo", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo rate-vs-SNR sweep over seeded channel draws (CSV).
    Sweep(SweepArgs),
    /// Exact orthant counts K(Nr, Nt) and log2 K as CSV.
    Ktable(KtableArgs),
    /// Design a transmit constellation for one channel and dump it as JSON.
    Constellation(ConstellationArgs),
    /// Infinite-SNR SIMO capacity against its bracket, per antenna count (CSV).
    SimoCapacity(SimoCapacityArgs),
    /// Sweep a ray-based mmWave channel with uniform planar arrays (CSV).
    Mmwave(MmwaveArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Full sweep config as JSON (overrides the channel/grid flags).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel matrix JSON file ({"nr","nt","re","im"}); fixed across trials.
    #[arg(long, conflicts_with_all = ["nr", "nt"])]
    channel_json: Option<PathBuf>,
    /// Receive antenna count for IID Rayleigh draws.
    #[arg(long, default_value_t = 2)]
    nr: usize,
    /// Transmit antenna count for IID Rayleigh draws.
    #[arg(long, default_value_t = 2)]
    nt: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Strategies to evaluate, comma separated (default: all registered).
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// SNR grid in dB: "a:b:step" (inclusive), a comma list, or one value.
    #[arg(long, default_value = "-10:30:5", allow_hyphen_values = true)]
    snr_db: String,
}

#[derive(Args)]
struct KtableArgs {
    #[arg(long, default_value_t = 16)]
    max_nr: usize,
    #[arg(long, default_value_t = 16)]
    max_nt: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstellationArgs {
    /// Channel matrix JSON file; otherwise a seeded IID Rayleigh draw, or a
    /// seeded mmWave draw when --paths is given.
    #[arg(long, conflicts_with_all = ["nr", "nt", "paths"])]
    channel_json: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    nr: usize,
    #[arg(long, default_value_t = 2)]
    nt: usize,
    /// Draw an mmWave channel with this many paths (uses the arrays below).
    #[arg(long)]
    paths: Option<usize>,
    /// Receive planar array as YxZ (mmWave draws only).
    #[arg(long, default_value = "2x2")]
    rx_array: String,
    /// Transmit planar array as YxZ (mmWave draws only).
    #[arg(long, default_value = "16x16")]
    tx_array: String,
    /// Inter-element spacing over wavelength (mmWave draws only).
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    /// Transmit power budget in dB (Pt = 10^(snr_db/10)).
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    snr_db: f64,
    /// Grid resolution per axis for the SIMO (Nt = 1) optimizer.
    #[arg(long, default_value_t = 64)]
    grid_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimoCapacityArgs {
    #[arg(long, default_value_t = 64)]
    max_nr: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MmwaveArgs {
    /// Receive planar array as YxZ, e.g. 2x2.
    #[arg(long, default_value = "2x2")]
    rx_array: String,
    /// Transmit planar array as YxZ, e.g. 16x16.
    #[arg(long, default_value = "16x16")]
    tx_array: String,
    /// Number of propagation paths.
    #[arg(long, default_value_t = 1)]
    paths: usize,
    /// Inter-element spacing over wavelength.
    #[arg(long, default_value_t = 0.5)]
    spacing: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Strategies to evaluate, comma separated (default: all registered).
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Ktable(args) => cmd_ktable(args),
        Command::Constellation(args) => cmd_constellation(args),
        Command::SimoCapacity(args) => cmd_simo_capacity(args),
        Command::Mmwave(args) => cmd_mmwave(args),
    };
    if let Err(message) = result {
        eprintln!("error: {message}");
        std::process::exit(1);
    }
}

/// Parse "a:b:step" (inclusive), a comma list, or a single dB value.
fn parse_snr_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parse_one = |s: &str| -> Result<f64, String> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("snr_db: cannot parse '{s}'"))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err("snr_db: range form is a:b:step".into());
        }
        let (a, b, step) = (parse_one(parts[0])?, parse_one(parts[1])?, parse_one(parts[2])?);
        if step <= 0.0 {
            return Err("snr_db: step must be positive".into());
        }
        let mut grid = Vec::new();
        let mut v = a;
        while v <= b + 1e-9 {
            grid.push(v);
            v += step;
        }
        return Ok(grid);
    }
    spec.split(',').map(parse_one).collect()
}

fn parse_upa(spec: &str) -> Result<UpaGeometry, String> {
    let parts: Vec<&str> = spec.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(format!("array geometry '{spec}' is not of the form YxZ"));
    }
    let y = parts[0].trim().parse().map_err(|_| format!("bad array dim '{}'", parts[0]))?;
    let z = parts[1].trim().parse().map_err(|_| format!("bad array dim '{}'", parts[1]))?;
    Ok(UpaGeometry { y, z })
}

fn write_output(out: Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(&path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn default_strategies(requested: Vec<String>) -> Vec<String> {
    if requested.is_empty() {
        onebit_mimo::StrategyRegistry::standard()
            .names()
            .into_iter()
            .map(str::to_owned)
            .collect()
    } else {
        requested
    }
}

fn load_fixed_channel(path: &PathBuf) -> Result<ChannelModel, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let matrix = channel_from_json(&text).map_err(|e| e.to_string())?;
    Ok(ChannelModel::Fixed {
        matrix: ChannelJson::from_matrix(&matrix),
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<(), String> {
    let config = if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str::<SweepConfig>(&text).map_err(|e| format!("config: {e}"))?
    } else {
        let model = match &args.channel_json {
            Some(path) => load_fixed_channel(path)?,
            None => ChannelModel::IidGaussian {
                nr: args.nr,
                nt: args.nt,
            },
        };
        SweepConfig {
            channel: ChannelModelConfig {
                model,
                seed: args.seed,
            },
            snr_db: parse_snr_grid(&args.grid.snr_db)?,
            strategies: default_strategies(args.strategies),
            trials: args.trials,
            seed: args.seed,
        }
    };
    let csv = run_sweep(&config)?;
    write_output(args.out, &csv)
}

fn cmd_ktable(args: KtableArgs) -> Result<(), String> {
    if args.max_nr > 64 || args.max_nt > 64 {
        return Err("ktable: antenna counts are supported up to 64".into());
    }
    let mut csv = String::from("nr,nt,k,log2_k\n");
    for nr in 1..=args.max_nr {
        for nt in 1..=args.max_nt {
            csv.push_str(&format!(
                "{nr},{nt},{},{}\n",
                orthant_count(nr, nt),
                orthant_count_log2(nr, nt)
            ));
        }
    }
    write_output(args.out, &csv)
}

#[derive(Serialize)]
struct SimoSupportJson {
    kind: &'static str,
    capacity_bits: f64,
    symbols_re: Vec<f64>,
    symbols_im: Vec<f64>,
    probabilities: Vec<f64>,
    channel: ChannelJson,
}

#[derive(Serialize)]
struct MaxMarginJson {
    kind: &'static str,
    #[serde(flatten)]
    design: DesignResultJson,
    channel: ChannelJson,
}

fn cmd_constellation(args: ConstellationArgs) -> Result<(), String> {
    let matrix: ComplexMatrix = match &args.channel_json {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            channel_from_json(&text).map_err(|e| e.to_string())?
        }
        None => {
            let model = match args.paths {
                Some(paths) => ChannelModel::Mmwave {
                    paths,
                    rx_array: parse_upa(&args.rx_array)?,
                    tx_array: parse_upa(&args.tx_array)?,
                    spacing_over_wavelength: args.spacing,
                },
                None => ChannelModel::IidGaussian {
                    nr: args.nr,
                    nt: args.nt,
                },
            };
            let config = ChannelModelConfig {
                model,
                seed: args.seed,
            };
            gen_channel(&config).map_err(|e| e.to_string())?.matrix
        }
    };
    let pt = 10f64.powf(args.snr_db / 10.0);
    let json = if matrix.cols() == 1 {
        let h: Vec<_> = (0..matrix.rows()).map(|i| matrix.get(i, 0)).collect();
        let grid = simo_grid_capacity(&h, pt, args.grid_n).map_err(|e| e.to_string())?;
        serde_json::to_string_pretty(&SimoSupportJson {
            kind: "simo_grid",
            capacity_bits: grid.capacity_bits,
            symbols_re: grid.support.symbols.iter().map(|s| s[0].re).collect(),
            symbols_im: grid.support.symbols.iter().map(|s| s[0].im).collect(),
            probabilities: grid.support.probs.clone(),
            channel: ChannelJson::from_matrix(&matrix),
        })
        .expect("serializes")
    } else {
        let design = design_constellation(&matrix, pt).map_err(|e| e.to_string())?;
        serde_json::to_string_pretty(&MaxMarginJson {
            kind: "max_margin",
            design: DesignResultJson::from(&design),
            channel: ChannelJson::from_matrix(&matrix),
        })
        .expect("serializes")
    };
    write_output(args.out, &format!("{json}\n"))
}

fn cmd_simo_capacity(args: SimoCapacityArgs) -> Result<(), String> {
    if args.max_nr < 1 {
        return Err("simo-capacity: max_nr must be at least 1".into());
    }
    let mut csv = String::from("nr,lower_bits,capacity_bits,upper_bits,p0_star\n");
    for nr in 1..=args.max_nr {
        let (capacity, p0) = simo_inf_capacity(nr);
        let lower = (4.0 * nr as f64).log2();
        let upper = (4.0 * nr as f64 + 1.0).log2();
        csv.push_str(&format!("{nr},{lower},{capacity},{upper},{p0}\n"));
    }
    write_output(args.out, &csv)
}

fn cmd_mmwave(args: MmwaveArgs) -> Result<(), String> {
    let config = SweepConfig {
        channel: ChannelModelConfig {
            model: ChannelModel::Mmwave {
                paths: args.paths,
                rx_array: parse_upa(&args.rx_array)?,
                tx_array: parse_upa(&args.tx_array)?,
                spacing_over_wavelength: args.spacing,
            },
            seed: args.seed,
        },
        snr_db: parse_snr_grid(&args.grid.snr_db)?,
        strategies: default_strategies(args.strategies),
        trials: args.trials,
        seed: args.seed,
    };
    let csv = run_sweep(&config)?;
    write_output(args.out, &csv)
}
