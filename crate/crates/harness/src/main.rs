use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dequant::quant::{is_consistent, CONSISTENCY_TOL};
use dequant::{delta_sdr, quantize, run_solver, sdr, Algorithm, Observation64};
use dequant_harness::experiment::{CSV_FILE, JSON_FILE};
use dequant_harness::{
    geometry_for, load_wav, run_experiment, save_wav, synth_test_signal, ExperimentSpec, Geometry, ParamOverrides,
    SignalDescriptor, WavFormat,
};
use serde::Serialize;

/// Reconstruct audio from coarse uniform quantization.
#[derive(Parser)]
#[command(name = "dequant", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Peak-normalize (optional) and quantize a WAV file.
    Quantize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Word length in bits.
        #[arg(long)]
        w: u32,
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value = "float32", value_parser = parse_format)]
        format: WavFormat,
    },
    /// Reconstruct a quantized WAV file.
    Dequantize(DequantizeArgs),
    /// Score an estimate against a reference.
    Evaluate {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        quantized: PathBuf,
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        w: u32,
    },
    /// Run a batch experiment described by a TOML file.
    Experiment {
        /// Experiment spec; the built-in synthetic corpus and defaults without it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write a synthetic test signal.
    Synth {
        /// e.g. `multisine:freqs=220,440;duration=2;rate=44100`
        #[arg(long, value_parser = parse_descriptor)]
        descriptor: SignalDescriptor,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "float32", value_parser = parse_format)]
        format: WavFormat,
    },
}

#[derive(Args)]
struct DequantizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Word length the input was quantized with.
    #[arg(long)]
    w: u32,
    #[arg(long, default_value = "dr-cons-syn", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// TOML file with solver parameters; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Original signal, for SDR tracing.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Write the iteration trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    trace_sdr_every: usize,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value = "float32", value_parser = parse_format)]
    format: WavFormat,
    #[command(flatten)]
    params: ParamFlags,
}

#[derive(Args)]
struct ParamFlags {
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    spadq_s: Option<usize>,
    #[arg(long)]
    spadq_r: Option<usize>,
    #[arg(long)]
    spadq_epsilon: Option<f64>,
    #[arg(long)]
    stop_tol: Option<f64>,
}

impl From<&ParamFlags> for ParamOverrides {
    fn from(p: &ParamFlags) -> Self {
        ParamOverrides {
            gamma: p.gamma,
            zeta: p.zeta,
            sigma: p.sigma,
            rho: p.rho,
            lambda: p.lambda,
            mu: p.mu,
            spadq_s: p.spadq_s,
            spadq_r: p.spadq_r,
            spadq_epsilon: p.spadq_epsilon,
            stop_tol: p.stop_tol,
        }
    }
}

fn parse_format(s: &str) -> Result<WavFormat, String> {
    s.parse().map_err(|e: dequant_harness::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: dequant::Error| e.to_string())
}

fn parse_descriptor(s: &str) -> Result<SignalDescriptor, String> {
    s.parse().map_err(|e: dequant_harness::Error| e.to_string())
}

#[derive(Serialize)]
struct Evaluation {
    sdr_quantized_db: f64,
    sdr_estimate_db: f64,
    delta_sdr_db: f64,
    consistent: bool,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> AnyResult<ExitCode> {
    match cli.command {
        Command::Quantize {
            input,
            output,
            w,
            normalize,
            format,
        } => {
            let mut signal = load_wav(&input)?;
            if normalize {
                signal.peak_normalize();
            }
            let obs = quantize(&signal.samples, w)?;
            save_wav(&output, obs.samples(), signal.sample_rate, format)?;
        }
        Command::Dequantize(args) => dequantize(&args)?,
        Command::Evaluate {
            reference,
            quantized,
            estimate,
            w,
        } => {
            let x = load_wav(&reference)?.samples;
            let obs = Observation64::from_levels(load_wav(&quantized)?.samples, w)?;
            let y = load_wav(&estimate)?.samples;
            let eval = Evaluation {
                sdr_quantized_db: sdr(&x, obs.samples())?,
                sdr_estimate_db: sdr(&x, &y)?,
                delta_sdr_db: delta_sdr(&x, &obs, &y)?,
                consistent: is_consistent(&y, &obs.consistency_set(), CONSISTENCY_TOL),
            };
            println!("{}", serde_json::to_string_pretty(&eval)?);
        }
        Command::Experiment {
            config,
            output_dir,
            jobs,
        } => {
            let mut spec = match config {
                Some(path) => ExperimentSpec::load(path)?,
                None => ExperimentSpec::default(),
            };
            if let Some(dir) = output_dir {
                spec.output_dir = dir;
            }
            if let Some(j) = jobs {
                spec.jobs = j;
            }
            let rows = run_experiment(&spec)?;
            let failed = rows.iter().filter(|r| r.failed()).count();
            eprintln!(
                "{} rows ({failed} failed) written to {} and {}",
                rows.len(),
                spec.output_dir.join(CSV_FILE).display(),
                spec.output_dir.join(JSON_FILE).display()
            );
            if failed > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Synth {
            descriptor,
            output,
            format,
        } => {
            let signal = synth_test_signal(&descriptor)?;
            save_wav(&output, &signal.samples, signal.sample_rate, format)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load_params(path: &Path) -> AnyResult<ParamOverrides> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(toml::from_str(&text)?)
}

fn dequantize(args: &DequantizeArgs) -> AnyResult<()> {
    let input = load_wav(&args.input)?;
    let obs = Observation64::from_levels(input.samples.clone(), args.w)?;
    let reference = match &args.reference {
        Some(p) => Some(load_wav(p)?.samples),
        None => None,
    };
    let geometry = match args.window {
        Some(w) => Geometry::new(w),
        None => geometry_for(input.sample_rate, input.len()),
    };
    let frame = geometry.frame(input.len())?;

    let mut params = match &args.config {
        Some(p) => load_params(p)?,
        None => ParamOverrides::default(),
    };
    params = params.merged(&ParamOverrides::from(&args.params));
    let mut cfg = dequant::Config64::new(args.algorithm).with_iters(args.max_iters);
    params.apply(&mut cfg);
    cfg.trace_sdr_every = args.trace_sdr_every;

    let run = run_solver(&obs, &frame, &cfg, reference.as_deref())?;
    save_wav(&args.output, &run.final_signal, input.sample_rate, args.format)?;
    if let Some(path) = &args.trace {
        std::fs::write(path, serde_json::to_string_pretty(&run.trace)?)?;
    }
    eprintln!(
        "{}: {} iterations, consistent = {}, {:.2} s",
        args.algorithm, run.iterations_done, run.consistent, run.wall_time
    );
    Ok(())
}
