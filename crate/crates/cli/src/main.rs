use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sbite::canonical::universal_threshold;
use sbite::fixed_point::{BlockPartition, ProblemInstance, SolverOptions, UpdateRule};
use sbite::harness::{run_experiment, ExperimentConfig, ExperimentId};
use sbite::io::{read_channels_csv, read_regression_csv, read_sbw1, write_channels_csv, write_sbw1, FitReport};
use sbite::risk::{
    criterion_surface, lambda_max, log_grid, search_hyperparameters, Criterion, SearchGrids, Smoothness,
};
use sbite::wavelet::{denoise_multichannel, DenoiseOptions, MultichannelSeries, SelectionRule, WaveletFamily};
use sbite::SbiteError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "sbite", version, about = "Smooth blockwise iterative thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a sparse regression and print the report as JSON.
    Fit {
        /// CSV with header `y,x1,...,xP`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "sure")]
        rule: Criterion,
        /// Restrict to the lasso path (ν = s = 1).
        #[arg(long)]
        lasso: bool,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit the SURE surface over a λ × ν grid as CSV.
    SureGrid {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated ν values.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0, 8.0])]
        nus: Vec<f64>,
        #[arg(long, default_value_t = 60)]
        lambdas: usize,
        #[arg(long, default_value_t = 1e-3)]
        lambda_min: f64,
        /// Fixed smoothness; `s = 2 ln ν + 1` when omitted.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Denoise a multichannel series (CSV or SBW1) blockwise across channels.
    Denoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "universal")]
        rule: SelectionRule,
        #[arg(long, default_value = "sym8")]
        family: WaveletFamily,
        #[arg(long, default_value_t = sbite::wavelet::DEFAULT_COARSE_LEVEL)]
        coarse_level: usize,
        /// Per-level report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the finite-sample and asymptotic universal thresholds.
    Threshold {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run a Monte-Carlo experiment and emit its result table as CSV.
    Simulate {
        experiment: ExperimentId,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        replicates: Option<usize>,
        /// Comma-separated cell labels, e.g. "5:7,50:3".
        #[arg(long)]
        cells: Option<String>,
        #[arg(long, default_value = "sure")]
        criterion: Criterion,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write replicate-level values here.
        #[arg(long)]
        raw: Option<PathBuf>,
    },
}

#[derive(Clone, Copy)]
enum SeriesFormat {
    Csv,
    Sbw1,
}

fn series_format(path: &Path) -> SeriesFormat {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => SeriesFormat::Csv,
        _ => SeriesFormat::Sbw1,
    }
}

fn open(path: &Path) -> sbite::Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| SbiteError::Config(format!("cannot open {}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> sbite::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_instance(path: &Path) -> sbite::Result<ProblemInstance> {
    let data = read_regression_csv(open(path)?)?;
    let p = data.x.ncols();
    ProblemInstance::from_raw(&data.x, &data.y, BlockPartition::unit(p)?)
}

#[derive(Serialize)]
struct ThresholdOutput {
    n: usize,
    q: usize,
    d_n: f64,
    lambda_finite: f64,
    lambda_asymptotic: f64,
    residual: f64,
}

fn run(cli: Cli) -> sbite::Result<()> {
    match cli.command {
        Command::Fit { input, rule, lasso, output } => {
            let inst = load_instance(&input)?;
            let grids = if lasso { SearchGrids::lasso() } else { SearchGrids::default() };
            let outcome = search_hyperparameters(&inst, rule, &grids)?;
            let report = FitReport::new(&inst, &outcome.result, if rule == Criterion::Sure { "sure" } else { "gsure" });
            let mut out = sink(output.as_deref())?;
            writeln!(out, "{}", report.to_json()?)?;
            out.flush()?;
        }
        Command::SureGrid { input, nus, lambdas, lambda_min, s, output } => {
            let inst = load_instance(&input)?;
            if lambdas == 0 || lambda_min.is_nan() || lambda_min <= 0.0 {
                return Err(SbiteError::Config("need at least one λ and a positive --lambda-min".into()));
            }
            let top = nus.iter().map(|&nu| lambda_max(&inst, nu)).fold(lambda_min * 10.0, f64::max);
            let grid = log_grid(lambda_min, top, lambdas);
            let smooth = s.map_or(Smoothness::FromNu, Smoothness::Fixed);
            let surface = criterion_surface(&inst, &grid, &nus, smooth, UpdateRule::Sbite, &SolverOptions::default())?;
            let mut wtr = csv::Writer::from_writer(sink(output.as_deref())?);
            wtr.write_record(["lambda", "nu", "s", "sure", "gsure", "edf", "active"])?;
            for pt in surface {
                let (sure, gsure, edf, active) = match pt.report {
                    Some(r) => (r.sure.to_string(), r.gsure.to_string(), r.edf.to_string(), r.active_count.to_string()),
                    None => (String::new(), String::new(), String::new(), String::new()),
                };
                wtr.write_record([
                    pt.hp.lambda.to_string(),
                    pt.hp.nu.to_string(),
                    pt.hp.s.to_string(),
                    sure,
                    gsure,
                    edf,
                    active,
                ])?;
            }
            wtr.flush()?;
        }
        Command::Denoise { input, output, rule, family, coarse_level, report } => {
            let series: MultichannelSeries = match series_format(&input) {
                SeriesFormat::Csv => read_channels_csv(open(&input)?)?,
                SeriesFormat::Sbw1 => read_sbw1(open(&input)?)?,
            };
            let opts = DenoiseOptions { rule, family, coarse_level, ..DenoiseOptions::default() };
            let (clean, levels) = denoise_multichannel(&series, &opts)?;
            let out = BufWriter::new(File::create(&output)?);
            match series_format(&output) {
                SeriesFormat::Csv => write_channels_csv(out, &clean)?,
                SeriesFormat::Sbw1 => write_sbw1(out, &clean)?,
            }
            if let Some(path) = report {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "{}", serde_json::to_string_pretty(&levels)?)?;
                w.flush()?;
            }
            for l in &levels {
                log::info!("level {}: kept {} of {} blocks", l.level, l.kept_blocks, l.blocks);
            }
        }
        Command::Threshold { n, q, json } => {
            let ut = universal_threshold(n, q)?;
            let out = ThresholdOutput {
                n,
                q,
                d_n: ut.d_n,
                lambda_finite: ut.lambda_finite,
                lambda_asymptotic: ut.lambda_asymptotic,
                residual: ut.residual(),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                println!("N = {n}, Q = {q}");
                println!("d_N               = {:.12}", out.d_n);
                println!("lambda (finite)   = {:.12}", out.lambda_finite);
                println!("lambda (limit)    = {:.12}", out.lambda_asymptotic);
                println!("root residual     = {:.3e}", out.residual);
            }
        }
        Command::Simulate { experiment, seed, replicates, cells, criterion, output, raw } => {
            let mut cfg = ExperimentConfig::new(experiment, seed);
            cfg.criterion = criterion;
            cfg.output = output.clone();
            if let Some(r) = replicates {
                cfg = cfg.with_replicates(r);
            }
            if let Some(c) = cells {
                cfg = cfg.with_cells(&c)?;
            }
            cfg.validate()?;
            let table = run_experiment(&cfg)?;
            table.write_csv(sink(output.as_deref())?)?;
            if let Some(path) = raw {
                table.write_raw_csv(BufWriter::new(File::create(path)?))?;
            }
        }
    }
    Ok(())
}

fn configure_threads() -> sbite::Result<()> {
    let Ok(value) = std::env::var("SBITE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| SbiteError::Config(format!("SBITE_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| SbiteError::Config(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERIC })
        }
    }
}
