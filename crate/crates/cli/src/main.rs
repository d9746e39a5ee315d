//! `scdt` command-line tool.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 parse or usage error, 3 invalid
//! reference, 4 inverse failure, 5 metric not applicable to the input.

mod formats;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use formats::{parse_grid, parse_reference, read_signal, write_json, write_signal, CliError, CliResult, TransformFile};
use scdt::classify::{run_experiment, Regularization};
use scdt::genmodel::{generate_dataset, GenConfig};
use scdt::measures::{rebin, SignedMeasure};
use scdt::metrics::{d_s, d_w2, w2};
use scdt::transform::{scdt_forward, scdt_inverse, TransformConfig};
use serde::Deserialize;

const SEED_ENV: &str = "SCDT_SEED";

#[derive(Parser)]
#[command(name = "scdt", version, about = "Signed cumulative distribution transform of 1-D signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    /// Signed transport distance.
    Ds,
    /// Unbalanced distance for non-negative signals.
    Dw2,
    /// 2-Wasserstein distance for unit-mass non-negative signals.
    W2,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a signal CSV into a transform JSON file.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long = "ref", default_value = "uniform:0,1")]
        reference: String,
        #[arg(long, default_value_t = 1024)]
        quantiles: usize,
    },
    /// Invert a transform JSON file onto a sample grid `first,last,N`.
    Inverse {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        grid: String,
    },
    /// Print the distance between two signal CSV files.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value = "ds")]
        metric: Metric,
        #[arg(long, default_value_t = 1024)]
        quantiles: usize,
    },
    /// Write a synthetic labeled dataset as signal CSV files.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Run the LDA experiment and write a JSON report and plot data.
    ClassifyDemo {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        plots: PathBuf,
    },
}

/// Generator settings plus the transform and classifier settings for the demo.
#[derive(Deserialize)]
#[serde(default)]
struct DemoConfig {
    #[serde(flatten)]
    generator: GenConfig,
    quantiles: usize,
    reference: String,
    regularization: Regularization,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            generator: GenConfig::default(),
            quantiles: 128,
            reference: "uniform:0,1".into(),
            regularization: Regularization::default(),
        }
    }
}

fn load_config(path: &Path) -> CliResult<DemoConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut cfg: DemoConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if let Ok(seed) = std::env::var(SEED_ENV) {
        cfg.generator.seed = seed
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{SEED_ENV}={seed} is not an unsigned integer")))?;
        log::info!("seed overridden by {SEED_ENV}: {}", cfg.generator.seed);
    }
    cfg.generator.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(cfg)
}

fn transform_config(reference: &str, quantiles: usize) -> CliResult<TransformConfig> {
    let reference = parse_reference(reference)?;
    TransformConfig::new(reference, quantiles).map_err(|e| CliError::Parse(e.to_string()))
}

fn cmd_transform(input: &Path, output: &Path, reference: &str, quantiles: usize) -> CliResult<()> {
    let cfg = transform_config(reference, quantiles)?;
    let signal = read_signal(input)?;
    let t = scdt_forward(&signal.to_measure(), &cfg);
    TransformFile::from_result(&t, &cfg).write(output)
}

fn cmd_inverse(input: &Path, output: &Path, grid: &str) -> CliResult<()> {
    let (t0, t1, n) = parse_grid(grid)?;
    let (t, cfg) = TransformFile::read(input)?.to_result()?;
    let m = scdt_inverse(&t, &cfg).map_err(|e| CliError::Inverse(e.to_string()))?;
    let d = rebin(&m, t0, t1, n).map_err(|e| CliError::Inverse(e.to_string()))?;
    write_signal(output, &d)
}

fn require_positive(s: &SignedMeasure, which: &str, metric: &str) -> CliResult<()> {
    if !s.negative_part().is_zero() {
        return Err(CliError::Metric(format!("{metric} needs a non-negative signal, {which} has negative values")));
    }
    Ok(())
}

fn cmd_distance(a: &Path, b: &Path, metric: Metric, quantiles: usize) -> CliResult<f64> {
    let sa = read_signal(a)?.to_measure();
    let sb = read_signal(b)?.to_measure();
    let metric_err = |e: scdt::Error| CliError::Metric(e.to_string());
    match metric {
        Metric::Ds => Ok(d_s(&sa, &sb, quantiles).map_err(metric_err)?.value),
        Metric::Dw2 => {
            require_positive(&sa, "a", "dw2")?;
            require_positive(&sb, "b", "dw2")?;
            Ok(d_w2(sa.positive_part(), sb.positive_part(), quantiles).map_err(metric_err)?.value)
        }
        Metric::W2 => {
            require_positive(&sa, "a", "w2")?;
            require_positive(&sb, "b", "w2")?;
            w2(sa.positive_part(), sb.positive_part(), quantiles).map_err(metric_err)
        }
    }
}

fn cmd_generate(config: &Path, outdir: &Path) -> CliResult<()> {
    let cfg = load_config(config)?;
    let data = generate_dataset(&cfg.generator).map_err(|e| CliError::Parse(e.to_string()))?;
    std::fs::create_dir_all(outdir).map_err(|e| CliError::Io(format!("{}: {e}", outdir.display())))?;
    let index_path = outdir.join("labels.csv");
    let mut index = csv::Writer::from_path(&index_path).map_err(|e| CliError::Io(format!("{}: {e}", index_path.display())))?;
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", index_path.display()));
    index.write_record(["file", "label", "class", "a", "b"]).map_err(io)?;
    for (i, s) in data.iter().enumerate() {
        let class = cfg.generator.classes[s.label].name();
        let name = format!("signal_{i:04}_{class}.csv");
        write_signal(&outdir.join(&name), &s.density)?;
        index
            .write_record([name, s.label.to_string(), class.to_string(), s.a.to_string(), s.b.to_string()])
            .map_err(io)?;
    }
    index.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_classify_demo(config: &Path, report: &Path, plots: &Path) -> CliResult<()> {
    let cfg = load_config(config)?;
    let tcfg = transform_config(&cfg.reference, cfg.quantiles)?;
    let r = run_experiment(&cfg.generator, &tcfg, cfg.regularization, cfg.generator.seed)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    log::info!(
        "test accuracy: signal space {:.3}, transform space {:.3}",
        r.accuracy_signal_space,
        r.accuracy_scdt_space
    );
    write_json(report, &r)?;
    let file = File::create(plots).map_err(|e| CliError::Io(format!("{}: {e}", plots.display())))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(w, "space,class,u,v")?;
        for p in &r.projections {
            writeln!(w, "{},{},{},{}", p.space.name(), p.class, p.u, p.v)?;
        }
        w.flush()
    };
    write().map_err(|e| CliError::Io(format!("{}: {e}", plots.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Transform {
            input,
            output,
            reference,
            quantiles,
        } => cmd_transform(&input, &output, &reference, quantiles),
        Command::Inverse { input, output, grid } => cmd_inverse(&input, &output, &grid),
        Command::Distance { a, b, metric, quantiles } => {
            let d = cmd_distance(&a, &b, metric, quantiles)?;
            println!("{d}");
            Ok(())
        }
        Command::Generate { config, outdir } => cmd_generate(&config, &outdir),
        Command::ClassifyDemo { config, report, plots } => cmd_classify_demo(&config, &report, &plots),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scdt: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
