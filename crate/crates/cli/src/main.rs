mod config;
mod data;
mod error;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use data::DatasetSource;
use error::CliError;
use llfit_core::estimators::{percentile_breakdown, PercentilePair};
use llfit_core::gof::{gof_report, qq_points, EXACT_MAX_N};
use llfit_core::simulation::{
    run_monte_carlo, run_monte_carlo_with_jobs, run_table, run_table_with_jobs, table_configs_with, table_records,
    Parameter, ReplacementPolicy, Table,
};
use llfit_core::{fit, FitOptions, HlVariant, InnerMedian, Method, SimulationReport};
use output::{fit_rows, write_aligned, write_csv, Format, Precision};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Fit log-logistic models with maximum likelihood and robust estimators.
#[derive(Debug, Parser)]
#[command(name = "llfit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit one or more estimators to a dataset.
    Fit(FitArgs),
    /// Kolmogorov-Smirnov test of a fitted model, with optional Q-Q points.
    Gof(GofArgs),
    /// Run a Monte Carlo campaign from a built-in table or a TOML file.
    Simulate(SimulateArgs),
    /// Asymptotic breakdown points of the percentile estimator with levels L < H.
    Breakdown {
        low: f64,
        high: f64,
        #[arg(long, default_value = "4")]
        precision: Precision,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// File with one positive value per record, or `builtin:insulating-fluid`.
    #[arg(long)]
    data: DatasetSource,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RmInner {
    Cumulative,
    Siegel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HlPairs {
    WithSelf,
    StrictPairs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Replacement {
    Random,
    Largest,
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    /// Inner medians of the repeated-median fit.
    #[arg(long, value_enum, default_value = "cumulative")]
    rm_inner: RmInner,
    /// Walsh averages entering the Hodges-Lehmann median.
    #[arg(long, value_enum, default_value = "with-self")]
    hl_variant: HlPairs,
    /// Apply the finite-sample factor to the Shamos scale.
    #[arg(long)]
    shamos_correction: bool,
}

impl EstimatorArgs {
    fn options(&self) -> FitOptions {
        let mut opts = FitOptions::default();
        opts.rm.inner = match self.rm_inner {
            RmInner::Cumulative => InnerMedian::Cumulative,
            RmInner::Siegel => InnerMedian::Siegel,
        };
        opts.hl_variant = match self.hl_variant {
            HlPairs::WithSelf => HlVariant::WithSelf,
            HlPairs::StrictPairs => HlVariant::StrictPairs,
        };
        opts.shamos_correction = self.shamos_correction;
        opts
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated methods (mle, pe1, pe2, pe3, rm, sm-mad, hl-shamos, ls) or `all`.
    #[arg(long, default_value = "all")]
    methods: String,
    #[command(flatten)]
    estimators: EstimatorArgs,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Decimal places, or `full` for round-trip exact output.
    #[arg(long, default_value = "4")]
    precision: Precision,
}

#[derive(Debug, Args)]
struct GofArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "mle")]
    method: String,
    #[command(flatten)]
    estimators: EstimatorArgs,
    /// Write (theoretical, empirical) quantile pairs to this CSV file.
    #[arg(long)]
    qq: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long, default_value = "4")]
    precision: Precision,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// T1 (shape), T2 (scale) or T3 (contamination).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    table: Option<String>,
    /// Flat TOML campaign file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replications per cell (tables only).
    #[arg(short = 'M', long = "M", visible_alias = "replications", default_value_t = 2000)]
    replications: usize,
    /// Master seed (tables only).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// How table T3 picks the observations to replace.
    #[arg(long, value_enum, default_value = "largest")]
    replacement: Replacement,
    /// Worker threads; defaults to one per core. Results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for `<name>.csv` and `<name>.json`; CSV goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "4")]
    precision: Precision,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(args) => run_fit(args),
        Command::Gof(args) => run_gof(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Breakdown { low, high, precision } => run_breakdown(low, high, precision),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("llfit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Core errors caused by bad arguments rather than by the numerics.
fn input(e: llfit_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Output(e.to_string())
}

fn emit(
    format: Format,
    header: &[String],
    rows: &[Vec<String>],
    json: impl FnOnce() -> serde_json::Value,
) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Table => write_aligned(&mut out, header, rows).map_err(stdout_err),
        Format::Csv => write_csv(out, header, rows),
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &json())?;
            writeln!(out).map_err(stdout_err)
        }
    }
}

fn run_fit(args: FitArgs) -> Result<ExitCode, CliError> {
    let sample = args.data.data.load()?;
    let methods = Method::parse_list(&args.methods).map_err(input)?;
    let opts = args.estimators.options();

    let mut fitted = Vec::new();
    let mut failed = Vec::new();
    for m in methods {
        match fit(&sample, m, &opts) {
            Ok(r) => fitted.push(r),
            Err(e) => failed.push((m, e)),
        }
    }
    let (header, rows) = fit_rows(&fitted, args.precision);
    emit(args.format, &header, &rows, || {
        serde_json::json!({
            "n": sample.len(),
            "fits": fitted,
            "failures": failed.iter().map(|(m, e)| serde_json::json!({"method": m, "error": e.to_string()})).collect::<Vec<_>>(),
        })
    })?;
    for (m, e) in &failed {
        eprintln!("llfit: {m}: {e}");
    }
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn run_gof(args: GofArgs) -> Result<ExitCode, CliError> {
    let sample = args.data.data.load()?;
    let method: Method = args.method.parse().map_err(input)?;
    let fitted = fit(&sample, method, &args.estimators.options())?;
    let report = gof_report(&sample, &fitted);
    let p_method = if report.n <= EXACT_MAX_N { "exact" } else { "asymptotic" };

    if let Some(path) = &args.qq {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let header = ["theoretical", "empirical"].map(String::from).to_vec();
        let rows: Vec<Vec<String>> = qq_points(&sample, &fitted.params)
            .into_iter()
            .map(|(q, t)| vec![args.precision.fmt(q), args.precision.fmt(t)])
            .collect();
        write_csv(file, &header, &rows)?;
    }

    let prec = args.precision;
    let header = ["method", "alpha", "beta", "D", "p_value", "n", "p_method"].map(String::from).to_vec();
    let rows = vec![vec![
        method.tag().to_string(),
        prec.fmt(fitted.alpha()),
        prec.fmt(fitted.beta()),
        prec.fmt(report.d_statistic),
        prec.fmt(report.p_value),
        report.n.to_string(),
        p_method.to_string(),
    ]];
    emit(args.format, &header, &rows, || serde_json::json!({"fit": fitted, "gof": report, "p_method": p_method}))?;
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let digits = args.precision.digits();
    let (name, header, rows, json) = if let Some(table) = &args.table {
        let table: Table = table.parse().map_err(input)?;
        if args.replications == 0 {
            return Err(CliError::Input("--M must be at least 1".into()));
        }
        let replacement = match args.replacement {
            Replacement::Random => ReplacementPolicy::Random,
            Replacement::Largest => ReplacementPolicy::Largest,
        };
        let configs = table_configs_with(table, args.replications, args.seed, replacement);
        let blocks = match args.jobs {
            Some(jobs) => run_table_with_jobs(configs, jobs)?,
            None => run_table(configs)?,
        };
        let (header, rows) = table_records(table, &blocks, digits);
        let name = format!("{table:?}").to_lowercase();
        (name, header, rows, serde_json::to_value(&blocks)?)
    } else {
        let path = args.config.as_deref().expect("clap enforces --table or --config");
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg = config::parse_campaign(&text)?;
        cfg.validate().map_err(input)?;
        let report = match args.jobs {
            Some(jobs) => run_monte_carlo_with_jobs(&cfg, jobs)?,
            None => run_monte_carlo(&cfg)?,
        };
        let (header, rows) = report_records(&report, digits);
        let name = path.file_stem().map_or("campaign".into(), |s| s.to_string_lossy().into_owned());
        (name, header, rows, serde_json::to_value(&report)?)
    };

    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let csv_path = dir.join(format!("{name}.csv"));
            let file = std::fs::File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
            write_csv(file, &header, &rows)?;
            write_json(&dir.join(format!("{name}.json")), &json)?;
            eprintln!("wrote {} and {name}.json", csv_path.display());
        }
        None => write_csv(std::io::stdout().lock(), &header, &rows)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).map_err(|e| CliError::io(path, e))
}

fn report_records(report: &SimulationReport, digits: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["method", "parameter", "bias", "rmse", "failures"].map(String::from).to_vec();
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.digits$}"));
    let rows = report
        .config
        .methods
        .iter()
        .flat_map(|&m| [Parameter::Alpha, Parameter::Beta].map(|p| (m, p)))
        .filter_map(|(m, p)| report.cell(m, p))
        .map(|c| {
            vec![
                c.method.label().to_string(),
                c.parameter.to_string(),
                fmt(c.bias),
                fmt(c.rmse),
                c.failure_count.to_string(),
            ]
        })
        .collect();
    (header, rows)
}

fn run_breakdown(low: f64, high: f64, prec: Precision) -> Result<ExitCode, CliError> {
    let pair = PercentilePair::new(low, high).map_err(input)?;
    let b = percentile_breakdown(pair);
    println!("kappa_alpha = {}", prec.fmt(b.kappa_alpha));
    println!("kappa_beta = {}", prec.fmt(b.kappa_beta));
    Ok(ExitCode::SUCCESS)
}
