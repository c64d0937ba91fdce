//! Command-line front end: network inference, full differential-connectivity
//! analysis, scenario simulation, and benchmarking.
//!
//! Exit codes: 0 success, 2 input/validation error, 3 numeric failure.

mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prana_core::bench::{
    aggregate, parse_replicates_tsv, run_benchmark, write_replicates_tsv, write_summary,
    write_timing_tsv,
};
use prana_core::dataio::{self, FileFormat};
use prana_core::error::{
    BenchError, DataError, FdrError, FitError, MinetError, PranaError, PseudoError, SimError,
};
use prana_core::fdr::{write_dn_table, FdrMethod};
use prana_core::minet::{estimate_mi_matrix, BandwidthRule, KernelConfig};
use prana_core::pipeline::{run_analysis, AnalysisOptions};
use prana_core::robustfit::{LtsConfig, Model};
use prana_core::simgen::{
    build_scenario, sample_expression, true_dc_labels, write_truth_tsv, ReferenceDistribution,
    ScenarioKind,
};

use config::BenchFileConfig;
use manifest::RunManifest;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "prana",
    version,
    about = "Differential network analysis via pseudo-value regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a mutual-information association matrix from expression data
    Infer(InferArgs),
    /// Full analysis: connectivity, pseudo-values, robust regression, FDR calls
    Analyze(AnalyzeArgs),
    /// Generate a simulated dataset from one of the benchmark scenarios
    Simulate(SimulateArgs),
    /// Run the Monte Carlo benchmark described by a config file
    Bench(BenchArgs),
}

#[derive(Args)]
struct InferArgs {
    /// Expression matrix (header = gene ids, first column = sample id)
    expression: PathBuf,
    /// Input format
    #[arg(long, default_value = "tsv", value_parser = ["tsv", "csv"])]
    format: String,
    /// Output association matrix TSV
    #[arg(short, long)]
    output: PathBuf,
    /// Skip the data-processing-inequality pruning step
    #[arg(long)]
    no_dpi: bool,
    /// DPI tolerance (edges are kept when within epsilon of the indirect path)
    #[arg(long, default_value_t = 0.0)]
    dpi_epsilon: f64,
    /// Fixed kernel bandwidth override (Silverman's rule by default)
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Worker threads (defaults to available parallelism)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Expression matrix file
    expression: PathBuf,
    /// Covariate table file
    covariate_file: PathBuf,
    /// Input format for both files
    #[arg(long, default_value = "tsv", value_parser = ["tsv", "csv"])]
    format: String,
    /// Name of the binary group column in the covariate file
    #[arg(long, default_value = "group")]
    group_col: String,
    /// Comma-separated covariate subset; empty string for a univariable model
    #[arg(long)]
    covariates: Option<String>,
    /// LTS coverage proportion
    #[arg(long, default_value_t = 0.875)]
    trim: f64,
    /// FDR level for differential-connectivity calls
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Adjustment method
    #[arg(long, default_value = "bh", value_parser = ["bh", "ebs-approx"])]
    fdr_method: String,
    /// Seed for the robust-regression starts
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Skip DPI pruning in the connectivity estimate
    #[arg(long)]
    no_dpi: bool,
    /// Output directory
    #[arg(long, default_value = "prana_out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario kind: I, II, or III
    #[arg(long)]
    scenario: String,
    /// Number of genes
    #[arg(long, default_value_t = 20)]
    p: usize,
    /// Number of samples
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Effect size (fraction of hubs wiped; ignored for scenario III)
    #[arg(long, default_value_t = 0.10)]
    effect: f64,
    /// Master seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Reference count TSV (bundled reference by default)
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Override group-1 age-category proportions, e.g. "0.1,0.1,0.8"
    #[arg(long)]
    proportions_g1: Option<String>,
    /// Override group-2 age-category proportions
    #[arg(long)]
    proportions_g2: Option<String>,
    /// Output directory
    #[arg(long, default_value = "prana_sim")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark config file (TOML)
    #[arg(long, required_unless_present = "reaggregate")]
    config: Option<PathBuf>,
    /// Override the config's replicate count
    #[arg(long)]
    replicates: Option<usize>,
    /// Override the config's parallelism
    #[arg(long)]
    threads: Option<usize>,
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "prana_bench")]
    out_dir: PathBuf,
    /// Recompute the aggregate footer from an existing per-replicate TSV
    #[arg(long)]
    reaggregate: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Infer(args) => cmd_infer(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err.message);
            ExitCode::from(err.code)
        }
    }
}

struct CliError {
    code: u8,
    message: anyhow::Error,
}

impl CliError {
    fn validation(message: impl Into<anyhow::Error>) -> CliError {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn from_prana(err: PranaError) -> CliError {
        CliError {
            code: exit_code_for(&err),
            message: err.into(),
        }
    }
}

/// Input and validation problems exit 2; numeric failures exit 3.
fn exit_code_for(err: &PranaError) -> u8 {
    match err {
        PranaError::Data(_) => EXIT_VALIDATION,
        PranaError::Minet(m) => match m {
            MinetError::TooFewSamples { .. }
            | MinetError::TooFewGenes { .. }
            | MinetError::AllConstant => EXIT_VALIDATION,
        },
        PranaError::Pseudo(p) => pseudo_code(p),
        PranaError::Fit(f) => fit_code(f),
        PranaError::Fdr(FdrError::OutOfRange { .. }) => EXIT_NUMERIC,
        PranaError::Sim(s) => match s {
            SimError::PdRepairFailure { .. } => EXIT_NUMERIC,
            SimError::RefTooSmall { .. }
            | SimError::BadScenario { .. }
            | SimError::BadReference { .. } => EXIT_VALIDATION,
        },
        PranaError::Bench(b) => match b {
            BenchError::LengthMismatch { .. } => EXIT_NUMERIC,
            BenchError::Replicate { source, .. } => exit_code_for(source),
        },
    }
}

fn pseudo_code(err: &PseudoError) -> u8 {
    match err {
        PseudoError::GroupTooSmall { .. } => EXIT_VALIDATION,
        PseudoError::DimensionMismatch { .. } | PseudoError::GeneOrderMismatch => EXIT_NUMERIC,
        PseudoError::Minet(_) => EXIT_VALIDATION,
        PseudoError::Data(_) => EXIT_VALIDATION,
    }
}

fn fit_code(err: &FitError) -> u8 {
    match err {
        FitError::TooFewRows { .. } | FitError::Alignment { .. } => EXIT_VALIDATION,
        FitError::RankDeficient | FitError::NonFinite { .. } => EXIT_NUMERIC,
        FitError::Gene { source, .. } => fit_code(source),
    }
}

fn parse_format(s: &str) -> FileFormat {
    match s {
        "csv" => FileFormat::Csv,
        _ => FileFormat::Tsv,
    }
}

fn data_err(err: DataError) -> CliError {
    CliError::from_prana(PranaError::Data(err))
}

fn io_err(path: &Path, err: std::io::Error) -> CliError {
    CliError::validation(anyhow::anyhow!("{}: {}", path.display(), err))
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    builder
        .build()
        .map_err(|e| CliError::validation(anyhow::anyhow!("thread pool: {}", e)))
}

fn argv() -> Vec<String> {
    std::env::args().collect()
}

fn cmd_infer(args: InferArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(argv());
    manifest
        .add_input(&args.expression)
        .map_err(|e| io_err(&args.expression, std::io::Error::other(e.to_string())))?;

    let expr =
        dataio::load_expression(&args.expression, parse_format(&args.format)).map_err(data_err)?;
    let kernel = KernelConfig {
        bandwidth_rule: match args.bandwidth {
            Some(h) if h > 0.0 => BandwidthRule::Fixed(h),
            Some(h) => {
                return Err(CliError::validation(anyhow::anyhow!(
                    "bandwidth {} must be positive",
                    h
                )))
            }
            None => BandwidthRule::Silverman,
        },
        dpi_enabled: !args.no_dpi,
        dpi_epsilon: args.dpi_epsilon,
    };
    let pool = thread_pool(args.threads)?;
    let estimate = pool.install(|| {
        let cop = dataio::copula_transform(&expr);
        estimate_mi_matrix(&cop, &kernel)
    });
    let estimate = estimate.map_err(|e| CliError::from_prana(PranaError::Minet(e)))?;
    for &gene in &estimate.constant_genes {
        eprintln!(
            "warning: gene {:?} is constant; its associations are set to 0",
            expr.gene_ids[gene]
        );
    }
    let mut out = Vec::new();
    estimate
        .matrix
        .write_tsv(&mut out)
        .map_err(|e| io_err(&args.output, e))?;
    std::fs::write(&args.output, out).map_err(|e| io_err(&args.output, e))?;

    manifest.set("format", &args.format);
    manifest.set("dpi", (!args.no_dpi).to_string());
    manifest.set("dpi_epsilon", args.dpi_epsilon);
    if let Some(h) = args.bandwidth {
        manifest.set("bandwidth", h);
    }
    manifest.add_output(&args.output);
    let manifest_path = args.output.with_extension("manifest.toml");
    manifest
        .write(&manifest_path)
        .map_err(|e| io_err(&manifest_path, std::io::Error::other(e.to_string())))?;
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let mut manifest = RunManifest::new(argv());
    manifest
        .add_input(&args.expression)
        .map_err(|e| io_err(&args.expression, std::io::Error::other(e.to_string())))?;
    manifest
        .add_input(&args.covariate_file)
        .map_err(|e| io_err(&args.covariate_file, std::io::Error::other(e.to_string())))?;

    let format = parse_format(&args.format);
    let expr = dataio::load_expression(&args.expression, format).map_err(data_err)?;
    let file =
        std::fs::File::open(&args.covariate_file).map_err(|e| io_err(&args.covariate_file, e))?;
    let cov = dataio::read_covariates(std::io::BufReader::new(file), format, &args.group_col)
        .map_err(data_err)?;

    // covariate subset selection; an empty string means univariable
    let (cov, model) = match &args.covariates {
        None => (cov, Model::Multivariable),
        Some(spec) if spec.trim().is_empty() => (cov, Model::Univariable),
        Some(spec) => {
            let names: Vec<String> = spec
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            let selected = cov.select_covariates(&names).map_err(data_err)?;
            (selected, Model::Multivariable)
        }
    };

    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::validation(anyhow::anyhow!(
            "alpha {} outside (0, 1)",
            args.alpha
        )));
    }
    if !(0.5..1.0).contains(&args.trim) {
        return Err(CliError::validation(anyhow::anyhow!(
            "trim {} outside [0.5, 1.0)",
            args.trim
        )));
    }
    let fdr_method = FdrMethod::parse(&args.fdr_method).unwrap_or(FdrMethod::Bh);
    let opts = AnalysisOptions {
        kernel: KernelConfig {
            bandwidth_rule: BandwidthRule::Silverman,
            dpi_enabled: !args.no_dpi,
            dpi_epsilon: 0.0,
        },
        lts: LtsConfig {
            trim_c: args.trim,
            seed: args.seed,
            ..LtsConfig::default()
        },
        fdr_method,
        alpha: args.alpha,
        model,
    };

    let pool = thread_pool(args.threads)?;
    let result = pool
        .install(|| run_analysis(&expr, &cov, &opts))
        .map_err(CliError::from_prana)?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
    let results_path = args.out_dir.join("results.tsv");
    let pseudo_path = args.out_dir.join("pseudo_values.tsv");
    let mut buf = Vec::new();
    write_dn_table(
        &mut buf,
        &result.table,
        &result.fits,
        &result.design_columns,
        opts.model.as_str(),
    )
    .map_err(|e| io_err(&results_path, e))?;
    std::fs::write(&results_path, buf).map_err(|e| io_err(&results_path, e))?;
    let mut buf = Vec::new();
    result
        .pseudo
        .write_tsv(&mut buf)
        .map_err(|e| io_err(&pseudo_path, e))?;
    std::fs::write(&pseudo_path, buf).map_err(|e| io_err(&pseudo_path, e))?;

    manifest.seed = Some(args.seed);
    manifest.set("group_col", &args.group_col);
    manifest.set("model", opts.model.as_str());
    manifest.set("trim", args.trim);
    manifest.set("alpha", args.alpha);
    manifest.set("fdr_method", fdr_method.as_str());
    manifest.set("dpi", (!args.no_dpi).to_string());
    if let Some(spec) = &args.covariates {
        manifest.set("covariates", spec);
    }
    manifest.add_output(&results_path);
    manifest.add_output(&pseudo_path);
    let manifest_path = args.out_dir.join("run_manifest.toml");
    manifest
        .write(&manifest_path)
        .map_err(|e| io_err(&manifest_path, std::io::Error::other(e.to_string())))?;

    println!(
        "analyzed {} genes, {} samples: {} differentially connected at alpha {}",
        result.table.n_genes(),
        expr.n_samples(),
        result.table.n_called(),
        args.alpha
    );
    Ok(())
}

fn load_reference(path: &Option<PathBuf>) -> Result<ReferenceDistribution, CliError> {
    match path {
        None => Ok(ReferenceDistribution::bundled()),
        Some(p) => {
            let file = std::fs::File::open(p).map_err(|e| io_err(p, e))?;
            ReferenceDistribution::from_tsv(std::io::BufReader::new(file))
                .map_err(|e| CliError::from_prana(PranaError::Sim(e)))
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let kind = ScenarioKind::parse(&args.scenario).ok_or_else(|| {
        CliError::validation(anyhow::anyhow!("unknown scenario {:?}", args.scenario))
    })?;
    let mut manifest = RunManifest::new(argv());
    let reference = load_reference(&args.reference)?;
    if let Some(p) = &args.reference {
        manifest
            .add_input(p)
            .map_err(|e| io_err(p, std::io::Error::other(e.to_string())))?;
    }

    let mut scn = build_scenario(kind, args.p, args.effect, args.seed)
        .map_err(|e| CliError::from_prana(PranaError::Sim(e)))?;
    for (slot, flag) in [(0usize, &args.proportions_g1), (1, &args.proportions_g2)] {
        if let Some(spec) = flag {
            let values: Vec<f64> = spec
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::validation(anyhow::anyhow!("bad proportions: {}", e)))?;
            scn.sampling_proportions[slot] =
                config::proportions_triple(&values).map_err(CliError::validation)?;
        }
    }
    let (expr, cov) = sample_expression(&scn, args.n, &reference, args.seed ^ 0x5a5a_5a5a)
        .map_err(|e| CliError::from_prana(PranaError::Sim(e)))?;
    let truth = true_dc_labels(&scn);

    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
    let gene_ids = scn.gene_ids();
    let write = |name: &str, bytes: Vec<u8>| -> Result<PathBuf, CliError> {
        let path = args.out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
        Ok(path)
    };

    let mut buf = Vec::new();
    expr.write_tsv(&mut buf)
        .map_err(|e| io_err(&args.out_dir, e))?;
    manifest.add_output(&write("expression.tsv", buf)?);
    let mut buf = Vec::new();
    cov.write_tsv(&mut buf)
        .map_err(|e| io_err(&args.out_dir, e))?;
    manifest.add_output(&write("covariates.tsv", buf)?);
    let mut buf = Vec::new();
    write_truth_tsv(&mut buf, &gene_ids, &truth).map_err(|e| io_err(&args.out_dir, e))?;
    manifest.add_output(&write("truth.tsv", buf)?);
    for (&(z, c), net) in &scn.cell_networks {
        let mut buf = Vec::new();
        net.write_adjacency_tsv(&mut buf, &gene_ids)
            .map_err(|e| io_err(&args.out_dir, e))?;
        manifest.add_output(&write(&format!("adjacency_z{}_c{}.tsv", z, c), buf)?);
    }

    manifest.seed = Some(args.seed);
    manifest.set("scenario", kind.as_str());
    manifest.set("p", args.p);
    manifest.set("n", args.n);
    manifest.set("effect", args.effect);
    let manifest_path = args.out_dir.join("run_manifest.toml");
    manifest
        .write(&manifest_path)
        .map_err(|e| io_err(&manifest_path, std::io::Error::other(e.to_string())))?;

    println!(
        "simulated scenario {}: {} samples x {} genes, {} truly DC genes",
        kind.as_str(),
        args.n,
        args.p,
        truth.iter().filter(|&&t| t == 1).count()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    if let Some(replicate_tsv) = &args.reaggregate {
        let file = std::fs::File::open(replicate_tsv).map_err(|e| io_err(replicate_tsv, e))?;
        let rows = parse_replicates_tsv(std::io::BufReader::new(file)).map_err(data_err)?;
        let agg = aggregate(&rows);
        print!("{}", render_aggregates(&agg));
        return Ok(());
    }

    let config_path = args.config.as_ref().expect("clap enforces config");
    let mut manifest = RunManifest::new(argv());
    manifest
        .add_input(config_path)
        .map_err(|e| io_err(config_path, std::io::Error::other(e.to_string())))?;
    let text = std::fs::read_to_string(config_path).map_err(|e| io_err(config_path, e))?;
    let mut file_cfg = BenchFileConfig::parse(&text).map_err(CliError::validation)?;
    if let Some(r) = args.replicates {
        file_cfg.replicates = r;
    }
    if let Some(t) = args.threads {
        file_cfg.parallelism = Some(t);
    }
    if let Some(s) = args.seed {
        file_cfg.seed = s;
    }
    let cfg = file_cfg.to_bench_config().map_err(CliError::validation)?;
    let reference = load_reference(&file_cfg.reference.as_ref().map(PathBuf::from))?;

    let report =
        run_benchmark(&cfg, &reference).map_err(|e| CliError::from_prana(PranaError::Bench(e)))?;

    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_err(&args.out_dir, e))?;
    let rep_path = args.out_dir.join("bench_replicates.tsv");
    let sum_path = args.out_dir.join("bench_summary.tsv");
    let time_path = args.out_dir.join("timing.tsv");
    let mut buf = Vec::new();
    write_replicates_tsv(&mut buf, &report).map_err(|e| io_err(&rep_path, e))?;
    std::fs::write(&rep_path, buf).map_err(|e| io_err(&rep_path, e))?;
    let mut buf = Vec::new();
    write_summary(&mut buf, &cfg, &report).map_err(|e| io_err(&sum_path, e))?;
    std::fs::write(&sum_path, buf).map_err(|e| io_err(&sum_path, e))?;
    let mut buf = Vec::new();
    write_timing_tsv(&mut buf, &report).map_err(|e| io_err(&time_path, e))?;
    std::fs::write(&time_path, buf).map_err(|e| io_err(&time_path, e))?;

    manifest.seed = Some(cfg.master_seed);
    manifest.set("scenario", cfg.kind.as_str());
    manifest.set("p", cfg.p);
    manifest.set("n", cfg.n);
    manifest.set("effect", cfg.effect);
    manifest.set("replicates", cfg.n_replicates);
    manifest.set("model", cfg.model.as_str());
    manifest.set("fdr_method", cfg.fdr_method.as_str());
    manifest.set("alpha", cfg.alpha);
    manifest.add_output(&rep_path);
    manifest.add_output(&sum_path);
    let manifest_path = args.out_dir.join("run_manifest.toml");
    manifest
        .write(&manifest_path)
        .map_err(|e| io_err(&manifest_path, std::io::Error::other(e.to_string())))?;

    println!(
        "benchmark complete: precision={} recall={} f1={} over {} replicates",
        fmt_opt_short(report.aggregates.precision_mean),
        fmt_opt_short(report.aggregates.recall_mean),
        fmt_opt_short(report.aggregates.f1_mean),
        cfg.n_replicates
    );
    Ok(())
}

fn fmt_opt_short(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.3}", x),
        None => "NA".to_string(),
    }
}

fn render_aggregates(agg: &prana_core::bench::Aggregates) -> String {
    prana_core::bench::aggregate_entries(agg)
        .into_iter()
        .map(|(name, value)| format!("#agg\t{}\t{}\n", name, value))
        .collect()
}
