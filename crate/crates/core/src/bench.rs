//! Monte Carlo benchmark harness: run the pipeline over independent
//! replicates of a scenario and score differential-connectivity calls
//! against the generating truth.
//!
//! Each replicate draws a fresh network and fresh data from its own seed
//! substream (`master_seed XOR replicate`), so results are independent of
//! scheduling and of which other replicates run.

use rayon::prelude::*;

use crate::error::{BenchError, PranaError};
use crate::fdr::{DnResultTable, FdrMethod};
use crate::minet::KernelConfig;
use crate::pipeline::{run_analysis, AnalysisOptions, StageTimings};
use crate::rng::{derive, substream};
use crate::robustfit::{LtsConfig, Model};
use crate::simgen::{
    build_scenario, sample_expression, true_dc_labels, ReferenceDistribution, ScenarioKind,
};
use crate::tsv;

/// Full configuration of a benchmark run.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub kind: ScenarioKind,
    pub p: usize,
    pub n: usize,
    pub effect: f64,
    pub n_replicates: usize,
    pub alpha: f64,
    pub model: Model,
    pub fdr_method: FdrMethod,
    pub master_seed: u64,
    pub parallelism: usize,
    pub kernel: KernelConfig,
    pub lts: LtsConfig,
    /// Override of the scenario's per-group age-category proportions.
    pub proportions: Option<[[f64; 3]; 2]>,
}

impl BenchConfig {
    /// Benchmark defaults: 100 replicates, alpha 0.05, multivariable model,
    /// BH adjustment. The benchmark pipeline scores connectivity from the
    /// unpruned MI matrix (DPI off); network-inference commands keep DPI on.
    pub fn new(kind: ScenarioKind, p: usize, n: usize, effect: f64) -> BenchConfig {
        BenchConfig {
            kind,
            p,
            n,
            effect,
            n_replicates: 100,
            alpha: 0.05,
            model: Model::Multivariable,
            fdr_method: FdrMethod::Bh,
            master_seed: 42,
            parallelism: std::thread::available_parallelism()
                .map(|v| v.get())
                .unwrap_or(1),
            kernel: KernelConfig {
                dpi_enabled: false,
                ..KernelConfig::default()
            },
            lts: LtsConfig::default(),
            proportions: None,
        }
    }
}

/// Scores for one replicate; metrics are `None` when their denominator is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateScore {
    pub replicate: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub n_called: usize,
    pub n_true: usize,
}

/// Mean and standard error over the defined replicates of each metric.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Aggregates {
    pub precision_mean: Option<f64>,
    pub precision_se: Option<f64>,
    pub precision_defined: usize,
    pub recall_mean: Option<f64>,
    pub recall_se: Option<f64>,
    pub recall_defined: usize,
    pub f1_mean: Option<f64>,
    pub f1_se: Option<f64>,
    pub f1_defined: usize,
}

/// The benchmark output: per-replicate scores, aggregates, and stage timing.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<ReplicateScore>,
    pub aggregates: Aggregates,
    pub timings: StageTimings,
    pub scenario_seconds: f64,
}

/// (precision, recall, f1), each `None` when its denominator is zero.
pub type MetricTriple = (Option<f64>, Option<f64>, Option<f64>);

/// Precision, recall, and F1 of a call set against truth labels.
///
/// Precision is undefined when nothing is called; recall is undefined when
/// the truth has no differentially connected gene; F1 is undefined when
/// either input is undefined or both are zero.
pub fn score_replicate(calls: &DnResultTable, truth: &[u8]) -> Result<MetricTriple, BenchError> {
    if calls.is_dc.len() != truth.len() {
        return Err(BenchError::LengthMismatch {
            calls: calls.is_dc.len(),
            truth: truth.len(),
        });
    }
    let called = calls.is_dc.iter().filter(|&&c| c).count();
    let positives = truth.iter().filter(|&&t| t == 1).count();
    let true_called = calls
        .is_dc
        .iter()
        .zip(truth.iter())
        .filter(|(&c, &t)| c && t == 1)
        .count();
    let precision = if called > 0 {
        Some(true_called as f64 / called as f64)
    } else {
        None
    };
    let recall = if positives > 0 {
        Some(true_called as f64 / positives as f64)
    } else {
        None
    };
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok((precision, recall, f1))
}

/// Run the benchmark: fresh scenario and data per replicate, full pipeline,
/// scored against that replicate's truth.
pub fn run_benchmark(
    cfg: &BenchConfig,
    reference: &ReferenceDistribution,
) -> Result<BenchReport, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Result<(ReplicateScore, StageTimings, f64), BenchError>> =
        pool.install(|| {
            (0..cfg.n_replicates)
                .into_par_iter()
                .map(|r| {
                    run_replicate(cfg, reference, r).map_err(|e| BenchError::Replicate {
                        index: r,
                        source: Box::new(e),
                    })
                })
                .collect()
        });

    let mut rows = Vec::with_capacity(cfg.n_replicates);
    let mut timings = StageTimings::default();
    let mut scenario_seconds = 0.0;
    for res in results {
        let (row, t, s) = res?;
        timings.add(&t);
        scenario_seconds += s;
        rows.push(row);
    }
    let aggregates = aggregate(&rows);
    Ok(BenchReport {
        rows,
        aggregates,
        timings,
        scenario_seconds,
    })
}

fn run_replicate(
    cfg: &BenchConfig,
    reference: &ReferenceDistribution,
    r: usize,
) -> Result<(ReplicateScore, StageTimings, f64), PranaError> {
    let rep_seed = substream(cfg.master_seed, r as u64);
    let t0 = std::time::Instant::now();
    let mut scn = build_scenario(cfg.kind, cfg.p, cfg.effect, rep_seed)?;
    if let Some(props) = cfg.proportions {
        for triple in &props {
            crate::simgen::validate_proportions(triple)?;
        }
        scn.sampling_proportions = props;
    }
    let (expr, cov) = sample_expression(&scn, cfg.n, reference, derive(rep_seed, 1))?;
    let scenario_seconds = t0.elapsed().as_secs_f64();
    let truth = true_dc_labels(&scn);
    let opts = AnalysisOptions {
        kernel: cfg.kernel,
        lts: LtsConfig {
            seed: derive(rep_seed, 2),
            ..cfg.lts
        },
        fdr_method: cfg.fdr_method,
        alpha: cfg.alpha,
        model: cfg.model,
    };
    let res = run_analysis(&expr, &cov, &opts)?;
    let (precision, recall, f1) = score_replicate(&res.table, &truth)?;
    let row = ReplicateScore {
        replicate: r,
        precision,
        recall,
        f1,
        n_called: res.table.n_called(),
        n_true: truth.iter().filter(|&&t| t == 1).count(),
    };
    Ok((row, res.timings, scenario_seconds))
}

/// Aggregate over defined replicates only; undefined counts are reported.
pub fn aggregate(rows: &[ReplicateScore]) -> Aggregates {
    fn stats(values: &[f64]) -> (Option<f64>, Option<f64>) {
        match values.len() {
            0 => (None, None),
            1 => (Some(values[0]), None),
            m => {
                let mean = values.iter().sum::<f64>() / m as f64;
                let var =
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m as f64 - 1.0);
                (Some(mean), Some((var / m as f64).sqrt()))
            }
        }
    }
    let precision: Vec<f64> = rows.iter().filter_map(|r| r.precision).collect();
    let recall: Vec<f64> = rows.iter().filter_map(|r| r.recall).collect();
    let f1: Vec<f64> = rows.iter().filter_map(|r| r.f1).collect();
    let (pm, ps) = stats(&precision);
    let (rm, rs) = stats(&recall);
    let (fm, fs) = stats(&f1);
    Aggregates {
        precision_mean: pm,
        precision_se: ps,
        precision_defined: precision.len(),
        recall_mean: rm,
        recall_se: rs,
        recall_defined: recall.len(),
        f1_mean: fm,
        f1_se: fs,
        f1_defined: f1.len(),
    }
}

/// Per-replicate TSV with an aggregate footer (`#agg` lines).
pub fn write_replicates_tsv<W: std::io::Write>(
    w: &mut W,
    report: &BenchReport,
) -> std::io::Result<()> {
    tsv::write_row(
        w,
        &[
            "replicate".to_string(),
            "precision".to_string(),
            "recall".to_string(),
            "f1".to_string(),
            "n_called".to_string(),
            "n_true".to_string(),
        ],
    )?;
    for row in &report.rows {
        tsv::write_row(
            w,
            &[
                row.replicate.to_string(),
                tsv::fmt_opt(row.precision),
                tsv::fmt_opt(row.recall),
                tsv::fmt_opt(row.f1),
                row.n_called.to_string(),
                row.n_true.to_string(),
            ],
        )?;
    }
    for (name, value) in aggregate_entries(&report.aggregates) {
        writeln!(w, "#agg\t{}\t{}", name, value)?;
    }
    Ok(())
}

/// Machine-readable `key=value` summary for CI assertions.
pub fn write_summary<W: std::io::Write>(
    w: &mut W,
    cfg: &BenchConfig,
    report: &BenchReport,
) -> std::io::Result<()> {
    writeln!(w, "scenario={}", cfg.kind.as_str())?;
    writeln!(w, "p={}", cfg.p)?;
    writeln!(w, "n={}", cfg.n)?;
    writeln!(w, "effect={}", tsv::fmt_f64(cfg.effect))?;
    writeln!(w, "replicates={}", cfg.n_replicates)?;
    writeln!(w, "alpha={}", tsv::fmt_f64(cfg.alpha))?;
    writeln!(w, "model={}", cfg.model.as_str())?;
    writeln!(w, "fdr_method={}", cfg.fdr_method.as_str())?;
    writeln!(w, "seed={}", cfg.master_seed)?;
    for (name, value) in aggregate_entries(&report.aggregates) {
        writeln!(w, "{}={}", name, value)?;
    }
    Ok(())
}

/// Stage wall-clock TSV. Not deterministic across runs; kept separate from
/// the result files on purpose.
pub fn write_timing_tsv<W: std::io::Write>(w: &mut W, report: &BenchReport) -> std::io::Result<()> {
    tsv::write_row(w, &["stage".to_string(), "seconds".to_string()])?;
    let t = &report.timings;
    for (stage, secs) in [
        ("scenario_generation", report.scenario_seconds),
        ("mi_estimation", t.mi_seconds),
        ("jackknife", t.jackknife_seconds),
        ("regression", t.regression_seconds),
        ("fdr", t.fdr_seconds),
    ] {
        tsv::write_row(w, &[stage.to_string(), format!("{:.3}", secs)])?;
    }
    Ok(())
}

/// Aggregate fields as ordered (name, value) pairs, shared by the replicate
/// footer, the summary file, and the re-aggregation command.
pub fn aggregate_entries(a: &Aggregates) -> Vec<(String, String)> {
    vec![
        ("precision_mean".to_string(), tsv::fmt_opt(a.precision_mean)),
        ("precision_se".to_string(), tsv::fmt_opt(a.precision_se)),
        (
            "precision_defined".to_string(),
            a.precision_defined.to_string(),
        ),
        ("recall_mean".to_string(), tsv::fmt_opt(a.recall_mean)),
        ("recall_se".to_string(), tsv::fmt_opt(a.recall_se)),
        ("recall_defined".to_string(), a.recall_defined.to_string()),
        ("f1_mean".to_string(), tsv::fmt_opt(a.f1_mean)),
        ("f1_se".to_string(), tsv::fmt_opt(a.f1_se)),
        ("f1_defined".to_string(), a.f1_defined.to_string()),
    ]
}

/// Parse the per-replicate rows of a file written by [`write_replicates_tsv`]
/// (footer lines are skipped), for re-aggregation.
pub fn parse_replicates_tsv<R: std::io::Read>(
    reader: R,
) -> Result<Vec<ReplicateScore>, crate::error::DataError> {
    use crate::error::DataError;
    use std::io::BufRead;
    let buf = std::io::BufReader::new(reader);
    let mut rows = Vec::new();
    for (idx, line) in buf.lines().enumerate() {
        let line = line.map_err(|e| DataError::Parse {
            row: idx + 1,
            col: 1,
            msg: e.to_string(),
        })?;
        if idx == 0 || line.starts_with('#') || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(DataError::Parse {
                row: idx + 1,
                col: fields.len(),
                msg: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let parse_opt = |s: &str, col: usize| -> Result<Option<f64>, DataError> {
            if s == "NA" {
                Ok(None)
            } else {
                tsv::parse_cell(s, idx + 1, col).map(Some)
            }
        };
        rows.push(ReplicateScore {
            replicate: fields[0].parse().map_err(|_| DataError::Parse {
                row: idx + 1,
                col: 1,
                msg: "bad replicate index".to_string(),
            })?,
            precision: parse_opt(fields[1], 2)?,
            recall: parse_opt(fields[2], 3)?,
            f1: parse_opt(fields[3], 4)?,
            n_called: fields[4].parse().unwrap_or(0),
            n_true: fields[5].parse().unwrap_or(0),
        });
    }
    Ok(rows)
}
