//! End-to-end analysis: per-group network estimation, jackknife
//! pseudo-values, per-gene robust regression, and FDR calls.

use crate::dataio::{CovariateTable, ExpressionMatrix};
use crate::error::{PranaError, PseudoError};
use crate::fdr::{call_dc, DnResultTable, FdrMethod};
use crate::minet::KernelConfig;
use crate::pseudo::{
    assemble_pseudo_matrix, jackknife_connectivity, pseudo_values, GroupPseudoValues,
    MiConnectivity, PseudoValueMatrix,
};
use crate::robustfit::{fit_all_genes, DesignMatrix, GeneFit, LtsConfig, Model};

/// Options for one analysis run.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub kernel: KernelConfig,
    pub lts: LtsConfig,
    pub fdr_method: FdrMethod,
    pub alpha: f64,
    pub model: Model,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            kernel: KernelConfig::default(),
            lts: LtsConfig::default(),
            fdr_method: FdrMethod::Bh,
            alpha: 0.05,
            model: Model::Multivariable,
        }
    }
}

/// Wall-clock per pipeline stage, in seconds.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub mi_seconds: f64,
    pub jackknife_seconds: f64,
    pub regression_seconds: f64,
    pub fdr_seconds: f64,
}

impl StageTimings {
    pub fn add(&mut self, other: &StageTimings) {
        self.mi_seconds += other.mi_seconds;
        self.jackknife_seconds += other.jackknife_seconds;
        self.regression_seconds += other.regression_seconds;
        self.fdr_seconds += other.fdr_seconds;
    }
}

/// Everything one analysis produces.
#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub pseudo: PseudoValueMatrix,
    pub fits: Vec<GeneFit>,
    pub table: DnResultTable,
    pub design_columns: Vec<String>,
    pub timings: StageTimings,
}

/// Run the full pipeline on an expression matrix and covariate table.
/// Covariates are aligned to the expression rows by sample id first.
pub fn run_analysis(
    expr: &ExpressionMatrix,
    cov: &CovariateTable,
    opts: &AnalysisOptions,
) -> Result<AnalysisResult, PranaError> {
    let cov = cov
        .align_to(&expr.sample_ids)
        .map_err(PseudoError::Data)
        .map_err(PranaError::Pseudo)?;

    let estimator = MiConnectivity {
        kernel: opts.kernel,
    };
    let mut timings = StageTimings::default();
    let mut groups = Vec::with_capacity(2);
    for z in [1u8, 2u8] {
        let rows = cov.group_rows(z);
        let expr_z = expr.select_rows(&rows);
        let jk = jackknife_connectivity(&expr_z, z, &estimator).map_err(PranaError::Pseudo)?;
        timings.mi_seconds += jk.full_estimate_seconds;
        timings.jackknife_seconds += jk.loo_seconds;
        let values = pseudo_values(&jk.theta_hat, &jk.theta_loo).map_err(PranaError::Pseudo)?;
        groups.push(GroupPseudoValues {
            group: z,
            sample_ids: expr_z.sample_ids.clone(),
            gene_ids: expr_z.gene_ids.clone(),
            values,
        });
    }
    let pseudo = assemble_pseudo_matrix(&groups, &cov).map_err(PranaError::Pseudo)?;

    let t_fit = std::time::Instant::now();
    let fits = fit_all_genes(&pseudo, &cov, &opts.lts, opts.model).map_err(PranaError::Fit)?;
    timings.regression_seconds = t_fit.elapsed().as_secs_f64();

    let t_fdr = std::time::Instant::now();
    let table = call_dc(&fits, opts.fdr_method, opts.alpha).map_err(PranaError::Fdr)?;
    timings.fdr_seconds = t_fdr.elapsed().as_secs_f64();

    let design = DesignMatrix::from_covariates(&cov, opts.model).map_err(PranaError::Fit)?;

    Ok(AnalysisResult {
        pseudo,
        fits,
        table,
        design_columns: design.column_names,
        timings,
    })
}
