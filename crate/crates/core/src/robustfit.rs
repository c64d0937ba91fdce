//! Per-gene least-trimmed-squares regression of pseudo-values on group and
//! covariates.
//!
//! The LTS objective is the sum of the h smallest squared residuals with
//! h = floor(trim_c * n) + 1 (trim_c is the coverage proportion, default
//! 0.875). The optimizer is FAST-LTS: elemental starts refined by
//! concentration steps (fit OLS on the current h-subset, re-select the h
//! smallest squared residuals) until the subset stabilizes. When the number
//! of elemental subsets is small they are enumerated exhaustively; otherwise
//! `n_starts` seeded random starts are drawn.
//!
//! Inference follows the reweighting convention of classical LTS software:
//! the raw optimum yields a scale estimate (with the normal-model consistency
//! factor at coverage h/n), observations with standardized residuals within
//! 2.5 are refit by OLS, and the reported `beta_hat`, standard error, t and
//! p come from that reweighted fit (its residual variance corrected for the
//! 2.5 truncation). `coefficients` keeps the raw LTS argmin.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::dataio::CovariateTable;
use crate::error::FitError;
use crate::pseudo::PseudoValueMatrix;
use crate::rng::{rng_from, substream};
use crate::tsv;

/// Above this count of elemental d-subsets, random starts are used instead of
/// full enumeration.
const ELEMENTAL_ENUM_CAP: u64 = 256;

/// Cutoff (in standardized residuals) for the reweighting step.
const REWEIGHT_CUTOFF: f64 = 2.5;

/// Regression design: intercept, group (coded 0/1), then covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub values: DMatrix<f64>,
    pub column_names: Vec<String>,
}

/// Which regressors enter the per-gene model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Intercept + group + all covariates.
    Multivariable,
    /// Intercept + group only.
    Univariable,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Multivariable => "multivariable",
            Model::Univariable => "univariable",
        }
    }
}

impl DesignMatrix {
    /// Build from a covariate table. Group levels {1,2} are recoded {0,1};
    /// the coding only shifts the intercept, decisions are unchanged.
    pub fn from_covariates(cov: &CovariateTable, model: Model) -> Result<Self, FitError> {
        let n = cov.n_samples();
        let q = match model {
            Model::Multivariable => cov.n_covariates(),
            Model::Univariable => 0,
        };
        let mut values = DMatrix::zeros(n, 2 + q);
        let mut column_names = vec!["intercept".to_string(), "group".to_string()];
        for i in 0..n {
            values[(i, 0)] = 1.0;
            values[(i, 1)] = if cov.group[i] == 2 { 1.0 } else { 0.0 };
        }
        if let Model::Multivariable = model {
            for j in 0..q {
                for i in 0..n {
                    values[(i, 2 + j)] = cov.covariates[(i, j)];
                }
            }
            column_names.extend(cov.covariate_names.iter().cloned());
        }
        let d = DesignMatrix {
            values,
            column_names,
        };
        d.check_full_rank()?;
        Ok(d)
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    fn check_full_rank(&self) -> Result<(), FitError> {
        let xtx = self.values.transpose() * &self.values;
        let svd = xtx.svd(false, false);
        let max = svd.singular_values.max();
        let min = svd.singular_values.min();
        if min.is_nan() || min <= max * 1e-12 {
            return Err(FitError::RankDeficient);
        }
        Ok(())
    }
}

/// Tuning for the FAST-LTS optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtsConfig {
    /// Coverage proportion in [0.5, 1.0); h = floor(trim_c * n) + 1.
    pub trim_c: f64,
    pub n_starts: usize,
    pub cstep_max: usize,
    pub seed: u64,
}

impl Default for LtsConfig {
    fn default() -> Self {
        LtsConfig {
            trim_c: 0.875,
            n_starts: 50,
            cstep_max: 30,
            seed: 0,
        }
    }
}

impl LtsConfig {
    /// Subset size for n rows: floor(trim_c * n) + 1, capped at n.
    pub fn h_for(&self, n: usize) -> usize {
        (((self.trim_c * n as f64).floor() as usize) + 1).min(n)
    }
}

/// Per-gene fit result.
#[derive(Debug, Clone)]
pub struct GeneFit {
    pub gene_id: String,
    /// Group coefficient from the reweighted fit (used for inference).
    pub beta_hat: f64,
    pub se_beta: f64,
    pub t_stat: f64,
    pub p_value: f64,
    /// Raw LTS argmin coefficient vector (intercept, group, covariates...).
    pub coefficients: Vec<f64>,
    pub h_used: usize,
    pub converged: bool,
    /// Residual degrees of freedom used for the t reference: n - (q + 2).
    pub df: f64,
}

/// Fit one response vector by FAST-LTS.
pub fn fit_lts(y: &[f64], design: &DesignMatrix, cfg: &LtsConfig) -> Result<GeneFit, FitError> {
    let n = design.n_rows();
    let d = design.n_cols();
    if y.len() != n {
        return Err(FitError::TooFewRows {
            n: y.len(),
            cols: d,
        });
    }
    if n <= d {
        return Err(FitError::TooFewRows { n, cols: d });
    }
    if let Some(row) = y.iter().position(|v| !v.is_finite()) {
        return Err(FitError::NonFinite { row });
    }
    design.check_full_rank()?;

    let h = cfg.h_for(n);
    if h <= d {
        return Err(FitError::TooFewRows { n, cols: d });
    }
    let x = &design.values;
    let yv = DVector::from_column_slice(y);

    let mut best_obj = f64::INFINITY;
    let mut best_coef: Option<DVector<f64>> = None;
    let mut best_converged = false;

    let run_start = |coef0: DVector<f64>,
                     best_obj: &mut f64,
                     best_coef: &mut Option<DVector<f64>>,
                     best_converged: &mut bool| {
        let mut coef = coef0;
        let mut subset_prev: Option<Vec<usize>> = None;
        let mut converged = false;
        for _ in 0..cfg.cstep_max {
            let subset = smallest_h_residuals(x, &yv, &coef, h);
            if subset_prev.as_ref() == Some(&subset) {
                converged = true;
                break;
            }
            match ols_on_subset(x, &yv, &subset) {
                Some(next) => coef = next,
                None => return,
            }
            subset_prev = Some(subset);
        }
        let subset = smallest_h_residuals(x, &yv, &coef, h);
        let obj: f64 = subset
            .iter()
            .map(|&i| {
                let r = yv[i] - x.row(i).transpose().dot(&coef);
                r * r
            })
            .sum();
        if obj < *best_obj {
            *best_obj = obj;
            *best_coef = Some(coef);
            *best_converged = converged;
        }
    };

    let total_subsets = binomial(n as u64, d as u64);
    if total_subsets <= ELEMENTAL_ENUM_CAP {
        let mut subset: Vec<usize> = (0..d).collect();
        loop {
            if let Some(coef0) = exact_fit(x, &yv, &subset) {
                run_start(coef0, &mut best_obj, &mut best_coef, &mut best_converged);
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    } else {
        let mut rng = rng_from(cfg.seed);
        for _ in 0..cfg.n_starts {
            let idx = rand::seq::index::sample(&mut rng, n, d).into_vec();
            if let Some(coef0) = exact_fit(x, &yv, &idx) {
                run_start(coef0, &mut best_obj, &mut best_coef, &mut best_converged);
            }
        }
    }

    let coef = best_coef.ok_or(FitError::RankDeficient)?;

    // raw LTS scale with the normal-model consistency factor at coverage h/n
    let alpha = h as f64 / n as f64;
    let scale = (best_obj / h as f64).sqrt() * consistency_factor(alpha);

    // reweighting: keep observations with |residual| <= 2.5 * scale
    let residuals: Vec<f64> = (0..n)
        .map(|i| yv[i] - x.row(i).transpose().dot(&coef))
        .collect();
    let mut kept: Vec<usize> = if scale > 0.0 {
        (0..n)
            .filter(|&i| residuals[i].abs() <= REWEIGHT_CUTOFF * scale)
            .collect()
    } else {
        (0..n).filter(|&i| residuals[i] == 0.0).collect()
    };
    if kept.len() <= d {
        kept = smallest_h_residuals(x, &yv, &coef, h);
    }

    let coef_w = ols_on_subset(x, &yv, &kept).ok_or(FitError::RankDeficient)?;
    let n_w = kept.len();
    let rss_w: f64 = kept
        .iter()
        .map(|&i| {
            let r = yv[i] - x.row(i).transpose().dot(&coef_w);
            r * r
        })
        .sum();
    // classical OLS variance on the kept rows, corrected for the variance
    // lost to the 2.5-sigma truncation of a normal error
    let dof_w = (n_w as f64 - d as f64).max(1.0);
    let sigma2 = (rss_w / dof_w) / truncation_factor(REWEIGHT_CUTOFF);
    let xtx_w = subset_xtx(x, &kept);
    let cov = Cholesky::new(xtx_w)
        .ok_or(FitError::RankDeficient)?
        .inverse()
        * sigma2;

    let beta_hat = coef_w[1];
    let se_beta = cov[(1, 1)].max(0.0).sqrt();
    let df = (n - d) as f64;
    let (t_stat, p_value) = t_and_p(beta_hat, se_beta, df);

    Ok(GeneFit {
        gene_id: String::new(),
        beta_hat,
        se_beta,
        t_stat,
        p_value,
        coefficients: coef.iter().copied().collect(),
        h_used: h,
        converged: best_converged,
        df,
    })
}

/// Fit every gene of a pseudo-value matrix. The design is shared; per-gene
/// RNG substreams (`seed XOR gene index`) make the fits independent of
/// execution order and thread count.
pub fn fit_all_genes(
    pv: &PseudoValueMatrix,
    cov: &CovariateTable,
    cfg: &LtsConfig,
    model: Model,
) -> Result<Vec<GeneFit>, FitError> {
    let aligned = cov
        .align_to(&pv.sample_ids)
        .map_err(|e| FitError::Alignment { msg: e.to_string() })?;
    let design = DesignMatrix::from_covariates(&aligned, model)?;
    let p = pv.n_genes();
    let results: Vec<Result<GeneFit, FitError>> = (0..p)
        .into_par_iter()
        .map(|k| {
            let y: Vec<f64> = (0..pv.n_samples()).map(|i| pv.values[(i, k)]).collect();
            let gene_cfg = LtsConfig {
                seed: substream(cfg.seed, k as u64),
                ..*cfg
            };
            fit_lts(&y, &design, &gene_cfg)
                .map(|mut fit| {
                    fit.gene_id = pv.gene_ids[k].clone();
                    fit
                })
                .map_err(|e| FitError::Gene {
                    gene_id: pv.gene_ids[k].clone(),
                    source: Box::new(e),
                })
        })
        .collect();
    results.into_iter().collect()
}

/// TSV with columns gene, beta, se, t, p, then one column per coefficient of
/// the raw LTS solution.
pub fn write_gene_fits_tsv<W: std::io::Write>(
    w: &mut W,
    fits: &[GeneFit],
    column_names: &[String],
) -> std::io::Result<()> {
    let mut header = vec![
        "gene".to_string(),
        "beta".to_string(),
        "se".to_string(),
        "t".to_string(),
        "p".to_string(),
    ];
    for name in column_names {
        header.push(format!("coef_{}", name));
    }
    tsv::write_row(w, &header)?;
    for fit in fits {
        let mut row = vec![
            fit.gene_id.clone(),
            tsv::fmt_f64(fit.beta_hat),
            tsv::fmt_f64(fit.se_beta),
            tsv::fmt_f64(fit.t_stat),
            tsv::fmt_f64(fit.p_value),
        ];
        for c in &fit.coefficients {
            row.push(tsv::fmt_f64(*c));
        }
        tsv::write_row(w, &row)?;
    }
    Ok(())
}

/// Two-sided p-value from a t reference with `df` degrees of freedom.
pub fn t_and_p(beta: f64, se: f64, df: f64) -> (f64, f64) {
    if se == 0.0 {
        return if beta == 0.0 {
            (0.0, 1.0)
        } else if beta > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 0.0)
        };
    }
    let t = beta / se;
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    (t, p.clamp(0.0, 1.0))
}

/// Indices of the h smallest squared residuals (ties broken by index).
fn smallest_h_residuals(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    coef: &DVector<f64>,
    h: usize,
) -> Vec<usize> {
    let n = x.nrows();
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let r = y[i] - x.row(i).transpose().dot(coef);
            (r * r, i)
        })
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut subset: Vec<usize> = order[..h].iter().map(|&(_, i)| i).collect();
    subset.sort_unstable();
    subset
}

fn subset_xtx(x: &DMatrix<f64>, subset: &[usize]) -> DMatrix<f64> {
    let d = x.ncols();
    let mut xtx = DMatrix::zeros(d, d);
    for &i in subset {
        let row = x.row(i);
        for a in 0..d {
            for b in 0..d {
                xtx[(a, b)] += row[a] * row[b];
            }
        }
    }
    xtx
}

/// OLS on a row subset via normal equations; None when the subset is singular.
fn ols_on_subset(x: &DMatrix<f64>, y: &DVector<f64>, subset: &[usize]) -> Option<DVector<f64>> {
    let d = x.ncols();
    let xtx = subset_xtx(x, subset);
    let mut xty = DVector::zeros(d);
    for &i in subset {
        let row = x.row(i);
        for a in 0..d {
            xty[a] += row[a] * y[i];
        }
    }
    Cholesky::new(xtx).map(|c| c.solve(&xty))
}

/// Exact fit through d rows (an elemental start); None when degenerate.
fn exact_fit(x: &DMatrix<f64>, y: &DVector<f64>, subset: &[usize]) -> Option<DVector<f64>> {
    let d = x.ncols();
    let mut a = DMatrix::zeros(d, d);
    let mut b = DVector::zeros(d);
    for (r, &i) in subset.iter().enumerate() {
        for c in 0..d {
            a[(r, c)] = x[(i, c)];
        }
        b[r] = y[i];
    }
    a.lu().solve(&b)
}

/// Consistency factor for the trimmed scale under a normal model:
/// 1 / sqrt(1 - 2 q phi(q) / alpha) with q = Phi^-1((1 + alpha) / 2).
pub fn consistency_factor(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let q = normal.inverse_cdf((1.0 + alpha) / 2.0);
    let phi_q = (-0.5 * q * q).exp() / (2.0 * std::f64::consts::PI).sqrt();
    1.0 / (1.0 - 2.0 * q * phi_q / alpha).sqrt()
}

/// Variance retained by a normal error truncated at +-c standard deviations:
/// 1 - 2 c phi(c) / (2 Phi(c) - 1).
pub fn truncation_factor(c: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let phi_c = (-0.5 * c * c).exp() / (2.0 * std::f64::consts::PI).sqrt();
    1.0 - 2.0 * c * phi_c / (2.0 * normal.cdf(c) - 1.0)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Next lexicographic k-combination of 0..n; false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
