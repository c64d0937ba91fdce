//! Group-wise leave-one-out jackknife pseudo-values of total connectivity.
//!
//! For a group of size n, the pseudo-value of sample i at gene k is
//! `n * theta_hat_k - (n - 1) * theta_hat_k(i)`, where `theta_hat_k(i)` is the
//! connectivity re-estimated on the group without sample i. Each leave-one-out
//! fold re-runs the full estimator on the reduced data, including the copula
//! transform (ranks change when a sample is removed).

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dataio::{copula_transform, CovariateTable, ExpressionMatrix};
use crate::error::{MinetError, PseudoError};
use crate::minet::{estimate_mi_matrix, total_connectivity, ConnectivityVector, KernelConfig};

/// Anything that maps an expression matrix to a per-gene connectivity vector.
/// The jackknife is generic over this seam so tests can substitute estimators.
pub trait ConnectivityEstimator: Sync {
    fn connectivity(&self, expr: &ExpressionMatrix) -> Result<ConnectivityVector, MinetError>;
}

/// The standard estimator: copula transform, kernel MI, optional DPI, column sums.
#[derive(Debug, Clone)]
pub struct MiConnectivity {
    pub kernel: KernelConfig,
}

impl ConnectivityEstimator for MiConnectivity {
    fn connectivity(&self, expr: &ExpressionMatrix) -> Result<ConnectivityVector, MinetError> {
        let cop = copula_transform(expr);
        let est = estimate_mi_matrix(&cop, &self.kernel)?;
        Ok(total_connectivity(&est.matrix))
    }
}

/// Full-group connectivity plus the leave-one-out matrix (one row per left-out
/// sample, in group row order). Wall-clock of the two phases is recorded for
/// the benchmark timing report.
#[derive(Debug, Clone)]
pub struct JackknifeResult {
    pub theta_hat: ConnectivityVector,
    pub theta_loo: DMatrix<f64>,
    pub full_estimate_seconds: f64,
    pub loo_seconds: f64,
}

/// n x p pseudo-value matrix with rows aligned to the full sample list.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoValueMatrix {
    pub values: DMatrix<f64>,
    pub gene_ids: Vec<String>,
    pub sample_ids: Vec<String>,
    pub group_of_row: Vec<u8>,
}

impl PseudoValueMatrix {
    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_genes(&self) -> usize {
        self.values.ncols()
    }

    /// TSV with `sample_id`, `group`, then one column per gene.
    pub fn write_tsv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut header = vec!["sample_id".to_string(), "group".to_string()];
        header.extend(self.gene_ids.iter().cloned());
        crate::tsv::write_row(w, &header)?;
        for i in 0..self.n_samples() {
            let mut row = vec![self.sample_ids[i].clone(), self.group_of_row[i].to_string()];
            for j in 0..self.n_genes() {
                row.push(crate::tsv::fmt_f64(self.values[(i, j)]));
            }
            crate::tsv::write_row(w, &row)?;
        }
        Ok(())
    }
}

/// Parse a pseudo-value matrix written by [`PseudoValueMatrix::write_tsv`].
pub fn read_pseudo_tsv<R: std::io::Read>(
    reader: R,
) -> Result<PseudoValueMatrix, crate::error::DataError> {
    use crate::error::DataError;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or(DataError::EmptyMatrix { rows: 0, cols: 0 })
        .and_then(|r| {
            r.map_err(|e| DataError::Parse {
                row: 1,
                col: 1,
                msg: e.to_string(),
            })
        })?;
    let gene_ids: Vec<String> = header.iter().skip(2).map(|s| s.to_string()).collect();
    let p = gene_ids.len();
    let mut sample_ids = Vec::new();
    let mut group = Vec::new();
    let mut data = Vec::new();
    for (idx, rec) in records.enumerate() {
        let rec = rec.map_err(|e| DataError::Parse {
            row: idx + 2,
            col: 1,
            msg: e.to_string(),
        })?;
        sample_ids.push(rec.get(0).unwrap_or("").to_string());
        let g: u8 = rec
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|_| DataError::Parse {
                row: idx + 2,
                col: 2,
                msg: "bad group code".to_string(),
            })?;
        group.push(g);
        for k in 0..p {
            data.push(crate::tsv::parse_cell(
                rec.get(k + 2).unwrap_or(""),
                idx + 2,
                k + 3,
            )?);
        }
    }
    let n = sample_ids.len();
    Ok(PseudoValueMatrix {
        values: DMatrix::from_row_slice(n, p, &data),
        gene_ids,
        sample_ids,
        group_of_row: group,
    })
}

/// Leave-one-out connectivity for one group. Folds are embarrassingly
/// parallel; each works on an immutable snapshot and fills its own row, so
/// results are independent of scheduling.
pub fn jackknife_connectivity<E: ConnectivityEstimator>(
    expr_group: &ExpressionMatrix,
    group_label: u8,
    estimator: &E,
) -> Result<JackknifeResult, PseudoError> {
    let n = expr_group.n_samples();
    if n < 4 {
        return Err(PseudoError::GroupTooSmall {
            group: group_label,
            n,
        });
    }
    let t0 = std::time::Instant::now();
    let theta_hat = estimator.connectivity(expr_group)?;
    let full_estimate_seconds = t0.elapsed().as_secs_f64();
    let t1 = std::time::Instant::now();
    let p = expr_group.n_genes();
    let rows: Vec<Result<Vec<f64>, PseudoError>> = (0..n)
        .into_par_iter()
        .map(|leave_out| {
            let keep: Vec<usize> = (0..n).filter(|&i| i != leave_out).collect();
            let reduced = expr_group.select_rows(&keep);
            let conn = estimator.connectivity(&reduced)?;
            Ok(conn.values)
        })
        .collect();
    let mut theta_loo = DMatrix::zeros(n, p);
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        for (k, v) in row.into_iter().enumerate() {
            theta_loo[(i, k)] = v;
        }
    }
    Ok(JackknifeResult {
        theta_hat,
        theta_loo,
        full_estimate_seconds,
        loo_seconds: t1.elapsed().as_secs_f64(),
    })
}

/// Pseudo-values from the full-group estimate and the leave-one-out matrix:
/// entry (i, k) = n * theta_hat[k] - (n - 1) * theta_loo[i][k].
pub fn pseudo_values(
    theta_hat: &ConnectivityVector,
    theta_loo: &DMatrix<f64>,
) -> Result<DMatrix<f64>, PseudoError> {
    let n = theta_loo.nrows();
    let p = theta_hat.values.len();
    if theta_loo.ncols() != p {
        return Err(PseudoError::DimensionMismatch {
            msg: format!(
                "theta_hat has {} genes, theta_loo has {} columns",
                p,
                theta_loo.ncols()
            ),
        });
    }
    if n < 2 {
        return Err(PseudoError::DimensionMismatch {
            msg: format!("need at least 2 leave-one-out rows, got {}", n),
        });
    }
    let nf = n as f64;
    let mut out = DMatrix::zeros(n, p);
    for i in 0..n {
        for k in 0..p {
            out[(i, k)] = nf * theta_hat.values[k] - (nf - 1.0) * theta_loo[(i, k)];
        }
    }
    Ok(out)
}

/// One group's pseudo-values with sample metadata, ready to be stacked.
#[derive(Debug, Clone)]
pub struct GroupPseudoValues {
    pub group: u8,
    pub sample_ids: Vec<String>,
    pub gene_ids: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Stack per-group pseudo-values back into the covariate table's sample order.
/// Rows are matched by sample id, so input order never matters.
pub fn assemble_pseudo_matrix(
    groups: &[GroupPseudoValues],
    covariates: &CovariateTable,
) -> Result<PseudoValueMatrix, PseudoError> {
    if groups.is_empty() {
        return Err(PseudoError::DimensionMismatch {
            msg: "no group results".to_string(),
        });
    }
    let gene_ids = groups[0].gene_ids.clone();
    for g in groups.iter().skip(1) {
        if g.gene_ids != gene_ids {
            return Err(PseudoError::GeneOrderMismatch);
        }
    }
    let p = gene_ids.len();
    let n = covariates.n_samples();
    let total_rows: usize = groups.iter().map(|g| g.sample_ids.len()).sum();
    if total_rows != n {
        return Err(PseudoError::DimensionMismatch {
            msg: format!(
                "groups provide {} rows, covariate table has {}",
                total_rows, n
            ),
        });
    }
    let mut values = DMatrix::zeros(n, p);
    let mut seen = vec![false; n];
    for g in groups {
        for (local, sid) in g.sample_ids.iter().enumerate() {
            let row = covariates
                .sample_ids
                .iter()
                .position(|s| s == sid)
                .ok_or_else(|| PseudoError::DimensionMismatch {
                    msg: format!("sample {:?} not present in covariate table", sid),
                })?;
            if covariates.group[row] != g.group {
                return Err(PseudoError::DimensionMismatch {
                    msg: format!(
                        "sample {:?} labeled group {} but computed in group {}",
                        sid, covariates.group[row], g.group
                    ),
                });
            }
            if seen[row] {
                return Err(PseudoError::DimensionMismatch {
                    msg: format!("sample {:?} appears twice", sid),
                });
            }
            seen[row] = true;
            for k in 0..p {
                values[(row, k)] = g.values[(local, k)];
            }
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(PseudoError::DimensionMismatch {
            msg: "some covariate samples received no pseudo-values".to_string(),
        });
    }
    Ok(PseudoValueMatrix {
        values,
        gene_ids,
        sample_ids: covariates.sample_ids.clone(),
        group_of_row: covariates.group.clone(),
    })
}
