//! Pairwise mutual-information estimation with a Gaussian kernel density
//! estimator, optional data-processing-inequality pruning, and per-gene total
//! connectivity.
//!
//! For a gene pair the joint density at the observed points is
//! `f(u) = (1/n) sum_i (h_j h_k)^-1 phi((u_x - x_i)/h_j) phi((u_y - y_i)/h_k)`
//! with the product-form marginals from the same kernels, and the MI estimate
//! is the sample mean of `log f(x_i, y_i) / (f(x_i) f(y_i))`, clamped at 0.
//! Bandwidths default to Silverman's rule per dimension on the copula scale.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::dataio::CopulaMatrix;
use crate::error::MinetError;
use crate::tsv;

const SQRT_2PI: f64 = 2.5066282746310002;

/// Per-gene kernel matrices are cached when the total size stays under this
/// budget; above it, rows are recomputed on the fly with identical arithmetic.
const CACHE_BUDGET_BYTES: usize = 512 * 1024 * 1024;

/// Bandwidth selection rule for the kernel density estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    /// `h = 1.06 * sd * n^(-1/5)` per dimension (sample sd, n-1 denominator).
    Silverman,
    /// A single fixed bandwidth for every gene.
    Fixed(f64),
}

/// Configuration for MI estimation and DPI pruning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub bandwidth_rule: BandwidthRule,
    pub dpi_enabled: bool,
    pub dpi_epsilon: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            bandwidth_rule: BandwidthRule::Silverman,
            dpi_enabled: true,
            dpi_epsilon: 0.0,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<(), MinetError> {
        if let BandwidthRule::Fixed(h) = self.bandwidth_rule {
            if !h.is_finite() || h <= 0.0 {
                return Err(MinetError::TooFewSamples { n: 0 });
            }
        }
        Ok(())
    }
}

/// Symmetric p x p matrix of nonnegative MI estimates with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMatrix {
    pub values: DMatrix<f64>,
    pub gene_ids: Vec<String>,
}

impl AssociationMatrix {
    /// Wrap a matrix, enforcing symmetry, zero diagonal, and nonnegativity.
    pub fn new(values: DMatrix<f64>, gene_ids: Vec<String>) -> Self {
        let p = values.nrows();
        assert_eq!(p, values.ncols(), "association matrix must be square");
        assert_eq!(p, gene_ids.len(), "gene id count must match dimension");
        let mut m = values;
        for j in 0..p {
            m[(j, j)] = 0.0;
            for k in (j + 1)..p {
                let v = m[(j, k)].max(0.0);
                m[(j, k)] = v;
                m[(k, j)] = v;
            }
        }
        AssociationMatrix {
            values: m,
            gene_ids,
        }
    }

    pub fn n_genes(&self) -> usize {
        self.values.nrows()
    }

    /// Square TSV with gene ids as header row and first column.
    pub fn write_tsv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut header = vec![String::new()];
        header.extend(self.gene_ids.iter().cloned());
        tsv::write_row(w, &header)?;
        for j in 0..self.n_genes() {
            let mut row = vec![self.gene_ids[j].clone()];
            for k in 0..self.n_genes() {
                row.push(tsv::fmt_f64(self.values[(j, k)]));
            }
            tsv::write_row(w, &row)?;
        }
        Ok(())
    }
}

/// Nonnegative per-gene column sums of an association matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityVector {
    pub values: Vec<f64>,
    pub gene_ids: Vec<String>,
}

/// Result of MI estimation: the matrix plus indices of constant gene columns
/// (their pairwise MI is defined as 0; a constant gene carries no information).
#[derive(Debug, Clone)]
pub struct MiEstimate {
    pub matrix: AssociationMatrix,
    pub constant_genes: Vec<usize>,
}

/// Estimate the pairwise MI association matrix from copula-transformed data.
///
/// Pair computations are independent and run data-parallel over the upper
/// triangle; the result is bit-identical for any thread count.
pub fn estimate_mi_matrix(
    data: &CopulaMatrix,
    cfg: &KernelConfig,
) -> Result<MiEstimate, MinetError> {
    cfg.validate()?;
    let n = data.values.nrows();
    let p = data.values.ncols();
    if n < 3 {
        return Err(MinetError::TooFewSamples { n });
    }
    if p < 2 {
        return Err(MinetError::TooFewGenes { p });
    }

    let columns: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..n).map(|i| data.values[(i, j)]).collect())
        .collect();
    let bandwidths: Vec<f64> = columns
        .iter()
        .map(|col| match cfg.bandwidth_rule {
            BandwidthRule::Silverman => silverman_bandwidth(col),
            BandwidthRule::Fixed(h) => {
                if column_sd(col) == 0.0 {
                    0.0
                } else {
                    h
                }
            }
        })
        .collect();
    let constant_genes: Vec<usize> = (0..p).filter(|&j| bandwidths[j] <= 0.0).collect();
    if constant_genes.len() == p {
        return Err(MinetError::AllConstant);
    }

    let cache = (p * n * n)
        .checked_mul(8)
        .is_some_and(|b| b <= CACHE_BUDGET_BYTES);
    let kernels: Vec<Option<Vec<f64>>> = if cache {
        (0..p)
            .into_par_iter()
            .map(|j| {
                if bandwidths[j] <= 0.0 {
                    None
                } else {
                    let mut k = vec![0.0; n * n];
                    for i in 0..n {
                        kernel_row(&columns[j], bandwidths[j], i, &mut k[i * n..(i + 1) * n]);
                    }
                    Some(k)
                }
            })
            .collect()
    } else {
        vec![None; p]
    };

    // marginal densities at the observed points, one vector per gene
    let marginals: Vec<Option<Vec<f64>>> = (0..p)
        .into_par_iter()
        .map(|j| {
            if bandwidths[j] <= 0.0 {
                return None;
            }
            let mut out = vec![0.0; n];
            let mut row = vec![0.0; n];
            for (i, slot) in out.iter_mut().enumerate() {
                let r = kernel_slice(&kernels, j, i, n, &columns, &bandwidths, &mut row);
                *slot = r.iter().sum::<f64>() / n as f64;
            }
            Some(out)
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|j| ((j + 1)..p).map(move |k| (j, k)))
        .collect();
    let estimates: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| {
            if bandwidths[j] <= 0.0 || bandwidths[k] <= 0.0 {
                return 0.0;
            }
            let mj = marginals[j].as_ref().unwrap();
            let mk = marginals[k].as_ref().unwrap();
            let mut row_j = vec![0.0; n];
            let mut row_k = vec![0.0; n];
            let mut acc = 0.0;
            for i in 0..n {
                let rj = kernel_slice(&kernels, j, i, n, &columns, &bandwidths, &mut row_j);
                let rk = kernel_slice(&kernels, k, i, n, &columns, &bandwidths, &mut row_k);
                let mut joint = 0.0;
                for m in 0..n {
                    joint += rj[m] * rk[m];
                }
                joint /= n as f64;
                acc += (joint / (mj[i] * mk[i])).ln();
            }
            (acc / n as f64).max(0.0)
        })
        .collect();

    let mut values = DMatrix::zeros(p, p);
    for (&(j, k), &mi) in pairs.iter().zip(estimates.iter()) {
        values[(j, k)] = mi;
        values[(k, j)] = mi;
    }
    let matrix = AssociationMatrix::new(values, data.gene_ids.clone());
    let matrix = if cfg.dpi_enabled {
        apply_dpi(&matrix, cfg.dpi_epsilon)
    } else {
        matrix
    };
    Ok(MiEstimate {
        matrix,
        constant_genes,
    })
}

/// Fill `out` with the kernel row for point `i` of gene `j`, or return the
/// cached row. Cached and recomputed paths share the same arithmetic.
fn kernel_slice<'a>(
    kernels: &'a [Option<Vec<f64>>],
    j: usize,
    i: usize,
    n: usize,
    columns: &[Vec<f64>],
    bandwidths: &[f64],
    out: &'a mut [f64],
) -> &'a [f64] {
    match &kernels[j] {
        Some(k) => &k[i * n..(i + 1) * n],
        None => {
            kernel_row(&columns[j], bandwidths[j], i, out);
            out
        }
    }
}

/// Gaussian kernel contributions of every sample to the density at point `i`.
fn kernel_row(column: &[f64], h: f64, i: usize, out: &mut [f64]) {
    let xi = column[i];
    let inv_h = 1.0 / h;
    let norm = 1.0 / (SQRT_2PI * h);
    for (m, &xm) in column.iter().enumerate() {
        let d = (xi - xm) * inv_h;
        out[m] = (-0.5 * d * d).exp() * norm;
    }
}

/// Silverman's rule-of-thumb bandwidth: `1.06 * sd * n^(-1/5)`.
pub fn silverman_bandwidth(column: &[f64]) -> f64 {
    let sd = column_sd(column);
    1.06 * sd * (column.len() as f64).powf(-0.2)
}

fn column_sd(column: &[f64]) -> f64 {
    let n = column.len() as f64;
    let mean = column.iter().sum::<f64>() / n;
    let ss: f64 = column.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Data-processing-inequality pruning: an edge (j,k) is zeroed when some
/// third gene l satisfies `m[j][k] < min(m[j][l], m[l][k]) - epsilon`.
/// Decisions are made against the input matrix and applied afterwards, which
/// makes the operation order-free and idempotent.
pub fn apply_dpi(m: &AssociationMatrix, epsilon: f64) -> AssociationMatrix {
    let p = m.n_genes();
    let mut out = m.values.clone();
    for j in 0..p {
        for k in (j + 1)..p {
            let mjk = m.values[(j, k)];
            let mut remove = false;
            for l in 0..p {
                if l == j || l == k {
                    continue;
                }
                let indirect = m.values[(j, l)].min(m.values[(l, k)]);
                if mjk < indirect - epsilon {
                    remove = true;
                    break;
                }
            }
            if remove {
                out[(j, k)] = 0.0;
                out[(k, j)] = 0.0;
            }
        }
    }
    AssociationMatrix::new(out, m.gene_ids.clone())
}

/// Total connectivity: exact column sums of the association matrix.
pub fn total_connectivity(m: &AssociationMatrix) -> ConnectivityVector {
    let p = m.n_genes();
    let values = (0..p)
        .map(|k| (0..p).map(|j| m.values[(j, k)]).sum())
        .collect();
    ConnectivityVector {
        values,
        gene_ids: m.gene_ids.clone(),
    }
}

/// Read an association matrix from the square TSV format.
pub fn read_association_tsv<R: std::io::Read>(
    reader: R,
) -> Result<AssociationMatrix, crate::error::DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = rdr.records();
    let header = rows
        .next()
        .ok_or(crate::error::DataError::EmptyMatrix { rows: 0, cols: 0 })
        .and_then(|r| {
            r.map_err(|e| crate::error::DataError::Parse {
                row: 1,
                col: 1,
                msg: e.to_string(),
            })
        })?;
    let gene_ids: Vec<String> = header.iter().skip(1).map(|s| s.to_string()).collect();
    let p = gene_ids.len();
    let mut values = DMatrix::zeros(p, p);
    for (j, rec) in rows.enumerate() {
        let rec = rec.map_err(|e| crate::error::DataError::Parse {
            row: j + 2,
            col: 1,
            msg: e.to_string(),
        })?;
        for k in 0..p {
            let cell = rec.get(k + 1).ok_or(crate::error::DataError::Parse {
                row: j + 2,
                col: k + 2,
                msg: "missing cell".to_string(),
            })?;
            values[(j, k)] = tsv::parse_cell(cell, j + 2, k + 2)?;
        }
    }
    Ok(AssociationMatrix::new(values, gene_ids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{copula_transform, ExpressionMatrix};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ids(prefix: &str, k: usize) -> Vec<String> {
        (0..k).map(|i| format!("{}{}", prefix, i)).collect()
    }

    fn assoc(p: usize, entries: &[(usize, usize, f64)]) -> AssociationMatrix {
        let mut m = DMatrix::zeros(p, p);
        for &(j, k, v) in entries {
            m[(j, k)] = v;
            m[(k, j)] = v;
        }
        AssociationMatrix::new(m, ids("g", p))
    }

    fn gaussian_pair(n: usize, rho: f64, seed: u64) -> CopulaMatrix {
        let mut rng = crate::rng::rng_from(seed);
        let mut data = Vec::with_capacity(n * 2);
        for _ in 0..n {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let x = z1;
            let y = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
            data.push(x.exp()); // strictly monotone re-expression; copula invariant
            data.push(y.exp());
        }
        let expr = ExpressionMatrix::new(
            DMatrix::from_row_slice(n, 2, &data),
            ids("s", n),
            ids("g", 2),
        )
        .unwrap();
        copula_transform(&expr)
    }

    fn no_dpi() -> KernelConfig {
        KernelConfig {
            dpi_enabled: false,
            ..KernelConfig::default()
        }
    }

    #[test]
    fn independent_uniforms_have_small_mi() {
        let mut rng = crate::rng::rng_from(501);
        let n = 500;
        let data: Vec<f64> = (0..n * 2).map(|_| rng.gen_range(0.0..1.0f64)).collect();
        let expr = ExpressionMatrix::new(
            DMatrix::from_row_slice(n, 2, &data),
            ids("s", n),
            ids("g", 2),
        )
        .unwrap();
        let cop = copula_transform(&expr);
        let est = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        assert!(
            est.matrix.values[(0, 1)] < 0.05,
            "independent MI = {}",
            est.matrix.values[(0, 1)]
        );
    }

    #[test]
    fn perfect_dependence_beats_independence() {
        let n = 200;
        let mut rng = crate::rng::rng_from(77);
        let mut data = Vec::with_capacity(n * 4);
        for _ in 0..n {
            let x: f64 = rng.gen_range(0.0..1.0);
            let u: f64 = rng.gen_range(0.0..1.0);
            let v: f64 = rng.gen_range(0.0..1.0);
            data.push(x);
            data.push((3.0 * x).exp()); // monotone function of x
            data.push(u);
            data.push(v);
        }
        let expr = ExpressionMatrix::new(
            DMatrix::from_row_slice(n, 4, &data),
            ids("s", n),
            ids("g", 4),
        )
        .unwrap();
        let cop = copula_transform(&expr);
        let est = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        let dependent = est.matrix.values[(0, 1)];
        let independent = est.matrix.values[(2, 3)];
        assert!(
            dependent > independent,
            "dependent {} should exceed independent {}",
            dependent,
            independent
        );
    }

    #[test]
    fn gaussian_rho_08_near_analytic() {
        // analytic MI of a bivariate Gaussian: -0.5 ln(1 - rho^2)
        let cop = gaussian_pair(1000, 0.8, 42);
        let est = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        let analytic = -0.5 * (1.0 - 0.8f64 * 0.8).ln();
        assert!(
            (est.matrix.values[(0, 1)] - analytic).abs() < 0.15,
            "estimate {} vs analytic {}",
            est.matrix.values[(0, 1)],
            analytic
        );
    }

    #[test]
    fn constant_column_yields_zero_mi_with_warning() {
        let mut data = Vec::new();
        let mut rng = crate::rng::rng_from(3);
        for _ in 0..30 {
            data.push(rng.gen_range(0.0..1.0f64));
            data.push(5.0);
            data.push(rng.gen_range(0.0..1.0f64));
        }
        let expr = ExpressionMatrix::new(
            DMatrix::from_row_slice(30, 3, &data),
            ids("s", 30),
            ids("g", 3),
        )
        .unwrap();
        let cop = copula_transform(&expr);
        let est = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        assert_eq!(est.constant_genes, vec![1]);
        assert_eq!(est.matrix.values[(0, 1)], 0.0);
        assert_eq!(est.matrix.values[(1, 2)], 0.0);
    }

    #[test]
    fn all_constant_is_an_error() {
        let data = vec![1.0; 20];
        let expr = ExpressionMatrix::new(
            DMatrix::from_row_slice(10, 2, &data),
            ids("s", 10),
            ids("g", 2),
        )
        .unwrap();
        let cop = copula_transform(&expr);
        assert!(matches!(
            estimate_mi_matrix(&cop, &no_dpi()),
            Err(MinetError::AllConstant)
        ));
    }

    #[test]
    fn too_few_samples_rejected() {
        let expr = ExpressionMatrix::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]),
            ids("s", 2),
            ids("g", 2),
        )
        .unwrap();
        let cop = copula_transform(&expr);
        assert!(matches!(
            estimate_mi_matrix(&cop, &no_dpi()),
            Err(MinetError::TooFewSamples { n: 2 })
        ));
    }

    #[test]
    fn mi_invariant_under_sample_permutation() {
        let cop = gaussian_pair(60, 0.5, 9);
        let est1 = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        let n = cop.values.nrows();
        let perm: Vec<usize> = (0..n).rev().collect();
        let mut values = DMatrix::zeros(n, 2);
        for (out, &i) in perm.iter().enumerate() {
            values[(out, 0)] = cop.values[(i, 0)];
            values[(out, 1)] = cop.values[(i, 1)];
        }
        let cop2 = CopulaMatrix {
            values,
            sample_ids: cop.sample_ids.clone(),
            gene_ids: cop.gene_ids.clone(),
        };
        let est2 = estimate_mi_matrix(&cop2, &no_dpi()).unwrap();
        assert_relative_eq!(
            est1.matrix.values[(0, 1)],
            est2.matrix.values[(0, 1)],
            max_relative = 1e-12
        );
    }

    #[test]
    fn dpi_removes_weakest_triangle_edge() {
        let m = assoc(3, &[(0, 1, 0.1), (0, 2, 0.5), (2, 1, 0.5)]);
        let pruned = apply_dpi(&m, 0.0);
        assert_eq!(pruned.values[(0, 1)], 0.0);
        assert_eq!(pruned.values[(0, 2)], 0.5);
        assert_eq!(pruned.values[(1, 2)], 0.5);
    }

    #[test]
    fn dpi_two_genes_unchanged() {
        let m = assoc(2, &[(0, 1, 0.4)]);
        let pruned = apply_dpi(&m, 0.0);
        assert_eq!(pruned.values, m.values);
    }

    #[test]
    fn dpi_matches_brute_force_oracle_and_is_idempotent() {
        let mut rng = crate::rng::rng_from(2024);
        for _ in 0..30 {
            let p = 6;
            let mut m = DMatrix::zeros(p, p);
            for j in 0..p {
                for k in (j + 1)..p {
                    let v = rng.gen_range(0.0..1.0f64);
                    m[(j, k)] = v;
                    m[(k, j)] = v;
                }
            }
            let a = AssociationMatrix::new(m, ids("g", p));
            let pruned = apply_dpi(&a, 0.0);

            // brute-force triple loop: mark, then zero
            let mut expect = a.values.clone();
            for j in 0..p {
                for k in 0..p {
                    if j == k {
                        continue;
                    }
                    let mut weakest = false;
                    for l in 0..p {
                        if l == j || l == k {
                            continue;
                        }
                        if a.values[(j, k)] < a.values[(j, l)].min(a.values[(l, k)]) {
                            weakest = true;
                        }
                    }
                    if weakest {
                        expect[(j, k)] = 0.0;
                    }
                }
            }
            assert_eq!(pruned.values, expect);

            let twice = apply_dpi(&pruned, 0.0);
            assert_eq!(twice.values, pruned.values);
            // never increases
            for (b, a_) in pruned.values.iter().zip(a.values.iter()) {
                assert!(b <= a_);
            }
        }
    }

    #[test]
    fn connectivity_uniform_offdiagonal() {
        let m = assoc(3, &[(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)]);
        let c = total_connectivity(&m);
        for v in c.values {
            assert_relative_eq!(v, 1.0);
        }
    }

    #[test]
    fn connectivity_zero_matrix() {
        let m = assoc(4, &[]);
        let c = total_connectivity(&m);
        assert!(c.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn connectivity_matches_naive_sum_and_doubles_upper_triangle() {
        let mut rng = crate::rng::rng_from(55);
        let p = 8;
        let mut m = DMatrix::zeros(p, p);
        let mut upper = 0.0;
        for j in 0..p {
            for k in (j + 1)..p {
                let v = rng.gen_range(0.0..2.0f64);
                m[(j, k)] = v;
                m[(k, j)] = v;
                upper += v;
            }
        }
        let a = AssociationMatrix::new(m, ids("g", p));
        let c = total_connectivity(&a);
        for k in 0..p {
            let naive: f64 = (0..p).map(|j| a.values[(j, k)]).sum();
            assert_relative_eq!(c.values[k], naive, max_relative = 1e-12);
        }
        let total: f64 = c.values.iter().sum();
        assert_relative_eq!(total, 2.0 * upper, max_relative = 1e-9);
    }

    #[test]
    fn association_round_trips_through_tsv() {
        let m = assoc(3, &[(0, 1, 0.1234567891234568), (1, 2, 1.0 / 3.0)]);
        let mut buf = Vec::new();
        m.write_tsv(&mut buf).unwrap();
        let back = read_association_tsv(buf.as_slice()).unwrap();
        assert_eq!(back.gene_ids, m.gene_ids);
        for (a, b) in m.values.iter().zip(back.values.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn cached_and_streaming_paths_agree_bitwise() {
        let cop = gaussian_pair(40, 0.6, 13);
        let est_cached = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        // streaming path: recompute with the cache budget effectively disabled
        // by estimating through the public API on the same data after scaling
        // p*n*n above the budget is impractical here, so instead check the
        // row function directly against cached rows.
        let n = cop.values.nrows();
        let col: Vec<f64> = (0..n).map(|i| cop.values[(i, 0)]).collect();
        let h = silverman_bandwidth(&col);
        let mut row = vec![0.0; n];
        kernel_row(&col, h, 3, &mut row);
        let mut full = vec![0.0; n * n];
        for i in 0..n {
            kernel_row(&col, h, i, &mut full[i * n..(i + 1) * n]);
        }
        for m in 0..n {
            assert_eq!(row[m].to_bits(), full[3 * n + m].to_bits());
        }
        // determinism across repeated runs
        let est2 = estimate_mi_matrix(&cop, &no_dpi()).unwrap();
        for (a, b) in est_cached
            .matrix
            .values
            .iter()
            .zip(est2.matrix.values.iter())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn gene_reorder_permutes_output() {
        let cop = gaussian_pair(50, 0.7, 21);
        // add a third independent gene
        let n = cop.values.nrows();
        let mut rng = crate::rng::rng_from(99);
        let mut vals = DMatrix::zeros(n, 3);
        for i in 0..n {
            vals[(i, 0)] = cop.values[(i, 0)];
            vals[(i, 1)] = cop.values[(i, 1)];
            vals[(i, 2)] = rng.gen_range(0.01..0.99);
        }
        let c3 = CopulaMatrix {
            values: vals.clone(),
            sample_ids: cop.sample_ids.clone(),
            gene_ids: ids("g", 3),
        };
        let est = estimate_mi_matrix(&c3, &no_dpi()).unwrap();
        // swap genes 0 and 2
        let mut swapped = DMatrix::zeros(n, 3);
        for i in 0..n {
            swapped[(i, 0)] = vals[(i, 2)];
            swapped[(i, 1)] = vals[(i, 1)];
            swapped[(i, 2)] = vals[(i, 0)];
        }
        let cs = CopulaMatrix {
            values: swapped,
            sample_ids: cop.sample_ids.clone(),
            gene_ids: vec!["g2".into(), "g1".into(), "g0".into()],
        };
        let est_s = estimate_mi_matrix(&cs, &no_dpi()).unwrap();
        assert_relative_eq!(
            est.matrix.values[(0, 1)],
            est_s.matrix.values[(2, 1)],
            max_relative = 1e-12
        );
        assert_relative_eq!(
            est.matrix.values[(0, 2)],
            est_s.matrix.values[(2, 0)],
            max_relative = 1e-12
        );
    }
}
