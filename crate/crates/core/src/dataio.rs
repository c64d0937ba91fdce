//! Expression and covariate ingestion, validation, and the copula transform.
//!
//! File conventions: delimiter-separated UTF-8, header row carries gene ids,
//! first column carries sample ids. Values are nonnegative counts with no
//! missing cells; incomplete rows are rejected rather than imputed because
//! the leave-one-out resampling downstream assumes complete matrices.

use std::collections::HashSet;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::DataError;
use crate::tsv;

/// Input file format for expression and covariate tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Tsv,
    Csv,
}

impl FileFormat {
    fn delimiter(self) -> u8 {
        match self {
            FileFormat::Tsv => b'\t',
            FileFormat::Csv => b',',
        }
    }
}

/// n samples x p genes of nonnegative counts, with row and column ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    pub values: DMatrix<f64>,
    pub sample_ids: Vec<String>,
    pub gene_ids: Vec<String>,
}

impl ExpressionMatrix {
    /// Build and validate: dimensions >= 2x2, nonnegative finite values,
    /// unique ids, id lengths matching the matrix.
    pub fn new(
        values: DMatrix<f64>,
        sample_ids: Vec<String>,
        gene_ids: Vec<String>,
    ) -> Result<Self, DataError> {
        let (n, p) = (values.nrows(), values.ncols());
        if n < 2 || p < 2 {
            return Err(DataError::EmptyMatrix { rows: n, cols: p });
        }
        if sample_ids.len() != n || gene_ids.len() != p {
            return Err(DataError::SampleMismatch {
                msg: format!(
                    "matrix is {}x{} but got {} sample ids and {} gene ids",
                    n,
                    p,
                    sample_ids.len(),
                    gene_ids.len()
                ),
            });
        }
        check_unique(&gene_ids)?;
        check_unique(&sample_ids)?;
        for i in 0..n {
            for j in 0..p {
                let v = values[(i, j)];
                if !v.is_finite() {
                    return Err(DataError::Parse {
                        row: i + 2,
                        col: j + 2,
                        msg: "non-finite value".to_string(),
                    });
                }
                if v < 0.0 {
                    return Err(DataError::NegativeValue {
                        row: i + 2,
                        col: j + 2,
                        value: v,
                    });
                }
            }
        }
        Ok(ExpressionMatrix {
            values,
            sample_ids,
            gene_ids,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_genes(&self) -> usize {
        self.values.ncols()
    }

    /// A copy restricted to the given sample rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> ExpressionMatrix {
        let p = self.n_genes();
        let mut values = DMatrix::zeros(rows.len(), p);
        let mut ids = Vec::with_capacity(rows.len());
        for (out, &r) in rows.iter().enumerate() {
            for j in 0..p {
                values[(out, j)] = self.values[(r, j)];
            }
            ids.push(self.sample_ids[r].clone());
        }
        ExpressionMatrix {
            values,
            sample_ids: ids,
            gene_ids: self.gene_ids.clone(),
        }
    }

    /// Write as TSV: header `sample_id<TAB>gene...`, 17-significant-digit cells.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut header = vec!["sample_id".to_string()];
        header.extend(self.gene_ids.iter().cloned());
        tsv::write_row(w, &header)?;
        for i in 0..self.n_samples() {
            let mut row = vec![self.sample_ids[i].clone()];
            for j in 0..self.n_genes() {
                row.push(tsv::fmt_f64(self.values[(i, j)]));
            }
            tsv::write_row(w, &row)?;
        }
        Ok(())
    }
}

/// Per-sample binary group indicator (coded 1/2) plus numeric covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateTable {
    pub sample_ids: Vec<String>,
    /// Group labels in {1, 2}, encoded by lexicographic order of the raw levels.
    pub group: Vec<u8>,
    /// n x q covariate matrix (q may be 0).
    pub covariates: DMatrix<f64>,
    pub covariate_names: Vec<String>,
}

impl CovariateTable {
    pub fn new(
        sample_ids: Vec<String>,
        group: Vec<u8>,
        covariates: DMatrix<f64>,
        covariate_names: Vec<String>,
    ) -> Result<Self, DataError> {
        let n = sample_ids.len();
        if group.len() != n || covariates.nrows() != n {
            return Err(DataError::SampleMismatch {
                msg: format!(
                    "{} sample ids, {} group labels, {} covariate rows",
                    n,
                    group.len(),
                    covariates.nrows()
                ),
            });
        }
        if covariates.ncols() != covariate_names.len() {
            return Err(DataError::SampleMismatch {
                msg: format!(
                    "{} covariate columns but {} names",
                    covariates.ncols(),
                    covariate_names.len()
                ),
            });
        }
        check_unique(&sample_ids)?;
        for (i, &g) in group.iter().enumerate() {
            if g != 1 && g != 2 {
                return Err(DataError::Parse {
                    row: i + 2,
                    col: 2,
                    msg: format!("group code {} not in {{1, 2}}", g),
                });
            }
        }
        for z in [1u8, 2u8] {
            let count = group.iter().filter(|&&g| g == z).count();
            if count < 2 {
                return Err(DataError::SingletonGroup {
                    level: z.to_string(),
                    count,
                });
            }
        }
        Ok(CovariateTable {
            sample_ids,
            group,
            covariates,
            covariate_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn n_covariates(&self) -> usize {
        self.covariates.ncols()
    }

    /// Row indices of the samples in group `z`, in table order.
    pub fn group_rows(&self, z: u8) -> Vec<usize> {
        self.group
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == z)
            .map(|(i, _)| i)
            .collect()
    }

    /// Reorder rows so sample ids match `target` exactly. Alignment is by id,
    /// never by position, so a permuted covariate file yields the same table.
    pub fn align_to(&self, target: &[String]) -> Result<CovariateTable, DataError> {
        if target.len() != self.n_samples() {
            return Err(DataError::SampleMismatch {
                msg: format!(
                    "expression has {} samples, covariates have {}",
                    target.len(),
                    self.n_samples()
                ),
            });
        }
        let mut order = Vec::with_capacity(target.len());
        for id in target {
            match self.sample_ids.iter().position(|s| s == id) {
                Some(pos) => order.push(pos),
                None => {
                    return Err(DataError::SampleMismatch {
                        msg: format!("sample {:?} missing from covariate table", id),
                    })
                }
            }
        }
        let q = self.n_covariates();
        let mut cov = DMatrix::zeros(order.len(), q);
        let mut ids = Vec::with_capacity(order.len());
        let mut group = Vec::with_capacity(order.len());
        for (out, &r) in order.iter().enumerate() {
            ids.push(self.sample_ids[r].clone());
            group.push(self.group[r]);
            for j in 0..q {
                cov[(out, j)] = self.covariates[(r, j)];
            }
        }
        CovariateTable::new(ids, group, cov, self.covariate_names.clone())
    }

    /// Keep only the named covariate columns (empty list drops all of them).
    pub fn select_covariates(&self, names: &[String]) -> Result<CovariateTable, DataError> {
        let mut cols = Vec::with_capacity(names.len());
        for name in names {
            match self.covariate_names.iter().position(|c| c == name) {
                Some(j) => cols.push(j),
                None => return Err(DataError::MissingColumn { name: name.clone() }),
            }
        }
        let mut cov = DMatrix::zeros(self.n_samples(), cols.len());
        for (out, &j) in cols.iter().enumerate() {
            for i in 0..self.n_samples() {
                cov[(i, out)] = self.covariates[(i, j)];
            }
        }
        CovariateTable::new(
            self.sample_ids.clone(),
            self.group.clone(),
            cov,
            names.to_vec(),
        )
    }

    /// Write as TSV with columns `sample_id`, `group`, then covariates.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let mut header = vec!["sample_id".to_string(), "group".to_string()];
        header.extend(self.covariate_names.iter().cloned());
        tsv::write_row(w, &header)?;
        for i in 0..self.n_samples() {
            let mut row = vec![self.sample_ids[i].clone(), self.group[i].to_string()];
            for j in 0..self.n_covariates() {
                row.push(tsv::fmt_f64(self.covariates[(i, j)]));
            }
            tsv::write_row(w, &row)?;
        }
        Ok(())
    }
}

/// Column-wise rank transform of an expression matrix; entries lie in (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaMatrix {
    pub values: DMatrix<f64>,
    pub sample_ids: Vec<String>,
    pub gene_ids: Vec<String>,
}

/// Load an expression matrix. First row is the gene header, first column the
/// sample id; every cell is parsed as decimal floating point.
pub fn load_expression(path: &Path, format: FileFormat) -> Result<ExpressionMatrix, DataError> {
    let file = std::fs::File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_expression(BufReader::new(file), format)
}

/// Like [`load_expression`] but from any reader.
pub fn read_expression<R: Read>(
    reader: R,
    format: FileFormat,
) -> Result<ExpressionMatrix, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);

    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(rec)) => rec,
        Some(Err(e)) => {
            return Err(DataError::Parse {
                row: 1,
                col: 1,
                msg: e.to_string(),
            })
        }
        None => return Err(DataError::EmptyMatrix { rows: 0, cols: 0 }),
    };
    if header.len() < 2 {
        return Err(DataError::EmptyMatrix {
            rows: 0,
            cols: header.len().saturating_sub(1),
        });
    }
    let gene_ids: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let p = gene_ids.len();

    let mut sample_ids = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    for (idx, rec) in records.enumerate() {
        let row_no = idx + 2;
        let rec = rec.map_err(|e| DataError::Parse {
            row: row_no,
            col: 1,
            msg: e.to_string(),
        })?;
        if rec.len() != p + 1 {
            return Err(DataError::Parse {
                row: row_no,
                col: rec.len(),
                msg: format!("expected {} fields, found {}", p + 1, rec.len()),
            });
        }
        sample_ids.push(rec.get(0).unwrap_or("").trim().to_string());
        for (j, cell) in rec.iter().skip(1).enumerate() {
            if cell.trim().is_empty() {
                return Err(DataError::Parse {
                    row: row_no,
                    col: j + 2,
                    msg: "missing value".to_string(),
                });
            }
            data.push(tsv::parse_cell(cell, row_no, j + 2)?);
        }
    }
    let n = sample_ids.len();
    if n == 0 {
        return Err(DataError::EmptyMatrix { rows: 0, cols: p });
    }
    let values = DMatrix::from_row_slice(n, p, &data);
    ExpressionMatrix::new(values, sample_ids, gene_ids)
}

/// Load a covariate table. The named group column must have exactly two
/// distinct levels; they are encoded {1, 2} in lexicographic order. All other
/// columns must be numeric and become covariates.
pub fn load_covariates(path: &Path, group_column: &str) -> Result<CovariateTable, DataError> {
    let file = std::fs::File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_covariates(BufReader::new(file), FileFormat::Tsv, group_column)
}

/// Like [`load_covariates`] but from any reader with an explicit format.
pub fn read_covariates<R: Read>(
    reader: R,
    format: FileFormat,
    group_column: &str,
) -> Result<CovariateTable, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(rec)) => rec,
        Some(Err(e)) => {
            return Err(DataError::Parse {
                row: 1,
                col: 1,
                msg: e.to_string(),
            })
        }
        None => return Err(DataError::EmptyMatrix { rows: 0, cols: 0 }),
    };
    let columns: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let group_idx = columns
        .iter()
        .position(|c| c == group_column)
        .ok_or_else(|| DataError::MissingColumn {
            name: group_column.to_string(),
        })?;

    let mut sample_ids = Vec::new();
    let mut raw_groups: Vec<String> = Vec::new();
    let mut cov_rows: Vec<Vec<f64>> = Vec::new();
    let cov_names: Vec<String> = columns
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != group_idx)
        .map(|(_, c)| c.clone())
        .collect();

    for (idx, rec) in records.enumerate() {
        let row_no = idx + 2;
        let rec = rec.map_err(|e| DataError::Parse {
            row: row_no,
            col: 1,
            msg: e.to_string(),
        })?;
        if rec.len() != columns.len() + 1 {
            return Err(DataError::Parse {
                row: row_no,
                col: rec.len(),
                msg: format!("expected {} fields, found {}", columns.len() + 1, rec.len()),
            });
        }
        sample_ids.push(rec.get(0).unwrap_or("").trim().to_string());
        let mut cov_row = Vec::with_capacity(cov_names.len());
        for (j, cell) in rec.iter().skip(1).enumerate() {
            if j == group_idx {
                raw_groups.push(cell.trim().to_string());
            } else {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|_| DataError::NonNumericColumn {
                        name: columns[j].clone(),
                        row: row_no,
                        value: cell.trim().to_string(),
                    })?;
                cov_row.push(v);
            }
        }
        cov_rows.push(cov_row);
    }
    let n = sample_ids.len();
    if n == 0 {
        return Err(DataError::EmptyMatrix {
            rows: 0,
            cols: columns.len(),
        });
    }

    let mut levels: Vec<String> = raw_groups
        .iter()
        .cloned()
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    levels.sort();
    if levels.len() != 2 {
        return Err(DataError::NonBinaryGroup {
            name: group_column.to_string(),
            levels: levels.len(),
        });
    }
    let group: Vec<u8> = raw_groups
        .iter()
        .map(|g| if *g == levels[0] { 1 } else { 2 })
        .collect();
    for (z, level) in [(1u8, &levels[0]), (2u8, &levels[1])] {
        let count = group.iter().filter(|&&g| g == z).count();
        if count < 2 {
            return Err(DataError::SingletonGroup {
                level: level.clone(),
                count,
            });
        }
    }

    let q = cov_names.len();
    let mut cov = DMatrix::zeros(n, q);
    for (i, row) in cov_rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            cov[(i, j)] = v;
        }
    }
    CovariateTable::new(sample_ids, group, cov, cov_names)
}

/// Column-wise copula transform: rank / (n + 1) with average ranks for ties.
/// Every entry lies strictly inside (0, 1) and the transform is invariant
/// under strictly increasing re-expressions of each column.
pub fn copula_transform(expr: &ExpressionMatrix) -> CopulaMatrix {
    let n = expr.n_samples();
    let p = expr.n_genes();
    let mut values = DMatrix::zeros(n, p);
    for j in 0..p {
        let col: Vec<f64> = (0..n).map(|i| expr.values[(i, j)]).collect();
        let ranks = midranks(&col);
        for i in 0..n {
            values[(i, j)] = ranks[i] / (n as f64 + 1.0);
        }
    }
    CopulaMatrix {
        values,
        sample_ids: expr.sample_ids.clone(),
        gene_ids: expr.gene_ids.clone(),
    }
}

/// Average ranks (1-based) with midranks for ties.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the value; midrank = average of 1-based ranks
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn check_unique(ids: &[String]) -> Result<(), DataError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(DataError::DuplicateId { id: id.clone() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn expr_from_rows(rows: &[&[f64]]) -> ExpressionMatrix {
        let n = rows.len();
        let p = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ExpressionMatrix::new(
            DMatrix::from_row_slice(n, p, &flat),
            (0..n).map(|i| format!("s{}", i)).collect(),
            (0..p).map(|j| format!("g{}", j)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn load_small_tsv() {
        let text = "sample\tga\tgb\ns1\t1\t2\ns2\t3\t4\ns3\t5\t6\n";
        let m = read_expression(text.as_bytes(), FileFormat::Tsv).unwrap();
        assert_eq!(m.n_samples(), 3);
        assert_eq!(m.n_genes(), 2);
        assert_eq!(m.values[(0, 0)], 1.0);
        assert_eq!(m.values[(2, 1)], 6.0);
        assert_eq!(m.gene_ids, vec!["ga", "gb"]);
    }

    #[test]
    fn negative_entry_rejected() {
        let text = "sample\tga\tgb\ns1\t1\t-2\ns2\t3\t4\n";
        match read_expression(text.as_bytes(), FileFormat::Tsv) {
            Err(DataError::NegativeValue { value, .. }) => assert_eq!(value, -2.0),
            other => panic!("expected NegativeValue, got {:?}", other),
        }
    }

    #[test]
    fn duplicate_gene_rejected() {
        let text = "sample\tga\tga\ns1\t1\t2\ns2\t3\t4\n";
        match read_expression(text.as_bytes(), FileFormat::Tsv) {
            Err(DataError::DuplicateId { id }) => assert_eq!(id, "ga"),
            other => panic!("expected DuplicateId, got {:?}", other),
        }
    }

    #[test]
    fn missing_cell_rejected() {
        let text = "sample\tga\tgb\ns1\t1\t\ns2\t3\t4\n";
        assert!(matches!(
            read_expression(text.as_bytes(), FileFormat::Tsv),
            Err(DataError::Parse { .. })
        ));
    }

    #[test]
    fn csv_format_supported() {
        let text = "sample,ga,gb\ns1,1,2\ns2,3,4\n";
        let m = read_expression(text.as_bytes(), FileFormat::Csv).unwrap();
        assert_eq!(m.values[(1, 1)], 4.0);
    }

    #[test]
    fn covariates_binary_group_and_age() {
        let text = "sample\tgroup\tage\ns1\ta\t50\ns2\ta\t60\ns3\tb\t55\ns4\tb\t45\n";
        let c = read_covariates(text.as_bytes(), FileFormat::Tsv, "group").unwrap();
        assert_eq!(c.group, vec![1, 1, 2, 2]);
        assert_eq!(c.n_covariates(), 1);
        assert_eq!(c.covariate_names, vec!["age"]);
        assert_eq!(c.group_rows(1), vec![0, 1]);
    }

    #[test]
    fn covariates_three_levels_rejected() {
        let text = "sample\tgroup\ns1\ta\ns2\tb\ns3\tc\ns4\ta\n";
        assert!(matches!(
            read_covariates(text.as_bytes(), FileFormat::Tsv, "group"),
            Err(DataError::NonBinaryGroup { levels: 3, .. })
        ));
    }

    #[test]
    fn covariates_singleton_group_rejected() {
        let text = "sample\tgroup\ns1\ta\ns2\tb\ns3\tb\ns4\tb\n";
        match read_covariates(text.as_bytes(), FileFormat::Tsv, "group") {
            Err(DataError::SingletonGroup { level, count }) => {
                assert_eq!(level, "a");
                assert_eq!(count, 1);
            }
            other => panic!("expected SingletonGroup, got {:?}", other),
        }
    }

    #[test]
    fn covariates_missing_group_column() {
        let text = "sample\tcohort\ns1\ta\ns2\tb\n";
        assert!(matches!(
            read_covariates(text.as_bytes(), FileFormat::Tsv, "group"),
            Err(DataError::MissingColumn { .. })
        ));
    }

    #[test]
    fn covariates_non_numeric_column_rejected() {
        let text = "sample\tgroup\tsex\ns1\ta\tM\ns2\ta\tF\ns3\tb\tM\ns4\tb\tF\n";
        match read_covariates(text.as_bytes(), FileFormat::Tsv, "group") {
            Err(DataError::NonNumericColumn { name, .. }) => assert_eq!(name, "sex"),
            other => panic!("expected NonNumericColumn, got {:?}", other),
        }
    }

    #[test]
    fn copula_simple_column() {
        let m = expr_from_rows(&[&[10.0, 1.0], &[20.0, 1.0], &[30.0, 1.0]]);
        let c = copula_transform(&m);
        assert_relative_eq!(c.values[(0, 0)], 0.25);
        assert_relative_eq!(c.values[(1, 0)], 0.50);
        assert_relative_eq!(c.values[(2, 0)], 0.75);
    }

    #[test]
    fn copula_midranks_for_ties() {
        let m = expr_from_rows(&[&[5.0, 0.0], &[5.0, 1.0], &[9.0, 2.0]]);
        let c = copula_transform(&m);
        assert_relative_eq!(c.values[(0, 0)], 0.375); // midrank 1.5 / 4
        assert_relative_eq!(c.values[(1, 0)], 0.375);
        assert_relative_eq!(c.values[(2, 0)], 0.75);
    }

    #[test]
    fn copula_invariant_under_monotone_transform() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(11);
        let n = 50;
        let p = 4;
        let vals: Vec<f64> = (0..n * p).map(|_| rng.gen_range(0.0..100.0f64)).collect();
        let m1 = ExpressionMatrix::new(
            DMatrix::from_row_slice(n, p, &vals),
            (0..n).map(|i| format!("s{}", i)).collect(),
            (0..p).map(|j| format!("g{}", j)).collect(),
        )
        .unwrap();
        let transformed: Vec<f64> = vals.iter().map(|&x| (1.0 + x).ln()).collect();
        let m2 = ExpressionMatrix::new(
            DMatrix::from_row_slice(n, p, &transformed),
            m1.sample_ids.clone(),
            m1.gene_ids.clone(),
        )
        .unwrap();
        let c1 = copula_transform(&m1);
        let c2 = copula_transform(&m2);
        for i in 0..n {
            for j in 0..p {
                assert_eq!(c1.values[(i, j)].to_bits(), c2.values[(i, j)].to_bits());
            }
        }
        // every entry strictly inside (0,1)
        for v in c1.values.iter() {
            assert!(*v > 0.0 && *v < 1.0);
        }
    }

    #[test]
    fn write_then_reload_is_bit_exact() {
        let m = expr_from_rows(&[
            &[1.0 / 3.0, std::f64::consts::PI],
            &[2.0 / 7.0, 1e-15],
            &[123456.789, 0.0],
        ]);
        let mut buf = Vec::new();
        m.write_tsv(&mut buf).unwrap();
        let back = read_expression(buf.as_slice(), FileFormat::Tsv).unwrap();
        assert_eq!(back.sample_ids, m.sample_ids);
        assert_eq!(back.gene_ids, m.gene_ids);
        for (a, b) in m.values.iter().zip(back.values.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn align_covariates_by_id_not_order() {
        let text = "sample\tgroup\tage\ns3\tb\t55\ns1\ta\t50\ns4\tb\t45\ns2\ta\t60\n";
        let c = read_covariates(text.as_bytes(), FileFormat::Tsv, "group").unwrap();
        let target: Vec<String> = ["s1", "s2", "s3", "s4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let aligned = c.align_to(&target).unwrap();
        assert_eq!(aligned.sample_ids, target);
        assert_eq!(aligned.group, vec![1, 1, 2, 2]);
        assert_eq!(aligned.covariates[(0, 0)], 50.0);
        assert_eq!(aligned.covariates[(2, 0)], 55.0);
    }
}
