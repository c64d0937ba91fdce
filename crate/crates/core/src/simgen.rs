//! Synthetic weighted networks and RNA-Seq-like expression data for the three
//! benchmark scenarios.
//!
//! Networks are hub-and-spoke modules: genes are split into modules of about
//! four, the first gene of each module is its hub and every other member
//! connects to it. Edge partial correlations are drawn uniformly from
//! +-[0.5, 0.8] and scaled per node so the incident sum of squares stays
//! below a cap that keeps the unit-diagonal precision matrix positive
//! definite; a global 0.9 shrink loop backstops the cap. This gives strong
//! within-module marginal correlation, no dependence across modules, and
//! well-defined hubs whose removal disconnects their whole module.
//!
//! Scenario I perturbs group 2 by wiping the top hubs (the effect size sets
//! how many). Scenario II additionally wipes one further node per age
//! category, cumulatively, in both groups. Scenario III holds an age-driven
//! chain of networks (two more hubs wiped per category), gives the groups
//! opposite age sampling proportions, and adds a persistent group effect by
//! additionally wiping the next two ranked nodes in every group-2 cell.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::dataio::{CovariateTable, ExpressionMatrix};
use crate::error::SimError;
use crate::rng::rng_from;

/// Target module size for network generation.
const MODULE_TARGET: usize = 4;
/// Per-node cap on the sum of squared incident partial correlations.
const NODE_CAP: f64 = 0.90;
/// Edge partial correlation magnitudes are drawn from this range.
const WEIGHT_RANGE: (f64, f64) = (0.5, 0.8);
/// Minimum eigenvalue demanded of the precision matrix.
const PD_MARGIN: f64 = 1e-4;
const SHRINK_FACTOR: f64 = 0.9;
const SHRINK_MAX_TRIES: usize = 50;

/// Age bands for the three categories: <50, 50-60, >60 (outer limits 35/80).
pub const AGE_BANDS: [(f64, f64); 3] = [(35.0, 50.0), (50.0, 60.0), (60.0, 80.0)];

/// A weighted undirected network: 0/1 adjacency plus partial-correlation
/// weights supported exactly on the edges. The implied unit-diagonal
/// precision matrix is validated positive definite at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueNetwork {
    pub adjacency: DMatrix<u8>,
    pub weights: DMatrix<f64>,
}

impl TrueNetwork {
    pub fn new(adjacency: DMatrix<u8>, weights: DMatrix<f64>) -> Result<Self, SimError> {
        let p = adjacency.nrows();
        if adjacency.ncols() != p || weights.nrows() != p || weights.ncols() != p {
            return Err(SimError::BadScenario {
                msg: "adjacency and weights must be square and same size".to_string(),
            });
        }
        for j in 0..p {
            if adjacency[(j, j)] != 0 || weights[(j, j)] != 0.0 {
                return Err(SimError::BadScenario {
                    msg: format!("diagonal entry at {} must be zero", j),
                });
            }
            for k in 0..p {
                if adjacency[(j, k)] != adjacency[(k, j)] || weights[(j, k)] != weights[(k, j)] {
                    return Err(SimError::BadScenario {
                        msg: format!("asymmetry at ({}, {})", j, k),
                    });
                }
                if (adjacency[(j, k)] == 0) != (weights[(j, k)] == 0.0) {
                    return Err(SimError::BadScenario {
                        msg: format!("weight support mismatch at ({}, {})", j, k),
                    });
                }
            }
        }
        let net = TrueNetwork { adjacency, weights };
        net.validate_pd()?;
        Ok(net)
    }

    pub fn n_genes(&self) -> usize {
        self.adjacency.nrows()
    }

    pub fn degree(&self, node: usize) -> usize {
        (0..self.n_genes())
            .map(|j| self.adjacency[(j, node)] as usize)
            .sum()
    }

    pub fn n_edges(&self) -> usize {
        let mut count = 0;
        for j in 0..self.n_genes() {
            for k in (j + 1)..self.n_genes() {
                count += self.adjacency[(j, k)] as usize;
            }
        }
        count
    }

    /// Unit-diagonal precision matrix `I - W`.
    pub fn precision(&self) -> DMatrix<f64> {
        let p = self.n_genes();
        DMatrix::from_fn(
            p,
            p,
            |j, k| {
                if j == k {
                    1.0
                } else {
                    -self.weights[(j, k)]
                }
            },
        )
    }

    /// Implied correlation matrix: normalize `precision^-1` to unit diagonal.
    pub fn correlation(&self) -> DMatrix<f64> {
        let p = self.n_genes();
        let sigma = self
            .precision()
            .try_inverse()
            .expect("validated precision is invertible");
        let d: Vec<f64> = (0..p).map(|j| sigma[(j, j)].sqrt()).collect();
        let mut corr = DMatrix::zeros(p, p);
        for j in 0..p {
            for k in 0..p {
                corr[(j, k)] = sigma[(j, k)] / (d[j] * d[k]);
            }
        }
        // exact symmetry for the Cholesky downstream
        for j in 0..p {
            corr[(j, j)] = 1.0;
            for k in (j + 1)..p {
                let v = 0.5 * (corr[(j, k)] + corr[(k, j)]);
                corr[(j, k)] = v;
                corr[(k, j)] = v;
            }
        }
        corr
    }

    /// Both the precision and the implied covariance must be comfortably
    /// positive definite (minimum eigenvalue > 1e-8).
    fn validate_pd(&self) -> Result<(), SimError> {
        let eig = SymmetricEigen::new(self.precision());
        let min = eig.eigenvalues.min();
        let max = eig.eigenvalues.max();
        if min.is_nan() || min <= 1e-8 || 1.0 / max <= 1e-8 {
            return Err(SimError::PdRepairFailure {
                attempts: SHRINK_MAX_TRIES,
            });
        }
        Ok(())
    }

    /// Square TSV of the adjacency matrix.
    pub fn write_adjacency_tsv<W: std::io::Write>(
        &self,
        w: &mut W,
        gene_ids: &[String],
    ) -> std::io::Result<()> {
        let mut header = vec![String::new()];
        header.extend(gene_ids.iter().cloned());
        crate::tsv::write_row(w, &header)?;
        for (j, gene) in gene_ids.iter().enumerate().take(self.n_genes()) {
            let mut row = vec![gene.clone()];
            for k in 0..self.n_genes() {
                row.push(self.adjacency[(j, k)].to_string());
            }
            crate::tsv::write_row(w, &row)?;
        }
        Ok(())
    }
}

/// Scenario family: group-only effect (I), group and age effects (II), or
/// age-confounded sampling with a persistent group effect (III).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScenarioKind {
    I,
    II,
    III,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::I => "I",
            ScenarioKind::II => "II",
            ScenarioKind::III => "III",
        }
    }

    pub fn parse(s: &str) -> Option<ScenarioKind> {
        match s.trim() {
            "I" | "i" | "1" => Some(ScenarioKind::I),
            "II" | "ii" | "2" => Some(ScenarioKind::II),
            "III" | "iii" | "3" => Some(ScenarioKind::III),
            _ => None,
        }
    }
}

/// A fully specified generative scenario: one true network per
/// (group, age category) cell plus per-group age sampling proportions.
#[derive(Debug, Clone)]
pub struct SimScenario {
    pub kind: ScenarioKind,
    pub p: usize,
    pub effect_size: f64,
    pub cell_networks: BTreeMap<(u8, u8), TrueNetwork>,
    /// sampling_proportions[z - 1] are the three age-category probabilities
    /// for group z; each triple sums to 1.
    pub sampling_proportions: [[f64; 3]; 2],
    pub seed: u64,
}

impl SimScenario {
    pub fn network(&self, group: u8, age_cat: u8) -> &TrueNetwork {
        &self.cell_networks[&(group, age_cat)]
    }

    pub fn gene_ids(&self) -> Vec<String> {
        (0..self.p).map(|j| format!("g{:04}", j + 1)).collect()
    }
}

/// Empirical reference distributions: one sorted count vector per gene.
#[derive(Debug, Clone)]
pub struct ReferenceDistribution {
    supports: Vec<Vec<f64>>,
}

impl ReferenceDistribution {
    /// The reference bundled with the crate (200 observations x 120 genes of
    /// negative-binomial-like counts).
    pub fn bundled() -> ReferenceDistribution {
        static RAW: &str = include_str!("../data/reference_counts.tsv");
        Self::from_tsv(RAW.as_bytes()).expect("bundled reference is valid")
    }

    /// Parse a TSV whose columns are per-gene count vectors (header row of
    /// gene names, one observation per data row). Columns are sorted and
    /// validated: nonnegative, at least 30 values.
    pub fn from_tsv<R: std::io::Read>(reader: R) -> Result<ReferenceDistribution, SimError> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(true)
            .from_reader(reader);
        let p = rdr.headers().map(|h| h.len()).unwrap_or(0);
        let mut supports: Vec<Vec<f64>> = vec![Vec::new(); p];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| SimError::BadReference {
                col: 0,
                msg: e.to_string(),
            })?;
            for (j, support) in supports.iter_mut().enumerate() {
                let cell = rec.get(j).unwrap_or("");
                let v: f64 = cell.trim().parse().map_err(|_| SimError::BadReference {
                    col: j + 1,
                    msg: format!("non-numeric count {:?}", cell),
                })?;
                if v < 0.0 {
                    return Err(SimError::BadReference {
                        col: j + 1,
                        msg: format!("negative count {}", v),
                    });
                }
                support.push(v);
            }
        }
        for (j, s) in supports.iter_mut().enumerate() {
            if s.len() < 30 {
                return Err(SimError::BadReference {
                    col: j + 1,
                    msg: format!("only {} observations, need at least 30", s.len()),
                });
            }
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        Ok(ReferenceDistribution { supports })
    }

    pub fn n_genes(&self) -> usize {
        self.supports.len()
    }

    pub fn support(&self, gene: usize) -> &[f64] {
        &self.supports[gene]
    }

    /// Inverse empirical CDF: the smallest support value whose CDF reaches u.
    pub fn quantile(&self, gene: usize, u: f64) -> f64 {
        let s = &self.supports[gene];
        let m = s.len();
        let idx = ((u * m as f64).ceil() as isize - 1).clamp(0, m as isize - 1) as usize;
        s[idx]
    }
}

/// Generate the base random network: hub-and-spoke modules with per-node
/// capped edge weights. Deterministic per seed.
pub fn generate_base_network(p: usize, seed: u64) -> Result<TrueNetwork, SimError> {
    if p < 5 {
        return Err(SimError::BadScenario {
            msg: format!("need at least 5 genes, got {}", p),
        });
    }
    let mut rng = rng_from(seed);

    // module boundaries: k = round(p / target) contiguous blocks
    let k = ((p as f64 / MODULE_TARGET as f64).round() as usize).max(1);
    let bounds: Vec<usize> = (0..=k).map(|b| b * p / k).collect();
    let mut adjacency = DMatrix::zeros(p, p);
    for b in 0..k {
        let hub = bounds[b];
        for v in (bounds[b] + 1)..bounds[b + 1] {
            adjacency[(hub, v)] = 1u8;
            adjacency[(v, hub)] = 1u8;
        }
    }

    // draw signed edge weights in upper-triangle order
    let mut weights = DMatrix::zeros(p, p);
    for j in 0..p {
        for kk in (j + 1)..p {
            if adjacency[(j, kk)] == 1 {
                let magnitude = rng.gen_range(WEIGHT_RANGE.0..WEIGHT_RANGE.1);
                let sign = if rng.gen_range(0.0..1.0f64) < 0.5 {
                    1.0
                } else {
                    -1.0
                };
                weights[(j, kk)] = sign * magnitude;
                weights[(kk, j)] = sign * magnitude;
            }
        }
    }

    // per-node cap on the incident sum of squares keeps each hub block
    // positive definite without washing out the edge strengths
    let row_ss: Vec<f64> = (0..p)
        .map(|j| (0..p).map(|m| weights[(j, m)] * weights[(j, m)]).sum())
        .collect();
    for j in 0..p {
        for kk in (j + 1)..p {
            if adjacency[(j, kk)] == 1 {
                let s = row_ss[j].max(row_ss[kk]).max(NODE_CAP);
                let scale = (NODE_CAP / s).sqrt();
                weights[(j, kk)] *= scale;
                weights[(kk, j)] = weights[(j, kk)];
            }
        }
    }

    // global shrink backstop
    let mut attempts = 0;
    loop {
        let precision = DMatrix::from_fn(p, p, |j, m| if j == m { 1.0 } else { -weights[(j, m)] });
        let eig = SymmetricEigen::new(precision);
        if eig.eigenvalues.min() > PD_MARGIN {
            break;
        }
        if attempts >= SHRINK_MAX_TRIES {
            return Err(SimError::PdRepairFailure { attempts });
        }
        weights *= SHRINK_FACTOR;
        attempts += 1;
    }

    TrueNetwork::new(adjacency, weights)
}

/// Remove every edge incident to the `k_hubs` highest-degree nodes of the
/// given network (ties broken by lowest node index).
pub fn perturb_remove_hubs(net: &TrueNetwork, k_hubs: usize) -> TrueNetwork {
    let ranking = degree_ranking(net);
    let hubs: Vec<usize> = ranking.into_iter().take(k_hubs).collect();
    remove_node_edges(net, &hubs)
}

/// Remove every edge incident to the given nodes.
pub fn remove_node_edges(net: &TrueNetwork, nodes: &[usize]) -> TrueNetwork {
    let mut adjacency = net.adjacency.clone();
    let mut weights = net.weights.clone();
    let p = net.n_genes();
    for &v in nodes {
        for j in 0..p {
            adjacency[(v, j)] = 0;
            adjacency[(j, v)] = 0;
            weights[(v, j)] = 0.0;
            weights[(j, v)] = 0.0;
        }
    }
    TrueNetwork::new(adjacency, weights)
        .expect("removing all edges of a node preserves positive definiteness")
}

/// Node indices sorted by degree descending, ties by lowest index.
pub fn degree_ranking(net: &TrueNetwork) -> Vec<usize> {
    let p = net.n_genes();
    let mut nodes: Vec<usize> = (0..p).collect();
    nodes.sort_by_key(|&v| (std::cmp::Reverse(net.degree(v)), v));
    nodes
}

/// Number of hubs wiped by an effect size: round(effect * p), at least 1.
pub fn hubs_for_effect(effect: f64, p: usize) -> usize {
    ((effect * p as f64).round() as usize).max(1).min(p - 1)
}

/// Build a scenario's cell networks from one base network draw.
pub fn build_scenario(
    kind: ScenarioKind,
    p: usize,
    effect_size: f64,
    seed: u64,
) -> Result<SimScenario, SimError> {
    if p < 8 {
        return Err(SimError::BadScenario {
            msg: format!("scenarios need at least 8 genes, got {}", p),
        });
    }
    match kind {
        ScenarioKind::I | ScenarioKind::II => {
            if ![0.05, 0.10, 0.20].contains(&effect_size) {
                // any positive effect is allowed, the canonical grid is just documented
                if !(effect_size > 0.0 && effect_size < 1.0) {
                    return Err(SimError::BadScenario {
                        msg: format!("effect size {} outside (0, 1)", effect_size),
                    });
                }
            }
        }
        ScenarioKind::III => {}
    }
    let base = generate_base_network(p, seed)?;
    let ranking = degree_ranking(&base);
    let mut cells = BTreeMap::new();
    let proportions = match kind {
        ScenarioKind::I => {
            let k = hubs_for_effect(effect_size, p);
            let perturbed = remove_node_edges(&base, &ranking[..k]);
            for c in 1..=3u8 {
                cells.insert((1, c), base.clone());
                cells.insert((2, c), perturbed.clone());
            }
            [[1.0 / 3.0; 3]; 2]
        }
        ScenarioKind::II => {
            let k = hubs_for_effect(effect_size, p);
            if k + 2 > p {
                return Err(SimError::BadScenario {
                    msg: format!(
                        "effect {} leaves no nodes for the age perturbation",
                        effect_size
                    ),
                });
            }
            let perturbed = remove_node_edges(&base, &ranking[..k]);
            // age effect: one more ranked node per category, cumulative,
            // applied identically in both groups
            let extra1 = ranking[k];
            let extra2 = ranking[k + 1];
            for (z, start) in [(1u8, &base), (2u8, &perturbed)] {
                cells.insert((z, 1), start.clone());
                cells.insert((z, 2), remove_node_edges(start, &[extra1]));
                cells.insert((z, 3), remove_node_edges(start, &[extra1, extra2]));
            }
            [[1.0 / 3.0; 3]; 2]
        }
        ScenarioKind::III => {
            // age chain shared by both groups: two more hubs per category
            let n1 = base.clone();
            let n2 = remove_node_edges(&base, &ranking[..2]);
            let n3 = remove_node_edges(&n2, &ranking[2..4]);
            // persistent group effect: the next two ranked nodes lose their
            // edges in every group-2 cell
            let group_effect: Vec<usize> = ranking[4..6].to_vec();
            for (c, net) in [(1u8, &n1), (2u8, &n2), (3u8, &n3)] {
                cells.insert((1, c), net.clone());
                cells.insert((2, c), remove_node_edges(net, &group_effect));
            }
            [[0.10, 0.10, 0.80], [0.80, 0.10, 0.10]]
        }
    };
    Ok(SimScenario {
        kind,
        p,
        effect_size,
        cell_networks: cells,
        sampling_proportions: proportions,
        seed,
    })
}

/// Draw an expression matrix and covariate table from a scenario.
///
/// Samples split into two balanced groups; each sample draws an age category
/// from its group's proportions, an age uniform within the category band,
/// and a Gaussian vector from its cell network's correlation matrix, mapped
/// per gene through the reference inverse empirical CDF.
pub fn sample_expression(
    scn: &SimScenario,
    n: usize,
    reference: &ReferenceDistribution,
    seed: u64,
) -> Result<(ExpressionMatrix, CovariateTable), SimError> {
    if n < 8 {
        return Err(SimError::BadScenario {
            msg: format!("need at least 8 samples, got {}", n),
        });
    }
    if reference.n_genes() < scn.p {
        return Err(SimError::RefTooSmall {
            have: reference.n_genes(),
            need: scn.p,
        });
    }
    let p = scn.p;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut cholesky: BTreeMap<(u8, u8), Cholesky<f64, nalgebra::Dyn>> = BTreeMap::new();
    for (&cell, net) in &scn.cell_networks {
        let corr = net.correlation();
        let chol = Cholesky::new(corr).ok_or(SimError::PdRepairFailure {
            attempts: SHRINK_MAX_TRIES,
        })?;
        cholesky.insert(cell, chol);
    }

    let n1 = n - n / 2;
    let mut rng = rng_from(seed);
    let mut values = DMatrix::zeros(n, p);
    let mut group = Vec::with_capacity(n);
    let mut ages = Vec::with_capacity(n);
    let mut z_buf = DVector::zeros(p);
    for i in 0..n {
        let z: u8 = if i < n1 { 1 } else { 2 };
        let props = &scn.sampling_proportions[(z - 1) as usize];
        let u: f64 = rng.gen_range(0.0..1.0);
        let cat: u8 = if u < props[0] {
            1
        } else if u < props[0] + props[1] {
            2
        } else {
            3
        };
        let (lo, hi) = AGE_BANDS[(cat - 1) as usize];
        let age = rng.gen_range(lo..hi);
        for j in 0..p {
            z_buf[j] = StandardNormal.sample(&mut rng);
        }
        let x = cholesky[&(z, cat)].l() * &z_buf;
        for j in 0..p {
            let u = normal.cdf(x[j]);
            values[(i, j)] = reference.quantile(j, u);
        }
        group.push(z);
        ages.push(age);
    }

    let sample_ids: Vec<String> = (0..n).map(|i| format!("s{:05}", i + 1)).collect();
    let expr = ExpressionMatrix::new(values, sample_ids.clone(), scn.gene_ids())
        .map_err(|e| SimError::BadScenario { msg: e.to_string() })?;
    let cov = CovariateTable::new(
        sample_ids,
        group,
        DMatrix::from_column_slice(n, 1, &ages),
        vec!["age".to_string()],
    )
    .map_err(|e| SimError::BadScenario { msg: e.to_string() })?;
    Ok((expr, cov))
}

/// True differential-connectivity labels.
///
/// Scenario I compares the two groups' adjacency matrices directly:
/// `eta_k = 1(sum_j |A1_jk - A2_jk| >= 1)`. Scenarios II and III average the
/// per-category differences over the three age categories before applying
/// the same threshold.
pub fn true_dc_labels(scn: &SimScenario) -> Vec<u8> {
    let p = scn.p;
    match scn.kind {
        ScenarioKind::I => {
            let a1 = &scn.network(1, 1).adjacency;
            let a2 = &scn.network(2, 1).adjacency;
            (0..p)
                .map(|k| {
                    let diff: i32 = (0..p)
                        .map(|j| (a1[(j, k)] as i32 - a2[(j, k)] as i32).abs())
                        .sum();
                    (diff >= 1) as u8
                })
                .collect()
        }
        ScenarioKind::II | ScenarioKind::III => (0..p)
            .map(|k| {
                let mut total = 0.0;
                for c in 1..=3u8 {
                    let a1 = &scn.network(1, c).adjacency;
                    let a2 = &scn.network(2, c).adjacency;
                    let diff: i32 = (0..p)
                        .map(|j| (a1[(j, k)] as i32 - a2[(j, k)] as i32).abs())
                        .sum();
                    total += diff as f64;
                }
                (total / 3.0 >= 1.0) as u8
            })
            .collect(),
    }
}

/// Write truth labels as a two-column TSV.
pub fn write_truth_tsv<W: std::io::Write>(
    w: &mut W,
    gene_ids: &[String],
    labels: &[u8],
) -> std::io::Result<()> {
    crate::tsv::write_row(w, &["gene".to_string(), "is_dc_true".to_string()])?;
    for (id, &l) in gene_ids.iter().zip(labels.iter()) {
        crate::tsv::write_row(w, &[id.clone(), l.to_string()])?;
    }
    Ok(())
}

/// Density of the standard normal (used by tests and the EBS adjustment).
pub fn std_normal_pdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().pdf(x)
}

/// Check that a sampling-proportion triple is nonnegative and sums to 1.
pub fn validate_proportions(triple: &[f64; 3]) -> Result<(), SimError> {
    if triple.iter().any(|&v| v < 0.0) || (triple.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(SimError::BadScenario {
            msg: format!("proportions {:?} must be nonnegative and sum to 1", triple),
        });
    }
    Ok(())
}
