//! Differential network analysis via pseudo-value regression.
//!
//! The pipeline estimates per-gene total connectivity from mutual-information
//! networks, converts the group-wise estimates into jackknife pseudo-values,
//! and fits a covariate-adjusted robust regression per gene to test whether
//! network connectivity differs between two groups.
//!
//! Modules follow the stages of the pipeline:
//!
//! - [`dataio`]: expression/covariate ingestion and the copula (rank) transform
//! - [`minet`]: Gaussian-kernel mutual information, DPI pruning, connectivity
//! - [`pseudo`]: group-wise leave-one-out jackknife pseudo-values
//! - [`robustfit`]: per-gene least-trimmed-squares regression and t-tests
//! - [`fdr`]: multiple-testing adjustment and differential-connectivity calls
//! - [`simgen`]: synthetic weighted networks and RNA-Seq-like count data
//! - [`pipeline`]: end-to-end analysis binding the stages together
//! - [`bench`]: Monte Carlo benchmark harness (precision / recall / F1)

pub mod bench;
pub mod dataio;
pub mod error;
pub mod fdr;
pub mod minet;
pub mod pipeline;
pub mod pseudo;
pub mod rng;
pub mod robustfit;
pub mod simgen;
pub mod tsv;

pub use bench::{BenchConfig, BenchReport};
pub use dataio::{CopulaMatrix, CovariateTable, ExpressionMatrix};
pub use error::PranaError;
pub use fdr::{DnResultTable, FdrMethod};
pub use minet::{AssociationMatrix, ConnectivityVector, KernelConfig};
pub use pipeline::{AnalysisOptions, AnalysisResult};
pub use pseudo::PseudoValueMatrix;
pub use robustfit::{GeneFit, LtsConfig, Model};
pub use simgen::{ReferenceDistribution, ScenarioKind, SimScenario, TrueNetwork};
