//! Shared fixtures for the criterion benchmarks.

use prana_core::dataio::{CovariateTable, ExpressionMatrix};
use prana_core::simgen::{build_scenario, sample_expression, ReferenceDistribution, ScenarioKind};

/// A deterministic simulated dataset for benchmarking.
pub fn simulated_dataset(p: usize, n: usize, seed: u64) -> (ExpressionMatrix, CovariateTable) {
    let scn = build_scenario(ScenarioKind::I, p, 0.10, seed).expect("scenario");
    let reference = ReferenceDistribution::bundled();
    sample_expression(&scn, n, &reference, seed ^ 0xbeef).expect("sampling")
}
