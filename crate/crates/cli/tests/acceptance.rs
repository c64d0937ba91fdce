//! Acceptance suite: every release gate runs here, one test per criterion,
//! each printing a PASS/FAIL line (visible with `-- --nocapture`).
//!
//! The statistical criteria run the full simulated benchmark at desk scale
//! (p = 20, 100 replicates); the numeric criteria check the estimators
//! against independent oracles.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use prana_core::bench::{run_benchmark, Aggregates, BenchConfig};
use prana_core::dataio::{copula_transform, ExpressionMatrix};
use prana_core::minet::{
    apply_dpi, estimate_mi_matrix, AssociationMatrix, ConnectivityVector, KernelConfig,
};
use prana_core::pseudo::pseudo_values;
use prana_core::robustfit::{fit_lts, DesignMatrix, LtsConfig, Model};
use prana_core::simgen::{ReferenceDistribution, ScenarioKind};

fn check(name: &str, ok: bool, detail: String) {
    println!(
        "{}: {} ({})",
        name,
        if ok { "PASS" } else { "FAIL" },
        detail
    );
    assert!(ok, "{}: {}", name, detail);
}

fn acceptance_threads() -> usize {
    std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1)
        .min(8)
}

fn scenario_one_reports() -> &'static (Vec<(f64, Aggregates)>, Duration) {
    static REPORTS: OnceLock<(Vec<(f64, Aggregates)>, Duration)> = OnceLock::new();
    REPORTS.get_or_init(|| {
        let reference = ReferenceDistribution::bundled();
        let mut out = Vec::new();
        let mut strongest_elapsed = Duration::ZERO;
        for effect in [0.05, 0.10, 0.20] {
            let mut cfg = BenchConfig::new(ScenarioKind::I, 20, 100, effect);
            cfg.n_replicates = 100;
            cfg.master_seed = 42;
            cfg.parallelism = acceptance_threads();
            let start = Instant::now();
            let report = run_benchmark(&cfg, &reference).expect("benchmark runs");
            if effect == 0.20 {
                strongest_elapsed = start.elapsed();
            }
            out.push((effect, report.aggregates));
        }
        (out, strongest_elapsed)
    })
}

#[test]
fn criterion_1_scenario_one_strong_effect_precision_and_recall() {
    let (reports, elapsed) = scenario_one_reports();
    let agg = &reports.iter().find(|(e, _)| *e == 0.20).unwrap().1;
    let precision = agg.precision_mean.unwrap_or(0.0);
    let recall = agg.recall_mean.unwrap_or(0.0);
    let ok = precision >= 0.90 && recall >= 0.80 && *elapsed <= Duration::from_secs(1800);
    check(
        "criterion 1 (scenario I, effect 20%, p=20, n=100, 100 replicates)",
        ok,
        format!(
            "precision {:.3} >= 0.90, recall {:.3} >= 0.80, runtime {:.1?} <= 30 min",
            precision, recall, elapsed
        ),
    );
}

#[test]
fn criterion_2_effect_size_monotonicity() {
    let (reports, _) = scenario_one_reports();
    let precision_at = |e: f64| {
        reports
            .iter()
            .find(|(eff, _)| *eff == e)
            .unwrap()
            .1
            .precision_mean
            .unwrap_or(0.0)
    };
    let (p05, p10, p20) = (precision_at(0.05), precision_at(0.10), precision_at(0.20));
    let ok = p20 > p10 && p10 > p05;
    check(
        "criterion 2 (precision monotone in effect size)",
        ok,
        format!("{:.3} < {:.3} < {:.3}", p05, p10, p20),
    );
}

#[test]
fn criterion_3_scenario_three_confounding_separation() {
    let reference = ReferenceDistribution::bundled();
    let mut precisions = Vec::new();
    for model in [Model::Multivariable, Model::Univariable] {
        let mut cfg = BenchConfig::new(ScenarioKind::III, 20, 100, 0.0);
        cfg.n_replicates = 100;
        cfg.master_seed = 42;
        cfg.model = model;
        cfg.parallelism = acceptance_threads();
        let report = run_benchmark(&cfg, &reference).expect("benchmark runs");
        precisions.push(report.aggregates.precision_mean.unwrap_or(0.0));
    }
    let separation = precisions[0] - precisions[1];
    check(
        "criterion 3 (scenario III multivariable vs univariable precision)",
        separation >= 0.03,
        format!(
            "multivariable {:.3} - univariable {:.3} = {:+.3} >= 0.03",
            precisions[0], precisions[1], separation
        ),
    );
}

#[test]
fn criterion_4_sample_size_monotonicity() {
    let reference = ReferenceDistribution::bundled();
    let mut recalls = Vec::new();
    for n in [40usize, 100, 200] {
        let mut cfg = BenchConfig::new(ScenarioKind::II, 20, n, 0.10);
        cfg.n_replicates = 100;
        cfg.master_seed = 42;
        cfg.parallelism = acceptance_threads();
        let report = run_benchmark(&cfg, &reference).expect("benchmark runs");
        recalls.push(report.aggregates.recall_mean.unwrap_or(0.0));
    }
    let ok = recalls[0] < recalls[1] && recalls[1] < recalls[2];
    check(
        "criterion 4 (scenario II recall strictly increasing in n)",
        ok,
        format!("{:.3} < {:.3} < {:.3}", recalls[0], recalls[1], recalls[2]),
    );
}

#[test]
fn criterion_5_lts_matches_exhaustive_oracle() {
    let mut rng = prana_core::rng::rng_from(777);
    let total = 200;
    let mut objective_matches = 0;
    let mut coef_mismatch: Option<String> = None;
    for trial in 0..total {
        let n = rng.gen_range(7..=10usize);
        let d = rng.gen_range(2..=3usize);
        let mut values = DMatrix::zeros(n, d);
        for i in 0..n {
            values[(i, 0)] = 1.0;
            for j in 1..d {
                values[(i, j)] = rng.gen_range(-3.0..3.0);
            }
        }
        let design = DesignMatrix {
            values: values.clone(),
            column_names: (0..d).map(|j| format!("c{}", j)).collect(),
        };
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let cfg = LtsConfig {
            trim_c: rng.gen_range(0.5..0.9),
            seed: trial as u64,
            ..LtsConfig::default()
        };
        let h = cfg.h_for(n);
        if h <= d {
            continue;
        }
        let fit = fit_lts(&y, &design, &cfg).expect("fit");
        let yv = DVector::from_column_slice(&y);

        // independent oracle: enumerate all C(n, h) subsets, fit OLS on each
        let (oracle_obj, oracle_coef) = exhaustive_lts(&yv, &values, h);
        let coef = DVector::from_column_slice(&fit.coefficients);
        let fit_obj = lts_objective(&values, &yv, &coef, h);
        if (fit_obj - oracle_obj).abs() <= 1e-9 * (1.0 + oracle_obj) {
            objective_matches += 1;
            for j in 0..d {
                if (fit.coefficients[j] - oracle_coef[j]).abs()
                    > 1e-6 * (1.0 + oracle_coef[j].abs())
                {
                    coef_mismatch.get_or_insert(format!(
                        "trial {}: coef {} = {} vs oracle {}",
                        trial, j, fit.coefficients[j], oracle_coef[j]
                    ));
                }
            }
        }
    }
    let rate = objective_matches as f64 / total as f64;
    let ok = rate >= 0.99 && coef_mismatch.is_none();
    check(
        "criterion 5 (FAST-LTS vs exhaustive subset oracle)",
        ok,
        format!(
            "objective match rate {:.3} >= 0.99; coefficients {}",
            rate,
            coef_mismatch.unwrap_or_else(|| "agree".to_string())
        ),
    );
}

#[test]
fn criterion_6_mi_analytic_check() {
    let cfg = KernelConfig {
        dpi_enabled: false,
        ..KernelConfig::default()
    };
    let mut detail = String::new();
    let mut ok = true;
    for rho in [0.0f64, 0.5, 0.8] {
        let analytic = if rho == 0.0 {
            0.0
        } else {
            -0.5 * (1.0 - rho * rho).ln()
        };
        let mut abs_errors = Vec::new();
        let mut estimates = Vec::new();
        for seed in 0..20u64 {
            let mut rng = prana_core::rng::rng_from(9_000 + seed);
            let n = 1000;
            let mut data = Vec::with_capacity(n * 2);
            for _ in 0..n {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                data.push(z1.exp());
                data.push((rho * z1 + (1.0 - rho * rho).sqrt() * z2).exp());
            }
            let expr = ExpressionMatrix::new(
                DMatrix::from_row_slice(n, 2, &data),
                (0..n).map(|i| format!("s{}", i)).collect(),
                vec!["a".into(), "b".into()],
            )
            .unwrap();
            let est = estimate_mi_matrix(&copula_transform(&expr), &cfg).unwrap();
            let mi = est.matrix.values[(0, 1)];
            estimates.push(mi);
            abs_errors.push((mi - analytic).abs());
        }
        let mean_err = abs_errors.iter().sum::<f64>() / abs_errors.len() as f64;
        let mean_est = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let pass_rho = mean_err <= 0.15 && (rho != 0.0 || mean_est <= 0.05);
        ok &= pass_rho;
        detail.push_str(&format!(
            "rho={}: |err|={:.4}{} ",
            rho,
            mean_err,
            if rho == 0.0 {
                format!(" (mean est {:.4} <= 0.05)", mean_est)
            } else {
                String::new()
            }
        ));
    }
    check(
        "criterion 6 (kernel MI vs analytic Gaussian MI)",
        ok,
        detail,
    );
}

#[test]
fn criterion_7_pseudo_value_identities() {
    let mut rng = prana_core::rng::rng_from(1234);
    let mut max_scaling_err = 0.0f64;
    let mut max_fixed_point_err = 0.0f64;
    for _ in 0..500 {
        let n = rng.gen_range(2..20usize);
        let p = rng.gen_range(1..8usize);
        let theta: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..20.0)).collect();
        let hat = ConnectivityVector {
            values: theta.clone(),
            gene_ids: (0..p).map(|k| format!("g{}", k)).collect(),
        };

        // fixed point: leave-one-out equal to the full estimate
        let loo_fixed = DMatrix::from_fn(n, p, |_, k| theta[k]);
        let pv = pseudo_values(&hat, &loo_fixed).unwrap();
        for i in 0..n {
            for k in 0..p {
                max_fixed_point_err =
                    max_fixed_point_err.max((pv[(i, k)] - theta[k]).abs() / (1.0 + theta[k].abs()));
            }
        }

        // linear scaling by a positive constant
        let loo = DMatrix::from_fn(n, p, |_, _| rng.gen_range(0.0..20.0));
        let c = rng.gen_range(0.1..10.0);
        let pv1 = pseudo_values(&hat, &loo).unwrap();
        let hat_scaled = ConnectivityVector {
            values: theta.iter().map(|v| v * c).collect(),
            gene_ids: hat.gene_ids.clone(),
        };
        let pv2 = pseudo_values(&hat_scaled, &loo.map(|v| v * c)).unwrap();
        for (a, b) in pv1.iter().zip(pv2.iter()) {
            max_scaling_err = max_scaling_err.max((a * c - b).abs() / (1.0 + b.abs()));
        }
    }
    let ok = max_scaling_err <= 1e-10 && max_fixed_point_err <= 1e-10;
    check(
        "criterion 7 (pseudo-value scaling and fixed-point identities)",
        ok,
        format!(
            "max scaling err {:.2e}, max fixed-point err {:.2e} (<= 1e-10)",
            max_scaling_err, max_fixed_point_err
        ),
    );
}

#[test]
fn criterion_8_byte_identical_outputs_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let prana = env!("CARGO_BIN_EXE_prana");
    let run = |args: &[&str]| {
        let out = Command::new(prana)
            .args(args)
            .current_dir(dir.path())
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "command {:?} failed: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    };
    std::fs::write(
        dir.path().join("bench.toml"),
        "scenario = \"II\"\np = 8\nn = 12\neffect = 0.2\nreplicates = 3\n",
    )
    .unwrap();

    let mut ok = true;
    let mut detail = String::new();
    for seed in ["11", "12", "13"] {
        run(&[
            "simulate",
            "--scenario",
            "I",
            "--p",
            "10",
            "--n",
            "16",
            "--effect",
            "0.2",
            "--seed",
            seed,
            "--out-dir",
            &format!("sim{}", seed),
        ]);
        let mut analyze_outputs = Vec::new();
        let mut bench_outputs = Vec::new();
        for threads in ["1", "4", "8"] {
            let out_a = format!("a{}_{}", seed, threads);
            run(&[
                "analyze",
                &format!("sim{}/expression.tsv", seed),
                &format!("sim{}/covariates.tsv", seed),
                "--seed",
                seed,
                "--threads",
                threads,
                "--out-dir",
                &out_a,
            ]);
            analyze_outputs.push((
                std::fs::read(dir.path().join(&out_a).join("results.tsv")).unwrap(),
                std::fs::read(dir.path().join(&out_a).join("pseudo_values.tsv")).unwrap(),
            ));
            let out_b = format!("b{}_{}", seed, threads);
            run(&[
                "bench",
                "--config",
                "bench.toml",
                "--seed",
                seed,
                "--threads",
                threads,
                "--out-dir",
                &out_b,
            ]);
            bench_outputs.push((
                std::fs::read(dir.path().join(&out_b).join("bench_replicates.tsv")).unwrap(),
                std::fs::read(dir.path().join(&out_b).join("bench_summary.tsv")).unwrap(),
            ));
        }
        let analyze_same = analyze_outputs.windows(2).all(|w| w[0] == w[1]);
        let bench_same = bench_outputs.windows(2).all(|w| w[0] == w[1]);
        ok &= analyze_same && bench_same;
        detail.push_str(&format!(
            "seed {}: analyze {} bench {}; ",
            seed,
            if analyze_same { "identical" } else { "DIFFERS" },
            if bench_same { "identical" } else { "DIFFERS" }
        ));
    }
    check(
        "criterion 8 (byte-identical results across threads {1,4,8})",
        ok,
        detail,
    );
}

#[test]
fn criterion_9_dpi_matches_reference_implementation() {
    let mut rng = prana_core::rng::rng_from(31337);
    let mut mismatches = 0;
    for _ in 0..100 {
        let p = rng.gen_range(3..=15usize);
        let mut m = DMatrix::zeros(p, p);
        for j in 0..p {
            for k in (j + 1)..p {
                let v = rng.gen_range(0.0..1.0);
                m[(j, k)] = v;
                m[(k, j)] = v;
            }
        }
        let a = AssociationMatrix::new(m, (0..p).map(|j| format!("g{}", j)).collect());
        let pruned = apply_dpi(&a, 0.0);

        // O(p^3) reference: mark the weakest edge of every triple, zero after
        let mut expect = a.values.clone();
        for j in 0..p {
            for k in 0..p {
                if j == k {
                    continue;
                }
                for l in 0..p {
                    if l == j || l == k {
                        continue;
                    }
                    if a.values[(j, k)] < a.values[(j, l)].min(a.values[(l, k)]) {
                        expect[(j, k)] = 0.0;
                    }
                }
            }
        }
        if pruned.values != expect {
            mismatches += 1;
        }
    }
    check(
        "criterion 9 (DPI vs brute-force triple-loop oracle)",
        mismatches == 0,
        format!("{} mismatches in 100 random matrices", mismatches),
    );
}

fn exhaustive_lts(y: &DVector<f64>, x: &DMatrix<f64>, h: usize) -> (f64, DVector<f64>) {
    let n = x.nrows();
    let d = x.ncols();
    let mut subset: Vec<usize> = (0..h).collect();
    let mut best = (f64::INFINITY, DVector::zeros(d));
    loop {
        if let Some(coef) = ols_subset(x, y, &subset) {
            let obj: f64 = subset
                .iter()
                .map(|&i| {
                    let r = y[i] - x.row(i).transpose().dot(&coef);
                    r * r
                })
                .sum();
            if obj < best.0 {
                best = (obj, coef);
            }
        }
        if !advance(&mut subset, n) {
            break;
        }
    }
    best
}

fn lts_objective(x: &DMatrix<f64>, y: &DVector<f64>, coef: &DVector<f64>, h: usize) -> f64 {
    let mut r2: Vec<f64> = (0..x.nrows())
        .map(|i| {
            let r = y[i] - x.row(i).transpose().dot(coef);
            r * r
        })
        .collect();
    r2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r2[..h].iter().sum()
}

fn ols_subset(x: &DMatrix<f64>, y: &DVector<f64>, subset: &[usize]) -> Option<DVector<f64>> {
    let d = x.ncols();
    let mut xtx = DMatrix::zeros(d, d);
    let mut xty = DVector::zeros(d);
    for &i in subset {
        let row = x.row(i);
        for a in 0..d {
            for b in 0..d {
                xtx[(a, b)] += row[a] * row[b];
            }
            xty[a] += row[a] * y[i];
        }
    }
    nalgebra::Cholesky::new(xtx).map(|c| c.solve(&xty))
}

fn advance(subset: &mut [usize], n: usize) -> bool {
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
