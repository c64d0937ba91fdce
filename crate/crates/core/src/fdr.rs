//! Multiple-testing adjustment and differential-connectivity calls.
//!
//! The default adjustment is the Benjamini-Hochberg step-up procedure. An
//! opt-in empirical-Bayes-style local false discovery rate (`ebs_approx`) is
//! provided as well: p-values are probit-transformed, the marginal density of
//! the transformed scores is estimated by a Gaussian kernel, and the adjusted
//! value is the monotonized ratio of the scaled null density to the marginal.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::FdrError;
use crate::robustfit::GeneFit;
use crate::tsv;

/// Adjustment method for differential-connectivity calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdrMethod {
    Bh,
    EbsApprox,
}

impl FdrMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            FdrMethod::Bh => "bh",
            FdrMethod::EbsApprox => "ebs_approx",
        }
    }

    pub fn parse(s: &str) -> Option<FdrMethod> {
        match s {
            "bh" => Some(FdrMethod::Bh),
            "ebs_approx" | "ebs-approx" => Some(FdrMethod::EbsApprox),
            _ => None,
        }
    }
}

/// Per-gene differential-connectivity decision table.
#[derive(Debug, Clone)]
pub struct DnResultTable {
    pub gene_ids: Vec<String>,
    pub beta_hat: Vec<f64>,
    pub p_raw: Vec<f64>,
    pub p_adjusted: Vec<f64>,
    pub is_dc: Vec<bool>,
    pub method: FdrMethod,
    pub alpha: f64,
}

impl DnResultTable {
    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn n_called(&self) -> usize {
        self.is_dc.iter().filter(|&&c| c).count()
    }
}

/// Benjamini-Hochberg step-up adjustment: sort ascending, take running
/// minima of `m * p / rank` from the largest rank down, clip at 1, and map
/// back to the input order.
pub fn adjust_bh(p: &[f64]) -> Result<Vec<f64>, FdrError> {
    validate(p)?;
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).unwrap().then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running_min = 1.0f64;
    for rank in (1..=m).rev() {
        let idx = order[rank - 1];
        let candidate = p[idx] * m as f64 / rank as f64;
        running_min = running_min.min(candidate);
        // the max() guards the adjusted >= raw invariant against rounding
        adjusted[idx] = running_min.min(1.0).max(p[idx]);
    }
    Ok(adjusted)
}

/// Local-fdr-style approximation: probit scores s = Phi^-1(1 - p), null
/// proportion estimated as min(1, 2 * mean(p >= 0.5)), marginal density of s
/// by Gaussian kernel (Silverman bandwidth on the probit scale), adjusted
/// value min(1, pi0 * phi(s) / fhat(s)), monotonized to be non-increasing
/// in s. Zero p-values are clamped to the smallest positive double.
pub fn adjust_ebs_approx(p: &[f64], bandwidth: Option<f64>) -> Result<Vec<f64>, FdrError> {
    validate(p)?;
    let m = p.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let scores: Vec<f64> = p
        .iter()
        .map(|&pv| {
            let clamped = pv.max(f64::MIN_POSITIVE);
            let u = (1.0 - clamped).clamp(1e-16, 1.0 - 1e-16);
            normal.inverse_cdf(u)
        })
        .collect();
    let pi0 = (2.0 * p.iter().filter(|&&v| v >= 0.5).count() as f64 / m as f64).min(1.0);

    let h = bandwidth.unwrap_or_else(|| {
        let h = crate::minet::silverman_bandwidth(&scores);
        if h.is_finite() && h > 0.0 {
            h
        } else {
            1.0
        }
    });
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h);
    let fhat: Vec<f64> = scores
        .iter()
        .map(|&s| {
            let mut acc = 0.0;
            for &sm in &scores {
                let d = (s - sm) / h;
                acc += (-0.5 * d * d).exp();
            }
            acc * norm / m as f64
        })
        .collect();
    let phi = |s: f64| (-0.5 * s * s).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let lfdr: Vec<f64> = scores
        .iter()
        .zip(fhat.iter())
        .map(|(&s, &f)| (pi0 * phi(s) / f).min(1.0))
        .collect();

    // monotonize: larger s (stronger evidence) never gets a larger value
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running_max = f64::NEG_INFINITY;
    for &idx in order.iter().rev() {
        running_max = running_max.max(lfdr[idx]);
        adjusted[idx] = running_max;
    }
    Ok(adjusted)
}

/// Build the decision table from per-gene fits at error level `alpha`.
pub fn call_dc(fits: &[GeneFit], method: FdrMethod, alpha: f64) -> Result<DnResultTable, FdrError> {
    let p_raw: Vec<f64> = fits.iter().map(|f| f.p_value).collect();
    let p_adjusted = match method {
        FdrMethod::Bh => adjust_bh(&p_raw)?,
        FdrMethod::EbsApprox => adjust_ebs_approx(&p_raw, None)?,
    };
    let is_dc: Vec<bool> = p_adjusted.iter().map(|&q| q < alpha).collect();
    Ok(DnResultTable {
        gene_ids: fits.iter().map(|f| f.gene_id.clone()).collect(),
        beta_hat: fits.iter().map(|f| f.beta_hat).collect(),
        p_raw,
        p_adjusted,
        is_dc,
        method,
        alpha,
    })
}

/// TSV serialization with a leading metadata comment line.
pub fn write_dn_table<W: std::io::Write>(
    w: &mut W,
    table: &DnResultTable,
    fits: &[GeneFit],
    column_names: &[String],
    model: &str,
) -> std::io::Result<()> {
    writeln!(
        w,
        "#method={}\talpha={}\tmodel={}",
        table.method.as_str(),
        tsv::fmt_f64(table.alpha),
        model
    )?;
    let mut header = vec![
        "gene".to_string(),
        "beta".to_string(),
        "se".to_string(),
        "t".to_string(),
        "p".to_string(),
        "p_adj".to_string(),
        "is_dc".to_string(),
    ];
    for name in column_names {
        header.push(format!("coef_{}", name));
    }
    tsv::write_row(w, &header)?;
    for (i, fit) in fits.iter().enumerate() {
        let mut row = vec![
            fit.gene_id.clone(),
            tsv::fmt_f64(fit.beta_hat),
            tsv::fmt_f64(fit.se_beta),
            tsv::fmt_f64(fit.t_stat),
            tsv::fmt_f64(fit.p_value),
            tsv::fmt_f64(table.p_adjusted[i]),
            (table.is_dc[i] as u8).to_string(),
        ];
        for c in &fit.coefficients {
            row.push(tsv::fmt_f64(*c));
        }
        tsv::write_row(w, &row)?;
    }
    Ok(())
}

fn validate(p: &[f64]) -> Result<(), FdrError> {
    for (index, &value) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) || value.is_nan() {
            return Err(FdrError::OutOfRange { index, value });
        }
    }
    Ok(())
}
